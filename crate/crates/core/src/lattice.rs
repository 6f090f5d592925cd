//! Finite periodic lattices, Pauli operators on them, and instantiated generators.

use serde::{Deserialize, Serialize};

use crate::code::{CodeDefinition, GeneratorRecipe, Letter, PauliTerm};
use crate::gf2::{BitMatrix, BitVector, SymplecticVector};
use crate::Error;

/// A torus of `lx × ly` sites with `qubits_per_site` qubits each. Qubit
/// `(x, y, k)` has index `(x·ly + y)·q + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusLattice {
    pub lx: usize,
    pub ly: usize,
    pub qubits_per_site: usize,
}

impl TorusLattice {
    pub fn new(lx: usize, ly: usize, qubits_per_site: usize) -> Self {
        assert!(lx >= 1 && ly >= 1, "torus must have at least one site per axis");
        TorusLattice { lx, ly, qubits_per_site }
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn n_qubits(&self) -> usize {
        self.lx * self.ly * self.qubits_per_site
    }

    pub fn wrap(&self, x: i64, y: i64) -> (usize, usize) {
        (x.rem_euclid(self.lx as i64) as usize, y.rem_euclid(self.ly as i64) as usize)
    }

    pub fn site_index(&self, x: usize, y: usize) -> usize {
        x * self.ly + y
    }

    pub fn site_of_index(&self, s: usize) -> (usize, usize) {
        (s / self.ly, s % self.ly)
    }

    pub fn qubit_index(&self, x: i64, y: i64, k: usize) -> usize {
        let (x, y) = self.wrap(x, y);
        self.site_index(x, y) * self.qubits_per_site + k
    }

    /// (x, y, k) of a qubit index.
    pub fn qubit_position(&self, idx: usize) -> (usize, usize, usize) {
        let q = self.qubits_per_site;
        let (x, y) = self.site_of_index(idx / q);
        (x, y, idx % q)
    }

    /// Index of qubit `idx` after translating by `(dx, dy)`.
    pub fn translate_index(&self, idx: usize, dx: i64, dy: i64) -> usize {
        let (x, y, k) = self.qubit_position(idx);
        self.qubit_index(x as i64 + dx, y as i64 + dy, k)
    }

    /// Shortest periodic L¹ distance between two sites.
    pub fn torus_distance(&self, a: (usize, usize), b: (usize, usize)) -> usize {
        let d = |u: usize, v: usize, l: usize| {
            let t = u.abs_diff(v);
            t.min(l - t)
        };
        d(a.0, b.0, self.lx) + d(a.1, b.1, self.ly)
    }
}

/// A projective Pauli operator on a torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePauli {
    pub lattice: TorusLattice,
    pub vec: SymplecticVector,
}

impl LatticePauli {
    pub fn identity(lattice: TorusLattice) -> Self {
        LatticePauli { lattice, vec: SymplecticVector::identity(lattice.n_qubits()) }
    }

    /// Product of the given terms placed relative to `anchor`.
    pub fn from_terms(lattice: TorusLattice, anchor: (i64, i64), terms: &[PauliTerm]) -> Self {
        let mut p = Self::identity(lattice);
        p.apply_terms(anchor, terms);
        p
    }

    pub fn apply_terms(&mut self, anchor: (i64, i64), terms: &[PauliTerm]) {
        for t in terms {
            let idx = self.lattice.qubit_index(anchor.0 + t.dx as i64, anchor.1 + t.dy as i64, t.qubit);
            self.apply_letter(idx, t.letter);
        }
    }

    pub fn apply_letter(&mut self, idx: usize, letter: Letter) {
        let (x, z) = letter.bits();
        if x {
            self.vec.x.flip(idx);
        }
        if z {
            self.vec.z.flip(idx);
        }
    }

    pub fn letter_at(&self, idx: usize) -> Option<Letter> {
        Letter::from_bits(self.vec.x.get(idx), self.vec.z.get(idx))
    }

    /// Qubit indices with a non-trivial factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.vec.x.iter_ones().chain(self.vec.z.iter_ones()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn weight(&self) -> usize {
        self.vec.weight()
    }

    pub fn is_identity(&self) -> bool {
        self.vec.is_identity()
    }

    pub fn mul_assign(&mut self, other: &LatticePauli) {
        assert_eq!(self.lattice, other.lattice, "operators on different lattices");
        self.vec.mul_assign(&other.vec);
    }

    pub fn mul(&self, other: &LatticePauli) -> LatticePauli {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn anticommutes(&self, other: &LatticePauli) -> bool {
        assert_eq!(self.lattice, other.lattice, "operators on different lattices");
        self.vec.x.dot(&other.vec.z) ^ self.vec.z.dot(&other.vec.x)
    }

    /// Shifts every factor by `(dx, dy)` sites.
    pub fn translate(&self, dx: i64, dy: i64) -> LatticePauli {
        let lat = self.lattice;
        let (sx, sy) = lat.wrap(dx, dy);
        if sx == 0 && sy == 0 {
            return self.clone();
        }
        let mut out = LatticePauli::identity(lat);
        for i in self.vec.x.iter_ones() {
            out.vec.x.set(lat.translate_index(i, sx as i64, sy as i64), true);
        }
        for i in self.vec.z.iter_ones() {
            out.vec.z.set(lat.translate_index(i, sx as i64, sy as i64), true);
        }
        out
    }

    /// Terms relative to `anchor`, with offsets taken in `(-l/2, l/2]` per axis.
    pub fn to_terms(&self, anchor: (usize, usize)) -> Vec<PauliTerm> {
        let lat = self.lattice;
        let rel = |v: usize, a: usize, l: usize| -> i32 {
            let d = (v + l - a) % l;
            if d > l / 2 {
                d as i32 - l as i32
            } else {
                d as i32
            }
        };
        self.support()
            .into_iter()
            .map(|idx| {
                let (x, y, k) = lat.qubit_position(idx);
                PauliTerm {
                    dx: rel(x, anchor.0, lat.lx),
                    dy: rel(y, anchor.1, lat.ly),
                    qubit: k,
                    letter: self.letter_at(idx).expect("support qubit has a letter"),
                }
            })
            .collect()
    }
}

/// One generator instance: a recipe placed at a site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub recipe: usize,
    pub site: (usize, usize),
    /// (qubit index, X-bit, Z-bit), ascending by qubit.
    pub support: Vec<(usize, bool, bool)>,
}

impl Generator {
    pub fn place(lat: &TorusLattice, recipe_index: usize, recipe: &GeneratorRecipe, site: (usize, usize)) -> Self {
        let p = LatticePauli::from_terms(*lat, (site.0 as i64, site.1 as i64), &recipe.terms);
        let support = p.support().into_iter().map(|i| (i, p.vec.x.get(i), p.vec.z.get(i))).collect();
        Generator { recipe: recipe_index, site, support }
    }

    pub fn anticommutes(&self, p: &LatticePauli) -> bool {
        let mut acc = false;
        for &(i, x, z) in &self.support {
            acc ^= (x && p.vec.z.get(i)) ^ (z && p.vec.x.get(i));
        }
        acc
    }

    pub fn to_pauli(&self, lat: TorusLattice) -> LatticePauli {
        let mut p = LatticePauli::identity(lat);
        for &(i, x, z) in &self.support {
            if x {
                p.vec.x.flip(i);
            }
            if z {
                p.vec.z.flip(i);
            }
        }
        p
    }

    pub fn letters(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.support.iter().filter_map(|&(i, x, z)| Letter::from_bits(x, z).map(|l| (i, l)))
    }
}

/// Places every recipe at every site, recipe-major: generator `r·n_sites + s` is
/// recipe `r` at site index `s`.
pub fn place_all(lat: &TorusLattice, recipes: &[GeneratorRecipe]) -> Vec<Generator> {
    let mut out = Vec::with_capacity(recipes.len() * lat.n_sites());
    for (ri, r) in recipes.iter().enumerate() {
        for s in 0..lat.n_sites() {
            out.push(Generator::place(lat, ri, r, lat.site_of_index(s)));
        }
    }
    out
}

/// Flattened `x | z` rows, one per generator.
pub fn generator_matrix(lat: &TorusLattice, gens: &[Generator]) -> BitMatrix {
    let n = lat.n_qubits();
    let rows = gens
        .iter()
        .map(|g| {
            let mut row = BitVector::zeros(2 * n);
            for &(i, x, z) in &g.support {
                if x {
                    row.flip(i);
                }
                if z {
                    row.flip(n + i);
                }
            }
            row
        })
        .collect();
    BitMatrix::from_rows(rows, 2 * n).expect("rows sized to the lattice")
}

/// Syndrome of `p`: bit `i` set iff generator `i` anticommutes with it.
pub fn syndrome(gens: &[Generator], p: &LatticePauli) -> BitVector {
    let mut s = BitVector::zeros(gens.len());
    for (i, g) in gens.iter().enumerate() {
        if g.anticommutes(p) {
            s.set(i, true);
        }
    }
    s
}

pub fn provenance(recipes: &[GeneratorRecipe], g: &Generator) -> String {
    format!("{}@({},{})", recipes[g.recipe].label, g.site.0, g.site.1)
}

/// Stabilizer and gauge generators of a code placed on a torus.
#[derive(Clone, Debug)]
pub struct InstantiatedGroups {
    pub lattice: TorusLattice,
    pub stabilizers: Vec<Generator>,
    /// Equal to `stabilizers` for a subspace code.
    pub gauge: Vec<Generator>,
    pub subsystem: bool,
}

impl InstantiatedGroups {
    pub fn stabilizer_matrix(&self) -> BitMatrix {
        generator_matrix(&self.lattice, &self.stabilizers)
    }

    pub fn gauge_matrix(&self) -> BitMatrix {
        generator_matrix(&self.lattice, &self.gauge)
    }
}

pub fn instantiate(code: &CodeDefinition, lat: TorusLattice) -> Result<InstantiatedGroups, Error> {
    if lat.qubits_per_site != code.qubits_per_site {
        return Err(Error::Dimension(format!(
            "lattice has {} qubits per site, code has {}",
            lat.qubits_per_site, code.qubits_per_site
        )));
    }
    let m = code.range();
    if lat.lx < 2 * m || lat.ly < 2 * m {
        return Err(Error::TorusTooSmall {
            lx: lat.lx,
            ly: lat.ly,
            reason: format!("each side must be at least twice the generator range {m}"),
        });
    }
    let stabilizers = place_all(&lat, &code.stabilizer_recipes);
    let gauge = match &code.gauge_recipes {
        Some(g) => place_all(&lat, g),
        None => stabilizers.clone(),
    };
    Ok(InstantiatedGroups { lattice: lat, stabilizers, gauge, subsystem: code.is_subsystem() })
}

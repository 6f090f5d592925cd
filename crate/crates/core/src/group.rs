//! Group-level checks on a torus: centralizers, stabilizer validity with signs,
//! constraint spaces, windowed locality checks and logical-qubit counting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::code::{CodeDefinition, GeneratorRecipe, Letter, PauliTerm};
use crate::gf2::{reduce_against, swap_halves, BitMatrix, BitVector};
use crate::lattice::{generator_matrix, place_all, provenance, Generator, LatticePauli, TorusLattice};
use crate::Error;

/// Generators of a Pauli group on a torus as flattened `x | z` rows.
#[derive(Clone, Debug)]
pub struct GroupBasis {
    pub rows: BitMatrix,
    pub provenance: Vec<String>,
}

impl GroupBasis {
    pub fn empty(n_qubits: usize) -> Self {
        GroupBasis { rows: BitMatrix::new(2 * n_qubits), provenance: Vec::new() }
    }

    pub fn from_generators(lat: &TorusLattice, recipes: &[GeneratorRecipe], gens: &[Generator]) -> Self {
        GroupBasis {
            rows: generator_matrix(lat, gens),
            provenance: gens.iter().map(|g| provenance(recipes, g)).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.rows.n_cols() / 2
    }

    pub fn rank(&self) -> usize {
        self.rows.rank()
    }

    pub fn push(&mut self, p: &LatticePauli, label: impl Into<String>) {
        self.rows.push_row(p.vec.to_flat()).expect("operator on the group's lattice");
        self.provenance.push(label.into());
    }

    /// Independent rows spanning the same group.
    pub fn reduced(&self) -> GroupBasis {
        let rows = self.rows.row_basis();
        let provenance = (0..rows.n_rows()).map(|i| format!("reduced[{i}]")).collect();
        GroupBasis { rows, provenance }
    }

    pub fn contains(&self, p: &LatticePauli) -> bool {
        self.rows.row_space_contains(&p.vec.to_flat())
    }
}

/// `{p : p commutes with every generator}`; dimension `2n − rank(gens)`.
pub fn centralizer(gens: &GroupBasis) -> GroupBasis {
    let rows = swap_halves(&gens.rows).kernel_basis();
    let provenance = (0..rows.n_rows()).map(|i| format!("centralizer[{i}]")).collect();
    GroupBasis { rows, provenance }
}

/// Elements of the group commuting with the whole group.
pub fn center(gens: &GroupBasis) -> GroupBasis {
    let swapped = swap_halves(&gens.rows);
    let r = gens.rows.n_rows();
    let mut gram = BitMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            if swapped.row(i).dot(gens.rows.row(j)) {
                gram.set(i, j, true);
            }
        }
    }
    let kernel = gram.kernel_basis();
    let mut out = BitMatrix::new(gens.rows.n_cols());
    for y in kernel.rows() {
        out.push_row(gens.rows.combine_rows(y).expect("selector sized to rows")).expect("row sized to group");
    }
    GroupBasis { rows: out.row_basis(), provenance: Vec::new() }.with_default_provenance("center")
}

impl GroupBasis {
    fn with_default_provenance(mut self, tag: &str) -> Self {
        self.provenance = (0..self.rows.n_rows()).map(|i| format!("{tag}[{i}]")).collect();
        self
    }
}

/// Whether two generating sets span the same group (projectively).
pub fn same_span(a: &GroupBasis, b: &GroupBasis) -> bool {
    let ra = a.rank();
    let rb = b.rank();
    if ra != rb {
        return false;
    }
    let mut both = a.rows.clone();
    for row in b.rows.rows() {
        both.push_row(row.clone()).expect("same lattice");
    }
    both.rank() == ra
}

/// The subsystem-code identity: the center of the gauge group equals the stabilizer
/// group up to phases.
pub fn gauge_code_identity(gauge: &GroupBasis, stab: &GroupBasis) -> bool {
    same_span(&center(gauge), stab)
}

/// Pauli operator with its phase: `i^phase · X^x · Z^z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasedPauli {
    pub x: BitVector,
    pub z: BitVector,
    pub phase: u8,
}

impl PhasedPauli {
    pub fn identity(n: usize) -> Self {
        PhasedPauli { x: BitVector::zeros(n), z: BitVector::zeros(n), phase: 0 }
    }

    /// Tensor product of single-qubit letters on distinct qubits, each with sign +1.
    pub fn from_letters(n: usize, letters: impl IntoIterator<Item = (usize, Letter)>) -> Self {
        let mut p = Self::identity(n);
        for (i, l) in letters {
            let (x, z) = l.bits();
            assert!(!p.x.get(i) && !p.z.get(i), "repeated qubit in a letter product");
            p.x.set(i, x);
            p.z.set(i, z);
            if l == Letter::Y {
                p.phase = (p.phase + 1) % 4;
            }
        }
        p
    }

    pub fn from_generator(n: usize, g: &Generator) -> Self {
        Self::from_letters(n, g.letters())
    }

    /// `self · other`, moving every Z of `self` past the X's of `other`.
    pub fn mul(&self, other: &PhasedPauli) -> PhasedPauli {
        let swaps = self.z.dot(&other.x) as u8;
        PhasedPauli {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + 2 * swaps) % 4,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerVerdict {
    pub commuting: bool,
    pub anticommuting_pair: Option<(String, String)>,
    /// Every product of generators equal to a scalar equals +1.
    pub signs_positive: bool,
    /// Generators whose sign must flip so that no product equals −1.
    pub sign_repair: Vec<String>,
}

impl StabilizerVerdict {
    pub fn passed(&self) -> bool {
        self.commuting && self.signs_positive
    }

    pub fn repairable(&self) -> bool {
        self.commuting
    }
}

/// Checks that the generators commute and that no product of them is −1.
pub fn check_stabilizer(gens: &[PhasedPauli], provenance: &[String]) -> StabilizerVerdict {
    let r = gens.len();
    for i in 0..r {
        for j in i + 1..r {
            let a = &gens[i];
            let b = &gens[j];
            if a.x.dot(&b.z) ^ a.z.dot(&b.x) {
                return StabilizerVerdict {
                    commuting: false,
                    anticommuting_pair: Some((provenance[i].clone(), provenance[j].clone())),
                    signs_positive: false,
                    sign_repair: Vec::new(),
                };
            }
        }
    }
    let n = gens.first().map(|g| g.x.len()).unwrap_or(0);
    let mut rows = BitMatrix::new(2 * n);
    for g in gens {
        rows.push_row(g.x.concat(&g.z)).expect("equal lengths");
    }
    let kernel = rows.left_kernel_basis();
    let mut bad = BitVector::zeros(kernel.n_rows());
    for (k, v) in kernel.rows().iter().enumerate() {
        let mut acc = PhasedPauli::identity(n);
        for i in v.iter_ones() {
            acc = acc.mul(&gens[i]);
        }
        debug_assert!(acc.is_scalar());
        // Commuting Hermitian generators multiply to ±1 only.
        if acc.phase == 2 {
            bad.set(k, true);
        }
    }
    if bad.is_zero() {
        return StabilizerVerdict {
            commuting: true,
            anticommuting_pair: None,
            signs_positive: true,
            sign_repair: Vec::new(),
        };
    }
    let flips = kernel
        .solve(&bad)
        .expect("kernel basis sized to generators")
        .map(|(x, _)| x)
        .expect("an independent set of constraints admits any sign pattern");
    StabilizerVerdict {
        commuting: true,
        anticommuting_pair: None,
        signs_positive: false,
        sign_repair: flips.iter_ones().map(|i| provenance[i].clone()).collect(),
    }
}

/// Dependencies among generators, in reduced echelon form. Column `i` of the basis
/// is the membership pattern of generator `i`.
#[derive(Clone, Debug)]
pub struct ConstraintSpace {
    pub basis: BitMatrix,
    pub n_generators: usize,
}

impl ConstraintSpace {
    pub fn dim(&self) -> usize {
        self.basis.n_rows()
    }

    /// Membership of generator `i` across the basis constraints.
    pub fn membership(&self, i: usize) -> BitVector {
        let mut v = BitVector::zeros(self.dim());
        for (k, row) in self.basis.rows().iter().enumerate() {
            if row.get(i) {
                v.set(k, true);
            }
        }
        v
    }
}

pub fn constraint_space(rows: &BitMatrix) -> ConstraintSpace {
    let mut basis = rows.left_kernel_basis();
    let r = basis.rref().len();
    let mut kept = basis.into_rows();
    kept.truncate(r);
    ConstraintSpace {
        basis: BitMatrix::from_rows(kept, rows.n_rows()).expect("kernel rows sized to generators"),
        n_generators: rows.n_rows(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowReport {
    pub window_size: usize,
    pub origin: (usize, usize),
    pub passed: bool,
    /// A Pauli inside the window that commutes with the generators but is not a
    /// product of nearby stabilizers.
    pub witness: Option<LatticePauli>,
}

impl WindowReport {
    pub fn witness_terms(&self) -> Option<Vec<PauliTerm>> {
        self.witness.as_ref().map(|w| w.to_terms(self.origin))
    }
}

fn window_cells(lat: &TorusLattice, origin: (usize, usize), w: usize, pad: usize) -> BTreeSet<(usize, usize)> {
    let mut cells = BTreeSet::new();
    let p = pad as i64;
    for dx in -p..(w as i64 + p) {
        for dy in -p..(w as i64 + p) {
            cells.insert(lat.wrap(origin.0 as i64 + dx, origin.1 as i64 + dy));
        }
    }
    cells
}

fn generators_touching(
    lat: &TorusLattice,
    recipes: &[GeneratorRecipe],
    reach: usize,
    origin: (usize, usize),
    w: usize,
    pad: usize,
) -> Vec<Generator> {
    let region = window_cells(lat, origin, w, pad);
    let anchors = window_cells(lat, origin, w, pad + reach);
    let q = lat.qubits_per_site;
    let mut out = Vec::new();
    for (ri, r) in recipes.iter().enumerate() {
        for &site in &anchors {
            let g = Generator::place(lat, ri, r, site);
            let touches = g.support.iter().any(|&(i, _, _)| {
                let s = lat.site_of_index(i / q);
                region.contains(&s)
            });
            if touches {
                out.push(g);
            }
        }
    }
    out
}

/// Windowed locality check: every Pauli inside the `w × w` window at `origin` that
/// commutes with `commutant_recipes` must be a product of `span_recipes` generators
/// meeting the window thickened by the code range.
pub fn check_window_containment(
    code: &CodeDefinition,
    commutant_recipes: &[GeneratorRecipe],
    span_recipes: &[GeneratorRecipe],
    lat: &TorusLattice,
    w: usize,
    origin: (usize, usize),
) -> Result<WindowReport, Error> {
    let m = code.range();
    let reach = code.reach();
    if w + 2 * m > lat.lx.min(lat.ly) || w + 2 * (m + reach) > lat.lx.min(lat.ly) {
        return Err(Error::TorusTooSmall {
            lx: lat.lx,
            ly: lat.ly,
            reason: format!("window {w} with range {m} does not fit"),
        });
    }
    let q = lat.qubits_per_site;
    let window = window_cells(lat, origin, w, 0);
    let mut local: BTreeMap<usize, usize> = BTreeMap::new();
    for &(x, y) in &window {
        for k in 0..q {
            let idx = lat.site_index(x, y) * q + k;
            let next = local.len();
            local.insert(idx, next);
        }
    }
    let nw = local.len();
    let checks = generators_touching(lat, commutant_recipes, reach, origin, w, 0);
    let mut eq = BitMatrix::new(2 * nw);
    for g in &checks {
        let mut row = BitVector::zeros(2 * nw);
        for &(i, x, z) in &g.support {
            if let Some(&li) = local.get(&i) {
                // symplectic pairing: an X on the generator tests the Z-bit of the unknown
                if x {
                    row.flip(nw + li);
                }
                if z {
                    row.flip(li);
                }
            }
        }
        eq.push_row(row).expect("sized");
    }
    let kernel = eq.kernel_basis();

    let span = generators_touching(lat, span_recipes, reach, origin, w, m);
    let mut region: BTreeMap<usize, usize> = local.clone();
    for g in &span {
        for &(i, _, _) in &g.support {
            let next = region.len();
            region.entry(i).or_insert(next);
        }
    }
    let nr = region.len();
    let mut span_m = BitMatrix::new(2 * nr);
    for g in &span {
        let mut row = BitVector::zeros(2 * nr);
        for &(i, x, z) in &g.support {
            let li = region[&i];
            if x {
                row.flip(li);
            }
            if z {
                row.flip(nr + li);
            }
        }
        span_m.push_row(row).expect("sized");
    }
    let pivots = span_m.rref();
    for v in kernel.rows() {
        let mut lifted = BitVector::zeros(2 * nr);
        for (&idx, &li) in &local {
            let ri = region[&idx];
            if v.get(li) {
                lifted.set(ri, true);
            }
            if v.get(nw + li) {
                lifted.set(nr + ri, true);
            }
        }
        if !reduce_against(&span_m, &pivots, &lifted).is_zero() {
            let mut p = LatticePauli::identity(*lat);
            for (&idx, &li) in &local {
                p.vec.x.set(idx, v.get(li));
                p.vec.z.set(idx, v.get(nw + li));
            }
            return Ok(WindowReport { window_size: w, origin, passed: false, witness: Some(p) });
        }
    }
    Ok(WindowReport { window_size: w, origin, passed: true, witness: None })
}

/// Stabilizer-code form of the windowed check: local elements of C(S) lie in S.
pub fn check_topological_window(
    code: &CodeDefinition,
    lat: &TorusLattice,
    w: usize,
    origin: (usize, usize),
) -> Result<WindowReport, Error> {
    check_window_containment(code, &code.stabilizer_recipes, &code.stabilizer_recipes, lat, w, origin)
}

/// Subsystem form: local elements of C(G) lie in S.
pub fn check_tssg_window(
    code: &CodeDefinition,
    lat: &TorusLattice,
    w: usize,
    origin: (usize, usize),
) -> Result<WindowReport, Error> {
    check_window_containment(code, code.charge_recipes(), &code.stabilizer_recipes, lat, w, origin)
}

/// Default window side: twice the range plus two.
pub fn default_window(code: &CodeDefinition) -> usize {
    2 * code.range() + 2
}

/// Torus side on which window checks of side `w` fit.
pub fn window_torus_side(code: &CodeDefinition, w: usize) -> usize {
    w + 2 * (code.range() + code.reach()) + 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub window_size: usize,
    pub passed: bool,
    /// Generators whose product is the identity, all inside the window.
    pub constraint: Option<Vec<String>>,
}

fn local_constraint(
    recipes: &[GeneratorRecipe],
    w: usize,
    range: usize,
    reach: usize,
    q: usize,
) -> Option<Vec<String>> {
    let side = w + 2 * (range + reach) + 2;
    let lat = TorusLattice::new(side, side, q);
    let inside = |i: usize| {
        let (x, y) = lat.site_of_index(i / q);
        x < w && y < w
    };
    let gens: Vec<Generator> =
        place_all(&lat, recipes).into_iter().filter(|g| g.support.iter().all(|&(i, _, _)| inside(i))).collect();
    if gens.is_empty() {
        return None;
    }
    let rows = generator_matrix(&lat, &gens);
    let kernel = rows.left_kernel_basis();
    kernel.rows().first().map(|v| v.iter_ones().map(|i| provenance(recipes, &gens[i])).collect())
}

/// Passes iff no product of generators lying inside a `w × w` window is the identity,
/// for both the stabilizer and the gauge recipes.
pub fn local_independence_check(code: &CodeDefinition, w: usize) -> IndependenceReport {
    let (m, reach, q) = (code.range(), code.reach(), code.qubits_per_site);
    let mut constraint = local_constraint(&code.stabilizer_recipes, w, m, reach, q);
    if constraint.is_none() {
        if let Some(g) = &code.gauge_recipes {
            constraint = local_constraint(g, w, m, reach, q);
        }
    }
    IndependenceReport { window_size: w, passed: constraint.is_none(), constraint }
}

/// `k = n − (rank G + rank S)/2`.
pub fn count_logical_qubits(stab_rank: usize, gauge_rank: usize, n: usize) -> Result<usize, Error> {
    if gauge_rank < stab_rank || !(gauge_rank - stab_rank).is_multiple_of(2) {
        return Err(Error::Structural(format!(
            "gauge rank {gauge_rank} and stabilizer rank {stab_rank} differ by an odd amount"
        )));
    }
    let total = gauge_rank + stab_rank;
    if total > 2 * n {
        return Err(Error::Structural(format!("ranks {gauge_rank} + {stab_rank} exceed twice the qubit count {n}")));
    }
    Ok(n - total / 2)
}

//! String operators: Paulis on a thickened path whose syndrome is exactly a pair of
//! endpoint morphisms.
//!
//! Strings are solved once on a private torus large enough that nothing wraps, and
//! kept as site-relative templates. Long strings are products of translated hops,
//! so their syndromes telescope to the two ends.

use std::collections::{BTreeMap, BTreeSet};

use crate::code::{GeneratorRecipe, PauliTerm};
use crate::exec::Execution;
use crate::gf2::{BitMatrix, BitVector};
use crate::lattice::{Generator, LatticePauli, TorusLattice};
use crate::Error;

use super::Charge;

/// A finite set of flipped generators, each a (recipe, site) pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub flipped: BTreeSet<(usize, i64, i64)>,
}

impl Morphism {
    /// Every recipe in `recipes` placed at `site`.
    pub fn at(recipes: &[usize], site: (i64, i64)) -> Morphism {
        Morphism { flipped: recipes.iter().map(|&r| (r, site.0, site.1)).collect() }
    }

    /// Symmetric difference.
    pub fn add(&self, other: &Morphism) -> Morphism {
        Morphism { flipped: self.flipped.symmetric_difference(&other.flipped).copied().collect() }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Morphism {
        Morphism { flipped: self.flipped.iter().map(|&(r, x, y)| (r, x + dx, y + dy)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }

    /// Charge of the flipped set, given per-recipe charges.
    pub fn charge(&self, recipe_charges: &[Charge]) -> Charge {
        self.flipped.iter().fold(0, |acc, &(r, _, _)| acc ^ recipe_charges[r])
    }
}

/// A Pauli on a torus transporting a charge along `path`.
#[derive(Clone, Debug)]
pub struct StringOperator {
    pub pauli: LatticePauli,
    pub path: Vec<(i64, i64)>,
    pub endpoint_morphisms: (Morphism, Morphism),
    pub charge: Charge,
}

/// Cells within Chebyshev distance `r` of the path, nearest first.
fn band(path: &[(i64, i64)], r: usize) -> Vec<(i64, i64)> {
    let r = r as i64;
    let mut dist: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    for &(px, py) in path {
        for dx in -r..=r {
            for dy in -r..=r {
                let d = dx.abs().max(dy.abs());
                let e = dist.entry((px + dx, py + dy)).or_insert(d);
                *e = (*e).min(d);
            }
        }
    }
    let mut cells: Vec<_> = dist.into_iter().collect();
    cells.sort_by_key(|&(c, d)| (d, c));
    cells.into_iter().map(|(c, _)| c).collect()
}

fn reach_of(recipes: &[GeneratorRecipe]) -> i64 {
    recipes.iter().map(|r| r.reach()).max().unwrap_or(0) as i64
}

/// Solves, for each target morphism, a Pauli supported on `Thk^r(path)` whose
/// syndrome against `recipes` is exactly the target. Returned templates are relative
/// to the path's own coordinates. Solutions are shortened greedily by local kernel
/// elements, which keeps them deterministic and light.
pub fn solve_band(
    recipes: &[GeneratorRecipe],
    qubits_per_site: usize,
    path: &[(i64, i64)],
    targets: &[Morphism],
    r: usize,
    exec: Execution,
) -> Vec<Option<Vec<PauliTerm>>> {
    let q = qubits_per_site;
    if q == 0 {
        return targets.iter().map(|t| t.is_empty().then(Vec::new)).collect();
    }
    let reach = reach_of(recipes);
    let cells = band(path, r);
    let minx = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let maxx = cells.iter().map(|c| c.0).max().unwrap_or(0);
    let miny = cells.iter().map(|c| c.1).min().unwrap_or(0);
    let maxy = cells.iter().map(|c| c.1).max().unwrap_or(0);
    let pad = 2 * reach + 2;
    let mut span_x = maxx - minx + 1 + 2 * pad;
    let mut span_y = maxy - miny + 1 + 2 * pad;
    for t in targets {
        for &(_, x, y) in &t.flipped {
            span_x = span_x.max((x - minx).abs() + pad + 1 + 2 * pad);
            span_y = span_y.max((y - miny).abs() + pad + 1 + 2 * pad);
        }
    }
    let lat = TorusLattice::new(span_x as usize, span_y as usize, q);
    let shift = (pad - minx, pad - miny);
    let to_lat = |(x, y): (i64, i64)| lat.wrap(x + shift.0, y + shift.1);

    let mut col_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cols: Vec<usize> = Vec::new();
    for &c in &cells {
        let (x, y) = to_lat(c);
        for k in 0..q {
            col_of.insert(lat.site_index(x, y) * q + k, cols.len());
            cols.push(lat.site_index(x, y) * q + k);
        }
    }
    let n_unknown = 2 * col_of.len();

    // Equations: every generator touching the band, plus every target generator.
    let band_sites: BTreeSet<(usize, usize)> = cells.iter().map(|&c| to_lat(c)).collect();
    let mut eqs: BTreeMap<(usize, usize, usize), Generator> = BTreeMap::new();
    let mut anchors: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(cx, cy) in &cells {
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                anchors.insert(to_lat((cx + dx, cy + dy)));
            }
        }
    }
    for (ri, rec) in recipes.iter().enumerate() {
        for &site in &anchors {
            let g = Generator::place(&lat, ri, rec, site);
            if g.support.iter().any(|&(i, _, _)| band_sites.contains(&lat.site_of_index(i / q))) {
                eqs.insert((ri, site.0, site.1), g);
            }
        }
    }
    for t in targets {
        for &(ri, x, y) in &t.flipped {
            let site = to_lat((x, y));
            eqs.entry((ri, site.0, site.1)).or_insert_with(|| Generator::place(&lat, ri, &recipes[ri], site));
        }
    }
    let keys: Vec<(usize, usize, usize)> = eqs.keys().copied().collect();
    let mut a = BitMatrix::new(n_unknown);
    for g in eqs.values() {
        let mut row = BitVector::zeros(n_unknown);
        for &(i, x, z) in &g.support {
            if let Some(&c) = col_of.get(&i) {
                // unknown layout: x-bit at 2c, z-bit at 2c+1
                if x {
                    row.flip(2 * c + 1);
                }
                if z {
                    row.flip(2 * c);
                }
            }
        }
        a.push_row(row).expect("sized");
    }
    let index: BTreeMap<(usize, usize, usize), usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let rhs: Vec<BitVector> = targets
        .iter()
        .map(|t| {
            let mut b = BitVector::zeros(keys.len());
            for &(ri, x, y) in &t.flipped {
                let site = to_lat((x, y));
                b.flip(index[&(ri, site.0, site.1)]);
            }
            b
        })
        .collect();
    let (sols, kernel) = a.solve_many_with_kernel(&rhs, exec).expect("right-hand sides sized to equations");

    sols.into_iter()
        .map(|s| {
            s.map(|mut v| {
                shorten(&mut v, &kernel);
                let mut p = LatticePauli::identity(lat);
                for (c, &idx) in cols.iter().enumerate() {
                    p.vec.x.set(idx, v.get(2 * c));
                    p.vec.z.set(idx, v.get(2 * c + 1));
                }
                let origin = to_lat((0, 0));
                p.to_terms(origin)
            })
        })
        .collect()
}

fn pair_weight(v: &BitVector) -> usize {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    v.words().iter().map(|&w| ((w | (w >> 1)) & EVEN).count_ones() as usize).sum()
}

/// Greedy descent on qubit weight using kernel vectors.
fn shorten(v: &mut BitVector, kernel: &BitMatrix) {
    let mut w = pair_weight(v);
    loop {
        let mut improved = false;
        for k in kernel.rows() {
            let cand = v.xor(k);
            let cw = pair_weight(&cand);
            if cw < w {
                *v = cand;
                w = cw;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

/// A hop template for every requested charge: one along +x and one along +y, each
/// spanning `step` sites between two copies of the charge's endpoint morphism.
#[derive(Clone, Debug)]
pub struct StringKit {
    pub step: usize,
    pub r: usize,
    pub horizontal: BTreeMap<Charge, Vec<PauliTerm>>,
    pub vertical: BTreeMap<Charge, Vec<PauliTerm>>,
    pub reps: BTreeMap<Charge, Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl StringKit {
    /// Solves hops for `charges`; `None` if some charge has no string at radius `r`.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        recipes: &[GeneratorRecipe],
        recipe_charges: &[Charge],
        dim: usize,
        qubits_per_site: usize,
        charges: &[Charge],
        step: usize,
        r: usize,
        exec: Execution,
    ) -> Option<StringKit> {
        let mut reps = BTreeMap::new();
        for &c in charges {
            reps.insert(c, representative(recipe_charges, dim, c)?);
        }
        let s = step as i64;
        let mut horizontal = BTreeMap::new();
        let mut vertical = BTreeMap::new();
        for axis in [Axis::X, Axis::Y] {
            let path: Vec<(i64, i64)> = (0..=s).map(|t| if axis == Axis::X { (t, 0) } else { (0, t) }).collect();
            let end = *path.last().expect("non-empty path");
            let targets: Vec<Morphism> = charges
                .iter()
                .map(|c| {
                    let rep = &reps[c];
                    Morphism::at(rep, (0, 0)).add(&Morphism::at(rep, end))
                })
                .collect();
            let sols = solve_band(recipes, qubits_per_site, &path, &targets, r, exec);
            for (&c, sol) in charges.iter().zip(sols) {
                let terms = sol?;
                if axis == Axis::X {
                    horizontal.insert(c, terms);
                } else {
                    vertical.insert(c, terms);
                }
            }
        }
        Some(StringKit { step, r, horizontal, vertical, reps })
    }

    pub fn hop(&self, c: Charge, axis: Axis) -> &[PauliTerm] {
        match axis {
            Axis::X => &self.horizontal[&c],
            Axis::Y => &self.vertical[&c],
        }
    }

    /// Multiplies `hops` consecutive hops of charge `c` starting at `from` onto `p`.
    pub fn apply_line(&self, p: &mut LatticePauli, c: Charge, from: (i64, i64), axis: Axis, hops: usize) {
        let s = self.step as i64;
        let terms = self.hop(c, axis);
        for t in 0..hops as i64 {
            let anchor = match axis {
                Axis::X => (from.0 + t * s, from.1),
                Axis::Y => (from.0, from.1 + t * s),
            };
            p.apply_terms(anchor, terms);
        }
    }

    /// String of charge `c` from `from` covering `hops · step` sites along `axis`.
    pub fn line(&self, lat: TorusLattice, c: Charge, from: (i64, i64), axis: Axis, hops: usize) -> LatticePauli {
        let mut p = LatticePauli::identity(lat);
        self.apply_line(&mut p, c, from, axis, hops);
        p
    }

    pub fn endpoint(&self, c: Charge, site: (i64, i64)) -> Morphism {
        Morphism::at(&self.reps[&c], site)
    }
}

/// A set of recipes whose charges sum to `c`: the first single recipe carrying `c`
/// if there is one, otherwise the pivot recipes of a GF(2) solve.
pub fn representative(recipe_charges: &[Charge], dim: usize, c: Charge) -> Option<Vec<usize>> {
    if c == 0 {
        return Some(Vec::new());
    }
    if let Some(i) = recipe_charges.iter().position(|&x| x == c) {
        return Some(vec![i]);
    }
    let mut m = BitMatrix::zeros(dim, recipe_charges.len());
    for (j, &x) in recipe_charges.iter().enumerate() {
        for i in 0..dim {
            if (x >> i) & 1 == 1 {
                m.set(i, j, true);
            }
        }
    }
    let b = BitVector::from_u64(c, dim);
    let (x, _) = m.solve(&b).ok()??;
    Some(x.iter_ones().collect())
}

/// Generators placed near the support of `p` that anticommute with it.
pub fn local_syndrome(recipes: &[GeneratorRecipe], p: &LatticePauli) -> BTreeSet<(usize, usize, usize)> {
    let lat = p.lattice;
    let q = lat.qubits_per_site;
    let reach = reach_of(recipes);
    let mut anchors = BTreeSet::new();
    for idx in p.support() {
        let (x, y, _) = lat.qubit_position(idx);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                anchors.insert(lat.wrap(x as i64 + dx, y as i64 + dy));
            }
        }
    }
    let mut out = BTreeSet::new();
    if q == 0 {
        return out;
    }
    for (ri, rec) in recipes.iter().enumerate() {
        for &site in &anchors {
            if Generator::place(&lat, ri, rec, site).anticommutes(p) {
                out.insert((ri, site.0, site.1));
            }
        }
    }
    out
}

fn wrapped(lat: &TorusLattice, m: &Morphism) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for &(r, x, y) in &m.flipped {
        let (a, b) = lat.wrap(x, y);
        if !out.remove(&(r, a, b)) {
            out.insert((r, a, b));
        }
    }
    out
}

/// Solves a string along an explicit path of 4-connected cells on `lat`, checking
/// the resulting syndrome on the torus. Absence means no solution at radius `r`.
pub fn build_string(
    recipes: &[GeneratorRecipe],
    recipe_charges: &[Charge],
    lat: TorusLattice,
    path: &[(i64, i64)],
    endpoints: (Morphism, Morphism),
    r: usize,
) -> Result<Option<StringOperator>, Error> {
    if path.is_empty() {
        return Err(Error::Config("empty path".into()));
    }
    for w in path.windows(2) {
        if (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs() != 1 {
            return Err(Error::Config(format!("path is not connected at {:?}", w[1])));
        }
    }
    let c0 = endpoints.0.charge(recipe_charges);
    let c1 = endpoints.1.charge(recipe_charges);
    if c0 != c1 {
        return Err(Error::Config(format!("endpoint charges {c0:#b} and {c1:#b} differ")));
    }
    let reach = reach_of(recipes) as usize;
    let w = (path.iter().map(|p| p.0).max().unwrap() - path.iter().map(|p| p.0).min().unwrap()) as usize;
    let h = (path.iter().map(|p| p.1).max().unwrap() - path.iter().map(|p| p.1).min().unwrap()) as usize;
    if lat.lx < w + 2 * r + 2 * reach + 2 || lat.ly < h + 2 * r + 2 * reach + 2 {
        return Err(Error::TorusTooSmall {
            lx: lat.lx,
            ly: lat.ly,
            reason: format!("path with radius {r} wraps around"),
        });
    }
    let target = endpoints.0.add(&endpoints.1);
    let sol = solve_band(recipes, lat.qubits_per_site, path, std::slice::from_ref(&target), r, Execution::default())
        .pop()
        .flatten();
    let Some(terms) = sol else {
        return Ok(None);
    };
    let pauli = LatticePauli::from_terms(lat, (0, 0), &terms);
    if local_syndrome(recipes, &pauli) != wrapped(&lat, &target) {
        return Err(Error::Structural("string syndrome differs from its endpoints".into()));
    }
    Ok(Some(StringOperator { pauli, path: path.to_vec(), endpoint_morphisms: endpoints, charge: c0 }))
}

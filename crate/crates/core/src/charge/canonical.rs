//! Canonical charge generators and the characteristic (α, β, f₁, f₂).

#![allow(clippy::needless_range_loop)]

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::CodeDefinition;
use crate::gf2::{BitMatrix, BitVector};
use crate::lattice::TorusLattice;
use crate::Error;

use super::{
    apply_linear, crossing_h, crossing_v, sign, solve_kit, spin, Charge, ChargeConfig, ChargeGroup, Check, Geometry,
    Sign, StatTables,
};

/// Gauge charges in hyperbolic pairs plus kernel charges, and their stabilizer
/// counterparts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalGenerators {
    pub c: Vec<Charge>,
    pub d: Vec<Charge>,
    pub e: Vec<Charge>,
    pub c_tilde: Vec<Charge>,
    pub d_tilde: Vec<Charge>,
    pub e_tilde: Vec<Charge>,
    pub f1: Sign,
    pub f2: Sign,
}

impl CanonicalGenerators {
    pub fn characteristic(&self) -> Characteristic {
        Characteristic { alpha: self.c.len(), beta: self.e.len(), f1: self.f1, f2: self.f2 }
    }

    /// Gauge generators in the order c₁..c_α, d₁..d_α, e₁..e_β.
    pub fn gauge_basis(&self) -> Vec<Charge> {
        self.c.iter().chain(&self.d).chain(&self.e).copied().collect()
    }

    /// Stabilizer generators in the same order.
    pub fn stab_basis(&self) -> Vec<Charge> {
        self.c_tilde.iter().chain(&self.d_tilde).chain(&self.e_tilde).copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Characteristic {
    pub alpha: usize,
    pub beta: usize,
    pub f1: Sign,
    pub f2: Sign,
}

impl Characteristic {
    pub const TRIVIAL: Characteristic = Characteristic { alpha: 0, beta: 0, f1: 1, f2: 1 };

    /// Bosons among the 2^(2α+β) gauge charges.
    pub fn boson_count(&self) -> u64 {
        let base = (1i64 << (self.alpha + 1)) + self.f1 as i64 + (self.f1 * self.f2) as i64;
        ((base << (self.alpha + self.beta)) / 4) as u64
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {:+}, {:+})", self.alpha, self.beta, self.f1, self.f2)
    }
}

/// Characteristic of the composition of two codes.
pub fn compose_characteristics(a: Characteristic, b: Characteristic) -> Characteristic {
    Characteristic {
        alpha: a.alpha + b.alpha,
        beta: a.beta + b.beta,
        f1: a.f1 * b.f1,
        f2: ((1 + a.f2) * (1 + b.f2) / 2 - 1),
    }
}

fn in_span(basis: &[Charge], dim: usize, v: Charge) -> bool {
    if basis.is_empty() {
        return v == 0;
    }
    let mut m = BitMatrix::new(dim);
    for &b in basis {
        m.push_row(BitVector::from_u64(b, dim)).expect("sized");
    }
    m.row_space_contains(&BitVector::from_u64(v, dim))
}

fn rank(vs: &[Charge], dim: usize) -> usize {
    let mut m = BitMatrix::new(dim);
    for &b in vs {
        m.push_row(BitVector::from_u64(b, dim)).expect("sized");
    }
    m.rank()
}

/// Builds canonical generators from complete statistics tables.
pub fn canonical_generators(
    t: &StatTables,
    gauge: &ChargeGroup,
    stab: &ChargeGroup,
    iota: &[Charge],
) -> Result<CanonicalGenerators, Error> {
    let dim = gauge.dim;
    let fermion = |c: Charge| t.theta(c) == -1;
    let b = |x: Charge, y: Charge| t.kappa(x, y) == -1;

    // Kernel of the stabilizer map, with fermionicity gathered onto e₁.
    let mut iota_rows = BitMatrix::new(dim);
    for j in 0..stab.dim {
        let row: Vec<bool> = (0..dim).map(|i| (iota[i] >> j) & 1 == 1).collect();
        iota_rows.push_row(BitVector::from_bools(&row))?;
    }
    let mut e: Vec<Charge> =
        iota_rows.kernel_basis().rows().iter().map(|r| r.iter_ones().fold(0, |acc, i| acc | (1 << i))).collect();
    let mut f2 = 1;
    if let Some(k) = e.iter().position(|&x| fermion(x)) {
        e.swap(0, k);
        let e1 = e[0];
        for x in e.iter_mut().skip(1) {
            if fermion(*x) {
                *x ^= e1;
            }
        }
        f2 = -1;
    }

    // Complement of the kernel, greedy over unit charges.
    let mut spanned = e.clone();
    let mut pool = Vec::new();
    for i in 0..dim {
        let u: Charge = 1 << i;
        if !in_span(&spanned, dim, u) {
            spanned.push(u);
            pool.push(u);
        }
    }

    // Symplectic Gram-Schmidt under the mutual statistics.
    let mut pairs: Vec<(Charge, Charge)> = Vec::new();
    while !pool.is_empty() {
        let c = pool.remove(0);
        let Some(k) = pool.iter().position(|&d| b(c, d)) else {
            return Err(Error::Structural(format!(
                "charge {c:#b} lies outside the kernel but has no partner with nontrivial mutual statistics"
            )));
        };
        let d = pool.remove(k);
        for h in pool.iter_mut() {
            let (bd, bc) = (b(*h, d), b(*h, c));
            if bd {
                *h ^= c;
            }
            if bc {
                *h ^= d;
            }
        }
        pairs.push((c, d));
    }

    // Equalize spins within pairs, then cancel fermionic pairs two at a time.
    for (c, d) in pairs.iter_mut() {
        match (fermion(*c), fermion(*d)) {
            (false, true) => *d ^= *c,
            (true, false) => *c ^= *d,
            _ => {}
        }
    }
    loop {
        let ferm: Vec<usize> = (0..pairs.len()).filter(|&i| fermion(pairs[i].0)).collect();
        if ferm.len() < 2 {
            break;
        }
        let (i, j) = (ferm[0], ferm[1]);
        let (ci, di) = pairs[i];
        let (cj, dj) = pairs[j];
        pairs[i] = (ci ^ cj, di ^ cj);
        pairs[j] = (ci ^ di ^ dj, ci ^ di ^ cj ^ dj);
    }
    if let Some(k) = pairs.iter().position(|p| fermion(p.0)) {
        pairs.swap(0, k);
    }
    let f1 = pairs.first().map_or(1, |p| t.theta(p.0));

    let c: Vec<Charge> = pairs.iter().map(|p| p.0).collect();
    let d: Vec<Charge> = pairs.iter().map(|p| p.1).collect();
    let c_tilde: Vec<Charge> = c.iter().map(|&x| apply_linear(iota, x)).collect();
    let d_tilde: Vec<Charge> = d.iter().map(|&x| apply_linear(iota, x)).collect();

    // Stabilizer duals of the kernel charges from the mixed statistics.
    let basis: Vec<Charge> = c.iter().chain(&d).chain(&e).copied().collect();
    let mut m = BitMatrix::new(stab.dim);
    for &g in &basis {
        let row: Vec<bool> = (0..stab.dim).map(|j| t.kappa_mixed(g, 1 << j) == -1).collect();
        m.push_row(BitVector::from_bools(&row))?;
    }
    let mut e_tilde = Vec::with_capacity(e.len());
    for k in 0..e.len() {
        let mut target = BitVector::zeros(basis.len());
        target.set(2 * c.len() + k, true);
        let Some((x, _)) = m.solve(&target)? else {
            return Err(Error::Structural(format!(
                "kernel charge {:#b} has no stabilizer charge with nontrivial mixed statistics",
                e[k]
            )));
        };
        e_tilde.push(x.iter_ones().fold(0, |acc, j| acc | (1 << j)));
    }

    Ok(CanonicalGenerators { c, d, e, c_tilde, d_tilde, e_tilde, f1, f2 })
}

/// Compares the number of bosons with the count implied by the characteristic.
pub fn boson_count_check(t: &StatTables, gauge: &ChargeGroup, ch: &Characteristic) -> Check {
    let bosons = gauge.charges().filter(|&c| t.theta(c) == 1).count() as u64;
    let expected = ch.boson_count();
    Check::new(
        "boson count matches characteristic",
        bosons == expected,
        format!("{bosons} bosons among {} charges, characteristic implies {expected}", gauge.order()),
    )
}

/// Recomputes the canonical relations from fresh strings, solved only for the
/// canonical charges with three-site hops and longer legs.
pub fn verify_canonical(
    code: &CodeDefinition,
    canon: &CanonicalGenerators,
    stab: &ChargeGroup,
    gauge: &ChargeGroup,
    iota: &[Charge],
    r_min: usize,
    cfg: &ChargeConfig,
) -> Result<Vec<Check>, Error> {
    let mut out = Vec::new();
    let gb = canon.gauge_basis();
    let sb = canon.stab_basis();
    out.push(Check::new(
        "canonical gauge generators independent",
        gb.len() == gauge.dim && rank(&gb, gauge.dim) == gauge.dim,
        format!("{} generators for dimension {}", gb.len(), gauge.dim),
    ));
    out.push(Check::new(
        "canonical stabilizer generators independent",
        sb.len() == stab.dim && rank(&sb, stab.dim) == stab.dim,
        format!("{} generators for dimension {}", sb.len(), stab.dim),
    ));
    let iota_ok = canon.c.iter().zip(&canon.c_tilde).all(|(&x, &y)| apply_linear(iota, x) == y)
        && canon.d.iter().zip(&canon.d_tilde).all(|(&x, &y)| apply_linear(iota, x) == y)
        && canon.e.iter().all(|&x| apply_linear(iota, x) == 0);
    out.push(Check::new("canonical images under the stabilizer map", iota_ok, "c, d map to their duals; e map to 1"));

    let q = code.qubits_per_site;
    let step = 3;
    let Some(gk) =
        solve_kit(code.charge_recipes(), &gauge.recipe_charges, gauge.dim, q, &gb, step, r_min, cfg.r_max, cfg.exec)
    else {
        return Err(Error::ChargeAnalysis("no three-site hops for the canonical charges".into()));
    };
    let Some(sk) = solve_kit(
        &code.stabilizer_recipes,
        &stab.recipe_charges,
        stab.dim,
        q,
        &canon.e_tilde,
        step,
        r_min,
        cfg.r_max,
        cfg.exec,
    ) else {
        return Err(Error::ChargeAnalysis("no three-site hops for the stabilizer duals".into()));
    };
    let r = gk.r.max(sk.r);
    let geom = Geometry::for_kit(r, code.reach(), step, 4);
    let lat = TorusLattice::new(geom.side, geom.side, q);
    let a = geom.leg;
    let alpha = canon.c.len();

    let mut spin_ok = true;
    let mut detail = Vec::new();
    for (i, (&c, &d)) in canon.c.iter().zip(&canon.d).enumerate() {
        let want = if i == 0 { canon.f1 } else { 1 };
        for (name, x) in [("c", c), ("d", d)] {
            let got = spin(&gk, lat, x, a);
            if got != Some(want) {
                spin_ok = false;
                detail.push(format!("theta({name}{}) = {got:?}", i + 1));
            }
        }
    }
    for (k, &x) in canon.e.iter().enumerate() {
        let want = if k == 0 { canon.f2 } else { 1 };
        let got = spin(&gk, lat, x, a);
        if got != Some(want) {
            spin_ok = false;
            detail.push(format!("theta(e{}) = {got:?}", k + 1));
        }
    }
    out.push(Check::new(
        "canonical spins",
        spin_ok,
        if spin_ok { "as prescribed by f1, f2".into() } else { detail.join(", ") },
    ));

    let hs: Vec<_> = gb.iter().map(|&x| crossing_h(&gk, lat, x, a)).collect();
    let vs: Vec<_> = gb.iter().map(|&x| crossing_v(&gk, lat, x, a)).collect();
    let mut mutual_ok = true;
    let mut bad = Vec::new();
    for i in 0..2 * alpha {
        for j in 0..2 * alpha {
            let paired = i != j && i % alpha == j % alpha;
            let got = sign(hs[i].anticommutes(&vs[j]));
            if got != sign(paired) {
                mutual_ok = false;
                bad.push((i, j));
            }
        }
    }
    out.push(Check::new(
        "canonical mutual statistics",
        mutual_ok,
        if mutual_ok { format!("{} pairs", 4 * alpha * alpha) } else { format!("violations at {bad:?}") },
    ));

    let vs_stab: Vec<_> = canon.e_tilde.iter().map(|&x| crossing_v(&sk, lat, x, a)).collect();
    let mut mixed_ok = true;
    let mut bad = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        for (k, v) in vs_stab.iter().enumerate() {
            let want = sign(i == 2 * alpha + k);
            if sign(h.anticommutes(v)) != want {
                mixed_ok = false;
                bad.push((i, k));
            }
        }
    }
    out.push(Check::new(
        "canonical mixed statistics",
        mixed_ok,
        if mixed_ok { format!("{} pairs", gb.len() * vs_stab.len()) } else { format!("violations at {bad:?}") },
    ));
    Ok(out)
}

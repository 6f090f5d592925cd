//! Segment operators on a coarse lattice and their commutation table.
//!
//! Every canonical charge gets a horizontal and a vertical segment of `L` sites,
//! built from hops. Paired charges use direct segments for `c` and dual segments,
//! offset by half a segment, for `d`; each segment is multiplied by a stabilizer
//! generator at its start when needed so that segments sharing an endpoint
//! commute up to the spin. Kernel charges are closed into gauge operators by
//! local Paulis at both ends, and their duals are stabilizer strings.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::lattice::{Generator, LatticePauli, TorusLattice};
use crate::Error;

use super::strings::{local_syndrome, solve_band, Axis, Morphism, StringKit};
use super::{sign, Charge, ChargeAnalysis, Sign};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkReport {
    /// Segment length in sites.
    pub segment: usize,
    /// Torus side the segments were laid out on.
    pub side: usize,
    /// Number of commutators compared.
    pub checked: usize,
    /// Segments multiplied by an endpoint stabilizer, e.g. `c1 vertical end`.
    pub adjustments: Vec<String>,
    pub failures: Vec<String>,
}

impl FrameworkReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Edge {
    vertex: (i64, i64),
    axis: Axis,
}

impl Edge {
    fn direct(&self, l: i64) -> ((i64, i64), [(i64, i64); 2]) {
        let s = (self.vertex.0 * l, self.vertex.1 * l);
        let e = match self.axis {
            Axis::X => (s.0 + l, s.1),
            Axis::Y => (s.0, s.1 + l),
        };
        (s, [s, e])
    }

    /// The dual edge crossing this one at its midpoint, as (axis, start, endpoints).
    fn dual(&self, l: i64) -> (Axis, (i64, i64), [(i64, i64); 2]) {
        let h = l / 2;
        let s = (self.vertex.0 * l, self.vertex.1 * l);
        match self.axis {
            Axis::X => {
                let a = (s.0 + h, s.1 - h);
                (Axis::Y, a, [a, (a.0, a.1 + l)])
            }
            Axis::Y => {
                let a = (s.0 - h, s.1 + h);
                (Axis::X, a, [a, (a.0 + l, a.1)])
            }
        }
    }
}

fn share(a: &[(i64, i64); 2], b: &[(i64, i64); 2]) -> bool {
    a.iter().any(|p| b.contains(p))
}

fn patch() -> Vec<Edge> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i < 2 {
                out.push(Edge { vertex: (i, j), axis: Axis::X });
            }
            if j < 2 {
                out.push(Edge { vertex: (i, j), axis: Axis::Y });
            }
        }
    }
    out
}

/// Stabilizer generators flipped by restricting the gauge endpoint of `c`, placed
/// at the origin, to the stabilizer group.
fn restricted_endpoint(a: &ChargeAnalysis, c: Charge) -> Morphism {
    let mut m = Morphism::default();
    for &g in &a.kits.gauge.reps[&c] {
        for (s, dec) in a.decompositions.iter().enumerate() {
            for &(gg, dx, dy) in dec {
                if gg == g {
                    m = m.add(&Morphism::at(&[s], (-dx, -dy)));
                }
            }
        }
    }
    m
}

/// Sign-adjusted segments of one paired charge.
struct Adjusted<'a> {
    kit: &'a StringKit,
    charge: Charge,
    fix: Option<Generator>,
    flips: [bool; 3],
}

impl Adjusted<'_> {
    fn build(&self, lat: TorusLattice, l: usize, start: (i64, i64), axis: Axis) -> LatticePauli {
        let mut p = self.kit.line(lat, self.charge, start, axis, l / self.kit.step);
        if let Some(x) = &self.fix {
            let place = |off: (i64, i64)| {
                let site = lat.wrap(x.site.0 as i64 + off.0, x.site.1 as i64 + off.1);
                Generator {
                    recipe: x.recipe,
                    site,
                    support: x
                        .support
                        .iter()
                        .map(|&(i, bx, bz)| (lat.translate_index(i, off.0, off.1), bx, bz))
                        .collect(),
                }
                .to_pauli(lat)
            };
            match axis {
                Axis::X => {
                    if self.flips[0] {
                        p.mul_assign(&place(start));
                    }
                }
                Axis::Y => {
                    if self.flips[1] {
                        p.mul_assign(&place(start));
                    }
                    if self.flips[2] {
                        p.mul_assign(&place((start.0, start.1 + l as i64)));
                    }
                }
            }
        }
        p
    }
}

fn adjusted<'a>(a: &'a ChargeAnalysis, lat: TorusLattice, l: usize, c: Charge) -> Result<Adjusted<'a>, Error> {
    let kit = &a.kits.gauge;
    let theta = a.tables.theta(c);
    let li = l as i64;
    let hops = l / kit.step;
    let h = kit.line(lat, c, (0, 0), Axis::X, hops);
    let v = kit.line(lat, c, (0, 0), Axis::Y, hops);
    let u = theta * sign(h.anticommutes(&h.translate(li, 0)));
    let vv = theta * u * sign(h.anticommutes(&v));
    let w = theta * vv * sign(v.anticommutes(&v.translate(0, li)));
    let flips = [u == -1, vv == -1, w == -1];
    let fix = if flips.iter().any(|&f| f) {
        let f = restricted_endpoint(a, c);
        let &(s, x, y) = f
            .flipped
            .iter()
            .next()
            .ok_or_else(|| Error::Structural(format!("charge {c:#b} restricts to no stabilizer generator")))?;
        let g = Generator::place(&lat, s, &a.code.stabilizer_recipes[s], lat.wrap(x, y));
        if !g.anticommutes(&h) {
            return Err(Error::Structural("segment does not flip its endpoint stabilizer".into()));
        }
        Some(g)
    } else {
        None
    };
    Ok(Adjusted { kit, charge: c, fix, flips })
}

/// Builds segments for every canonical charge on a 3x3-vertex patch and checks
/// their commutation table.
pub fn verify_framework(a: &ChargeAnalysis) -> Result<FrameworkReport, Error> {
    let canon = &a.canonical;
    let reach = a.code.reach();
    let r = a.radius();
    let mut l = 2 * (r + reach) + 4;
    l = l.div_ceil(2) * 2;
    let side = 3 * l + 2 * (r + 2 * reach) + 8;
    let q = a.code.qubits_per_site;
    let lat = TorusLattice::new(side, side, q);
    let li = l as i64;
    let edges = patch();
    let mut checked = 0;
    let mut adjustments = Vec::new();
    let mut failures = Vec::new();
    let mut expect = |name: String, got: Sign, want: Sign| {
        checked += 1;
        if got != want {
            failures.push(format!("{name}: got {got:+}, expected {want:+}"));
        }
    };

    for (k, (&c, &d)) in canon.c.iter().zip(&canon.d).enumerate() {
        let ac = adjusted(a, lat, l, c)?;
        let ad = adjusted(a, lat, l, d)?;
        for (name, adj) in [("c", &ac), ("d", &ad)] {
            for (flip, what) in adj.flips.iter().zip(["horizontal start", "vertical start", "vertical end"]) {
                if *flip {
                    adjustments.push(format!("{name}{} {what}", k + 1));
                }
            }
        }
        let direct: Vec<_> = edges
            .iter()
            .map(|e| {
                let (s, ends) = e.direct(li);
                (ac.build(lat, l, s, e.axis), ends)
            })
            .collect();
        let dual: Vec<_> = edges
            .iter()
            .map(|e| {
                let (axis, s, ends) = e.dual(li);
                (ad.build(lat, l, s, axis), ends)
            })
            .collect();
        for (set, name, theta) in [(&direct, "c", a.tables.theta(c)), (&dual, "d", a.tables.theta(d))] {
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let want = if share(&set[i].1, &set[j].1) { theta } else { 1 };
                    expect(format!("{name}{} edges {i},{j}", k + 1), sign(set[i].0.anticommutes(&set[j].0)), want);
                }
            }
        }
        for i in 0..edges.len() {
            for j in 0..edges.len() {
                expect(
                    format!("c{0}/d{0} edges {i},{j}", k + 1),
                    sign(direct[i].0.anticommutes(&dual[j].0)),
                    sign(i == j),
                );
            }
        }
    }

    for (k, (&e, &et)) in canon.e.iter().zip(&canon.e_tilde).enumerate() {
        let stabs = &a.code.stabilizer_recipes;
        let f = restricted_endpoint(a, e);
        let closing = solve_band(stabs, q, &[(0, 0)], std::slice::from_ref(&f), r + reach, Execution::default())
            .pop()
            .flatten()
            .ok_or_else(|| Error::ChargeAnalysis(format!("kernel charge e{} has no local closing operator", k + 1)))?;
        let kit = &a.kits.gauge;
        let seg = |s: (i64, i64), axis: Axis| {
            let mut p = kit.line(lat, e, s, axis, l / kit.step);
            let end = match axis {
                Axis::X => (s.0 + li, s.1),
                Axis::Y => (s.0, s.1 + li),
            };
            p.apply_terms(s, &closing);
            p.apply_terms(end, &closing);
            p
        };
        let direct: Vec<_> = edges
            .iter()
            .map(|ed| {
                let (s, ends) = ed.direct(li);
                (seg(s, ed.axis), ends)
            })
            .collect();
        let skit = &a.kits.stab;
        let dual: Vec<_> = edges
            .iter()
            .map(|ed| {
                let (axis, s, ends) = ed.dual(li);
                (skit.line(lat, et, s, axis, l / skit.step), ends)
            })
            .collect();
        let closed = direct.iter().all(|(p, _)| local_syndrome(stabs, p).is_empty());
        expect(format!("e{} segments commute with the stabilizer", k + 1), sign(!closed), 1);
        let theta = a.tables.theta(e);
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let want = if share(&direct[i].1, &direct[j].1) { theta } else { 1 };
                expect(format!("e{} edges {i},{j}", k + 1), sign(direct[i].0.anticommutes(&direct[j].0)), want);
            }
        }
        for i in 0..edges.len() {
            for j in 0..edges.len() {
                expect(
                    format!("e{0}/dual e{0} edges {i},{j}", k + 1),
                    sign(direct[i].0.anticommutes(&dual[j].0)),
                    sign(i == j),
                );
            }
        }
    }

    Ok(FrameworkReport { segment: l, side, checked, adjustments, failures })
}

//! Codes on a finite torus: closed loops of the canonical charges, the homology
//! adjustment that turns `(G, S)` into a gauge code, and the logical operators.
//!
//! Every loop is a full-wrap line of hops, so it closes on any torus whose side is
//! a multiple of the hop step. Direct loops come from the gauge kit, the duals of
//! kernel charges from the stabilizer kit.

use serde::{Deserialize, Serialize};

use crate::charge::strings::Axis;
use crate::charge::{sign, Charge, ChargeAnalysis, Check};
use crate::code::{CodeDefinition, GeneratorRecipe};
use crate::group::{count_logical_qubits, gauge_code_identity, GroupBasis};
use crate::lattice::{place_all, syndrome, LatticePauli, TorusLattice};
use crate::Error;

/// Smallest torus, in sites of `code`, that is at least `2m` per axis and a multiple
/// of the blocking `level`.
pub fn min_torus_size(code: &CodeDefinition, level: usize) -> (usize, usize) {
    let side = (2 * code.range()).max(4).next_multiple_of(level.max(1));
    (side, side)
}

/// Default assembly size: twice the minimum, at least 8.
pub fn default_torus_size(code: &CodeDefinition, level: usize) -> (usize, usize) {
    let (m, _) = min_torus_size(code, level);
    let side = (2 * m).max(8).next_multiple_of(level.max(1));
    (side, side)
}

/// Loops per canonical charge: paired charges `c_1..c_α` first, then the kernel
/// charges `e_1..e_β`.
#[derive(Clone, Debug)]
pub struct HomologyCycles {
    pub charges: Vec<Charge>,
    /// Number of paired charges; the remaining entries are kernel charges.
    pub paired: usize,
    /// Horizontal direct loop.
    pub z1: Vec<LatticePauli>,
    /// Vertical direct loop.
    pub z2: Vec<LatticePauli>,
    /// Vertical dual loop, crossing `z1` once.
    pub z1_star: Vec<LatticePauli>,
    /// Horizontal dual loop, crossing `z2` once.
    pub z2_star: Vec<LatticePauli>,
}

impl HomologyCycles {
    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }
}

/// Lays out the loops on `lat`, whose sides are in units of the analysed code's sites.
/// Direct loops run along row and column 0, dual loops half a torus away.
pub fn extract_cycles(a: &ChargeAnalysis, lat: TorusLattice) -> Result<HomologyCycles, Error> {
    let canon = &a.canonical;
    let (gk, sk) = (&a.kits.gauge, &a.kits.stab);
    for kit in [gk, sk] {
        if !lat.lx.is_multiple_of(kit.step) || !lat.ly.is_multiple_of(kit.step) {
            return Err(Error::TorusTooSmall {
                lx: lat.lx,
                ly: lat.ly,
                reason: format!("sides must be multiples of the hop step {}", kit.step),
            });
        }
    }
    let mid = ((lat.lx / 2) as i64, (lat.ly / 2) as i64);
    let loops = |kit: &crate::charge::strings::StringKit, c: Charge, offset: (i64, i64)| {
        (
            kit.line(lat, c, (0, offset.1), Axis::X, lat.lx / kit.step),
            kit.line(lat, c, (offset.0, 0), Axis::Y, lat.ly / kit.step),
        )
    };
    let mut out = HomologyCycles {
        charges: Vec::new(),
        paired: canon.c.len(),
        z1: Vec::new(),
        z2: Vec::new(),
        z1_star: Vec::new(),
        z2_star: Vec::new(),
    };
    let duals = canon.d.iter().map(|&d| (d, gk)).chain(canon.e_tilde.iter().map(|&e| (e, sk)));
    for (&c, (d, dual_kit)) in canon.c.iter().chain(&canon.e).zip(duals) {
        let (h, v) = loops(gk, c, (0, 0));
        let (hs, vs) = loops(dual_kit, d, mid);
        out.charges.push(c);
        out.z1.push(h);
        out.z2.push(v);
        out.z1_star.push(vs);
        out.z2_star.push(hs);
    }
    Ok(out)
}

fn gauge_recipes(code: &CodeDefinition) -> &[GeneratorRecipe] {
    code.charge_recipes()
}

/// Commutation relations among the loops: direct loops commute with the gauge
/// group, kernel duals with the stabilizer group, and
/// `[z_{i,q}, z*_{j,q'}] = 1 − 2δ_ij δ_qq'`, `[z, z] = 1`, `[z*, z*] = 1` unless both
/// charges are kernel charges.
pub fn cycle_relations(code: &CodeDefinition, lat: TorusLattice, cyc: &HomologyCycles) -> Vec<Check> {
    let gauge = place_all(&lat, gauge_recipes(code));
    let stab = place_all(&lat, &code.stabilizer_recipes);
    let mut checks = Vec::new();
    let mut direct_ok = true;
    let mut dual_ok = true;
    for q in 0..cyc.len() {
        for p in [&cyc.z1[q], &cyc.z2[q]] {
            direct_ok &= syndrome(&gauge, p).is_zero();
        }
        let against = if q < cyc.paired { &gauge } else { &stab };
        for p in [&cyc.z1_star[q], &cyc.z2_star[q]] {
            dual_ok &= syndrome(against, p).is_zero();
        }
    }
    checks.push(Check::new("direct loops commute with the gauge group", direct_ok, ""));
    checks.push(Check::new("dual loops are closed", dual_ok, ""));

    let mut bad = Vec::new();
    let z = [&cyc.z1, &cyc.z2];
    let zs = [&cyc.z1_star, &cyc.z2_star];
    for q in 0..cyc.len() {
        for q2 in 0..cyc.len() {
            for i in 0..2 {
                for j in 0..2 {
                    let want = sign(i == j && q == q2);
                    let got = sign(z[i][q].anticommutes(&zs[j][q2]));
                    if got != want {
                        bad.push(format!("[z{},{q} z*{},{q2}] = {got:+}", i + 1, j + 1));
                    }
                    if z[i][q].anticommutes(&z[j][q2]) {
                        bad.push(format!("[z{},{q} z{},{q2}] = -1", i + 1, j + 1));
                    }
                    let both_kernel = q >= cyc.paired && q2 >= cyc.paired;
                    if !both_kernel && zs[i][q].anticommutes(&zs[j][q2]) {
                        bad.push(format!("[z*{},{q} z*{},{q2}] = -1", i + 1, j + 1));
                    }
                }
            }
        }
    }
    checks.push(Check::new("loop commutation table", bad.is_empty(), bad.join("; ")));
    checks
}

/// A loop times its translate by one site across it is a stabilizer (gauge element
/// for kernel duals): homologous loops act identically.
pub fn homologous_translates(stab: &GroupBasis, gauge: &GroupBasis, cyc: &HomologyCycles) -> Check {
    let mut bad = Vec::new();
    for q in 0..cyc.len() {
        let dual_group = if q < cyc.paired { stab } else { gauge };
        let cases = [
            ("z1", &cyc.z1[q], (0, 1), stab),
            ("z2", &cyc.z2[q], (1, 0), stab),
            ("z1*", &cyc.z1_star[q], (1, 0), dual_group),
            ("z2*", &cyc.z2_star[q], (0, 1), dual_group),
        ];
        for (name, p, (dx, dy), group) in cases {
            if !group.contains(&p.mul(&p.translate(dx, dy))) {
                bad.push(format!("{name},{q}"));
            }
        }
    }
    Check::new("translated loops differ by the group", bad.is_empty(), bad.join(", "))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjustMode {
    /// Kernel-charge loops join the stabilizer group.
    #[default]
    Stabilizer,
    /// Dual loops of kernel charges join the gauge group.
    Gauge,
}

impl std::str::FromStr for AdjustMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "stab" | "stabilizer" => Ok(AdjustMode::Stabilizer),
            "gauge" => Ok(AdjustMode::Gauge),
            other => Err(Error::Config(format!("unknown adjustment mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdjustedCode {
    pub s_prime: GroupBasis,
    pub g_prime: GroupBasis,
    pub mode: AdjustMode,
}

/// Extends `S` by the kernel loops or `G` by their duals, then checks that the pair
/// is a gauge code.
pub fn homology_adjust(
    stab: &GroupBasis,
    gauge: &GroupBasis,
    cyc: &HomologyCycles,
    mode: AdjustMode,
) -> Result<AdjustedCode, Error> {
    let mut s_prime = stab.clone();
    let mut g_prime = gauge.clone();
    for q in cyc.paired..cyc.len() {
        match mode {
            AdjustMode::Stabilizer => {
                s_prime.push(&cyc.z1[q], format!("z1,{q}"));
                s_prime.push(&cyc.z2[q], format!("z2,{q}"));
            }
            AdjustMode::Gauge => {
                g_prime.push(&cyc.z1_star[q], format!("z1*,{q}"));
                g_prime.push(&cyc.z2_star[q], format!("z2*,{q}"));
            }
        }
    }
    if !gauge_code_identity(&g_prime, &s_prime) {
        return Err(Error::Structural(format!(
            "{mode:?}-extended groups do not form a gauge code: the gauge center differs from the stabilizer group"
        )));
    }
    Ok(AdjustedCode { s_prime, g_prime, mode })
}

#[derive(Clone, Debug)]
pub struct LogicalOperatorSet {
    pub x_bar: Vec<LatticePauli>,
    pub z_bar: Vec<LatticePauli>,
}

impl LogicalOperatorSet {
    pub fn len(&self) -> usize {
        self.x_bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_bar.is_empty()
    }

    /// Logical qubits whose `X̄` or `Z̄` anticommutes with `p`.
    pub fn flipped(&self, p: &LatticePauli) -> Vec<bool> {
        self.x_bar.iter().zip(&self.z_bar).map(|(x, z)| x.anticommutes(p) || z.anticommutes(p)).collect()
    }

    /// `[X̄_i, Z̄_j] = −1` iff `i = j`, everything else commutes.
    pub fn relations_hold(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.x_bar[i].anticommutes(&self.z_bar[j]) == (i == j)
                    && !self.x_bar[i].anticommutes(&self.x_bar[j])
                    && !self.z_bar[i].anticommutes(&self.z_bar[j])
            })
        })
    }
}

/// `X̄_q = z_{1,q}`, `Z̄_q = z*_{1,q}`, `X̄_{α+q} = z_{2,q}`, `Z̄_{α+q} = z*_{2,q}`
/// for the paired charges.
pub fn extract_logicals(cyc: &HomologyCycles) -> LogicalOperatorSet {
    let a = cyc.paired;
    LogicalOperatorSet {
        x_bar: cyc.z1[..a].iter().chain(&cyc.z2[..a]).cloned().collect(),
        z_bar: cyc.z1_star[..a].iter().chain(&cyc.z2_star[..a]).cloned().collect(),
    }
}

/// Summary of a code assembled on a torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSummary {
    /// Torus size in sites of the normalized code.
    pub size: (usize, usize),
    pub qubits: usize,
    pub stabilizer_rank: usize,
    pub gauge_rank: usize,
    pub adjusted_stabilizer_rank: usize,
    pub adjusted_gauge_rank: usize,
    pub mode: AdjustMode,
    pub logical_qubits: usize,
    /// Support weights of `X̄_i` and `Z̄_i`.
    pub logical_weights: Vec<(usize, usize)>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct TorusAssembly {
    pub lattice: TorusLattice,
    pub cycles: HomologyCycles,
    pub adjusted: AdjustedCode,
    pub logicals: LogicalOperatorSet,
    pub summary: TorusSummary,
}

/// Assembles the analysed code on a torus of `size` normalized sites, checks every
/// loop relation, both adjustment modes, and `k = 2α`.
pub fn assemble_torus(
    a: &ChargeAnalysis,
    normalized: &CodeDefinition,
    size: (usize, usize),
    mode: AdjustMode,
) -> Result<TorusAssembly, Error> {
    let (mx, my) = min_torus_size(normalized, a.level);
    let l = a.level;
    if size.0 < mx || size.1 < my || !size.0.is_multiple_of(l) || !size.1.is_multiple_of(l) {
        return Err(Error::TorusTooSmall {
            lx: size.0,
            ly: size.1,
            reason: format!("need at least {mx}x{my} in multiples of the blocking level {l}"),
        });
    }
    let code = &a.code;
    let lat = TorusLattice::new(size.0 / l, size.1 / l, code.qubits_per_site);
    let cycles = extract_cycles(a, lat)?;
    let mut checks = cycle_relations(code, lat, &cycles);

    let stab_gens = place_all(&lat, &code.stabilizer_recipes);
    let stab = GroupBasis::from_generators(&lat, &code.stabilizer_recipes, &stab_gens);
    let gauge_gens = place_all(&lat, gauge_recipes(code));
    let gauge = GroupBasis::from_generators(&lat, gauge_recipes(code), &gauge_gens);
    checks.push(homologous_translates(&stab, &gauge, &cycles));

    let n = lat.n_qubits();
    let alpha = cycles.paired;
    let mut chosen = None;
    for m in [AdjustMode::Stabilizer, AdjustMode::Gauge] {
        let adj = homology_adjust(&stab, &gauge, &cycles, m)?;
        let k = count_logical_qubits(adj.s_prime.rank(), adj.g_prime.rank(), n)?;
        checks.push(Check::new(
            format!("{} extension forms a gauge code with k = 2α", format!("{m:?}").to_lowercase()),
            k == 2 * alpha,
            format!("k = {k}, α = {alpha}"),
        ));
        if k != 2 * alpha {
            return Err(Error::Structural(format!(
                "rank counting gives k = {k} but the charges give 2α = {}",
                2 * alpha
            )));
        }
        if m == mode {
            chosen = Some((adj, k));
        }
    }
    let (adjusted, k) = chosen.expect("both modes evaluated");
    let logicals = extract_logicals(&cycles);
    checks.push(Check::new("logical operator relations", logicals.relations_hold(), ""));

    if let Some(c) = checks.iter().find(|c| !c.passed) {
        return Err(Error::Structural(format!("{}: {}", c.name, c.detail)));
    }
    let summary = TorusSummary {
        size,
        qubits: n,
        stabilizer_rank: stab.rank(),
        gauge_rank: gauge.rank(),
        adjusted_stabilizer_rank: adjusted.s_prime.rank(),
        adjusted_gauge_rank: adjusted.g_prime.rank(),
        mode,
        logical_qubits: k,
        logical_weights: logicals.x_bar.iter().zip(&logicals.z_bar).map(|(x, z)| (x.weight(), z.weight())).collect(),
        checks,
    };
    Ok(TorusAssembly { lattice: lat, cycles, adjusted, logicals, summary })
}

//! The full analysis pipeline and its serializable report.
//!
//! Stages run in order and stop at the first failure: normalization, stabilizer
//! validity, local independence, windowed topological checks, charges and
//! statistics, segment framework, torus assembly.

use serde::{Deserialize, Serialize};

use crate::charge::canonical::Characteristic;
use crate::charge::framework::{verify_framework, FrameworkReport};
use crate::charge::{analyze_charges, Charge, ChargeAnalysis, ChargeConfig, Check, Sign};
use crate::code::CodeDefinition;
use crate::exec::Execution;
use crate::group::{
    check_stabilizer, check_topological_window, check_tssg_window, default_window, local_independence_check,
    window_torus_side, IndependenceReport, PhasedPauli, StabilizerVerdict,
};
use crate::lattice::{place_all, syndrome, TorusLattice};
use crate::torus::{assemble_torus, default_torus_size, min_torus_size, AdjustMode, TorusAssembly, TorusSummary};
use crate::Error;

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    /// Assembly torus in normalized sites; defaults to [`default_torus_size`].
    pub torus: Option<(usize, usize)>,
    /// Window side for the locality checks; defaults to [`default_window`].
    pub window: Option<usize>,
    pub coarse_max: usize,
    pub r_max: usize,
    pub adjust: AdjustMode,
    pub exec: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let c = ChargeConfig::default();
        AnalysisConfig {
            torus: None,
            window: None,
            coarse_max: c.coarse_max,
            r_max: c.r_max,
            adjust: AdjustMode::default(),
            exec: Execution::default(),
        }
    }
}

/// Configuration after defaults were filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub torus: (usize, usize),
    pub window: usize,
    pub coarse_max: usize,
    pub r_max: usize,
    pub adjust: AdjustMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Sites blocked together so that every generator has range at most 2.
    pub step: usize,
    /// Range after that blocking.
    pub range: usize,
    pub qubits_per_site: usize,
    /// Further blocking at which the charges became translation invariant.
    pub charge_level: usize,
    pub rejected_levels: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowVerdict {
    pub window_size: usize,
    pub passed: bool,
    /// Weight of a local undetectable operator outside the stabilizer, if found.
    pub witness_weight: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub stabilizer: StabilizerVerdict,
    pub stabilizer_commutes_with_gauge: bool,
    pub independence: IndependenceReport,
    pub window: WindowVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeSummary {
    pub stabilizer_dim: usize,
    pub gauge_dim: usize,
    pub stabilizer_constraint_dims: [usize; 2],
    pub gauge_constraint_dims: [usize; 2],
    pub constraint_sizes: [usize; 2],
    /// Image of each gauge basis charge in the stabilizer charge group.
    pub iota: Vec<Charge>,
    pub string_radius: usize,
}

/// Statistics over the canonical generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSummary {
    /// `(label, charge)` for `c_i`, `d_i`, `e_k`.
    pub basis: Vec<(String, Charge)>,
    /// `(label, charge)` for `c̃_i`, `d̃_i`, `ẽ_k`.
    pub dual_basis: Vec<(String, Charge)>,
    pub theta: Vec<Sign>,
    pub kappa: Vec<Vec<Sign>>,
    pub kappa_mixed: Vec<Vec<Sign>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub config: ResolvedConfig,
    pub code: String,
    pub normalization: Normalization,
    pub verdicts: Verdicts,
    pub charges: ChargeSummary,
    pub tables: TableSummary,
    pub characteristic: Characteristic,
    pub boson_count: u64,
    pub checks: Vec<Check>,
    pub framework: FrameworkReport,
    pub torus: TorusSummary,
    /// Findings that deserve attention even though every check passed.
    pub notices: Vec<String>,
}

/// Everything computed by [`analyze`].
pub struct Analysis {
    pub normalized: CodeDefinition,
    pub charges: ChargeAnalysis,
    pub torus: TorusAssembly,
    pub report: AnalysisReport,
}

pub fn tool_version() -> String {
    format!("topocharge {}", env!("CARGO_PKG_VERSION"))
}

fn labels(canon: &crate::charge::canonical::CanonicalGenerators, tilde: bool) -> Vec<(String, Charge)> {
    let t = if tilde { "~" } else { "" };
    let (c, d, e) =
        if tilde { (&canon.c_tilde, &canon.d_tilde, &canon.e_tilde) } else { (&canon.c, &canon.d, &canon.e) };
    let mut out = Vec::new();
    for (name, list) in [("c", c), ("d", d), ("e", e)] {
        for (i, &x) in list.iter().enumerate() {
            out.push((format!("{name}{t}{}", i + 1), x));
        }
    }
    out
}

fn table_summary(a: &ChargeAnalysis) -> TableSummary {
    let basis = labels(&a.canonical, false);
    let dual_basis = labels(&a.canonical, true);
    let t = &a.tables;
    TableSummary {
        theta: basis.iter().map(|&(_, c)| t.theta(c)).collect(),
        kappa: basis.iter().map(|&(_, c)| basis.iter().map(|&(_, d)| t.kappa(c, d)).collect()).collect(),
        kappa_mixed: basis
            .iter()
            .map(|&(_, c)| dual_basis.iter().map(|&(_, s)| t.kappa_mixed(c, s)).collect())
            .collect(),
        basis,
        dual_basis,
    }
}

fn stabilizer_stage(code: &CodeDefinition, side: usize) -> Result<(StabilizerVerdict, bool), Error> {
    let lat = TorusLattice::new(side, side, code.qubits_per_site);
    let n = lat.n_qubits();
    let stab = place_all(&lat, &code.stabilizer_recipes);
    let phased: Vec<PhasedPauli> = stab.iter().map(|g| PhasedPauli::from_generator(n, g)).collect();
    let prov: Vec<String> = stab.iter().map(|g| crate::lattice::provenance(&code.stabilizer_recipes, g)).collect();
    let verdict = check_stabilizer(&phased, &prov);
    if !verdict.commuting {
        let (a, b) = verdict.anticommuting_pair.clone().unwrap_or_default();
        return Err(Error::InvalidStabilizer(format!("{a} and {b} anticommute")));
    }
    let gauge = place_all(&lat, code.charge_recipes());
    for g in &stab {
        if !syndrome(&gauge, &g.to_pauli(lat)).is_zero() {
            return Err(Error::InvalidStabilizer(format!(
                "{} does not commute with the gauge group",
                crate::lattice::provenance(&code.stabilizer_recipes, g)
            )));
        }
    }
    Ok((verdict, true))
}

/// A stabilizer code with a fermionic charge pair would be the first of its kind.
fn notices(normalized: &CodeDefinition, a: &ChargeAnalysis) -> Vec<String> {
    let mut out = Vec::new();
    if !normalized.is_subsystem() && a.characteristic.f1 == -1 {
        out.push(format!(
            "stabilizer code with f1 = -1: the pair c{0}, d{0} is fermionic, no stabilizer code with this property was known",
            a.characteristic.alpha
        ));
    }
    out
}

/// Runs every stage on `code`.
pub fn analyze(code: &CodeDefinition, cfg: &AnalysisConfig) -> Result<Analysis, Error> {
    let step = code.normalization_level();
    let normalized = code.coarse_grain(step);
    let w = cfg.window.unwrap_or_else(|| default_window(&normalized));
    let wside = window_torus_side(&normalized, w);

    let (stabilizer, commutes) = stabilizer_stage(&normalized, wside)?;

    let independence = local_independence_check(&normalized, w);
    if !independence.passed {
        return Err(Error::LocalConstraint(format!(
            "generators {} multiply to the identity inside a {w}x{w} window",
            independence.constraint.as_deref().unwrap_or_default().join(" * ")
        )));
    }

    let wlat = TorusLattice::new(wside, wside, normalized.qubits_per_site);
    let window = if normalized.is_subsystem() {
        check_tssg_window(&normalized, &wlat, w, (0, 0))?
    } else {
        check_topological_window(&normalized, &wlat, w, (0, 0))?
    };
    if !window.passed {
        return Err(Error::NotTopological(format!(
            "a {w}x{w} window holds an undetectable operator that is not a stabilizer"
        )));
    }

    let ccfg = ChargeConfig { coarse_max: cfg.coarse_max, r_max: cfg.r_max, exec: cfg.exec };
    let charges = analyze_charges(&normalized, &ccfg)?;
    let mut checks: Vec<Check> = charges.all_checks().cloned().collect();
    if let Some(c) = checks.iter().find(|c| !c.passed) {
        return Err(Error::ChargeAnalysis(format!("{} failed: {}", c.name, c.detail)));
    }

    let framework = verify_framework(&charges)?;
    if !framework.passed() {
        return Err(Error::Structural(format!("segment commutation table: {}", framework.failures.join("; "))));
    }

    let size = match cfg.torus {
        Some(s) => s,
        None => default_torus_size(&normalized, charges.level),
    };
    let (mx, my) = min_torus_size(&normalized, charges.level);
    if size.0 < mx || size.1 < my {
        return Err(Error::TorusTooSmall { lx: size.0, ly: size.1, reason: format!("need at least {mx}x{my}") });
    }
    let torus = assemble_torus(&charges, &normalized, size, cfg.adjust)?;
    checks.extend(torus.summary.checks.iter().cloned());
    let notices = notices(&normalized, &charges);

    let report = AnalysisReport {
        tool: tool_version(),
        config: ResolvedConfig {
            torus: size,
            window: w,
            coarse_max: cfg.coarse_max,
            r_max: cfg.r_max,
            adjust: cfg.adjust,
        },
        code: code.name.clone(),
        normalization: Normalization {
            step,
            range: normalized.range(),
            qubits_per_site: normalized.qubits_per_site,
            charge_level: charges.level,
            rejected_levels: charges.rejected_levels.clone(),
        },
        verdicts: Verdicts {
            stabilizer,
            stabilizer_commutes_with_gauge: commutes,
            independence,
            window: WindowVerdict {
                window_size: w,
                passed: window.passed,
                witness_weight: window.witness.as_ref().map(|p| p.weight()),
            },
        },
        charges: ChargeSummary {
            stabilizer_dim: charges.stabilizer.dim,
            gauge_dim: charges.gauge.dim,
            stabilizer_constraint_dims: charges.stabilizer.constraint_dims,
            gauge_constraint_dims: charges.gauge.constraint_dims,
            constraint_sizes: charges.stabilizer.sizes,
            iota: charges.iota.clone(),
            string_radius: charges.radius(),
        },
        tables: table_summary(&charges),
        characteristic: charges.characteristic,
        boson_count: charges.characteristic.boson_count(),
        checks,
        framework,
        torus: torus.summary.clone(),
        notices,
    };
    Ok(Analysis { normalized, charges, torus, report })
}

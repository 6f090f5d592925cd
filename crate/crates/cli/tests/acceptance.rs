//! Acceptance run: one PASS/FAIL line per criterion, with tolerances and time
//! limits pinned here.
//!
//! Run with `cargo test -p topocharge-cli --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topocharge::analysis::{analyze, Analysis, AnalysisConfig};
use topocharge::charge::canonical::{compose_characteristics, Characteristic};
use topocharge::charge::framework::verify_framework;
use topocharge::charge::{analyze_charges, ChargeAnalysis, ChargeConfig};
use topocharge::code::CodeDefinition;
use topocharge::decode::{monte_carlo, DecodeConfig, NoiseKind, NoiseModel};
use topocharge::exec::{map_indices, Execution};
use topocharge::fixtures::{fixture, REFERENCE};
use topocharge::gf2::{BitMatrix, BitVector};
use topocharge::group::{gauge_code_identity, GroupBasis};
use topocharge::lattice::{generator_matrix, place_all, TorusLattice};
use topocharge::torus::{assemble_torus, homology_adjust, AdjustMode};

const ANALYZE_LIMIT: Duration = Duration::from_secs(60);
const FRAMEWORK_LIMIT: Duration = Duration::from_secs(300);
const DECODE_LIMIT: Duration = Duration::from_secs(120);
const DECODE_TRIALS: u64 = 10_000;
const DECODE_P: f64 = 0.03;
const DECODE_SEED: u64 = 7;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    }};
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topocharge"))
}

fn cli(args: &[&str]) -> Result<(Vec<u8>, Duration), String> {
    let t = Instant::now();
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok((out.stdout, t.elapsed()))
}

fn code(spec: &str) -> CodeDefinition {
    let mut parts = spec.split('+').map(|n| fixture(n).unwrap());
    let first = parts.next().unwrap();
    parts.fold(first, |acc, c| CodeDefinition::compose(&acc, &c))
}

fn charges(c: &CodeDefinition) -> ChargeAnalysis {
    let c = c.coarse_grain(c.normalization_level());
    analyze_charges(&c, &ChargeConfig::default()).unwrap()
}

fn full(spec: &str) -> Analysis {
    analyze(&code(spec), &AnalysisConfig::default()).unwrap()
}

fn ch(alpha: usize, beta: usize, f1: i8, f2: i8) -> Characteristic {
    Characteristic { alpha, beta, f1, f2 }
}

fn characteristic_table() -> Outcome {
    let expected = [
        ("empty", ch(0, 0, 1, 1)),
        ("trivial", ch(0, 0, 1, 1)),
        ("subsystem-trivial", ch(0, 0, 1, 1)),
        ("toric", ch(1, 0, 1, 1)),
        ("subsystem-toric", ch(0, 1, 1, 1)),
        ("subsystem-color", ch(1, 0, -1, 1)),
        ("honeycomb", ch(0, 1, 1, -1)),
    ];
    let mut slowest = Duration::ZERO;
    for (name, want) in expected {
        let (out, t) = cli(&["analyze", name, "--json"])?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let got: Characteristic = serde_json::from_value(v["characteristic"].clone()).map_err(|e| e.to_string())?;
        ensure!(got == want, "{name}: {got} instead of {want}");
        ensure!(t <= ANALYZE_LIMIT, "{name} took {t:?}");
        slowest = slowest.max(t);
    }
    Ok(format!("7 fixtures exact, slowest analysis {slowest:.2?} (limit {ANALYZE_LIMIT:?})"))
}

fn logical_count() -> Outcome {
    let mut parts = Vec::new();
    for (spec, want) in [("empty", 0), ("trivial", 0), ("toric", 2), ("toric+toric", 4)] {
        let a = full(spec);
        let t = &a.report.torus;
        let lat = TorusLattice::new(t.size.0, t.size.1, a.normalized.qubits_per_site);
        let rank = generator_matrix(&lat, &place_all(&lat, &a.normalized.stabilizer_recipes)).rank();
        let k = lat.n_qubits() - rank;
        ensure!(
            k == want && 2 * a.report.characteristic.alpha == want,
            "{spec}: k = {k}, α = {}",
            a.report.characteristic.alpha
        );
        parts.push(format!("{spec} {k}"));
    }
    Ok(format!("k = 2α: {}", parts.join(", ")))
}

fn group_law() -> Outcome {
    for &name in REFERENCE {
        let a = charges(&fixture(name).unwrap());
        ensure!(a.gauge.order() == a.stabilizer.order(), "{name}: orders differ");
        for g in [&a.gauge, &a.stabilizer] {
            ensure!(g.constraint_dims[0] == g.constraint_dims[1], "{name}: constraint dims {:?}", g.constraint_dims);
            ensure!(
                g.order() == 1 << g.constraint_dims[0],
                "{name}: order {} vs 2^{}",
                g.order(),
                g.constraint_dims[0]
            );
        }
    }
    Ok("|λG| = |λS| = 2^constraints on 7 fixtures, stable at two sizes".into())
}

fn statistics_identities() -> Outcome {
    let mut pairs = 0;
    for &name in REFERENCE {
        let a = charges(&fixture(name).unwrap());
        let t = &a.tables;
        let all: Vec<u64> = a.gauge.charges().collect();
        for &c in &all {
            ensure!(t.kappa(c, c) == 1, "{name}: κ({c},{c}) = -1");
            let transparent = all.iter().all(|&d| t.kappa(c, d) == 1);
            ensure!((a.iota(c) == 0) == transparent, "{name}: ι kernel vs transparency at {c}");
            for &d in &all {
                pairs += 1;
                ensure!(t.theta(c ^ d) == t.theta(c) * t.theta(d) * t.kappa(c, d), "{name}: spin product at {c},{d}");
                ensure!(t.kappa(c, d) == t.kappa(d, c), "{name}: κ not symmetric");
                ensure!(t.kappa(c, d) == t.kappa_mixed(c, a.iota(d)), "{name}: κ through ι at {c},{d}");
                for &e in &all {
                    ensure!(t.kappa(c, d ^ e) == t.kappa(c, d) * t.kappa(c, e), "{name}: κ not bilinear");
                }
            }
        }
        let bosons = all.iter().filter(|&&c| t.theta(c) == 1).count() as u64;
        let x = a.characteristic;
        let corrected = (((1i64 << (x.alpha + 1)) + x.f1 as i64 + (x.f1 * x.f2) as i64) << (x.alpha + x.beta)) / 4;
        ensure!(bosons as i64 == corrected, "{name}: {bosons} bosons, formula {corrected}");
    }
    Ok(format!("{pairs} charge pairs; boson count = 2^(α+β−2)(2^(α+1)+f1+f1f2), a 2^(α+β−1) prefactor would double it"))
}

fn canonical_relations() -> Outcome {
    for &name in REFERENCE {
        let a = charges(&fixture(name).unwrap());
        let (k, t, x) = (&a.canonical, &a.tables, a.characteristic);
        for i in 0..x.alpha {
            let spin = if i == 0 { x.f1 } else { 1 };
            ensure!(t.theta(k.c[i]) == spin && t.theta(k.d[i]) == spin, "{name}: spins of pair {i}");
            ensure!(a.iota(k.c[i]) == k.c_tilde[i] && a.iota(k.d[i]) == k.d_tilde[i], "{name}: ι of pair {i}");
            for j in 0..x.alpha {
                ensure!(t.kappa(k.c[i], k.d[j]) == if i == j { -1 } else { 1 }, "{name}: κ(c{i},d{j})");
                ensure!(t.kappa(k.c[i], k.c[j]) == 1 && t.kappa(k.d[i], k.d[j]) == 1, "{name}: κ within c or d");
            }
        }
        for (i, &e) in k.e.iter().enumerate() {
            ensure!(a.iota(e) == 0, "{name}: ι(e{i}) ≠ 0");
            ensure!(t.theta(e) == if i == 0 { x.f2 } else { 1 }, "{name}: θ(e{i})");
            for (j, &et) in k.e_tilde.iter().enumerate() {
                ensure!(t.kappa_mixed(e, et) == if i == j { -1 } else { 1 }, "{name}: κ(e{i}, ẽ{j})");
            }
        }
        ensure!(a.canonical_checks.iter().all(|c| c.passed), "{name}: canonical checks");
    }
    Ok("spin, mutual and ι relations recomputed on the canonical generators of 7 fixtures".into())
}

fn framework() -> Outcome {
    let mut parts = Vec::new();
    for name in ["toric", "subsystem-toric", "honeycomb", "subsystem-color"] {
        let t = Instant::now();
        let a = charges(&fixture(name).unwrap());
        let f = verify_framework(&a).map_err(|e| e.to_string())?;
        let el = t.elapsed();
        ensure!(f.passed(), "{name}: {:?}", f.failures);
        let side = f.side * a.level;
        if name == "subsystem-color" {
            ensure!(a.level == 3 && side >= 12, "color code at level {} on side {side}", a.level);
            ensure!(el <= FRAMEWORK_LIMIT, "color code took {el:?}");
        }
        parts.push(format!("{name} {} on {side}x{side} ({el:.2?})", f.checked));
    }
    Ok(parts.join(", "))
}

fn torus_relations() -> Outcome {
    for spec in ["toric", "toric+toric"] {
        let a = full(spec);
        let cyc = &a.torus.cycles;
        let z: Vec<_> = cyc.z1.iter().chain(&cyc.z2).collect();
        let zs: Vec<_> = cyc.z1_star.iter().chain(&cyc.z2_star).collect();
        for (i, p) in z.iter().enumerate() {
            for (j, q) in zs.iter().enumerate() {
                ensure!(p.anticommutes(q) == (i == j), "{spec}: [z{i}, z*{j}]");
            }
        }
    }
    let a = full("subsystem-toric");
    let lat = a.torus.lattice;
    let c = &a.charges.code;
    let stab = GroupBasis::from_generators(&lat, &c.stabilizer_recipes, &place_all(&lat, &c.stabilizer_recipes));
    let gauge = GroupBasis::from_generators(&lat, c.charge_recipes(), &place_all(&lat, c.charge_recipes()));
    for mode in [AdjustMode::Stabilizer, AdjustMode::Gauge] {
        let adj = homology_adjust(&stab, &gauge, &a.torus.cycles, mode).map_err(|e| e.to_string())?;
        ensure!(gauge_code_identity(&adj.g_prime, &adj.s_prime), "subsystem toric {mode:?}");
        assemble_torus(&a.charges, &a.normalized, (8, 8), mode).map_err(|e| e.to_string())?;
    }
    Ok("loop table exact on toric and toric+toric; S′ and G′ both gauge codes for subsystem toric".into())
}

fn composition() -> Outcome {
    let singles: Vec<Characteristic> = REFERENCE.iter().map(|n| charges(&fixture(n).unwrap()).characteristic).collect();
    let mut pairs = Vec::new();
    for i in 0..REFERENCE.len() {
        for j in i + 1..REFERENCE.len() {
            pairs.push((i, j));
        }
    }
    let got = map_indices(pairs.len(), Execution::default(), |k| {
        let (i, j) = pairs[k];
        charges(&CodeDefinition::compose(&fixture(REFERENCE[i]).unwrap(), &fixture(REFERENCE[j]).unwrap()))
            .characteristic
    });
    for (&(i, j), g) in pairs.iter().zip(got) {
        let want = compose_characteristics(singles[i], singles[j]);
        ensure!(g == want, "{}+{}: {g} instead of {want}", REFERENCE[i], REFERENCE[j]);
    }
    Ok(format!("{} unordered pairs", pairs.len()))
}

fn equivalence() -> Outcome {
    for (a, b, want) in [
        ("toric", "toric+trivial", "equivalent"),
        ("toric", "trivial", "not equivalent"),
        ("honeycomb", "subsystem-toric", "topological charges not isomorphic"),
    ] {
        let (out, _) = cli(&["equiv", a, b, "--json"])?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        ensure!(v["verdict"] == want, "{a} vs {b}: {}", v["verdict"]);
    }
    Ok("3 verdicts".into())
}

fn decoding() -> Outcome {
    let t = Instant::now();
    let a = full("toric");
    let cfg = |p: f64| DecodeConfig {
        sizes: vec![4, 8],
        noise: NoiseModel::new(NoiseKind::IndependentXz, p).unwrap(),
        trials: DECODE_TRIALS,
        seed: DECODE_SEED,
        exec: Execution::default(),
    };
    // Errors out if any correction misses its syndrome.
    let rows = monte_carlo(&a.charges, &a.normalized, &cfg(DECODE_P)).map_err(|e| e.to_string())?;
    let (r4, r8) = (&rows[0], &rows[1]);
    ensure!(r8.rate < r4.rate, "rate {} at L=8 vs {} at L=4", r8.rate, r4.rate);
    ensure!(
        r8.ci_high < r4.ci_low,
        "intervals overlap: [{}, {}] vs [{}, {}]",
        r8.ci_low,
        r8.ci_high,
        r4.ci_low,
        r4.ci_high
    );
    let zero = monte_carlo(&a.charges, &a.normalized, &cfg(0.0)).map_err(|e| e.to_string())?;
    ensure!(zero.iter().all(|r| r.failures == 0), "failures at p = 0");
    let el = t.elapsed();
    ensure!(el <= DECODE_LIMIT, "took {el:?}");
    Ok(format!(
        "p = {DECODE_P}, {DECODE_TRIALS} trials: L=4 {:.4} [{:.4}, {:.4}], L=8 {:.4} [{:.4}, {:.4}], p = 0 clean, {el:.2?}",
        r4.rate, r4.ci_low, r4.ci_high, r8.rate, r8.ci_low, r8.ci_high
    ))
}

fn apply(m: &BitMatrix, x: u64) -> u64 {
    (0..m.n_rows()).map(|r| ((0..m.n_cols()).filter(|&c| m.get(r, c) && x >> c & 1 == 1).count() as u64 & 1) << r).sum()
}

fn gf2_against_enumeration(m: &BitMatrix, exec: Execution) -> Result<(), String> {
    let mut image = vec![false; 1 << m.n_rows()];
    let mut kernel = 0usize;
    for x in 0..1u64 << m.n_cols() {
        let y = apply(m, x);
        image[y as usize] = true;
        kernel += (y == 0) as usize;
    }
    let rank = m.rank_with(exec);
    ensure!(1usize << rank == image.iter().filter(|&&b| b).count(), "rank of {m:?}");
    let k = m.kernel_basis_with(exec);
    ensure!(1usize << k.n_rows() == kernel && k.rank() == k.n_rows(), "kernel of {m:?}");
    for v in k.rows() {
        ensure!(apply(m, v.iter_ones().map(|i| 1u64 << i).sum()) == 0, "kernel vector of {m:?}");
    }
    let bs: Vec<BitVector> = (0..1u64 << m.n_rows()).map(|b| BitVector::from_u64(b, m.n_rows())).collect();
    for (b, sol) in m.solve_many_with(&bs, exec).map_err(|e| e.to_string())?.iter().enumerate() {
        match sol {
            Some(x) => ensure!(apply(m, x.iter_ones().map(|i| 1u64 << i).sum()) == b as u64, "solve of {m:?}"),
            None => ensure!(!image[b], "solver missed b = {b} for {m:?}"),
        }
    }
    Ok(())
}

fn gf2_oracle() -> Outcome {
    let mut count = 0;
    for rows in 1..=4 {
        for cols in 1..=4 {
            for bits in 0..1u64 << (rows * cols) {
                let m: Vec<Vec<bool>> =
                    (0..rows).map(|r| (0..cols).map(|c| bits >> (r * cols + c) & 1 == 1).collect()).collect();
                gf2_against_enumeration(&BitMatrix::from_bools(&m, cols).unwrap(), Execution::Sequential)?;
                count += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..200 {
        let (rows, cols) = (rng.random_range(1..=12), rng.random_range(1..=12));
        let m: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_bool(0.5)).collect()).collect();
        let exec = if i % 2 == 0 { Execution::Sequential } else { Execution::Parallel };
        gf2_against_enumeration(&BitMatrix::from_bools(&m, cols).unwrap(), exec)?;
    }
    Ok(format!("{count} exhaustive matrices up to 4x4, 200 random up to 12x12"))
}

fn determinism() -> Outcome {
    for args in [
        vec!["analyze", "toric", "--json"],
        vec!["analyze", "subsystem-color", "--json"],
        vec!["decode", "toric", "--seed", "7", "--trials", "2000", "--json"],
    ] {
        let (a, _) = cli(&args)?;
        let (b, _) = cli(&args)?;
        ensure!(a == b, "{args:?} differs between runs");
    }
    Ok("analyze --json and decode --seed 7 byte-identical across runs".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("characteristic table", characteristic_table),
        ("k = 2α", logical_count),
        ("charge-group law", group_law),
        ("statistics identities", statistics_identities),
        ("canonical relations", canonical_relations),
        ("segment commutation table", framework),
        ("torus logical relations", torus_relations),
        ("composition", composition),
        ("equivalence verdicts", equivalence),
        ("decoding property", decoding),
        ("GF(2) oracle", gf2_oracle),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let el = t.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({el:.2?}): {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name} ({el:.2?}): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Torus assembly: loop relations, homology adjustment, logical qubit counts and
//! the segment commutation table.

use topocharge::analysis::{analyze, Analysis, AnalysisConfig};
use topocharge::charge::framework::verify_framework;
use topocharge::code::CodeDefinition;
use topocharge::fixtures::fixture;
use topocharge::group::{gauge_code_identity, GroupBasis};
use topocharge::lattice::{generator_matrix, place_all, TorusLattice};
use topocharge::torus::{assemble_torus, homology_adjust, AdjustMode, HomologyCycles};
use topocharge::Error;

fn code(spec: &str) -> CodeDefinition {
    let mut parts = spec.split('+').map(|n| fixture(n).unwrap());
    let first = parts.next().unwrap();
    parts.fold(first, |acc, c| CodeDefinition::compose(&acc, &c))
}

fn run(spec: &str) -> Analysis {
    analyze(&code(spec), &AnalysisConfig::default()).unwrap()
}

/// Full `[z, z*]` table by brute force over both directions and all charges.
fn loop_table(cyc: &HomologyCycles) -> Vec<Vec<bool>> {
    let z: Vec<_> = cyc.z1.iter().chain(&cyc.z2).collect();
    let zs: Vec<_> = cyc.z1_star.iter().chain(&cyc.z2_star).collect();
    z.iter().map(|a| zs.iter().map(|b| a.anticommutes(b)).collect()).collect()
}

#[test]
fn logical_qubits_are_twice_alpha() {
    for (spec, k) in [("empty", 0), ("trivial", 0), ("toric", 2), ("toric+toric", 4), ("toric+trivial", 2)] {
        let a = run(spec);
        let t = &a.report.torus;
        assert_eq!(t.logical_qubits, k, "{spec}");
        assert_eq!(k, 2 * a.report.characteristic.alpha);
        // Subspace code: k = n − rank S, with the rank recomputed from scratch.
        let lat = TorusLattice::new(t.size.0, t.size.1, a.normalized.qubits_per_site);
        let m = generator_matrix(&lat, &place_all(&lat, &a.normalized.stabilizer_recipes));
        assert_eq!(lat.n_qubits() - m.rank(), k, "{spec}");
    }
}

#[test]
fn subsystem_codes_without_pairs_encode_nothing() {
    for spec in ["subsystem-trivial", "subsystem-toric", "honeycomb"] {
        assert_eq!(run(spec).report.torus.logical_qubits, 0, "{spec}");
    }
    assert_eq!(run("subsystem-color").report.torus.logical_qubits, 2);
}

#[test]
fn loop_commutation_table_is_the_identity_matrix() {
    for spec in ["toric", "toric+toric", "subsystem-color"] {
        let a = run(spec);
        let cyc = &a.torus.cycles;
        let n = cyc.len();
        let table = loop_table(cyc);
        for (i, row) in table.iter().enumerate() {
            for (j, &anti) in row.iter().enumerate() {
                assert_eq!(anti, i == j, "{spec}: [z{i}, z*{j}] among {n} charges");
            }
        }
        assert!(a.torus.logicals.relations_hold(), "{spec}");
        assert!(a.torus.summary.checks.iter().all(|c| c.passed), "{spec}");
    }
}

#[test]
fn toric_loops_wrap_the_torus_once() {
    let a = run("toric");
    assert_eq!(a.report.torus.size, (8, 8));
    let cyc = &a.torus.cycles;
    assert_eq!(cyc.len(), 1);
    // A straight loop of a weight-one hop has one qubit per site crossed.
    for p in [&cyc.z1[0], &cyc.z2[0], &cyc.z1_star[0], &cyc.z2_star[0]] {
        assert_eq!(p.weight(), 8);
    }
    assert!(cyc.z1[0].anticommutes(&cyc.z1_star[0]));
    assert!(!cyc.z1[0].anticommutes(&cyc.z2_star[0]));
    // Moving a loop by one row multiplies it by a stabilizer: same action on the code.
    let lat = a.torus.lattice;
    let s = GroupBasis::from_generators(
        &lat,
        &a.normalized.stabilizer_recipes,
        &place_all(&lat, &a.normalized.stabilizer_recipes),
    );
    assert!(s.contains(&cyc.z1[0].mul(&cyc.z1[0].translate(0, 3))));
    assert!(!s.contains(&cyc.z1[0]));
}

#[test]
fn subsystem_toric_adjusts_either_group() {
    let a = run("subsystem-toric");
    let ca = &a.charges;
    let lat = a.torus.lattice;
    let cg = &ca.code;
    let stab = GroupBasis::from_generators(&lat, &cg.stabilizer_recipes, &place_all(&lat, &cg.stabilizer_recipes));
    let gauge = GroupBasis::from_generators(&lat, cg.charge_recipes(), &place_all(&lat, cg.charge_recipes()));
    assert!(!gauge_code_identity(&gauge, &stab), "the bare pair is not a gauge code on the torus");
    for mode in [AdjustMode::Stabilizer, AdjustMode::Gauge] {
        let adj = homology_adjust(&stab, &gauge, &a.torus.cycles, mode).unwrap();
        assert!(gauge_code_identity(&adj.g_prime, &adj.s_prime), "{mode:?}");
        let n = lat.n_qubits();
        assert_eq!(2 * n, adj.g_prime.rank() + adj.s_prime.rank(), "{mode:?}: no logical qubits");
        let t = assemble_torus(ca, &a.normalized, (8, 8), mode).unwrap();
        assert_eq!(t.summary.mode, mode);
        assert_eq!(t.summary.logical_qubits, 0);
    }
}

#[test]
fn translated_loops_are_homologous() {
    for spec in ["toric", "subsystem-toric", "honeycomb", "subsystem-color"] {
        let a = run(spec);
        let c = a.torus.summary.checks.iter().find(|c| c.name.starts_with("translated loops")).unwrap();
        assert!(c.passed, "{spec}: {}", c.detail);
    }
}

#[test]
fn small_or_misaligned_tori_are_refused() {
    let small = AnalysisConfig { torus: Some((2, 2)), ..AnalysisConfig::default() };
    assert!(matches!(analyze(&code("toric"), &small), Err(Error::TorusTooSmall { .. })));
    let misaligned = AnalysisConfig { torus: Some((8, 8)), ..AnalysisConfig::default() };
    assert!(matches!(analyze(&code("subsystem-color"), &misaligned), Err(Error::TorusTooSmall { .. })));
    let rect = AnalysisConfig { torus: Some((8, 12)), ..AnalysisConfig::default() };
    assert_eq!(analyze(&code("toric"), &rect).unwrap().report.torus.logical_qubits, 2);
}

#[test]
fn segment_commutation_table() {
    for spec in ["toric", "subsystem-toric", "honeycomb", "subsystem-color"] {
        let a = run(spec);
        let f = verify_framework(&a.charges).unwrap();
        assert!(f.passed(), "{spec}: {:?}", f.failures);
        assert!(f.checked > 0 || a.report.characteristic.alpha + a.report.characteristic.beta == 0);
        assert_eq!(&f, &a.report.framework);
        if spec == "subsystem-color" {
            assert_eq!(a.charges.level, 3);
            assert!(3 * f.side >= 12);
        }
    }
}

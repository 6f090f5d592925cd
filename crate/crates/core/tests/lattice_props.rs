//! Torus, translation and code-manipulation invariants.

use proptest::prelude::*;
use topocharge::code::{parse_code_file, CodeDefinition, GeneratorRecipe, Letter, PauliTerm};
use topocharge::fixtures::fixture;
use topocharge::gf2::BitMatrix;
use topocharge::group::constraint_space;
use topocharge::lattice::{generator_matrix, place_all, LatticePauli, TorusLattice};

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn term(q: usize) -> impl Strategy<Value = PauliTerm> {
    (-2i32..=2, -2i32..=2, 0..q, letter()).prop_map(|(dx, dy, qubit, letter)| PauliTerm { dx, dy, qubit, letter })
}

fn recipe(q: usize) -> impl Strategy<Value = GeneratorRecipe> {
    proptest::collection::vec(term(q), 1..5).prop_map(|mut terms| {
        terms.sort();
        terms.dedup_by_key(|t| (t.dx, t.dy, t.qubit));
        GeneratorRecipe { label: "R".into(), terms }
    })
}

/// Arbitrary recipes; they need not commute.
fn code() -> impl Strategy<Value = CodeDefinition> {
    (1usize..=2).prop_flat_map(|q| {
        (proptest::collection::vec(recipe(q), 1..4), proptest::option::of(proptest::collection::vec(recipe(q), 1..3)))
            .prop_map(move |(stabs, gauge)| {
                let label = |rs: Vec<GeneratorRecipe>, p: &str| -> Vec<GeneratorRecipe> {
                    rs.into_iter().enumerate().map(|(i, r)| GeneratorRecipe { label: format!("{p}{i}"), ..r }).collect()
                };
                CodeDefinition {
                    name: "random".into(),
                    qubits_per_site: q,
                    stabilizer_recipes: label(stabs, "S"),
                    gauge_recipes: gauge.map(|g| label(g, "G")),
                }
            })
    })
}

fn pauli(lat: TorusLattice) -> impl Strategy<Value = LatticePauli> {
    proptest::collection::vec((any::<bool>(), any::<bool>()), lat.n_qubits()).prop_map(move |bits| {
        let mut p = LatticePauli::identity(lat);
        for (i, (x, z)) in bits.into_iter().enumerate() {
            p.vec.x.set(i, x);
            p.vec.z.set(i, z);
        }
        p
    })
}

const LAT: TorusLattice = TorusLattice { lx: 5, ly: 4, qubits_per_site: 2 };

proptest! {
    #[test]
    fn full_wraps_are_the_identity(p in pauli(LAT)) {
        prop_assert_eq!(p.translate(5, 0), p.clone());
        prop_assert_eq!(p.translate(0, -4), p.clone());
        prop_assert_eq!(p.translate(2, 3).translate(3, 1), p);
    }

    #[test]
    fn translation_preserves_commutation(a in pauli(LAT), b in pauli(LAT), dx in -6i64..6, dy in -6i64..6) {
        prop_assert_eq!(a.anticommutes(&b), a.translate(dx, dy).anticommutes(&b.translate(dx, dy)));
    }

    #[test]
    fn products_are_associative_and_self_inverse(a in pauli(LAT), b in pauli(LAT)) {
        prop_assert!(a.mul(&a).is_identity());
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).anticommutes(&b), a.anticommutes(&b));
    }

    #[test]
    fn code_files_round_trip(c in code()) {
        let back = parse_code_file(&c.to_string()).unwrap();
        prop_assert!(back.same_generators(&c));
        prop_assert_eq!(back, c);
    }

    #[test]
    fn generators_are_translates(c in code(), x in 0usize..6, y in 0usize..6) {
        let lat = TorusLattice::new(6, 6, c.qubits_per_site);
        let gens = place_all(&lat, &c.stabilizer_recipes);
        let n = lat.n_sites();
        for (ri, _) in c.stabilizer_recipes.iter().enumerate() {
            let origin = gens[ri * n].to_pauli(lat);
            let placed = gens[ri * n + lat.site_index(x, y)].to_pauli(lat);
            prop_assert_eq!(origin.translate(x as i64, y as i64), placed);
        }
    }

    #[test]
    fn blocking_keeps_the_group(c in code(), l in 2usize..=3) {
        let side = 2 * l;
        let fine = TorusLattice::new(side, side, c.qubits_per_site);
        let coarse_code = c.coarse_grain(l);
        let coarse = TorusLattice::new(side / l, side / l, coarse_code.qubits_per_site);
        let a = generator_matrix(&fine, &place_all(&fine, &c.stabilizer_recipes));
        let b = generator_matrix(&coarse, &place_all(&coarse, &coarse_code.stabilizer_recipes));
        prop_assert_eq!(a.n_cols(), b.n_cols());
        prop_assert_eq!(a.n_rows(), b.n_rows());
        prop_assert_eq!(a.rank(), b.rank());
        prop_assert_eq!(constraint_space(&a).dim(), constraint_space(&b).dim());
    }

    #[test]
    fn composition_adds_ranks(a in code(), b in code()) {
        let ab = CodeDefinition::compose(&a, &b);
        prop_assert_eq!(ab.qubits_per_site, a.qubits_per_site + b.qubits_per_site);
        let rank = |c: &CodeDefinition| {
            let lat = TorusLattice::new(5, 5, c.qubits_per_site);
            generator_matrix(&lat, &place_all(&lat, &c.stabilizer_recipes)).rank()
        };
        prop_assert_eq!(rank(&ab), rank(&a) + rank(&b));
    }
}

/// Independent dense elimination, used to cross-check the bit-packed ranks.
fn dense_rank(m: &BitMatrix) -> usize {
    let mut rows: Vec<Vec<bool>> = (0..m.n_rows()).map(|r| (0..m.n_cols()).map(|c| m.get(r, c)).collect()).collect();
    let mut rank = 0;
    for c in 0..m.n_cols() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (a, b) in rows[r].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn toric_generator_counts_match_dense_elimination() {
    let code = fixture("toric").unwrap();
    for side in [4, 5, 6] {
        let lat = TorusLattice::new(side, side, 2);
        let m = generator_matrix(&lat, &place_all(&lat, &code.stabilizer_recipes));
        assert_eq!(m.rank(), dense_rank(&m));
        // Two global constraints: the product of all vertex and of all plaquette terms.
        assert_eq!(m.n_rows() - m.rank(), 2);
    }
}

#[test]
fn blocking_recipes_are_labelled_by_offset() {
    let code = fixture("toric").unwrap().coarse_grain(2);
    assert_eq!(code.qubits_per_site, 8);
    assert_eq!(code.stabilizer_recipes.len(), 8);
    assert!(code.stabilizer_recipes.iter().any(|r| r.label.ends_with("@1,1")));
}

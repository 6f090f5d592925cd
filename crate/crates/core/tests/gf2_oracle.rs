//! Rank, kernel and solve against brute-force enumeration over GF(2).

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topocharge::exec::Execution;
use topocharge::gf2::{BitMatrix, BitVector};

fn matrix(rows: usize, cols: usize, bits: u64) -> BitMatrix {
    let m: Vec<Vec<bool>> = (0..rows).map(|r| (0..cols).map(|c| bits >> (r * cols + c) & 1 == 1).collect()).collect();
    BitMatrix::from_bools(&m, cols).unwrap()
}

fn apply(m: &BitMatrix, x: u64) -> u64 {
    let mut out = 0;
    for r in 0..m.n_rows() {
        let mut acc = false;
        for c in 0..m.n_cols() {
            acc ^= m.get(r, c) && x >> c & 1 == 1;
        }
        out |= (acc as u64) << r;
    }
    out
}

fn to_u64(v: &BitVector) -> u64 {
    v.iter_ones().map(|i| 1u64 << i).sum()
}

/// Image set and kernel size by enumerating every input.
fn enumerate(m: &BitMatrix) -> (Vec<bool>, usize) {
    let mut image = vec![false; 1 << m.n_rows()];
    let mut kernel = 0;
    for x in 0..1u64 << m.n_cols() {
        let y = apply(m, x);
        image[y as usize] = true;
        kernel += (y == 0) as usize;
    }
    (image, kernel)
}

fn check_against_enumeration(m: &BitMatrix, exec: Execution) {
    let (image, kernel_size) = enumerate(m);
    let image_size = image.iter().filter(|&&b| b).count();
    let rank = m.rank_with(exec);
    assert_eq!(1usize << rank, image_size, "rank of {m:?}");
    assert_eq!(1usize << (m.n_cols() - rank), kernel_size);

    let k = m.kernel_basis_with(exec);
    assert_eq!(k.n_rows(), m.n_cols() - rank);
    assert_eq!(k.rank(), k.n_rows(), "kernel basis is independent");
    for v in k.rows() {
        assert_eq!(apply(m, to_u64(v)), 0, "kernel vector is annihilated");
    }

    let bs: Vec<BitVector> = (0..1u64 << m.n_rows()).map(|b| BitVector::from_u64(b, m.n_rows())).collect();
    let sols = m.solve_many_with(&bs, exec).unwrap();
    for (b, sol) in sols.iter().enumerate() {
        match sol {
            Some(x) => assert_eq!(apply(m, to_u64(x)), b as u64),
            None => assert!(!image[b], "solver missed a consistent system"),
        }
    }
}

#[test]
fn every_matrix_up_to_four_by_four() {
    for rows in 1..=4 {
        for cols in 1..=4 {
            for bits in 0..1u64 << (rows * cols) {
                check_against_enumeration(&matrix(rows, cols, bits), Execution::Sequential);
            }
        }
    }
}

#[test]
fn random_matrices_up_to_width_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let rows = rng.random_range(1..=12);
        let cols = rng.random_range(1..=12);
        let density: f64 = rng.random_range(0.1..0.9);
        let m: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_bool(density)).collect()).collect();
        let m = BitMatrix::from_bools(&m, cols).unwrap();
        let exec = if i % 2 == 0 { Execution::Sequential } else { Execution::Parallel };
        check_against_enumeration(&m, exec);
    }
}

fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r)
            .prop_map(move |m| BitMatrix::from_bools(&m, c).unwrap())
    })
}

proptest! {
    #[test]
    fn row_rank_equals_column_rank(m in arb_matrix(40, 90)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_nullity(m in arb_matrix(40, 90)) {
        prop_assert_eq!(m.rank() + m.kernel_basis().n_rows(), m.n_cols());
        prop_assert_eq!(m.rank() + m.left_kernel_basis().n_rows(), m.n_rows());
    }

    #[test]
    fn modes_agree(m in arb_matrix(70, 140)) {
        let mut a = m.clone();
        let mut b = m.clone();
        prop_assert_eq!(a.rref_with(Execution::Sequential), b.rref_with(Execution::Parallel));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn solutions_reproduce_combinations(m in arb_matrix(30, 70), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<bool> = (0..m.n_cols()).map(|_| rng.random_bool(0.5)).collect();
        let b = m.mul_vec(&BitVector::from_bools(&x)).unwrap();
        let (sol, _) = m.solve(&b).unwrap().expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
    }

    #[test]
    fn row_basis_spans_rows(m in arb_matrix(30, 60)) {
        let basis = m.row_basis();
        prop_assert_eq!(basis.n_rows(), m.rank());
        for r in m.rows() {
            prop_assert!(basis.row_space_contains(r));
        }
    }
}

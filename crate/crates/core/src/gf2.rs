//! Bit-packed GF(2) vectors and matrices.
//!
//! Elimination always pivots left to right so every basis this module hands
//! out is reproducible.

use crate::exec::Execution;
use crate::Error;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2), packed into machine words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { words: vec![0; words_for(len)], len }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Low `len` bits of `value`, bit `i` of the integer at position `i`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// XOR starting at word `from`; callers guarantee earlier words of `other` are zero.
    #[inline]
    fn xor_from(&mut self, other: &BitVector, from: usize) {
        for (a, b) in self.words[from..].iter_mut().zip(&other.words[from..]) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones & 1 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Concatenation `self | other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        let mut out = BitVector::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    n_cols: usize,
}

impl BitMatrix {
    pub fn new(n_cols: usize) -> Self {
        BitMatrix { rows: Vec::new(), n_cols }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        BitMatrix { rows: vec![BitVector::zeros(n_cols); n_rows], n_cols }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { rows: (0..n).map(|i| BitVector::unit(n, i)).collect(), n_cols: n }
    }

    pub fn from_rows(rows: Vec<BitVector>, n_cols: usize) -> Result<Self, Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::Dimension(format!("row of length {} in a matrix with {} columns", bad.len(), n_cols)));
        }
        Ok(BitMatrix { rows, n_cols })
    }

    pub fn from_bools(rows: &[Vec<bool>], n_cols: usize) -> Result<Self, Error> {
        Self::from_rows(rows.iter().map(|r| BitVector::from_bools(r)).collect(), n_cols)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<(), Error> {
        if row.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "row of length {} pushed onto a matrix with {} columns",
                row.len(),
                self.n_cols
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.n_cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                out.rows[j].set(i, true);
            }
        }
        out
    }

    /// `m · v`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Error> {
        if v.len() != self.n_cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.n_cols)));
        }
        let mut out = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `vᵀ · m`, the sum of the rows selected by `v`.
    pub fn combine_rows(&self, v: &BitVector) -> Result<BitVector, Error> {
        if v.len() != self.rows.len() {
            return Err(Error::Dimension(format!("selector of length {} against {} rows", v.len(), self.rows.len())));
        }
        let mut out = BitVector::zeros(self.n_cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// Reduces in place to reduced row echelon form and returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_limited(self.n_cols, Execution::default())
    }

    pub fn rref_with(&mut self, exec: Execution) -> Vec<usize> {
        self.rref_limited(self.n_cols, exec)
    }

    /// Gauss-Jordan elimination that only pivots on columns below `limit`.
    /// The remaining columns ride along, which is how augmented systems are solved.
    fn rref_limited(&mut self, limit: usize, exec: Execution) -> Vec<usize> {
        let n = self.rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let (head, rest) = self.rows.split_at_mut(r);
            let (pivot, tail) = rest.split_first_mut().expect("pivot row exists");
            eliminate(head, tail, pivot, c, exec);
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rank_with(Execution::default())
    }

    pub fn rank_with(&self, exec: Execution) -> usize {
        let mut m = self.clone();
        m.rref_with(exec).len()
    }

    /// Basis of `{v : m·v = 0}`, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> BitMatrix {
        self.kernel_basis_with(Execution::default())
    }

    pub fn kernel_basis_with(&self, exec: Execution) -> BitMatrix {
        let mut m = self.clone();
        let pivots = m.rref_with(exec);
        kernel_from_rref(&m, &pivots)
    }

    /// Basis of `{y : yᵀ·m = 0}`, the dependencies among the rows.
    pub fn left_kernel_basis(&self) -> BitMatrix {
        self.transpose().kernel_basis()
    }

    /// Solves `m·x = b`. Absence means the system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<(BitVector, BitMatrix)>, Error> {
        let mut sols = self.solve_many(std::slice::from_ref(b))?;
        let Some(x) = sols.pop().flatten() else {
            return Ok(None);
        };
        Ok(Some((x, self.kernel_basis())))
    }

    /// Particular solutions (free variables set to zero) for several right-hand sides
    /// sharing one elimination.
    pub fn solve_many(&self, bs: &[BitVector]) -> Result<Vec<Option<BitVector>>, Error> {
        self.solve_many_with(bs, Execution::default())
    }

    pub fn solve_many_with(&self, bs: &[BitVector], exec: Execution) -> Result<Vec<Option<BitVector>>, Error> {
        Ok(self.solve_many_with_kernel(bs, exec)?.0)
    }

    /// As [`BitMatrix::solve_many`], also returning a kernel basis from the same
    /// elimination.
    pub fn solve_many_with_kernel(
        &self,
        bs: &[BitVector],
        exec: Execution,
    ) -> Result<(Vec<Option<BitVector>>, BitMatrix), Error> {
        let n = self.n_cols;
        let k = bs.len();
        if let Some(b) = bs.iter().find(|b| b.len() != self.rows.len()) {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} against {} rows",
                b.len(),
                self.rows.len()
            )));
        }
        let mut aug = BitMatrix::zeros(self.rows.len(), n + k);
        for (i, row) in self.rows.iter().enumerate() {
            let dst = &mut aug.rows[i];
            dst.words[..row.words.len()].copy_from_slice(&row.words);
            for (j, b) in bs.iter().enumerate() {
                if b.get(i) {
                    dst.set(n + j, true);
                }
            }
        }
        let pivots = aug.rref_limited(n, exec);
        let rank = pivots.len();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            if aug.rows[rank..].iter().any(|r| r.get(n + j)) {
                out.push(None);
                continue;
            }
            let mut x = BitVector::zeros(n);
            for (i, &pc) in pivots.iter().enumerate() {
                if aug.rows[i].get(n + j) {
                    x.set(pc, true);
                }
            }
            out.push(Some(x));
        }
        let mut left = BitMatrix::zeros(rank, n);
        for (i, row) in aug.rows[..rank].iter().enumerate() {
            let words = left.rows[i].words.len();
            left.rows[i].words.copy_from_slice(&row.words[..words]);
            if !n.is_multiple_of(WORD) {
                let last = words - 1;
                left.rows[i].words[last] &= (1u64 << (n % WORD)) - 1;
            }
        }
        Ok((out, kernel_from_rref(&left, &pivots)))
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        let mut m = self.clone();
        let pivots = m.rref();
        reduce_against(&m, &pivots, v).is_zero()
    }

    /// Reduced echelon basis of the row space with zero rows dropped.
    pub fn row_basis(&self) -> BitMatrix {
        let mut m = self.clone();
        let r = m.rref().len();
        m.rows.truncate(r);
        m
    }
}

fn kernel_from_rref(m: &BitMatrix, pivots: &[usize]) -> BitMatrix {
    let n = m.n_cols;
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut basis = BitMatrix::new(n);
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = BitVector::unit(n, f);
        for (i, &pc) in pivots.iter().enumerate() {
            if m.rows[i].get(f) {
                v.set(pc, true);
            }
        }
        basis.rows.push(v);
    }
    basis
}

/// Remainder of `v` after clearing every pivot column of an RREF matrix.
pub fn reduce_against(rref: &BitMatrix, pivots: &[usize], v: &BitVector) -> BitVector {
    let mut out = v.clone();
    for (i, &pc) in pivots.iter().enumerate() {
        if out.get(pc) {
            out.xor_assign(&rref.rows[i]);
        }
    }
    out
}

// Rows below this many words are eliminated serially even when parallel.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD_WORDS: usize = 1 << 14;

fn eliminate(head: &mut [BitVector], tail: &mut [BitVector], pivot: &BitVector, col: usize, exec: Execution) {
    let w0 = col / WORD;
    let op = |row: &mut BitVector| {
        if row.get(col) {
            row.xor_from(pivot, w0);
        }
    };
    #[cfg(feature = "parallel")]
    {
        let work = (head.len() + tail.len()) * (pivot.words.len() - w0);
        if exec == Execution::Parallel && work >= PAR_THRESHOLD_WORDS {
            use rayon::prelude::*;
            head.par_iter_mut().chain(tail.par_iter_mut()).for_each(op);
            return;
        }
    }
    let _ = exec;
    head.iter_mut().for_each(op);
    tail.iter_mut().for_each(op);
}

/// A projective Pauli as (X-part, Z-part).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymplecticVector {
    pub x: BitVector,
    pub z: BitVector,
}

impl SymplecticVector {
    pub fn identity(n: usize) -> Self {
        SymplecticVector { x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    pub fn new(x: BitVector, z: BitVector) -> Result<Self, Error> {
        if x.len() != z.len() {
            return Err(Error::Dimension(format!("x-part of length {} with z-part of length {}", x.len(), z.len())));
        }
        Ok(SymplecticVector { x, z })
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn mul_assign(&mut self, other: &SymplecticVector) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Flattened `x | z` layout used for matrix rows.
    pub fn to_flat(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    pub fn from_flat(v: &BitVector) -> Result<Self, Error> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!("flat symplectic vector of odd length {}", v.len())));
        }
        let n = v.len() / 2;
        Ok(SymplecticVector { x: v.slice(0, n), z: v.slice(n, 2 * n) })
    }
}

/// `u.x·v.z + u.z·v.x`; true means the two operators anticommute.
pub fn symplectic_product(u: &SymplecticVector, v: &SymplecticVector) -> Result<bool, Error> {
    if u.n_qubits() != v.n_qubits() {
        return Err(Error::Dimension(format!(
            "symplectic product of {} and {} qubit operators",
            u.n_qubits(),
            v.n_qubits()
        )));
    }
    Ok(u.x.dot(&v.z) ^ u.z.dot(&v.x))
}

/// Symplectic product of two flattened `x | z` rows.
pub fn flat_symplectic_product(u: &BitVector, v: &BitVector) -> bool {
    debug_assert_eq!(u.len(), v.len());
    let n = u.len() / 2;
    let mut acc = false;
    for i in u.iter_ones() {
        let j = if i < n { i + n } else { i - n };
        acc ^= v.get(j);
    }
    acc
}

/// Swaps the X and Z halves of every row, so that `m.swap_halves() · v` evaluates
/// symplectic products against the rows of `m`.
pub fn swap_halves(m: &BitMatrix) -> BitMatrix {
    let n2 = m.n_cols();
    let n = n2 / 2;
    let rows = m
        .rows()
        .iter()
        .map(|r| {
            let mut out = BitVector::zeros(n2);
            for i in r.iter_ones() {
                out.set(if i < n { i + n } else { i - n }, true);
            }
            out
        })
        .collect();
    BitMatrix { rows, n_cols: n2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank_and_kernel() {
        let m = BitMatrix::identity(4);
        assert_eq!(m.rank(), 4);
        assert_eq!(m.kernel_basis().n_rows(), 0);
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn zero_row_has_full_kernel() {
        let m = BitMatrix::zeros(1, 3);
        assert_eq!(m.kernel_basis().n_rows(), 3);
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let m = BitMatrix::identity(5);
        let b = BitVector::from_bools(&[true, false, true, true, false]);
        let (x, k) = m.solve(&b).unwrap().unwrap();
        assert_eq!(x, b);
        assert_eq!(k.n_rows(), 0);
    }

    #[test]
    fn solve_zero_rhs_gives_zero() {
        let m = BitMatrix::from_bools(&[vec![true, true, false], vec![false, true, true]], 3).unwrap();
        let (x, k) = m.solve(&BitVector::zeros(2)).unwrap().unwrap();
        assert!(x.is_zero());
        assert_eq!(k.n_rows(), 1);
    }

    #[test]
    fn inconsistent_system_is_absent() {
        let m = BitMatrix::from_bools(&[vec![true, true], vec![true, true]], 2).unwrap();
        let b = BitVector::from_bools(&[true, false]);
        assert!(m.solve(&b).unwrap().is_none());
    }

    #[test]
    fn dimension_errors() {
        let m = BitMatrix::identity(3);
        assert!(m.solve(&BitVector::zeros(2)).is_err());
        let u = SymplecticVector::identity(2);
        let v = SymplecticVector::identity(3);
        assert!(symplectic_product(&u, &v).is_err());
        assert!(BitMatrix::from_rows(vec![BitVector::zeros(2)], 3).is_err());
    }

    #[test]
    fn conjugate_paulis_anticommute() {
        let mut x0 = SymplecticVector::identity(1);
        x0.x.set(0, true);
        let mut z0 = SymplecticVector::identity(1);
        z0.z.set(0, true);
        assert!(symplectic_product(&x0, &z0).unwrap());
        assert!(!symplectic_product(&x0, &x0).unwrap());
    }

    #[test]
    fn flat_product_agrees() {
        let u = SymplecticVector::new(
            BitVector::from_bools(&[true, false, true]),
            BitVector::from_bools(&[false, false, true]),
        )
        .unwrap();
        let v = SymplecticVector::new(
            BitVector::from_bools(&[false, true, true]),
            BitVector::from_bools(&[true, false, false]),
        )
        .unwrap();
        assert_eq!(symplectic_product(&u, &v).unwrap(), flat_symplectic_product(&u.to_flat(), &v.to_flat()));
        assert_eq!(SymplecticVector::from_flat(&u.to_flat()).unwrap(), u);
    }

    #[test]
    fn iter_ones_crosses_words() {
        let mut v = BitVector::zeros(200);
        for i in [0, 63, 64, 127, 199] {
            v.set(i, true);
        }
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 127, 199]);
        assert_eq!(v.count_ones(), 5);
    }
}

//! Dense complex amplitude tensors, their flattenings and one-multiranks.
//!
//! Amplitudes are stored in lexicographic index order with the last mode
//! varying fastest, so a 3x3x3 state lists `|000>, |001>, ..., |222>`.
//! Modes are numbered from 0.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{frobenius_norm, numerical_rank, CMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Order-3 complex tensor holding the amplitudes of a tripartite pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    amps: Vec<Complex64>,
}

impl Tensor3 {
    pub fn new(dims: [usize; 3], amps: Vec<Complex64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(invalid(format!("dimensions must be positive, got {dims:?}")));
        }
        let len = dims.iter().product::<usize>();
        if amps.len() != len {
            return Err(invalid(format!(
                "expected {len} amplitudes for dims {dims:?}, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("amplitudes must be finite"));
        }
        Ok(Self { dims, amps })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        Self {
            dims,
            amps: vec![ZERO; dims.iter().product()],
        }
    }

    pub fn from_real(dims: [usize; 3], values: &[f64]) -> Result<Self> {
        Self::new(dims, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|i j k>`.
    pub fn basis(dims: [usize; 3], index: [usize; 3]) -> Self {
        let mut t = Self::zeros(dims);
        t[index] = ONE;
        t
    }

    /// Sum of unit-weight basis kets written as digit strings, e.g. `["000", "111"]`.
    pub fn from_kets(d: usize, kets: &[&str]) -> Self {
        let mut t = Self::zeros([d, d, d]);
        for ket in kets {
            let digits: Vec<usize> = ket
                .chars()
                .map(|c| c.to_digit(10).expect("ket digit") as usize)
                .collect();
            assert_eq!(digits.len(), 3, "ket {ket} must have three digits");
            t[[digits[0], digits[1], digits[2]]] += ONE;
        }
        t
    }

    /// Product state `a ⊗ b ⊗ c`.
    pub fn product(a: &[Complex64], b: &[Complex64], c: &[Complex64]) -> Self {
        let dims = [a.len(), b.len(), c.len()];
        let mut amps = Vec::with_capacity(dims.iter().product());
        for x in a {
            for y in b {
                for z in c {
                    amps.push(x * y * z);
                }
            }
        }
        Self { dims, amps }
    }

    pub fn product_real(a: &[f64], b: &[f64], c: &[f64]) -> Self {
        let lift = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        Self::product(&lift(a), &lift(b), &lift(c))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn offset(&self, [i, j, k]: [usize; 3]) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn norm(&self) -> f64 {
        frobenius_norm(&self.amps)
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|z| *z == ZERO)
    }

    /// Rejects the zero tensor, which has no projective class.
    pub fn ensure_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(invalid("the zero tensor has no entanglement class"))
        } else {
            Ok(())
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dims: self.dims,
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// Relabels the parties: mode `m` of the result is mode `perm[m]` of `self`.
    pub fn permute_modes(&self, perm: [usize; 3]) -> Self {
        let mut sorted = perm;
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2], "invalid mode permutation {perm:?}");
        let dims = [self.dims[perm[0]], self.dims[perm[1]], self.dims[perm[2]]];
        let mut out = Self::zeros(dims);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let new = [i, j, k];
                    let mut old = [0; 3];
                    for m in 0..3 {
                        old[perm[m]] = new[m];
                    }
                    out[new] = self[old];
                }
            }
        }
        out
    }

    /// Matricization grouping the modes of `partition` into rows and the
    /// complementary modes into columns, both in lexicographic order.
    pub fn flatten(&self, partition: &Partition) -> CMatrix {
        let rows_modes = partition.modes();
        let cols_modes = partition.complement();
        let extent = |modes: &[usize]| modes.iter().map(|&m| self.dims[m]).product::<usize>();
        let (nr, nc) = (extent(rows_modes), extent(&cols_modes));
        let mut m = CMatrix::zeros(nr, nc);
        for (pos, z) in self.amps.iter().enumerate() {
            let idx = self.unravel(pos);
            let row = ravel(rows_modes.iter().map(|&m| (idx[m], self.dims[m])));
            let col = ravel(cols_modes.iter().map(|&m| (idx[m], self.dims[m])));
            m[(row, col)] = *z;
        }
        m
    }

    /// Reduced density matrix of the parties in `partition`, `M M^†` without
    /// normalisation; its trace is the squared norm of the state.
    pub fn reduced_density(&self, partition: &Partition) -> CMatrix {
        let m = self.flatten(partition);
        &m * m.adjoint()
    }

    pub fn one_multirank(&self, tol: f64) -> Result<MultiRank> {
        self.ensure_nonzero()?;
        let mut ranks = [0; 3];
        for (mode, r) in ranks.iter_mut().enumerate() {
            *r = numerical_rank(&self.flatten(&Partition::single(mode)), tol);
        }
        Ok(MultiRank(ranks))
    }

    /// Membership in the Segre variety: every single-mode flattening has rank one.
    pub fn is_fully_separable(&self, tol: f64) -> Result<bool> {
        Ok(self.one_multirank(tol)?.0 == [1, 1, 1])
    }

    fn unravel(&self, mut pos: usize) -> [usize; 3] {
        let k = pos % self.dims[2];
        pos /= self.dims[2];
        let j = pos % self.dims[1];
        [pos / self.dims[1], j, k]
    }
}

fn ravel(parts: impl Iterator<Item = (usize, usize)>) -> usize {
    parts.fold(0, |acc, (i, d)| acc * d + i)
}

impl std::ops::Index<[usize; 3]> for Tensor3 {
    type Output = Complex64;
    fn index(&self, idx: [usize; 3]) -> &Complex64 {
        &self.amps[self.offset(idx)]
    }
}

impl std::ops::IndexMut<[usize; 3]> for Tensor3 {
    fn index_mut(&mut self, idx: [usize; 3]) -> &mut Complex64 {
        let off = self.offset(idx);
        &mut self.amps[off]
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "dimension mismatch in tensor sum");
        Tensor3 {
            dims: self.dims,
            amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "dimension mismatch in tensor difference");
        Tensor3 {
            dims: self.dims,
            amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Tensor3> for Complex64 {
    type Output = Tensor3;
    fn mul(self, rhs: &Tensor3) -> Tensor3 {
        rhs.scaled(self)
    }
}

/// An ordered set of one or two modes; the remaining modes form the complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    modes: Vec<usize>,
}

impl Partition {
    pub fn new(modes: &[usize]) -> Result<Self> {
        if modes.is_empty() || modes.len() > 2 {
            return Err(invalid(format!(
                "a partition holds one or two modes, got {modes:?}"
            )));
        }
        if modes.iter().any(|&m| m > 2) {
            return Err(invalid(format!("modes must lie in 0..3, got {modes:?}")));
        }
        if modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "partition modes must be strictly increasing, got {modes:?}"
            )));
        }
        Ok(Self {
            modes: modes.to_vec(),
        })
    }

    pub fn single(mode: usize) -> Self {
        Self::new(&[mode]).expect("single-mode partition")
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..3).filter(|m| !self.modes.contains(m)).collect()
    }

    pub fn complement_partition(&self) -> Self {
        Self {
            modes: self.complement(),
        }
    }

    /// All six partitions: three singles followed by three pairs.
    pub fn all() -> Vec<Self> {
        let mut out: Vec<Self> = (0..3).map(Self::single).collect();
        out.extend([[0, 1], [0, 2], [1, 2]].map(|p| Self { modes: p.to_vec() }));
        out
    }
}

/// Ranks `(r1, r2, r3)` of the three single-mode flattenings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiRank(pub [usize; 3]);

impl MultiRank {
    pub fn largest(&self) -> usize {
        *self.0.iter().max().unwrap()
    }

    /// `r_i <= r_j * r_k` for every mode.
    pub fn satisfies_product_bound(&self) -> bool {
        let [a, b, c] = self.0;
        a <= b * c && b <= a * c && c <= a * b
    }

    /// Sorted descending, e.g. `(2,3,2)` becomes `(3,2,2)`.
    pub fn sorted_desc(&self) -> [usize; 3] {
        let mut s = self.0;
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

impl fmt::Display for MultiRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{}{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Two-party amplitude matrix, used for the two-qutrit classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor2 {
    dims: [usize; 2],
    amps: Vec<Complex64>,
}

impl Tensor2 {
    pub fn new(dims: [usize; 2], amps: Vec<Complex64>) -> Result<Self> {
        if dims.contains(&0) || amps.len() != dims[0] * dims[1] {
            return Err(invalid(format!(
                "expected {} amplitudes for dims {dims:?}, got {}",
                dims[0] * dims[1],
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("amplitudes must be finite"));
        }
        Ok(Self { dims, amps })
    }

    pub fn from_kets(d: usize, kets: &[&str]) -> Self {
        let mut amps = vec![ZERO; d * d];
        for ket in kets {
            let digits: Vec<usize> = ket
                .chars()
                .map(|c| c.to_digit(10).expect("ket digit") as usize)
                .collect();
            assert_eq!(digits.len(), 2, "ket {ket} must have two digits");
            amps[digits[0] * d + digits[1]] += ONE;
        }
        Self { dims: [d, d], amps }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dims[0], self.dims[1], &self.amps)
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|z| *z == ZERO)
    }

    /// `self ⊗ |index>` on a third party of dimension `d3`.
    pub fn extend_with_basis(&self, d3: usize, index: usize) -> Tensor3 {
        let mut t = Tensor3::zeros([self.dims[0], self.dims[1], d3]);
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                t[[i, j, index]] = self.amps[i * self.dims[1] + j];
            }
        }
        t
    }
}

/// Dense tensor of arbitrary order, used for n-party catalog states.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorN {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl TensorN {
    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        Self {
            dims,
            amps: vec![ZERO; len],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        ravel(idx.iter().copied().zip(self.dims.iter().copied()))
    }

    pub fn add_at(&mut self, idx: &[usize], value: Complex64) {
        let off = self.offset(idx);
        self.amps[off] += value;
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.amps[self.offset(idx)]
    }

    pub fn norm(&self) -> f64 {
        frobenius_norm(&self.amps)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    /// Rank-one tensor from one vector per party.
    pub fn product(vectors: &[Vec<Complex64>]) -> Self {
        let mut amps = vec![ONE];
        for v in vectors {
            amps = amps.iter().flat_map(|a| v.iter().map(move |x| a * x)).collect();
        }
        Self {
            dims: vectors.iter().map(Vec::len).collect(),
            amps,
        }
    }

    pub fn axpy(&mut self, alpha: Complex64, other: &Self) {
        assert_eq!(self.dims, other.dims, "dimension mismatch");
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += alpha * b;
        }
    }

    /// Indices of every stored amplitude in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.amps.len()).map(move |mut pos| {
            let mut idx = vec![0; self.dims.len()];
            for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
                *slot = pos % d;
                pos /= d;
            }
            idx
        })
    }

    /// Rank of the flattening separating `mode` from the other parties.
    pub fn mode_rank(&self, mode: usize, tol: f64) -> usize {
        let rows = self.dims[mode];
        let cols = self.amps.len() / rows;
        let mut m = CMatrix::zeros(rows, cols);
        for (pos, idx) in self.indices().enumerate() {
            let col = ravel(
                idx.iter()
                    .zip(&self.dims)
                    .enumerate()
                    .filter(|(m, _)| *m != mode)
                    .map(|(_, (&i, &d))| (i, d)),
            );
            m[(idx[mode], col)] = self.amps[pos];
        }
        numerical_rank(&m, tol)
    }

    pub fn multirank(&self, tol: f64) -> Vec<usize> {
        (0..self.order()).map(|m| self.mode_rank(m, tol)).collect()
    }

    /// True when every permutation of the parties leaves the tensor unchanged.
    pub fn is_symmetric(&self) -> bool {
        if self.dims.windows(2).any(|w| w[0] != w[1]) {
            return false;
        }
        self.indices().all(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            self.get(&idx) == self.get(&sorted)
        })
    }

    pub fn to_tensor3(&self) -> Result<Tensor3> {
        match self.dims.as_slice() {
            &[a, b, c] => Tensor3::new([a, b, c], self.amps.clone()),
            other => Err(invalid(format!("expected an order-3 tensor, got dims {other:?}"))),
        }
    }

    pub fn to_tensor2(&self) -> Result<Tensor2> {
        match self.dims.as_slice() {
            &[a, b] => Tensor2::new([a, b], self.amps.clone()),
            other => Err(invalid(format!("expected an order-2 tensor, got dims {other:?}"))),
        }
    }
}

impl From<&Tensor3> for TensorN {
    fn from(t: &Tensor3) -> Self {
        Self {
            dims: t.dims.to_vec(),
            amps: t.amps.clone(),
        }
    }
}

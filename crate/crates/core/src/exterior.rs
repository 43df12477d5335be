//! Exterior (Koszul) flattening `Λ^m H1 ⊗ H2* -> Λ^{m+1} H1 ⊗ H3` for local
//! dimension `d = 2m + 1`.
//!
//! Rows are indexed by `(ω, j)` with `ω` an m-subset of `{0..d}` and `j` a
//! mode-2 index; columns by `(ω', k)` with `ω'` an m-subset standing for its
//! complementary (m+1)-subset and `k` a mode-3 index. Subsets are listed
//! lexicographically. For disjoint `ω, ω'` with leftover element `c` the block
//! `(ω, ω')` is `sgn(ω ω' c) · T[d-1-c, :, :]`, which at `d = 3` is the
//! classical 9x9 Strassen matrix
//!
//! ```text
//!  0   0   0   c0  c1  c2 -c9 -c10 -c11
//!  0   0   0   c3  c4  c5 -c12 -c13 -c14
//!  ...
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{unsupported, Result};
use crate::linalg::{determinant, numerical_rank, CMatrix};
use crate::tensor::Tensor3;

/// Default threshold for `|det F| > tol · ‖t‖⁹`.
pub const DEFAULT_DET_TOL: f64 = 1e-9;

/// One signed block of the exterior flattening: rows of block `row_block`,
/// columns of block `col_block`, filled with `sign · T[mode1_index, j, k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub row_block: usize,
    pub col_block: usize,
    pub sign: i8,
    pub mode1_index: usize,
}

/// Exterior flattening matrix of a cubic tensor with odd local dimension.
#[derive(Clone, Debug)]
pub struct OttavianiMatrix {
    d: usize,
    m: usize,
    entries: CMatrix,
}

impl OttavianiMatrix {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.entries, tol)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically ordered `size`-subsets of `0..n`.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn permutation_sign(seq: &[usize]) -> i8 {
    let inversions = (0..seq.len())
        .flat_map(|i| (i + 1..seq.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| seq[i] > seq[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Signed block pattern of the exterior flattening for odd `d`.
pub fn block_pattern(d: usize) -> Result<Vec<BlockEntry>> {
    if d.is_multiple_of(2) {
        return Err(unsupported(&[d, d, d], "exterior flattening needs odd local dimension"));
    }
    let m = (d - 1) / 2;
    let blocks = subsets(d, m);
    let mut out = Vec::new();
    for (rb, omega) in blocks.iter().enumerate() {
        for (cb, omega2) in blocks.iter().enumerate() {
            if omega.iter().any(|x| omega2.contains(x)) {
                continue;
            }
            let leftover = (0..d)
                .find(|x| !omega.contains(x) && !omega2.contains(x))
                .expect("disjoint m-subsets of a (2m+1)-set leave one element");
            let seq: Vec<usize> = omega.iter().chain(omega2).copied().chain([leftover]).collect();
            out.push(BlockEntry {
                row_block: rb,
                col_block: cb,
                sign: permutation_sign(&seq),
                mode1_index: d - 1 - leftover,
            });
        }
    }
    Ok(out)
}

fn check_cubic_odd(t: &Tensor3) -> Result<usize> {
    let dims = t.dims();
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(unsupported(&dims, "exterior flattening needs equal local dimensions"));
    }
    if dims[0].is_multiple_of(2) {
        return Err(unsupported(&dims, "exterior flattening needs odd local dimension"));
    }
    Ok(dims[0])
}

pub fn build_exterior_flattening(t: &Tensor3) -> Result<OttavianiMatrix> {
    let d = check_cubic_odd(t)?;
    let m = (d - 1) / 2;
    let n = d * binomial(d, m);
    let mut f = CMatrix::zeros(n, n);
    for e in block_pattern(d)? {
        let sign = Complex64::new(e.sign as f64, 0.0);
        for j in 0..d {
            for k in 0..d {
                f[(e.row_block * d + j, e.col_block * d + k)] = sign * t[[e.mode1_index, j, k]];
            }
        }
    }
    Ok(OttavianiMatrix { d, m, entries: f })
}

fn require_qutrits(t: &Tensor3) -> Result<()> {
    if t.dims() != [3, 3, 3] {
        return Err(unsupported(&t.dims(), "defined for three qutrits only"));
    }
    Ok(())
}

/// The six orderings of the parties; `permute_modes(order)` moves party
/// `order[0]` into the wedge slot.
pub const MODE_ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Exterior-flattening rank for each entry of [`MODE_ORDERS`].
///
/// The flattening singles out the first party, so a product factor on
/// another party can hide rank; each ordering gives a valid lower bound.
pub fn exterior_ranks(t: &Tensor3, tol: f64) -> Result<[usize; 6]> {
    check_cubic_odd(t)?;
    let mut out = [0; 6];
    for (r, order) in out.iter_mut().zip(MODE_ORDERS) {
        *r = build_exterior_flattening(&t.permute_modes(order))?.rank(tol);
    }
    Ok(out)
}

/// Secant family index `k = ⌈rank F / 2⌉` of a three-qutrit state, with
/// rank F maximized over the party orderings.
pub fn secant_family_index(t: &Tensor3, tol: f64) -> Result<usize> {
    require_qutrits(t)?;
    t.ensure_nonzero()?;
    let ranks = exterior_ranks(t, tol)?;
    Ok(ranks.iter().max().copied().unwrap_or(0).div_ceil(2))
}

/// Determinant of the 9x9 exterior flattening; a degree-9 invariant that
/// vanishes on the four-secant variety.
pub fn strassen_determinant(t: &Tensor3) -> Result<Complex64> {
    require_qutrits(t)?;
    Ok(determinant(build_exterior_flattening(t)?.matrix()))
}

/// `|det F| > tol · ‖t‖⁹`.
pub fn determinant_is_nonzero(det: Complex64, t: &Tensor3, tol: f64) -> bool {
    det.norm() > tol * t.norm().powi(9)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BorderRankBound {
    /// Largest exterior-flattening rank over the party orderings.
    pub flattening_rank: usize,
    /// `⌈rank F / C(2m, m)⌉`.
    pub flattening_bound: usize,
    /// Largest single-mode flattening rank.
    pub multirank_bound: usize,
    /// `⌊d² / (m+1)⌋`, the largest k whose secant equations the minors provide.
    pub validity_cap: usize,
    pub bound: usize,
}

pub fn border_rank_lower_bound(t: &Tensor3, tol: f64) -> Result<BorderRankBound> {
    let d = check_cubic_odd(t)?;
    t.ensure_nonzero()?;
    let m = (d - 1) / 2;
    let flattening_rank = exterior_ranks(t, tol)?.into_iter().max().unwrap_or(0);
    let flattening_bound = flattening_rank.div_ceil(binomial(2 * m, m));
    let multirank_bound = t.one_multirank(tol)?.largest();
    Ok(BorderRankBound {
        flattening_rank,
        flattening_bound,
        multirank_bound,
        validity_cap: d * d / (m + 1),
        bound: flattening_bound.max(multirank_bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_RANK_TOL;

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(5, 2).len(), 10);
    }

    #[test]
    fn matrix_is_square_for_odd_d() {
        for d in [1usize, 3, 5, 7] {
            let m = (d - 1) / 2;
            assert_eq!(binomial(d, m) * d, binomial(d, m + 1) * d);
            let t = Tensor3::basis([d, d, d], [0, 0, 0]);
            let f = build_exterior_flattening(&t).unwrap();
            assert_eq!(f.size(), d * binomial(d, m));
        }
    }

    #[test]
    fn even_or_unequal_dims_rejected() {
        assert!(build_exterior_flattening(&Tensor3::zeros([2, 2, 2])).is_err());
        assert!(build_exterior_flattening(&Tensor3::zeros([3, 3, 5])).is_err());
        assert!(secant_family_index(&Tensor3::basis([5, 5, 5], [0, 0, 0]), 1e-8).is_err());
    }

    #[test]
    fn basis_000_gives_two_entries() {
        let t = Tensor3::basis([3, 3, 3], [0, 0, 0]);
        let f = build_exterior_flattening(&t).unwrap();
        let nz: Vec<_> = f
            .matrix()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(i, z)| ((i % 9, i / 9), z.re))
            .collect();
        // column-major iteration in nalgebra: (row, col)
        assert_eq!(nz.len(), 2);
        assert!(nz.contains(&((0, 3), 1.0)));
        assert!(nz.contains(&((3, 0), -1.0)));
    }

    #[test]
    fn ghz_qutrit_has_rank_six() {
        let t = Tensor3::from_kets(3, &["000", "111", "222"]);
        let f = build_exterior_flattening(&t).unwrap();
        assert_eq!(f.matrix().iter().filter(|z| z.norm() > 0.0).count(), 6);
        assert_eq!(f.rank(DEFAULT_RANK_TOL), 6);
        assert_eq!(secant_family_index(&t, DEFAULT_RANK_TOL).unwrap(), 3);
    }

    #[test]
    fn separable_state_is_family_one() {
        let t = Tensor3::basis([3, 3, 3], [0, 0, 0]);
        assert_eq!(secant_family_index(&t, DEFAULT_RANK_TOL).unwrap(), 1);
        assert!(secant_family_index(&Tensor3::zeros([3, 3, 3]), DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn ghz_determinant_vanishes() {
        let t = Tensor3::from_kets(3, &["000", "111", "222"]);
        assert_eq!(strassen_determinant(&t).unwrap().norm(), 0.0);
    }

    #[test]
    fn five_secant_determinant_closed_form() {
        // Symbolic evaluation of the 9x9 determinant (computer algebra, then
        // an independent numpy check) gives 2t(t-1) for this family.
        let w = [1.0, 1.0, 1.0];
        let g3 = &Tensor3::from_kets(3, &["000", "111", "222"]) + &Tensor3::product_real(&w, &w, &w);
        let extra = Tensor3::product_real(&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]);
        for (tv, want) in [(2.0, 4.0), (0.5, -0.5), (-1.0, 4.0), (1.0, 0.0)] {
            let t = &g3 + &extra.scaled(Complex64::new(tv, 0.0));
            let det = strassen_determinant(&t).unwrap();
            assert!((det - Complex64::new(want, 0.0)).norm() < 1e-9, "t={tv}: {det}");
        }
    }

    #[test]
    fn degree_nine_homogeneity() {
        let w = [1.0, 0.5, -1.0];
        let t = &Tensor3::from_kets(3, &["000", "111", "222", "012"]) + &Tensor3::product_real(&w, &w, &w);
        let lambda = Complex64::new(0.7, -0.4);
        let lhs = strassen_determinant(&t.scaled(lambda)).unwrap();
        let rhs = strassen_determinant(&t).unwrap() * lambda.powi(9);
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn border_bound_for_product_state_d5() {
        let t = Tensor3::basis([5, 5, 5], [1, 3, 2]);
        let b = border_rank_lower_bound(&t, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(b.flattening_rank, 6);
        assert_eq!(b.bound, 1);
        assert_eq!(b.validity_cap, 8);
    }

    #[test]
    fn product_factor_off_the_wedge_party() {
        // GHZ2^(2) on parties 1 and 3, |0> on party 2
        let t = Tensor3::from_kets(3, &["000", "101", "202"]);
        assert_eq!(build_exterior_flattening(&t).unwrap().rank(DEFAULT_RANK_TOL), 3);
        let ranks = exterior_ranks(&t, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ranks.iter().max(), Some(&6));
        assert_eq!(secant_family_index(&t, DEFAULT_RANK_TOL).unwrap(), 3);
    }
}

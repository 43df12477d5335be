//! Closed-form generic ranks, monomial Waring ranks and Dicke-state ranks.
//!
//! Integer arithmetic throughout. Values that rest on a conjecture carry
//! [`Status::Conjecture`].

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exterior::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Theorem,
    Conjecture,
    /// A listed exceptional case of a general formula.
    Exception,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "theorem",
            Status::Conjecture => "conjectural",
            Status::Exception => "exception",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Tagged {
    pub value: u64,
    pub status: Status,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Generic rank of `C^d ⊗ C^d ⊗ C^d`: `⌈d³/(3d−2)⌉`, except 5 at d = 3.
pub fn generic_rank_tripartite(d: u64) -> Result<Tagged> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if d == 3 {
        return Ok(Tagged { value: 5, status: Status::Exception });
    }
    Ok(Tagged {
        value: ceil_div(d.pow(3), 3 * d - 2),
        status: Status::Theorem,
    })
}

/// Generic symmetric rank in `Sym^n C^d`: `⌈C(n+d−1, n)/d⌉`, with `d` for
/// quadrics and one more for (3,5), (4,3), (4,4), (4,5).
pub fn generic_symmetric_rank(n: u64, d: u64) -> Result<Tagged> {
    if n == 0 || d == 0 {
        return Err(invalid("degree and dimension must be positive"));
    }
    if n == 2 {
        return Ok(Tagged { value: d, status: Status::Exception });
    }
    let expected = ceil_div(binomial((n + d - 1) as usize, n as usize) as u64, d);
    if matches!((n, d), (3, 5) | (4, 3) | (4, 4) | (4, 5)) {
        return Ok(Tagged { value: expected + 1, status: Status::Exception });
    }
    Ok(Tagged { value: expected, status: Status::Theorem })
}

/// Shapes whose generic rank is one above the expected value:
/// 4x4x3, (2i+1)x(2i+1)x3 and (i+2)x(i+2)x2x2.
pub fn is_exceptional_shape(dims: &[u64]) -> bool {
    let mut s = dims.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    match s.as_slice() {
        [4, 4, 3] => true,
        [a, b, 3] if a == b && a % 2 == 1 && *a >= 3 => true,
        [a, b, 2, 2] if a == b && *a >= 3 => true,
        _ => false,
    }
}

/// Expected generic rank `⌈∏d_i / (Σd_i − n + 1)⌉`, plus one on the
/// exceptional shapes. Equality with the generic rank is conjectural.
pub fn expected_rank_multipartite(dims: &[u64]) -> Result<Tagged> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(invalid("dimensions must be a nonempty list of positive integers"));
    }
    let n = dims.len() as u64;
    let prod: u64 = dims.iter().product();
    let denom = dims.iter().sum::<u64>() - n + 1;
    let expected = ceil_div(prod, denom);
    if is_exceptional_shape(dims) {
        Ok(Tagged { value: expected + 1, status: Status::Exception })
    } else {
        Ok(Tagged { value: expected, status: Status::Conjecture })
    }
}

/// Exponents of a monomial `x_0^{d_0} ... x_n^{d_n}`, sorted ascending with
/// zeros removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSpec {
    exponents: Vec<u64>,
}

impl MonomialSpec {
    pub fn new(exponents: &[u64]) -> Result<Self> {
        let mut e: Vec<u64> = exponents.iter().copied().filter(|&x| x > 0).collect();
        if e.is_empty() {
            return Err(invalid("a monomial needs at least one positive exponent"));
        }
        e.sort_unstable();
        Ok(Self { exponents: e })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }
}

/// `∏_{i≥1} (d_i + 1)`: every factor except the smallest exponent.
pub fn waring_rank(m: &MonomialSpec) -> Tagged {
    Tagged {
        value: m.exponents[1..].iter().map(|d| d + 1).product(),
        status: Status::Theorem,
    }
}

/// `∏_{i<n} (d_i + 1)`: every factor except the largest exponent.
pub fn waring_border_rank(m: &MonomialSpec) -> Tagged {
    let n = m.exponents.len();
    Tagged {
        value: m.exponents[..n - 1].iter().map(|d| d + 1).product(),
        status: Status::Conjecture,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DickeRanks {
    pub rank: u64,
    pub border: u64,
    /// Secant index (the border rank).
    pub k: u64,
    pub tangent: bool,
    pub status: Status,
}

/// Tensor rank and border rank of the n-qubit Dicke state with `l` excitations.
pub fn qubit_dicke_ranks(n: u64, l: u64) -> Result<DickeRanks> {
    if n < 2 || l == 0 || l >= n {
        return Err(invalid(format!("need 1 <= l <= n-1, got n={n}, l={l}")));
    }
    let l = l.min(n - l);
    let m = MonomialSpec::new(&[l, n - l])?;
    let rank = waring_rank(&m).value;
    let border = waring_border_rank(&m).value;
    Ok(DickeRanks {
        rank,
        border,
        k: border,
        tangent: rank != border,
        status: Status::Conjecture,
    })
}

/// Excitation vector `(⌈n/3⌉, ⌊n/3⌋, n − ⌈n/3⌉ − ⌊n/3⌋)` of the qutrit Dicke
/// state with the largest border rank.
pub fn qutrit_dicke_extremal(n: u64) -> [u64; 3] {
    let up = n.div_ceil(3);
    let down = n / 3;
    [up, down, n - up - down]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QutritDicke {
    pub excitations: [u64; 3],
    pub k: u64,
    pub tangent: bool,
    pub status: Status,
}

/// Secant family of the extremal n-qutrit Dicke state: proper iff `3 | n`.
pub fn qutrit_dicke_secant(n: u64) -> Result<QutritDicke> {
    if n < 3 {
        return Err(invalid(format!("need n >= 3 qutrits, got {n}")));
    }
    let j = qutrit_dicke_extremal(n);
    Ok(QutritDicke {
        excitations: j,
        k: (n / 3 + 1) * (j[2] + 1),
        tangent: !n.is_multiple_of(3),
        status: Status::Conjecture,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionCheck {
    pub parameter: u64,
    /// Left side of the strict inequality.
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionReport {
    pub checks: Vec<PropositionCheck>,
    /// Parameters outside the proposition's hypothesis, with the reason.
    pub skipped: Vec<(u64, String)>,
}

impl PropositionReport {
    pub fn violations(&self) -> Vec<&PropositionCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// For every `d >= 3` in range: generic symmetric rank of cubics is below
/// the tripartite generic rank.
pub fn check_proposition1(ds: impl IntoIterator<Item = u64>) -> Result<PropositionReport> {
    let mut report = PropositionReport { checks: Vec::new(), skipped: Vec::new() };
    for d in ds {
        if d < 3 {
            report.skipped.push((d, "the statement needs d >= 3".into()));
            continue;
        }
        let lhs = generic_symmetric_rank(3, d)?.value;
        let rhs = generic_rank_tripartite(d)?.value;
        report.checks.push(PropositionCheck { parameter: d, lhs, rhs, holds: lhs < rhs });
    }
    Ok(report)
}

/// For every `n >= 4` in range: the extremal qutrit Dicke secant index is
/// below the generic symmetric rank of `Sym^n C^3`.
pub fn check_proposition2(ns: impl IntoIterator<Item = u64>) -> Result<PropositionReport> {
    let mut report = PropositionReport { checks: Vec::new(), skipped: Vec::new() };
    for n in ns {
        if n < 4 {
            report.skipped.push((n, "the statement needs n >= 4; n = 3 is the d = 3 case of the symmetric cubic check".into()));
            continue;
        }
        let lhs = qutrit_dicke_secant(n)?.k;
        let rhs = generic_symmetric_rank(n, 3)?.value;
        report.checks.push(PropositionCheck { parameter: n, lhs, rhs, holds: lhs < rhs });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u64]) -> MonomialSpec {
        MonomialSpec::new(e).unwrap()
    }

    #[test]
    fn tripartite_generic_ranks() {
        assert_eq!(generic_rank_tripartite(2).unwrap().value, 2);
        assert_eq!(generic_rank_tripartite(3).unwrap().value, 5);
        assert_eq!(generic_rank_tripartite(3).unwrap().status, Status::Exception);
        assert_eq!(generic_rank_tripartite(4).unwrap().value, 7);
    }

    #[test]
    fn symmetric_generic_ranks() {
        assert_eq!(generic_symmetric_rank(3, 3).unwrap().value, 4);
        assert_eq!(generic_symmetric_rank(4, 3).unwrap().value, 6);
        assert_eq!(generic_symmetric_rank(2, 5).unwrap().value, 5);
        assert_eq!(generic_symmetric_rank(3, 5).unwrap().value, 8);
    }

    #[test]
    fn multipartite_expected_ranks() {
        assert_eq!(expected_rank_multipartite(&[3, 3, 3]).unwrap().value, 5);
        assert_eq!(expected_rank_multipartite(&[4, 4, 3]).unwrap().value, 7);
        assert_eq!(expected_rank_multipartite(&[3, 4, 4]).unwrap().value, 7);
        let t = expected_rank_multipartite(&[2, 2, 2]).unwrap();
        assert_eq!((t.value, t.status), (2, Status::Conjecture));
        assert!(is_exceptional_shape(&[5, 5, 3]));
        assert!(is_exceptional_shape(&[3, 3, 2, 2]));
        assert!(!is_exceptional_shape(&[4, 4, 4]));
    }

    #[test]
    fn monomial_ranks() {
        assert_eq!(waring_rank(&mono(&[1, 1, 1])).value, 4);
        assert_eq!(waring_border_rank(&mono(&[1, 1, 1])).value, 4);
        assert_eq!(waring_rank(&mono(&[1, 2])).value, 3);
        assert_eq!(waring_border_rank(&mono(&[2, 1])).value, 2);
        assert_eq!(waring_rank(&mono(&[5])).value, 1);
        assert_eq!(waring_border_rank(&mono(&[5, 0])).value, 1);
        assert_eq!(waring_border_rank(&mono(&[1])).status, Status::Conjecture);
        assert!(MonomialSpec::new(&[]).is_err());
        assert!(MonomialSpec::new(&[0, 0]).is_err());
    }

    #[test]
    fn qubit_dicke() {
        let r = |n, l| {
            let d = qubit_dicke_ranks(n, l).unwrap();
            (d.rank, d.border, d.tangent)
        };
        assert_eq!(r(4, 1), (4, 2, true));
        assert_eq!(r(4, 2), (3, 3, false));
        assert_eq!(r(5, 2), (4, 3, true));
        assert_eq!(r(5, 3), r(5, 2));
        assert!(qubit_dicke_ranks(4, 0).is_err());
    }

    #[test]
    fn qutrit_dicke() {
        let q = |n| {
            let d = qutrit_dicke_secant(n).unwrap();
            (d.k, d.tangent)
        };
        assert_eq!(q(3), (4, false));
        assert_eq!(q(4), (4, true));
        assert_eq!(q(6), (9, false));
        assert_eq!(qutrit_dicke_extremal(4), [2, 1, 1]);
    }

    #[test]
    fn propositions() {
        let p1 = check_proposition1(2..=4).unwrap();
        assert!(p1.passed());
        assert_eq!(p1.skipped.len(), 1);
        assert_eq!((p1.checks[0].lhs, p1.checks[0].rhs), (4, 5));
        let p2 = check_proposition2([4]).unwrap();
        assert_eq!((p2.checks[0].lhs, p2.checks[0].rhs), (4, 6));
        assert!(p2.passed());
    }
}

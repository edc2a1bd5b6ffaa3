use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{GroebnerBasis, Ideal};
use crate::poly::{rat, ExponentVector, GradedOrdering, Polynomial};
use crate::{Error, Result};

/// Degree-`delta` monomials outside the leading-term ideal, in descending
/// order under the basis ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase {
    pub delta: u32,
    pub ordering: GradedOrdering,
    pub exponents: Vec<ExponentVector>,
}

impl Staircase {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, e: &ExponentVector) -> bool {
        self.exponents.contains(e)
    }

    /// `σ_i`: the sum of the `i`-th exponent over the staircase.
    pub fn sigma(&self, i: usize) -> u64 {
        self.exponents.iter().map(|e| e.get(i) as u64).sum()
    }

    pub fn sigmas(&self) -> Vec<u64> {
        let n = self.exponents.first().map(|e| e.len()).unwrap_or(0);
        (0..n).map(|i| self.sigma(i)).collect()
    }
}

impl GroebnerBasis {
    pub fn staircase(&self, delta: u32) -> Result<Staircase> {
        self.check_degree(delta)?;
        let mut exponents: Vec<ExponentVector> = ExponentVector::all_of_degree(self.num_vars(), delta)
            .into_iter()
            .filter(|e| !self.in_leading_ideal(e))
            .collect();
        let ord = self.ordering();
        exponents.sort_by(|a, b| ord.cmp(b, a));
        Ok(Staircase { delta, ordering: ord, exponents })
    }

    /// `HF_I(s)`, the number of degree-`s` monomials outside `LT(I)`.
    pub fn hilbert_function(&self, s: u32) -> Result<u64> {
        Ok(self.staircase(s)?.len() as u64)
    }

    pub fn sigma(&self, i: usize, s: u32) -> Result<u64> {
        if i >= self.num_vars() {
            return Err(Error::input(format!("variable index {i} out of range")));
        }
        Ok(self.staircase(s)?.sigma(i))
    }

    /// `a_i(s) = σ_i(s) / (s HF(s))`. Finite-`s` values: they approach the
    /// limiting `a_i` only up to an `O(1/s)` error.
    pub fn a_estimates(&self, s: u32) -> Result<Vec<BigRational>> {
        if s == 0 {
            return Err(Error::contract("a_i estimates need s >= 1"));
        }
        let st = self.staircase(s)?;
        if st.is_empty() {
            return Err(Error::Degenerate(format!("Hilbert function vanishes at s = {s}")));
        }
        let denom = BigInt::from(s as u64 * st.len() as u64);
        Ok(st
            .sigmas()
            .into_iter()
            .map(|x| BigRational::new(BigInt::from(x), denom.clone()))
            .collect())
    }

    /// Fits the Hilbert polynomial on `window`.
    ///
    /// For the first start `s0` in the window, the `n+1` values from `s0`
    /// determine a polynomial of degree at most `n`; it must then predict the
    /// next two values as well. Later starts are tried on failure.
    pub fn hilbert_polynomial(&self, window: RangeInclusive<u32>) -> Result<HilbertPolynomial> {
        let n1 = self.num_vars() as u32;
        let need = n1 + 2;
        let (lo, hi) = (*window.start(), *window.end());
        if let Some(cap) = self.truncation_degree() {
            if hi > cap {
                return Err(Error::contract(format!("window end {hi} exceeds truncation degree {cap}")));
            }
        }
        let values: Vec<i64> = (lo..=hi).map(|s| self.hilbert_function(s).map(|v| v as i64)).collect::<Result<_>>()?;
        let mut s0 = lo;
        let mut prefix_end = lo;
        while s0 + need - 1 <= hi {
            let off = (s0 - lo) as usize;
            let slice = &values[off..off + need as usize];
            let p = newton_fit(s0, &slice[..n1 as usize]);
            let ok = slice.iter().enumerate().all(|(k, &v)| eval_univariate(&p, s0 + k as u32) == rat(v));
            if ok {
                // the fit has to keep holding to the end of the window
                let tail_ok = (s0 + need..=hi).all(|s| eval_univariate(&p, s) == rat(values[(s - lo) as usize]));
                if tail_ok {
                    return Ok(HilbertPolynomial::from_coefficients(p, s0));
                }
            }
            prefix_end = s0 + need - 1;
            s0 += 1;
        }
        Err(Error::WindowTooSmall {
            message: format!("no single polynomial fits HF on {lo}..={hi}"),
            prefix_end,
        })
    }
}

/// Newton forward interpolation at `s0, s0+1, ...`; coefficients in the
/// monomial basis, constant term first.
fn newton_fit(s0: u32, values: &[i64]) -> Vec<BigRational> {
    let mut diffs: Vec<BigRational> = values.iter().map(|&v| rat(v)).collect();
    let mut leading = Vec::with_capacity(values.len());
    while let Some(first) = diffs.first() {
        leading.push(first.clone());
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    // sum_k Δ^k(s0) * C(s - s0, k)
    let mut out = vec![BigRational::zero()];
    let mut basis = vec![BigRational::one()];
    for (k, d) in leading.iter().enumerate() {
        if k > 0 {
            // basis *= (s - s0 - (k-1)) / k
            let shift = rat(s0 as i64 + k as i64 - 1);
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (i, c) in basis.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &shift;
            }
            let kk = rat(k as i64);
            basis = next.into_iter().map(|c| c / &kk).collect();
        }
        if out.len() < basis.len() {
            out.resize(basis.len(), BigRational::zero());
        }
        for (i, c) in basis.iter().enumerate() {
            out[i] += c * d;
        }
    }
    while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn eval_univariate(p: &[BigRational], s: u32) -> BigRational {
    let x = rat(s as i64);
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
}

/// A fitted Hilbert polynomial with the dimension and degree it encodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertPolynomial {
    /// Coefficients of `P(s)`, constant term first.
    #[serde(serialize_with = "ser_rationals")]
    pub coefficients: Vec<BigRational>,
    /// `deg P`; `None` when `P = 0` (empty projective variety).
    pub dimension: Option<usize>,
    /// `m! * b_m`.
    #[serde(serialize_with = "ser_rational")]
    pub degree: BigRational,
    /// First degree of the window the fit was taken from.
    pub stable_from: u32,
}

impl HilbertPolynomial {
    fn from_coefficients(coefficients: Vec<BigRational>, stable_from: u32) -> Self {
        let zero = coefficients.iter().all(|c| c.is_zero());
        let dimension = if zero { None } else { Some(coefficients.len() - 1) };
        let degree = match dimension {
            None => BigRational::zero(),
            Some(m) => {
                let fact: BigInt = (1..=m as u64).map(BigInt::from).product();
                &coefficients[m] * BigRational::from_integer(fact)
            }
        };
        HilbertPolynomial { coefficients, dimension, degree, stable_from }
    }

    pub fn evaluate(&self, s: u32) -> BigRational {
        eval_univariate(&self.coefficients, s)
    }

    pub fn degree_f64(&self) -> f64 {
        self.degree.to_f64().unwrap_or(f64::NAN)
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(x))
}

pub(crate) fn ser_rationals<S: serde::Serializer>(
    xs: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(rational_string))
}

pub(crate) fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// The finite-`s` check behind the adapted-ordering bound for affine ideals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineOrderingBound {
    pub s: u32,
    /// `(σ_1 + ... + σ_n)(s) / (s HF_{I^h}(s))` under grlex-left.
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    /// `Σ_{t ≤ s} t HF_J(t) / (s HF_{I^h}(s))` with `J = I^h + (x0)`.
    #[serde(serialize_with = "ser_rational")]
    pub intermediate: BigRational,
    /// `m / (m + 1)`, the limit the estimate approaches with `O(1/s)` error.
    #[serde(serialize_with = "ser_rational")]
    pub limit: BigRational,
    pub dimension: usize,
    /// `lhs <= intermediate`, exact at every finite `s`.
    pub holds: bool,
    /// `a_0(s), ..., a_n(s)`.
    #[serde(serialize_with = "ser_rationals")]
    pub a: Vec<BigRational>,
}

impl AffineOrderingBound {
    /// `I_affine` lives in `n` variables; its homogenization uses `x0` as the
    /// new variable.
    pub fn compute(affine: &Ideal, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::contract("s must be positive"));
        }
        let ord = GradedOrdering::GrlexLeft;
        let ih = affine.homogenization()?;
        let n1 = ih.num_vars();
        let window_hi = default_window_end(n1).max(s);
        let gb = GroebnerBasis::compute(&ih, ord, Some(window_hi))?;
        let hp = gb.hilbert_polynomial(0..=window_hi)?;
        let m = hp
            .dimension
            .ok_or_else(|| Error::Degenerate("projective closure is empty".into()))?;
        let x0 = Polynomial::var(n1, 0);
        let j = ih.extended([x0])?;
        let gbj = GroebnerBasis::compute(&j, ord, Some(s))?;
        let st = gb.staircase(s)?;
        let hf = st.len() as u64;
        if hf == 0 {
            return Err(Error::Degenerate(format!("HF_(I^h)({s}) = 0")));
        }
        let denom = BigInt::from(s as u64 * hf);
        let sig = st.sigmas();
        let lhs_num: u64 = sig[1..].iter().sum();
        let mut jsum = 0u64;
        for t in 1..=s {
            jsum += t as u64 * gbj.hilbert_function(t)?;
        }
        let lhs = BigRational::new(BigInt::from(lhs_num), denom.clone());
        let intermediate = BigRational::new(BigInt::from(jsum), denom.clone());
        let limit = BigRational::new(BigInt::from(m as u64), BigInt::from(m as u64 + 1));
        let a = sig.iter().map(|&x| BigRational::new(BigInt::from(x), denom.clone())).collect();
        let holds = lhs <= intermediate;
        debug_assert!(!lhs.is_negative());
        Ok(AffineOrderingBound { s, lhs, intermediate, limit, dimension: m, holds, a })
    }
}

/// A window end comfortably past where Hilbert functions of small desk-scale
/// ideals have stabilized.
pub fn default_window_end(num_vars: usize) -> u32 {
    (3 * num_vars as u32 + 12).max(16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarSpace;

    fn gb(gens: &[&str], n: usize, cap: u32) -> GroebnerBasis {
        let i = if gens.is_empty() { Ideal::zero(n) } else { Ideal::parse(gens, &VarSpace::new(n)).unwrap() };
        GroebnerBasis::compute(&i, GradedOrdering::GrlexLeft, Some(cap)).unwrap()
    }

    fn ev(e: &[u32]) -> ExponentVector {
        ExponentVector::new(e.to_vec())
    }

    const CONIC: &[&str] = &["x0*x2 - x1^2"];
    const TWISTED: &[&str] = &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"];

    #[test]
    fn staircase_of_zero_ideal() {
        let st = gb(&[], 2, 4).staircase(2).unwrap();
        assert_eq!(st.exponents, vec![ev(&[0, 2]), ev(&[1, 1]), ev(&[2, 0])]);
    }

    #[test]
    fn conic_staircase_excludes_the_leading_monomial() {
        let st = gb(CONIC, 3, 4).staircase(2).unwrap();
        assert_eq!(st.len(), 5);
        assert!(!st.contains(&ev(&[0, 2, 0])));
        assert!(st.contains(&ev(&[1, 0, 1])));
        assert!(st.exponents.iter().all(|e| e.degree() == 2));
    }

    #[test]
    fn maximal_ideal_staircase_is_empty() {
        let g = gb(&["x0", "x1", "x2"], 3, 4);
        for d in 1..=4 {
            assert!(g.staircase(d).unwrap().is_empty());
        }
        assert_eq!(g.hilbert_function(0).unwrap(), 1);
    }

    #[test]
    fn staircase_respects_cap() {
        assert!(matches!(gb(CONIC, 3, 4).staircase(5), Err(Error::Contract(_))));
    }

    #[test]
    fn hilbert_function_examples() {
        let z = gb(&[], 2, 10);
        let c = gb(CONIC, 3, 10);
        let t = gb(TWISTED, 4, 10);
        for s in 1..=10 {
            assert_eq!(z.hilbert_function(s).unwrap(), s as u64 + 1);
            assert_eq!(c.hilbert_function(s).unwrap(), 2 * s as u64 + 1);
            assert_eq!(t.hilbert_function(s).unwrap(), 3 * s as u64 + 1);
        }
    }

    #[test]
    fn sigma_examples() {
        let z = gb(&[], 2, 10);
        let c = gb(CONIC, 3, 10);
        for s in 0..=10u64 {
            assert_eq!(z.sigma(0, s as u32).unwrap(), s * (s + 1) / 2);
        }
        let total: u64 = (0..3).map(|i| c.sigma(i, 2).unwrap()).sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn hilbert_polynomials() {
        let z = gb(&[], 2, 16).hilbert_polynomial(0..=16).unwrap();
        assert_eq!((z.dimension, z.degree.clone()), (Some(1), rat(1)));
        assert_eq!(z.coefficients, vec![rat(1), rat(1)]);
        let c = gb(CONIC, 3, 16).hilbert_polynomial(0..=16).unwrap();
        assert_eq!((c.dimension, c.degree.clone()), (Some(1), rat(2)));
        assert_eq!(c.coefficients, vec![rat(1), rat(2)]);
        let t = gb(TWISTED, 4, 16).hilbert_polynomial(0..=16).unwrap();
        assert_eq!((t.dimension, t.degree.clone()), (Some(1), rat(3)));
        assert_eq!(t.coefficients, vec![rat(1), rat(3)]);
        let p2 = gb(&[], 3, 16).hilbert_polynomial(0..=16).unwrap();
        assert_eq!((p2.dimension, p2.degree), (Some(2), rat(1)));
        let empty = gb(&["x0", "x1"], 2, 16).hilbert_polynomial(0..=16).unwrap();
        assert_eq!(empty.dimension, None);
        assert_eq!(empty.stable_from, 1);
    }

    #[test]
    fn small_window_reports_prefix() {
        let r = gb(CONIC, 3, 16).hilbert_polynomial(0..=3);
        assert!(matches!(r, Err(Error::WindowTooSmall { .. })));
        // two points (x0*x1 = 0 in P^1 plus an embedded irregularity at s = 0..2)
        let g = gb(&["x0^3*x1", "x0*x1^3"], 2, 12);
        let hp = g.hilbert_polynomial(0..=12).unwrap();
        assert_eq!(hp.dimension, Some(0));
        assert!(hp.stable_from > 0);
    }

    #[test]
    fn a_estimates_examples() {
        let z = gb(&[], 2, 12);
        for s in 1..=12 {
            let half = BigRational::new(1.into(), 2.into());
            assert_eq!(z.a_estimates(s).unwrap(), vec![half.clone(), half]);
        }
        let pt = gb(&["x1", "x2"], 3, 5);
        assert_eq!(pt.a_estimates(5).unwrap(), vec![rat(1), rat(0), rat(0)]);
        let empty = gb(&["x0", "x1"], 2, 4);
        assert!(matches!(empty.a_estimates(3), Err(Error::Degenerate(_))));
        assert!(matches!(z.a_estimates(0), Err(Error::Contract(_))));
    }

    #[test]
    fn conic_a_estimates_approach_half_zero_half() {
        let a = gb(CONIC, 3, 50).a_estimates(50).unwrap();
        let sum: BigRational = a.iter().cloned().sum();
        assert_eq!(sum, rat(1));
        let f: Vec<f64> = a.iter().map(|x| x.to_f64().unwrap()).collect();
        assert!((f[0] - 0.5).abs() < 2.0 / 50.0);
        assert!(f[1].abs() < 2.0 / 50.0);
        assert!((f[2] - 0.5).abs() < 2.0 / 50.0);
    }

    #[test]
    fn affine_bound_parabola() {
        let i = Ideal::parse(&["x2 - x1^2"], &VarSpace::affine(2)).unwrap();
        let r = AffineOrderingBound::compute(&i, 40).unwrap();
        assert!(r.holds);
        assert_eq!(r.dimension, 1);
        assert_eq!(r.limit, BigRational::new(1.into(), 2.into()));
        // (s+1)/(2s+1) in closed form
        assert_eq!(r.lhs, BigRational::new(41.into(), 81.into()));
        let total: BigRational = r.a.iter().cloned().sum();
        assert_eq!(total, rat(1));
        assert_eq!(&r.lhs + &r.a[0], rat(1));
    }

    #[test]
    fn affine_bound_line_holds_everywhere() {
        let i = Ideal::parse(&["x2"], &VarSpace::affine(2)).unwrap();
        for s in 1..=12 {
            let r = AffineOrderingBound::compute(&i, s).unwrap();
            assert!(r.holds, "s = {s}");
            assert_eq!(r.lhs, r.a[1].clone() + r.a[2].clone());
        }
    }
}

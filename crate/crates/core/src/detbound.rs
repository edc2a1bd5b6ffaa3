//! Combinatorial counts, `C^k` norm bounds and the determinant estimate.
//!
//! Every real-valued bound is computed in natural-log space and rounded
//! outward, so rounding never understates a bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::poly::{ExponentVector, Polynomial};
use crate::{Error, Result};

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `L_m(k) = C(k+m-1, m-1)`, the number of monomials of degree exactly `k`
/// in `m` variables.
pub fn monomials_of_degree(m: u32, k: u32) -> u128 {
    assert!(m >= 1, "m must be positive");
    binomial(k as u64 + m as u64 - 1, m as u64 - 1)
}

/// `D_m(k) = C(k+m, m)`, the number of monomials of degree at most `k`.
pub fn monomials_up_to_degree(m: u32, k: u32) -> u128 {
    assert!(m >= 1, "m must be positive");
    binomial(k as u64 + m as u64, m as u64)
}

/// Taylor order and the matching power of the box diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentBudget {
    pub nu: u32,
    pub e: u128,
}

/// The smallest `ν` with `D_m(ν-1) <= μ <= D_m(ν)` and
/// `e = Σ_{i<ν} i L_m(i) + ν (μ - D_m(ν-1))`.
pub fn choose_nu(mu: u64, m: u32) -> ExponentBudget {
    assert!(mu >= 1 && m >= 1, "μ and m must be positive");
    let mu = mu as u128;
    let mut nu = 0u32;
    while monomials_up_to_degree(m, nu) < mu {
        nu += 1;
    }
    let below = if nu == 0 { 0 } else { monomials_up_to_degree(m, nu - 1) };
    let e = (0..nu).map(|i| i as u128 * monomials_of_degree(m, i)).sum::<u128>() + nu as u128 * (mu - below);
    ExponentBudget { nu, e }
}

/// Rounds a floating-point value up past any accumulated rounding error.
pub fn round_up(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    (x + x.abs() * 8.0 * f64::EPSILON).next_up()
}

pub fn round_down(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    (x - x.abs() * 8.0 * f64::EPSILON).next_down()
}

/// Natural log of a nonnegative rational, rounded up; `-inf` for zero.
pub fn ln_rational_up(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    round_up(ln_bigint(x.numer().abs()) - ln_bigint(x.denom().clone()))
}

fn ln_bigint(x: BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = &x >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_factorial_up(n: u64) -> f64 {
    round_up((2..=n).map(|k| (k as f64).ln()).sum::<f64>())
}

/// An axis-aligned box `[lo_j, hi_j]` in parameter space.
pub type ParamBox = Vec<(BigRational, BigRational)>;

pub fn unit_box(m: usize) -> ParamBox {
    vec![(-BigRational::one(), BigRational::one()); m]
}

/// Exact coefficient-sum bound for `max_{x ∈ box} max_{|α| ≤ k} |∂^α φ_c(x)|`.
///
/// Each derivative is taken in the original variables and then rewritten in
/// the variable `s ∈ [-1,1]^m` of the rescaled box; the sum of absolute
/// coefficients dominates the supremum there.
pub fn ck_norm_bound_exact(phi: &[Polynomial], k: u32, bx: &ParamBox) -> Result<BigRational> {
    let mut best = BigRational::zero();
    for comp in phi {
        let m = comp.num_vars();
        if bx.len() != m {
            return Err(Error::input("box dimension differs from the number of parameters"));
        }
        if bx.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::input("empty box"));
        }
        // x_j = centre_j + half_j * s_j
        let subs: Vec<Polynomial> = bx
            .iter()
            .enumerate()
            .map(|(j, (lo, hi))| {
                let two = BigRational::from_integer(2.into());
                let centre = Polynomial::constant(m, (lo + hi) / &two);
                let half = Polynomial::var(m, j).scale(&((hi - lo) / two));
                &centre + &half
            })
            .collect();
        for order in 0..=k {
            for alpha in ExponentVector::all_of_degree(m, order) {
                let d = comp.partial_derivative(&alpha)?;
                let on_box = d.compose(&subs)?;
                let sum: BigRational = on_box.terms().map(|(_, c)| c.abs()).sum();
                if sum > best {
                    best = sum;
                }
            }
        }
    }
    Ok(best)
}

/// [`ck_norm_bound_exact`] rounded up to an `f64`.
pub fn ck_norm_bound(phi: &[Polynomial], k: u32, bx: &ParamBox) -> Result<f64> {
    let exact = ck_norm_bound_exact(phi, k, bx)?;
    Ok(rational_to_f64_up(&exact))
}

pub fn rational_to_f64_up(x: &BigRational) -> f64 {
    let f = x.to_f64().unwrap_or(f64::INFINITY);
    if x.is_zero() {
        0.0
    } else {
        round_up(f)
    }
}

/// `ℓ^k ‖φ_1‖_k ⋯ ‖φ_ℓ‖_k`, the product-rule bound for a product of `ℓ` maps.
pub fn product_norm_bound(norms: &[f64], k: u32) -> f64 {
    if norms.contains(&0.0) {
        return 0.0;
    }
    if norms.is_empty() {
        return 1.0;
    }
    let l = norms.len() as f64;
    let mut log = round_up(k as f64 * l.ln());
    for &x in norms {
        assert!(x >= 0.0, "norms must be nonnegative");
        log = round_up(log + round_up(x.ln()));
    }
    round_up(log.exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetBoundInput {
    /// Matrix size `μ`.
    pub mu: u64,
    /// Parameter-space dimension.
    pub m: u32,
    /// `‖ψ_i‖_ν` for each of the `μ` functions.
    pub norms: Vec<f64>,
    /// Diameter of the convex set carrying the points, in `(0, 1)`.
    pub r: f64,
}

impl DetBoundInput {
    pub fn validate(&self) -> Result<()> {
        if self.mu < 1 || self.m < 1 {
            return Err(Error::input("μ and m must be at least 1"));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::input(format!("diameter r = {} outside (0, 1)", self.r)));
        }
        if self.norms.len() as u64 != self.mu {
            return Err(Error::input(format!("{} norms given for μ = {}", self.norms.len(), self.mu)));
        }
        if self.norms.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::input("norms must be nonnegative"));
        }
        Ok(())
    }
}

/// A determinant bound in natural-log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBound {
    /// `ln` of the bound, rounded up; `-inf` when some norm vanishes.
    pub ln: f64,
    pub budget: ExponentBudget,
}

impl LogBound {
    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn value(&self) -> f64 {
        round_up(self.ln.exp())
    }
}

/// `ln(μ! D_m(ν)^μ Π‖ψ_i‖_ν · r^e)`.
pub fn determinant_bound(input: &DetBoundInput) -> Result<LogBound> {
    input.validate()?;
    let (ln, budget) = ln_lemma_constant(input.mu, input.m, &input.norms);
    if ln == f64::NEG_INFINITY {
        return Ok(LogBound { ln, budget });
    }
    // ln r < 0, so rounding it up keeps the product an upper bound
    let ln = round_up(ln + round_up(budget.e as f64 * round_up(input.r.ln())));
    Ok(LogBound { ln, budget })
}

/// `ln(μ! D_m(ν)^μ Π‖ψ_i‖_ν)`, rounded up; `-inf` when a norm vanishes.
pub fn ln_lemma_constant(mu: u64, m: u32, norms: &[f64]) -> (f64, ExponentBudget) {
    let budget = choose_nu(mu, m);
    if norms.contains(&0.0) {
        return (f64::NEG_INFINITY, budget);
    }
    let d = monomials_up_to_degree(m, budget.nu) as f64;
    let mut ln = ln_factorial_up(mu);
    ln = round_up(ln + round_up(mu as f64 * round_up(d.ln())));
    for &x in norms {
        ln = round_up(ln + round_up(x.ln()));
    }
    (ln, budget)
}

/// Exact rational evaluation of the same bound, for small `μ`.
pub fn determinant_bound_exact(mu: u64, m: u32, norms: &[BigRational], r: &BigRational) -> BigRational {
    let budget = choose_nu(mu, m);
    let fact: BigInt = (1..=mu).map(BigInt::from).product();
    let d = BigInt::from(monomials_up_to_degree(m, budget.nu));
    let mut acc = BigRational::from_integer(fact * num_traits::pow(d, mu as usize));
    for x in norms {
        acc *= x;
    }
    acc * num_traits::pow(r.clone(), budget.e as usize)
}

/// Finite-`δ` exponents `m σ_i / f` next to their limits `(m+1) a_i / d^{1/m}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticExponents {
    pub finite: Vec<f64>,
    pub limit: Vec<f64>,
    /// `finite - limit`, per coordinate.
    pub slack: Vec<f64>,
    pub f: u128,
}

pub fn asymptotic_exponents(sigma: &[u64], mu: u64, d: f64, m: u32, a: &[f64]) -> Result<AsymptoticExponents> {
    if m < 1 || !(d >= 1.0) {
        return Err(Error::input("need m >= 1 and d >= 1"));
    }
    if a.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::input("a_i must lie in [0, 1]"));
    }
    if sigma.len() != a.len() {
        return Err(Error::input("σ and a have different lengths"));
    }
    if mu <= 1 {
        return Err(Error::Degenerate("f = 0 when μ <= 1".into()));
    }
    let f = choose_nu(mu, m).e;
    let finite: Vec<f64> = sigma.iter().map(|&s| m as f64 * s as f64 / f as f64).collect();
    let limit = limit_exponents(a, d, m);
    let slack = finite.iter().zip(&limit).map(|(x, y)| x - y).collect();
    Ok(AsymptoticExponents { finite, limit, slack, f })
}

/// `(m+1) a_i / d^{1/m}`.
pub fn limit_exponents(a: &[f64], d: f64, m: u32) -> Vec<f64> {
    let root = d.powf(1.0 / m as f64);
    a.iter().map(|&x| (m as f64 + 1.0) * x / root).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, VarSpace};
    use proptest::prelude::*;

    fn p1(s: &str) -> Polynomial {
        Polynomial::parse(s, &VarSpace::new(1).with_prefix("t")).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(monomials_of_degree(2, 3), 4);
        assert_eq!(monomials_up_to_degree(2, 3), 10);
        for k in 0..20 {
            assert_eq!(monomials_of_degree(1, k), 1);
            assert_eq!(monomials_up_to_degree(1, k), k as u128 + 1);
        }
    }

    proptest! {
        #[test]
        fn counts_telescope(m in 1u32..6, k in 1u32..30) {
            prop_assert_eq!(
                monomials_up_to_degree(m, k) - monomials_up_to_degree(m, k - 1),
                monomials_of_degree(m, k)
            );
            prop_assert_eq!(monomials_of_degree(m, k) as usize, ExponentVector::all_of_degree(m as usize, k).len());
        }

        #[test]
        fn nu_is_minimal_and_sandwiched(mu in 1u64..500, m in 1u32..4) {
            let b = choose_nu(mu, m);
            let below = if b.nu == 0 { 0 } else { monomials_up_to_degree(m, b.nu - 1) };
            prop_assert!(below <= mu as u128 && mu as u128 <= monomials_up_to_degree(m, b.nu));
            if b.nu > 0 {
                prop_assert!(monomials_up_to_degree(m, b.nu - 1) < mu as u128);
            }
        }
    }

    #[test]
    fn choose_nu_examples() {
        assert_eq!(choose_nu(3, 1), ExponentBudget { nu: 2, e: 3 });
        assert_eq!(choose_nu(6, 2), ExponentBudget { nu: 2, e: 8 });
        assert_eq!(choose_nu(1, 1), ExponentBudget { nu: 0, e: 0 });
        assert_eq!(choose_nu(1, 3), ExponentBudget { nu: 0, e: 0 });
        // the one-variable budget is the Vandermonde exponent
        for mu in 1..30u64 {
            assert_eq!(choose_nu(mu, 1).e, (mu * (mu - 1) / 2) as u128);
        }
    }

    #[test]
    fn ck_norm_examples() {
        let b = unit_box(1);
        assert_eq!(ck_norm_bound_exact(&[p1("t0")], 2, &b).unwrap(), rat(1));
        assert_eq!(ck_norm_bound_exact(&[p1("t0^2")], 2, &b).unwrap(), rat(2));
        assert_eq!(ck_norm_bound_exact(&[p1("-5/2")], 3, &b).unwrap(), BigRational::new(5.into(), 2.into()));
        // t^2 on [1/2, 1]: |2t| <= 2 still dominates
        let half = vec![(BigRational::new(1.into(), 2.into()), rat(1))];
        let n = ck_norm_bound_exact(&[p1("t0^2")], 1, &half).unwrap();
        assert!(n >= rat(2));
        assert!(ck_norm_bound(&[p1("t0")], 1, &vec![(rat(1), rat(0))]).is_err());
    }

    #[test]
    fn product_norm_examples() {
        let single = product_norm_bound(&[3.5], 4);
        assert!((3.5..3.5 * (1.0 + 1e-12)).contains(&single));
        let two = product_norm_bound(&[1.0, 1.0], 1);
        assert!((2.0..2.0 * (1.0 + 1e-12)).contains(&two));
        // ‖t·t‖_2 on [-1,1] is 2, within 2^2 · 1 · 1
        let exact = ck_norm_bound(&[p1("t0^2")], 2, &unit_box(1)).unwrap();
        let t = ck_norm_bound(&[p1("t0")], 2, &unit_box(1)).unwrap();
        assert!(exact <= product_norm_bound(&[t, t], 2));
        assert!(exact >= 2.0);
    }

    #[test]
    fn determinant_bound_example() {
        let b = determinant_bound(&DetBoundInput { mu: 3, m: 1, norms: vec![1.0, 1.0, 2.0], r: 0.1 }).unwrap();
        assert_eq!(b.budget.e, 3);
        let v = b.value();
        assert!((0.324..0.324 * (1.0 + 1e-12)).contains(&v), "{v}");
        let exact = determinant_bound_exact(3, 1, &[rat(1), rat(1), rat(2)], &BigRational::new(1.into(), 10.into()));
        assert_eq!(exact, BigRational::new(324.into(), 1000.into()));
    }

    #[test]
    fn vandermonde_within_bound() {
        // 1, t, t^2 at 0, 0.05, 0.1: product of gaps = 0.05 * 0.1 * 0.05
        let gaps = BigRational::new(25.into(), 100_000.into());
        let b = determinant_bound(&DetBoundInput { mu: 3, m: 1, norms: vec![1.0, 1.0, 2.0], r: 0.1 }).unwrap();
        assert!(ln_rational_up(&gaps) <= b.ln);
    }

    #[test]
    fn bound_monotone_in_r() {
        let mut prev = f64::INFINITY;
        for r in [0.9, 0.5, 0.1, 0.01, 0.001] {
            let b = determinant_bound(&DetBoundInput { mu: 4, m: 1, norms: vec![1.0; 4], r }).unwrap();
            assert!(b.ln < prev);
            prev = b.ln;
        }
    }

    #[test]
    fn zero_norm_gives_minus_infinity() {
        let b = determinant_bound(&DetBoundInput { mu: 2, m: 1, norms: vec![0.0, 1.0], r: 0.5 }).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn invalid_inputs() {
        for input in [
            DetBoundInput { mu: 0, m: 1, norms: vec![], r: 0.5 },
            DetBoundInput { mu: 1, m: 1, norms: vec![1.0], r: 1.0 },
            DetBoundInput { mu: 2, m: 1, norms: vec![1.0], r: 0.5 },
            DetBoundInput { mu: 1, m: 1, norms: vec![-1.0], r: 0.5 },
        ] {
            assert!(determinant_bound(&input).is_err());
        }
    }

    #[test]
    fn asymptotic_examples() {
        // a line: limits (1, 1), sharp exponent m d^{-1/m} = 1
        let lim = limit_exponents(&[0.5, 0.5], 1.0, 1);
        assert_eq!(lim, vec![1.0, 1.0]);
        // conic setup: limits over the affine coordinates sum to 1/2
        let lim = limit_exponents(&[0.5, 0.25, 0.25], 2.0, 1);
        assert!((lim[1] + lim[2] - 0.5).abs() < 1e-15);
        // linearity: a summing to one gives (m+1)/d^{1/m}
        let lim = limit_exponents(&[0.2, 0.3, 0.5], 4.0, 2);
        assert!((lim.iter().sum::<f64>() - 3.0 / 2.0).abs() < 1e-12);
        assert!(matches!(asymptotic_exponents(&[0], 1, 1.0, 1, &[0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ln_of_huge_rationals() {
        let big = BigRational::from_integer(num_traits::pow(BigInt::from(10), 400));
        let l = ln_rational_up(&big);
        assert!((l - 400.0 * 10f64.ln()).abs() < 1e-9);
        let tiny = big.recip();
        assert!(ln_rational_up(&tiny) >= -400.0 * 10f64.ln() - 1e-9);
    }
}

//! Integral points of bounded height, affine and projective.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ideal::Ideal;
use crate::poly::Polynomial;
use crate::{Error, Result};

/// Default cap on the number of box cells a scan may visit.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointMode {
    Affine,
    Projective,
}

/// Coordinate bounds `(B_0, ..., B_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HeightBox {
    bounds: Vec<f64>,
}

impl TryFrom<Vec<f64>> for HeightBox {
    type Error = Error;

    fn try_from(bounds: Vec<f64>) -> Result<Self> {
        HeightBox::new(bounds)
    }
}

impl From<HeightBox> for Vec<f64> {
    fn from(b: HeightBox) -> Self {
        b.bounds
    }
}

impl HeightBox {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::input("empty height box"));
        }
        if let Some(b) = bounds.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::input(format!("height bound {b} is not a positive real")));
        }
        if bounds.iter().any(|b| *b >= i64::MAX as f64 / 4.0) {
            return Err(Error::input("height bound too large"));
        }
        Ok(HeightBox { bounds })
    }

    pub fn uniform(len: usize, b: f64) -> Result<Self> {
        HeightBox::new(vec![b; len])
    }

    /// `(1, B, ..., B)`: the box carrying the lifts `(1, x)` of affine points.
    pub fn affine_lift(n: usize, b: f64) -> Result<Self> {
        let mut v = vec![b; n + 1];
        v[0] = 1.0;
        HeightBox::new(v)
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// `⌊B_i⌋`, the integer scan radius of coordinate `i`.
    pub fn radius(&self, i: usize) -> i64 {
        self.bounds[i].floor() as i64
    }

    pub fn exact(&self, i: usize) -> BigRational {
        BigRational::from_float(self.bounds[i]).expect("finite bound")
    }

    /// Number of integer vectors in the box.
    pub fn cells(&self) -> u128 {
        (0..self.len()).fold(1u128, |acc, i| acc.saturating_mul(2 * self.radius(i) as u128 + 1))
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.len() && x.iter().enumerate().all(|(i, v)| v.unsigned_abs() <= self.radius(i) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub mode: PointMode,
    pub points: Vec<Vec<i64>>,
    pub bounds: HeightBox,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.points.iter()
    }

    /// Number of distinct projective classes; equals `len` for emitted sets.
    pub fn class_count(&self) -> usize {
        match self.mode {
            PointMode::Affine => self.len(),
            PointMode::Projective => {
                let mut seen: Vec<Vec<i64>> = self.points.iter().map(|p| canonical(p)).collect();
                seen.sort();
                seen.dedup();
                seen.len()
            }
        }
    }
}

fn canonical(p: &[i64]) -> Vec<i64> {
    let g = p.iter().fold(0i64, |g, &v| g.gcd(&v));
    let sign = p.iter().find(|v| **v != 0).map_or(1, |v| v.signum());
    p.iter().map(|v| v / g.max(1) * sign).collect()
}

/// A generator with integer coefficients, ready for fast evaluation.
#[derive(Debug, Clone)]
struct IntForm {
    terms: Vec<(Vec<u32>, BigInt, Option<i128>)>,
}

impl IntForm {
    fn new(f: &Polynomial) -> Self {
        let scale = BigRational::from_integer(f.denominator_lcm());
        let terms = f
            .terms()
            .map(|(e, c)| {
                let c = (c * &scale).to_integer();
                let small = c.to_i128();
                (e.entries().to_vec(), c, small)
            })
            .collect();
        IntForm { terms }
    }

    fn eval_small(&self, x: &[i64]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (e, _, c) in &self.terms {
            let mut t = (*c)?;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t.checked_mul((*xi as i128).checked_pow(k)?)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    fn eval(&self, x: &[i64]) -> BigInt {
        if let Some(v) = self.eval_small(x) {
            return v.into();
        }
        self.terms
            .iter()
            .map(|(e, c, _)| {
                x.iter()
                    .zip(e)
                    .fold(c.clone(), |t, (xi, &k)| t * num_traits::pow(BigInt::from(*xi), k as usize))
            })
            .sum()
    }

    fn vanishes(&self, x: &[i64]) -> bool {
        self.eval(x).is_zero()
    }
}

/// `g = c(x') x_k + h(x')`, with `x'` the other coordinates.
#[derive(Debug, Clone)]
struct LinearSolve {
    k: usize,
    c: IntForm,
    h: IntForm,
}

impl LinearSolve {
    fn find(g: &Polynomial) -> Option<Self> {
        let n = g.num_vars();
        let mut best: Option<(bool, usize)> = None;
        for k in 0..n {
            if g.support().any(|e| e.get(k) > 1) || g.support().all(|e| e.get(k) == 0) {
                continue;
            }
            let constant = g.support().filter(|e| e.get(k) == 1).all(|e| e.degree() == 1);
            if best.is_none_or(|(c, _)| constant && !c) {
                best = Some((constant, k));
            }
        }
        let (_, k) = best?;
        let part = |deg: u32| {
            let terms = g
                .terms()
                .filter(|(e, _)| e.get(k) == deg)
                .map(|(e, c)| {
                    let mut v = e.entries().to_vec();
                    v[k] = 0;
                    (crate::poly::ExponentVector::new(v), c.clone())
                })
                .collect::<Vec<_>>();
            Polynomial::from_terms(n, terms).expect("same ring")
        };
        let (c, h) = (part(1), part(0));
        // a shared denominator keeps the quotient exact
        let both = &(&c * &Polynomial::var(n, k)) + &h;
        let scale = BigRational::from_integer(both.denominator_lcm());
        Some(LinearSolve { k, c: IntForm::new(&c.scale(&scale)), h: IntForm::new(&h.scale(&scale)) })
    }
}

struct Scanner<'a> {
    forms: Vec<IntForm>,
    solve: Option<LinearSolve>,
    radii: Vec<i64>,
    keep: &'a (dyn Fn(&[i64]) -> bool + Sync),
}

impl Scanner<'_> {
    fn run(&self) -> Vec<Vec<i64>> {
        let n = self.radii.len();
        let free: Vec<usize> = (0..n).filter(|&i| self.solve.as_ref().is_none_or(|s| s.k != i)).collect();
        if free.is_empty() {
            let mut out = Vec::new();
            self.complete(&mut vec![0; n], &mut out);
            return out;
        }
        let outer = free[0];
        let r = self.radii[outer];
        let mut points: Vec<Vec<i64>> = (-r..=r)
            .into_par_iter()
            .flat_map_iter(|v| {
                let mut x = vec![0i64; n];
                x[outer] = v;
                let mut out = Vec::new();
                self.odometer(&free[1..], &mut x, &mut out);
                out
            })
            .collect();
        points.sort();
        points
    }

    fn odometer(&self, free: &[usize], x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        for &i in free {
            x[i] = -self.radii[i];
        }
        loop {
            self.complete(x, out);
            let mut advanced = false;
            for &i in free.iter().rev() {
                if x[i] < self.radii[i] {
                    x[i] += 1;
                    advanced = true;
                    break;
                }
                x[i] = -self.radii[i];
            }
            if !advanced {
                return;
            }
        }
    }

    fn complete(&self, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        match &self.solve {
            None => self.accept(x, out),
            Some(s) => {
                x[s.k] = 0;
                let c = s.c.eval(x);
                let h = s.h.eval(x);
                let r = self.radii[s.k];
                if c.is_zero() {
                    if h.is_zero() {
                        for v in -r..=r {
                            x[s.k] = v;
                            self.accept(x, out);
                        }
                    }
                } else {
                    let (q, rem) = (-h).div_rem(&c);
                    if rem.is_zero() {
                        if let Some(v) = q.to_i64().filter(|v| v.abs() <= r) {
                            x[s.k] = v;
                            self.accept(x, out);
                        }
                    }
                }
            }
        }
    }

    fn accept(&self, x: &[i64], out: &mut Vec<Vec<i64>>) {
        if (self.keep)(x) && self.forms.iter().all(|f| f.vanishes(x)) {
            out.push(x.to_vec());
        }
    }
}

fn check_budget(cells: u128, budget: u128) -> Result<()> {
    if cells > budget {
        return Err(Error::Budget { required: cells, budget });
    }
    Ok(())
}

/// All `x ∈ Z^n` with `|x_i| <= B` on the affine variety, sorted.
pub fn enumerate_affine(ideal: &Ideal, b: f64, budget: u128) -> Result<PointSet> {
    let n = ideal.num_vars();
    let bounds = HeightBox::uniform(n, b)?;
    check_budget(bounds.cells(), budget)?;
    let forms: Vec<IntForm> = ideal.generators().iter().map(IntForm::new).collect();
    let solve = ideal.generators().first().and_then(LinearSolve::find);
    let keep = |_: &[i64]| true;
    let scanner = Scanner { forms, solve, radii: (0..n).map(|i| bounds.radius(i)).collect(), keep: &keep };
    Ok(PointSet { mode: PointMode::Affine, points: scanner.run(), bounds })
}

/// Primitive vectors with first nonzero entry positive, one per rational
/// point, inside the box and on the projective variety; sorted.
pub fn enumerate_projective(ideal: &Ideal, bounds: &HeightBox, budget: u128) -> Result<PointSet> {
    if !ideal.is_homogeneous() {
        return Err(Error::contract("projective enumeration needs a homogeneous ideal"));
    }
    if bounds.len() != ideal.num_vars() {
        return Err(Error::input(format!(
            "{} height bounds for {} variables",
            bounds.len(),
            ideal.num_vars()
        )));
    }
    check_budget(bounds.cells(), budget)?;
    let forms: Vec<IntForm> = ideal.generators().iter().map(IntForm::new).collect();
    let solve = ideal.generators().first().and_then(LinearSolve::find);
    let keep = |x: &[i64]| is_canonical(x);
    let n = bounds.len();
    let scanner = Scanner { forms, solve, radii: (0..n).map(|i| bounds.radius(i)).collect(), keep: &keep };
    Ok(PointSet { mode: PointMode::Projective, points: scanner.run(), bounds: bounds.clone() })
}

/// Primitive with first nonzero entry positive.
pub fn is_canonical(x: &[i64]) -> bool {
    match x.iter().find(|v| **v != 0) {
        Some(&first) if first > 0 => x.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1,
        _ => false,
    }
}

/// Smallest `i` maximizing `|x_i| / B_i`, compared exactly.
pub fn class_of(x: &[i64], bounds: &HeightBox) -> usize {
    let ratio = |i: usize| BigRational::new(x[i].abs().into(), 1.into()) / bounds.exact(i);
    let mut best = 0;
    let mut best_ratio = ratio(0);
    for i in 1..x.len() {
        let r = ratio(i);
        if r > best_ratio {
            best = i;
            best_ratio = r;
        }
    }
    best
}

/// Splits a projective point set into the classes `S_0, ..., S_n`.
pub fn partition_classes(ps: &PointSet) -> Result<Vec<PointSet>> {
    if ps.mode != PointMode::Projective {
        return Err(Error::contract("the class partition applies to projective point sets"));
    }
    let mut classes = vec![Vec::new(); ps.bounds.len()];
    for p in &ps.points {
        classes[class_of(p, &ps.bounds)].push(p.clone());
    }
    Ok(classes
        .into_iter()
        .map(|points| PointSet { mode: PointMode::Projective, points, bounds: ps.bounds.clone() })
        .collect())
}

/// `τ(x) = (x_0 / B_0, ..., x_n / B_n)`, exactly.
pub fn tau_normalize(x: &[i64], bounds: &HeightBox) -> Result<Vec<BigRational>> {
    if x.len() != bounds.len() {
        return Err(Error::input("point and box have different lengths"));
    }
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let y = BigRational::from_integer(v.into()) / bounds.exact(i);
            if y.abs() > BigRational::from_integer(1.into()) {
                return Err(Error::contract(format!("coordinate {i} of {x:?} lies outside the box")));
            }
            Ok(y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarSpace;

    fn affine(gens: &[&str], n: usize) -> Ideal {
        Ideal::parse(gens, &VarSpace::affine(n)).unwrap()
    }

    fn proj(gens: &[&str], n: usize) -> Ideal {
        Ideal::parse(gens, &VarSpace::new(n)).unwrap()
    }

    fn oracle(ideal: &Ideal, radii: &[i64], projective: bool) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut x: Vec<i64> = radii.iter().map(|r| -r).collect();
        loop {
            let big: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
            let on = ideal.generators().iter().all(|g| g.evaluate_int(&big).unwrap().is_zero());
            let rep = !projective || {
                let g = x.iter().fold(0i64, |g, &v| g.gcd(&v));
                g == 1 && x.iter().find(|v| **v != 0).is_some_and(|v| *v > 0)
            };
            if on && rep {
                out.push(x.clone());
            }
            let mut i = x.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if x[i] < radii[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = -radii[i];
            }
        }
    }

    #[test]
    fn parabola_has_21_points() {
        let ps = enumerate_affine(&affine(&["x2 - x1^2"], 2), 100.0, DEFAULT_BUDGET).unwrap();
        assert_eq!(ps.len(), 21);
        assert_eq!(ps.points[0], vec![-10, 100]);
        assert!(ps.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn circle_and_empty() {
        for b in [1.0, 2.5, 10.0] {
            let ps = enumerate_affine(&affine(&["x1^2 + x2^2 - 1"], 2), b, DEFAULT_BUDGET).unwrap();
            assert_eq!(ps.points, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        }
        let ps = enumerate_affine(&affine(&["x1^2 + 1"], 2), 10.0, DEFAULT_BUDGET).unwrap();
        assert!(ps.is_empty());
    }

    #[test]
    fn affine_matches_naive_scan() {
        let corpus: Vec<Ideal> = vec![
            affine(&["x2 - x1^2"], 2),
            affine(&["x1^2 + x2^2 - 1"], 2),
            affine(&["x2 - x1"], 2),
            affine(&["x1 - 2", "x2 - 3"], 2),
            affine(&["x1^2 + 1"], 2),
            affine(&["x2 - x1^2", "x3 - x1*x2"], 3),
            affine(&["1/2*x1*x2 - 3"], 2),
            affine(&["x1*x2 - x3"], 3),
        ];
        for ideal in &corpus {
            let n = ideal.num_vars();
            let b = if n == 3 { 8 } else { 30 };
            let fast = enumerate_affine(ideal, b as f64, DEFAULT_BUDGET).unwrap();
            assert_eq!(fast.points, oracle(ideal, &vec![b; n], false), "{ideal:?}");
        }
    }

    #[test]
    fn budget_guard() {
        let err = enumerate_affine(&affine(&["x2 - x1^2"], 2), 100.0, 1000).unwrap_err();
        assert_eq!(err, Error::Budget { required: 201 * 201, budget: 1000 });
    }

    #[test]
    fn projective_line_height_one() {
        let ps = enumerate_projective(&Ideal::zero(2), &HeightBox::uniform(2, 1.0).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(ps.points, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn projective_matches_oracle() {
        let conic = proj(&["x0*x2 - x1^2"], 3);
        let twisted = proj(&["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"], 4);
        for (ideal, bounds) in [
            (&conic, vec![4.0, 4.0, 4.0]),
            (&conic, vec![1.0, 9.5, 30.0]),
            (&twisted, vec![8.0, 8.0, 8.0, 8.0]),
        ] {
            let hb = HeightBox::new(bounds.clone()).unwrap();
            let fast = enumerate_projective(ideal, &hb, DEFAULT_BUDGET).unwrap();
            let radii: Vec<i64> = bounds.iter().map(|b| b.floor() as i64).collect();
            assert_eq!(fast.points, oracle(ideal, &radii, true));
            assert_eq!(fast.class_count(), fast.len());
            assert!(fast.iter().all(|p| is_canonical(p)));
        }
    }

    #[test]
    fn small_bounds_force_zero_coordinates() {
        let hb = HeightBox::new(vec![0.5, 3.0, 3.0]).unwrap();
        let ps = enumerate_projective(&proj(&["x0*x2 - x1^2"], 3), &hb, DEFAULT_BUDGET).unwrap();
        assert!(ps.iter().all(|p| p[0] == 0));
        assert_eq!(ps.points, vec![vec![0, 0, 1]]);
    }

    #[test]
    fn projective_needs_homogeneous() {
        let err = enumerate_projective(&proj(&["x1 - x0^2"], 2), &HeightBox::uniform(2, 3.0).unwrap(), DEFAULT_BUDGET);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn classes() {
        let hb = HeightBox::uniform(3, 4.0).unwrap();
        assert_eq!(class_of(&[4, 2, 1], &hb), 0);
        assert_eq!(class_of(&[1, 1, 1], &hb), 0);
        assert_eq!(class_of(&[1, -3, 3], &hb), 1);
        let skew = HeightBox::new(vec![1.0, 100.0, 100.0]).unwrap();
        assert_eq!(class_of(&[1, 50, 99], &skew), 0);
        assert_eq!(class_of(&[1, 100, 10], &skew), 0);

        let ps = enumerate_projective(&proj(&["x0*x2 - x1^2"], 3), &hb, DEFAULT_BUDGET).unwrap();
        let parts = partition_classes(&ps).unwrap();
        assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), ps.len());
        for (i, part) in parts.iter().enumerate() {
            for p in part.iter() {
                let t = tau_normalize(p, &hb).unwrap();
                assert!(t.iter().all(|y| y.abs() <= t[i].abs()));
            }
        }
    }

    #[test]
    fn tau() {
        let hb = HeightBox::uniform(3, 4.0).unwrap();
        let t = tau_normalize(&[4, 2, 0], &hb).unwrap();
        assert_eq!(t, vec![BigRational::from_integer(1.into()), BigRational::new(1.into(), 2.into()), BigRational::zero()]);
        assert!(matches!(tau_normalize(&[5, 0, 0], &hb), Err(Error::Contract(_))));
        // chart coordinates y_j / y_0 = x_j B_0 / (x_0 B_j)
        let skew = HeightBox::new(vec![2.0, 8.0, 4.0]).unwrap();
        let t = tau_normalize(&[2, 4, -3], &skew).unwrap();
        assert_eq!(&t[1] / &t[0], BigRational::new((4 * 2).into(), (2 * 8).into()));
    }

    #[test]
    fn big_coordinates_fall_back_to_bigint() {
        let f = IntForm::new(&Polynomial::parse("x0^5 - x1^5", &VarSpace::new(2)).unwrap());
        let x = [i64::MAX / 2, i64::MAX / 2];
        assert!(f.eval_small(&x).is_none());
        assert!(f.vanishes(&x));
    }
}

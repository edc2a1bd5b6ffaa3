//! Sparse multivariate polynomials over the rationals.

mod ordering;
mod text;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub use ordering::GradedOrdering;
pub use text::VarSpace;

/// Exponents of a monomial, with its total degree cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector {
    entries: Vec<u32>,
    degree: u32,
}

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        ExponentVector { entries, degree }
    }

    pub fn zero(len: usize) -> Self {
        ExponentVector { entries: vec![0; len], degree: 0 }
    }

    /// The exponent vector of the single variable `var`.
    pub fn unit(len: usize, var: usize) -> Self {
        let mut entries = vec![0; len];
        entries[var] = 1;
        ExponentVector { entries, degree: 1 }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &ExponentVector) -> bool {
        self.degree <= other.degree && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// `other - self`, when `self` divides `other`.
    pub fn quotient_of(&self, other: &ExponentVector) -> Option<ExponentVector> {
        if !self.divides(other) {
            return None;
        }
        Some(ExponentVector {
            entries: other.entries.iter().zip(&self.entries).map(|(a, b)| a - b).collect(),
            degree: other.degree - self.degree,
        })
    }

    pub fn lcm(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector::new(self.entries.iter().zip(&other.entries).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &ExponentVector) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub(crate) fn insert(&self, pos: usize, value: u32) -> ExponentVector {
        let mut entries = self.entries.clone();
        entries.insert(pos, value);
        ExponentVector { entries, degree: self.degree + value }
    }

    pub(crate) fn remove(&self, pos: usize) -> ExponentVector {
        let mut entries = self.entries.clone();
        let v = entries.remove(pos);
        ExponentVector { entries, degree: self.degree - v }
    }

    /// All exponent vectors of length `len` and total degree `degree`.
    pub fn all_of_degree(len: usize, degree: u32) -> Vec<ExponentVector> {
        fn rec(len: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
            if prefix.len() + 1 == len {
                prefix.push(remaining);
                out.push(ExponentVector::new(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=remaining).rev() {
                prefix.push(e);
                rec(len, remaining - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if len == 0 {
            if degree == 0 {
                out.push(ExponentVector::zero(0));
            }
            return out;
        }
        rec(len, degree, &mut Vec::with_capacity(len), &mut out);
        out
    }
}

/// A polynomial with exact rational coefficients in a fixed number of variables.
///
/// Zero coefficients are never stored; the zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<ExponentVector, BigRational>,
    num_vars: usize,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial { terms: BTreeMap::new(), num_vars }
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        Polynomial::monomial(num_vars, ExponentVector::zero(num_vars), c)
    }

    pub fn one(num_vars: usize) -> Self {
        Polynomial::constant(num_vars, BigRational::one())
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        Polynomial::monomial(num_vars, ExponentVector::unit(num_vars, i), BigRational::one())
    }

    pub fn monomial(num_vars: usize, exp: ExponentVector, c: BigRational) -> Self {
        assert_eq!(exp.len(), num_vars, "exponent length must equal variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Polynomial { terms, num_vars }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, summing repeats.
    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (ExponentVector, BigRational)>,
    ) -> Result<Self> {
        let mut p = Polynomial::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::input(format!(
                    "exponent vector of length {} in a {num_vars}-variable polynomial",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Recomputed on every call.
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.degree());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    /// Terms in descending order under `ord`.
    pub fn sorted_terms(&self, ord: GradedOrdering) -> Vec<(&ExponentVector, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| ord.cmp(b.0, a.0));
        v
    }

    pub fn leading_term(&self, ord: GradedOrdering) -> Result<(&ExponentVector, &BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| ord.cmp(a.0, b.0))
            .ok_or_else(|| Error::domain("leading term of the zero polynomial"))
    }

    pub fn leading_monomial(&self, ord: GradedOrdering) -> Result<&ExponentVector> {
        self.leading_term(ord).map(|(e, _)| e)
    }

    fn check_arity(&self, other: &Polynomial) {
        assert_eq!(self.num_vars, other.num_vars, "polynomials over different variable counts");
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            num_vars: self.num_vars,
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.num_vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.num_vars {
            return Err(Error::input(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.entries()) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation at an integer point.
    pub fn evaluate_int(&self, point: &[BigInt]) -> Result<BigRational> {
        let q: Vec<BigRational> = point.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        self.evaluate(&q)
    }

    /// Iterated formal derivative `∂^a f`.
    pub fn partial_derivative(&self, a: &ExponentVector) -> Result<Polynomial> {
        if a.len() != self.num_vars {
            return Err(Error::input(format!(
                "derivative multi-index of length {} for {} variables",
                a.len(),
                self.num_vars
            )));
        }
        let mut out = Polynomial::zero(self.num_vars);
        'terms: for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut new = Vec::with_capacity(self.num_vars);
            for (&ei, &ai) in e.entries().iter().zip(a.entries()) {
                if ai > ei {
                    continue 'terms;
                }
                // falling factorial ei (ei-1) ... (ei-ai+1)
                for k in 0..ai {
                    coeff *= BigRational::from_integer(BigInt::from(ei - k));
                }
                new.push(ei - ai);
            }
            out.add_term(ExponentVector::new(new), coeff);
        }
        Ok(out)
    }

    /// Inserts a new variable at `pos` and pads every term up to the total degree.
    pub fn homogenize(&self, pos: usize) -> Result<Polynomial> {
        let d = self
            .total_degree()
            .ok_or_else(|| Error::domain("cannot homogenize the zero polynomial"))?;
        if pos > self.num_vars {
            return Err(Error::input(format!("position {pos} out of range")));
        }
        let mut out = Polynomial::zero(self.num_vars + 1);
        for (e, c) in &self.terms {
            out.add_term(e.insert(pos, d - e.degree()), c.clone());
        }
        Ok(out)
    }

    /// Substitutes 1 for the variable at `pos` and removes it.
    pub fn dehomogenize(&self, pos: usize) -> Result<Polynomial> {
        if pos >= self.num_vars {
            return Err(Error::input(format!("position {pos} out of range")));
        }
        let mut out = Polynomial::zero(self.num_vars - 1);
        for (e, c) in &self.terms {
            out.add_term(e.remove(pos), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds into a ring with the same variables, adding unused ones at the end.
    pub fn extend_vars(&self, num_vars: usize) -> Polynomial {
        assert!(num_vars >= self.num_vars);
        let mut out = Polynomial::zero(num_vars);
        for (e, c) in &self.terms {
            let mut v = e.entries().to_vec();
            v.resize(num_vars, 0);
            out.add_term(ExponentVector::new(v), c.clone());
        }
        out
    }

    /// Substitutes a polynomial (in a common ring) for every variable.
    pub fn compose(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.num_vars {
            return Err(Error::input("composition needs one substitute per variable"));
        }
        let target = subs.first().map(|p| p.num_vars).unwrap_or(0);
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (s, &k) in subs.iter().zip(e.entries()) {
                if k > 0 {
                    t = &t * &s.pow(k);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// The unique positive-rational multiple with coprime integer coefficients
    /// and positive leading coefficient under `ord`.
    pub fn primitive_part(&self, ord: GradedOrdering) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.denominator_lcm();
        let ints: Vec<BigInt> = self.terms.values().map(|c| (c * &l).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let mut scale = BigRational::new(l, g);
        if self.leading_term(ord).expect("nonzero").1.is_negative() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_arity(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_arity(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_arity(rhs);
        let mut out = Polynomial::zero(self.num_vars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        out
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

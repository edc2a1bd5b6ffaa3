use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Ideal;
use crate::poly::{ExponentVector, GradedOrdering, Polynomial};
use crate::{Error, Result};

/// Terms sorted in descending order under one ordering, so the leading term
/// is the first entry.
#[derive(Debug, Clone)]
struct Sorted {
    terms: Vec<(ExponentVector, BigRational)>,
}

impl Sorted {
    fn from_poly(p: &Polynomial, ord: GradedOrdering) -> Self {
        Sorted {
            terms: p.sorted_terms(ord).into_iter().map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    fn to_poly(&self, num_vars: usize) -> Polynomial {
        Polynomial::from_terms(num_vars, self.terms.iter().cloned()).expect("lengths agree")
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &ExponentVector {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigRational {
        &self.terms[0].1
    }

    fn make_monic(&mut self) {
        if self.is_zero() {
            return;
        }
        let inv = self.lc().recip();
        for (_, c) in &mut self.terms {
            *c *= &inv;
        }
    }

    /// `self - c * x^shift * other`
    fn sub_scaled(&self, c: &BigRational, shift: &ExponentVector, other: &Sorted, ord: GradedOrdering) -> Sorted {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().map(|(e, x)| (e.add(shift), x * c)).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().expect("peeked").clone()),
                (None, Some(_)) => {
                    let (e, x) = b.next().expect("peeked");
                    out.push((e, -x));
                }
                (Some((ea, _)), Some((eb, _))) => match ord.cmp(ea, eb) {
                    Ordering::Greater => out.push(a.next().expect("peeked").clone()),
                    Ordering::Less => {
                        let (e, x) = b.next().expect("peeked");
                        out.push((e, -x));
                    }
                    Ordering::Equal => {
                        let (e, x) = a.next().expect("peeked");
                        let (_, y) = b.next().expect("peeked");
                        let s = x - y;
                        if !s.is_zero() {
                            out.push((e.clone(), s));
                        }
                    }
                },
            }
        }
        Sorted { terms: out }
    }
}

/// Full reduction of `f` by `basis`: no term of the result is divisible by a
/// leading monomial of the basis.
fn reduce(f: &Sorted, basis: &[Sorted], ord: GradedOrdering) -> Sorted {
    let mut p = f.clone();
    let mut rem: Vec<(ExponentVector, BigRational)> = Vec::new();
    while !p.is_zero() {
        let divisor = basis.iter().find(|g| g.lm().divides(p.lm()));
        match divisor {
            Some(g) => {
                let shift = g.lm().quotient_of(p.lm()).expect("divides");
                let c = p.lc() / g.lc();
                p = p.sub_scaled(&c, &shift, g, ord);
            }
            None => {
                rem.push(p.terms.remove(0));
            }
        }
    }
    Sorted { terms: rem }
}

fn s_polynomial(f: &Sorted, g: &Sorted, ord: GradedOrdering) -> Sorted {
    let l = f.lm().lcm(g.lm());
    let sf = f.lm().quotient_of(&l).expect("lcm");
    let sg = g.lm().quotient_of(&l).expect("lcm");
    let zero = Sorted { terms: Vec::new() };
    zero.sub_scaled(&-f.lc().recip(), &sf, f, ord).sub_scaled(&g.lc().recip(), &sg, g, ord)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pair {
    degree: u32,
    lcm: ExponentVector,
    i: usize,
    j: usize,
}

/// A Gröbner basis, possibly truncated at a degree cap.
///
/// For a homogeneous ideal truncated at `s`, the leading monomials certify
/// `LT(I)` in every degree up to `s`.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ideal: Ideal,
    ordering: GradedOrdering,
    basis: Vec<Polynomial>,
    sorted: Vec<Sorted>,
    truncation: Option<u32>,
}

impl GroebnerBasis {
    /// Buchberger's algorithm with the normal selection strategy.
    ///
    /// `degree_cap` discards S-pairs whose lcm exceeds the cap and is only
    /// sound for homogeneous ideals.
    pub fn compute(ideal: &Ideal, ord: GradedOrdering, degree_cap: Option<u32>) -> Result<Self> {
        if degree_cap.is_some() && !ideal.is_homogeneous() {
            return Err(Error::contract("degree-capped Gröbner basis requested for a non-homogeneous ideal"));
        }
        let mut g: Vec<Sorted> = Vec::new();
        for p in ideal.generators() {
            let mut s = Sorted::from_poly(p, ord);
            s.make_monic();
            g.push(s);
        }
        let mut pairs: Vec<Pair> = Vec::new();
        let push_pairs = |pairs: &mut Vec<Pair>, g: &[Sorted], j: usize| {
            for i in 0..j {
                let lcm = g[i].lm().lcm(g[j].lm());
                pairs.push(Pair { degree: lcm.degree(), lcm, i, j });
            }
        };
        for j in 0..g.len() {
            push_pairs(&mut pairs, &g, j);
        }
        loop {
            // normal strategy: smallest lcm first, then insertion order
            let best = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    ord.cmp(&a.lcm, &b.lcm).then(a.j.cmp(&b.j)).then(a.i.cmp(&b.i))
                })
                .map(|(k, _)| k);
            let Some(k) = best else { break };
            let pair = pairs.swap_remove(k);
            if let Some(cap) = degree_cap {
                if pair.degree > cap {
                    continue;
                }
            }
            let (f, h) = (&g[pair.i], &g[pair.j]);
            if f.lm().is_coprime(h.lm()) {
                continue;
            }
            // chain criterion: some other leading monomial divides the lcm and
            // both companion pairs are already gone
            let chain = (0..g.len()).any(|k| {
                k != pair.i
                    && k != pair.j
                    && g[k].lm().divides(&pair.lcm)
                    && !pending(&pairs, pair.i, k)
                    && !pending(&pairs, pair.j, k)
            });
            if chain {
                continue;
            }
            let s = s_polynomial(f, h, ord);
            let mut r = reduce(&s, &g, ord);
            if !r.is_zero() {
                r.make_monic();
                g.push(r);
                push_pairs(&mut pairs, &g, g.len() - 1);
            }
        }
        let sorted = interreduce(g, ord);
        let basis = sorted.iter().map(|s| s.to_poly(ideal.num_vars())).collect();
        Ok(GroebnerBasis { ideal: ideal.clone(), ordering: ord, basis, sorted, truncation: degree_cap })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn ordering(&self) -> GradedOrdering {
        self.ordering
    }

    /// Monic, interreduced, sorted by ascending leading monomial.
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn truncation_degree(&self) -> Option<u32> {
        self.truncation
    }

    pub fn num_vars(&self) -> usize {
        self.ideal.num_vars()
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &ExponentVector> {
        self.sorted.iter().map(|s| s.lm())
    }

    /// Whether `x^e` lies in the leading-term ideal.
    pub fn in_leading_ideal(&self, e: &ExponentVector) -> bool {
        self.leading_monomials().any(|lm| lm.divides(e))
    }

    pub(crate) fn check_degree(&self, s: u32) -> Result<()> {
        match self.truncation {
            Some(cap) if s > cap => Err(Error::contract(format!(
                "degree {s} exceeds the Gröbner basis truncation degree {cap}"
            ))),
            _ => Ok(()),
        }
    }

    /// Remainder of `f` on division by the basis; zero iff `f` is in the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.num_vars() != self.num_vars() {
            return Err(Error::input("polynomial and ideal live in different rings"));
        }
        if let Some(d) = f.total_degree() {
            self.check_degree(d)?;
        }
        let r = reduce(&Sorted::from_poly(f, self.ordering), &self.sorted, self.ordering);
        Ok(r.to_poly(self.num_vars()))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }
}

fn pending(pairs: &[Pair], a: usize, b: usize) -> bool {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    pairs.iter().any(|p| p.i == i && p.j == j)
}

fn interreduce(mut g: Vec<Sorted>, ord: GradedOrdering) -> Vec<Sorted> {
    g.retain(|s| !s.is_zero());
    g.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));
    // minimal basis: drop anything whose leading monomial another one divides
    let mut minimal: Vec<Sorted> = Vec::new();
    for s in g {
        if !minimal.iter().any(|m| m.lm().divides(s.lm())) {
            minimal.push(s);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Sorted> =
            minimal.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, s)| s.clone()).collect();
        let head = Sorted { terms: vec![minimal[k].terms[0].clone()] };
        let tail = Sorted { terms: minimal[k].terms[1..].to_vec() };
        let mut r = reduce(&tail, &others, ord);
        r.terms.insert(0, head.terms[0].clone());
        r.make_monic();
        debug_assert!(r.lc().is_one());
        out.push(r);
    }
    out
}

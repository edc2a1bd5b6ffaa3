//! Covering a class of points by regions that each carry one auxiliary form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use super::chart::Chart;
use super::matrix::MonomialMatrix;
use crate::detbound::{self, round_down, ExponentBudget};
use crate::ideal::{GroebnerBasis, Staircase};
use crate::points::{tau_normalize, HeightBox};
use crate::poly::{ExponentVector, Polynomial};
use crate::{Error, Result};

/// Where a certificate applies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    /// Integer intervals, one per coordinate.
    Box { bounds: Vec<[i64; 2]> },
    /// Grid cube in chart parameters; index `c` covers `[-1 + cρ, -1 + (c+1)ρ]`.
    Cube { index: Vec<String> },
    /// The whole class, used when it has fewer than `μ` points.
    Class,
}

/// An integer form of degree `δ` supported on the staircase that vanishes at
/// the listed points.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryCertificate {
    pub class: usize,
    pub delta: u32,
    pub poly: Polynomial,
    /// Indices into the pipeline's point list.
    pub points: Vec<usize>,
    pub region: Region,
    pub depth: u32,
}

/// The form from the first kernel vector, or `None` when the matrix has
/// full rank `μ`.
pub fn auxiliary_for_box(points: &[&[i64]], staircase: &Staircase) -> Result<Option<Polynomial>> {
    let m = MonomialMatrix::build(points, staircase)?;
    let Some(v) = m.first_kernel_vector() else {
        return Ok(None);
    };
    let n = staircase.exponents[0].len();
    let terms = staircase
        .exponents
        .iter()
        .zip(v)
        .map(|(e, c)| (e.clone(), BigRational::from_integer(c)));
    Ok(Some(Polynomial::from_terms(n, terms)?))
}

/// A class of points: global indices and coordinates.
#[derive(Debug, Clone)]
pub struct ClassPoints {
    pub class: usize,
    pub members: Vec<(usize, Vec<i64>)>,
}

impl ClassPoints {
    fn coords(&self, sel: &[usize]) -> Vec<&[i64]> {
        sel.iter().map(|&k| self.members[k].1.as_slice()).collect()
    }

    fn indices(&self, sel: &[usize]) -> Vec<usize> {
        sel.iter().map(|&k| self.members[k].0).collect()
    }

    /// A single certificate for a class with at most `μ - 1` points.
    fn whole(&self, staircase: &Staircase) -> Result<Option<AuxiliaryCertificate>> {
        let all: Vec<usize> = (0..self.members.len()).collect();
        Ok(auxiliary_for_box(&self.coords(&all), staircase)?.map(|poly| AuxiliaryCertificate {
            class: self.class,
            delta: staircase.delta,
            poly,
            points: self.indices(&all),
            region: Region::Class,
            depth: 0,
        }))
    }
}

struct Node {
    sel: Vec<usize>,
    bounds: Vec<[i64; 2]>,
    depth: u32,
}

enum Step {
    Done(AuxiliaryCertificate),
    Split(Node, Node),
}

fn hull(cp: &ClassPoints, sel: &[usize]) -> Vec<[i64; 2]> {
    let n = cp.members[sel[0]].1.len();
    (0..n)
        .map(|j| {
            let vals = sel.iter().map(|&k| cp.members[k].1[j]);
            [vals.clone().min().expect("nonempty"), vals.max().expect("nonempty")]
        })
        .collect()
}

/// Bisection cover: a box whose matrix has full rank is split along the
/// coordinate with the largest width relative to its height bound, and each
/// half is shrunk to the points it holds.
pub fn adaptive_cover(cp: &ClassPoints, heights: &HeightBox, staircase: &Staircase) -> Result<Vec<AuxiliaryCertificate>> {
    if cp.members.is_empty() {
        return Ok(Vec::new());
    }
    let all: Vec<usize> = (0..cp.members.len()).collect();
    let mut level = vec![Node { bounds: hull(cp, &all), sel: all, depth: 0 }];
    let mut certs = Vec::new();
    while !level.is_empty() {
        let steps: Vec<Result<Step>> = level.into_par_iter().map(|node| step(cp, heights, staircase, node)).collect();
        let mut next = Vec::new();
        for s in steps {
            match s? {
                Step::Done(c) => certs.push(c),
                Step::Split(a, b) => {
                    next.push(a);
                    next.push(b);
                }
            }
        }
        level = next;
    }
    Ok(certs)
}

fn step(cp: &ClassPoints, heights: &HeightBox, staircase: &Staircase, node: Node) -> Result<Step> {
    if let Some(poly) = auxiliary_for_box(&cp.coords(&node.sel), staircase)? {
        return Ok(Step::Done(AuxiliaryCertificate {
            class: cp.class,
            delta: staircase.delta,
            poly,
            points: cp.indices(&node.sel),
            region: Region::Box { bounds: node.bounds },
            depth: node.depth,
        }));
    }
    let widths: Vec<f64> = node
        .bounds
        .iter()
        .enumerate()
        .map(|(j, [lo, hi])| (hi - lo) as f64 / heights.bounds()[j])
        .collect();
    let (axis, &w) = widths
        .iter()
        .enumerate()
        .fold((0, &widths[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
    if w == 0.0 {
        return Err(Error::Uncoverable(format!(
            "class {}: the point {:?} alone gives a matrix of full rank {}",
            cp.class,
            cp.members[node.sel[0]].1,
            staircase.len()
        )));
    }
    let [lo, hi] = node.bounds[axis];
    let mid = lo + (hi - lo).div_euclid(2);
    let (left, right): (Vec<usize>, Vec<usize>) = node.sel.iter().partition(|&&k| cp.members[k].1[axis] <= mid);
    let child = |sel: Vec<usize>| Node { bounds: hull(cp, &sel), sel, depth: node.depth + 1 };
    Ok(Step::Split(child(left), child(right)))
}

/// The cube side from the determinant estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RhoChoice {
    pub rho: f64,
    /// `⌈2/ρ⌉^m`, the number of cubes covering `[-1,1]^m`.
    pub cubes: f64,
    pub budget: ExponentBudget,
    /// `ln(μ! D_m(ν)^μ Π‖ψ‖ Π B_i^{σ_i})`.
    pub ln_constant: f64,
}

/// Largest `ρ` (rounded down) with
/// `μ! D_m(ν)^μ Π‖ψ_e‖_ν Π B_i^{σ_i} (ρ√m)^f < 1`, capped at `1/(2√m)`.
pub fn theoretical_rho(heights: &HeightBox, sigma: &[u64], mu: u64, m: u32, norms: &[f64]) -> Result<RhoChoice> {
    if sigma.len() != heights.len() {
        return Err(Error::input("σ and the height box have different lengths"));
    }
    if norms.len() as u64 != mu {
        return Err(Error::input(format!("{} norms for μ = {mu}", norms.len())));
    }
    if m == 0 || mu <= 1 {
        return Err(Error::Degenerate("f = 0: no cube size is forced".into()));
    }
    let (ln_c, budget) = detbound::ln_lemma_constant(mu, m, norms);
    let ln_c = if ln_c == f64::NEG_INFINITY {
        ln_c
    } else {
        sigma.iter().zip(heights.bounds()).fold(ln_c, |acc, (&s, b)| detbound::round_up(acc + detbound::round_up(s as f64 * b.ln())))
    };
    let cap = 0.5 / (m as f64).sqrt();
    let ln_rho = round_down(round_down(-ln_c / budget.e as f64) - detbound::round_up(0.5 * (m as f64).ln()));
    let rho = round_down(ln_rho.exp()).min(cap);
    if !(rho > 0.0) {
        return Err(Error::Degenerate(format!("cube side underflows (ln ρ = {ln_rho})")));
    }
    let cubes = (2.0 / rho).ceil().powi(m as i32);
    Ok(RhoChoice { rho, cubes, budget, ln_constant: ln_c })
}

/// `‖ψ_e‖_ν` over `[-1,1]^m` for every staircase monomial.
pub fn chart_norms(chart: &Chart, staircase: &Staircase, nu: u32) -> Result<Vec<f64>> {
    let unit = detbound::unit_box(chart.params);
    staircase
        .exponents
        .par_iter()
        .map(|e| detbound::ck_norm_bound(&[chart.psi(e)], nu, &unit))
        .collect()
}

/// Chart coordinates `z_j = y_j / y_i` of a point in class `i`.
pub fn chart_point(x: &[i64], heights: &HeightBox, class: usize) -> Result<Vec<BigRational>> {
    let y = tau_normalize(x, heights)?;
    let yi = y[class].clone();
    Ok(y.into_iter().map(|v| v / &yi).collect())
}

/// Grid cover with cubes of side `ρ`: every occupied cube must give a
/// matrix of rank below `μ`; a full-rank cube contradicts the estimate.
pub fn theoretical_cover(
    cp: &ClassPoints,
    heights: &HeightBox,
    staircase: &Staircase,
    chart: &Chart,
    rho: f64,
) -> Result<Vec<AuxiliaryCertificate>> {
    let side = BigRational::from_float(rho).ok_or_else(|| Error::input("non-finite ρ"))?;
    let mut cubes: BTreeMap<Vec<BigInt>, Vec<usize>> = BTreeMap::new();
    for (k, (_, x)) in cp.members.iter().enumerate() {
        let z = chart_point(x, heights, cp.class)?;
        if !chart.contains(&z)? {
            return Err(Error::input(format!("point {x:?} is not on the chart for class {}", cp.class)));
        }
        let index: Vec<BigInt> = chart
            .parameters(&z)
            .iter()
            .map(|u| {
                let c = ((u + BigRational::one()) / &side).ceil().to_integer() - BigInt::one();
                if c.is_negative() {
                    BigInt::from(0)
                } else {
                    c
                }
            })
            .collect();
        cubes.entry(index).or_default().push(k);
    }
    let cubes: Vec<(Vec<BigInt>, Vec<usize>)> = cubes.into_iter().collect();
    cubes
        .par_iter()
        .map(|(index, sel)| {
            let poly = auxiliary_for_box(&cp.coords(sel), staircase)?.ok_or_else(|| {
                Error::Falsified(format!(
                    "class {} cube {:?} holds {} points with a matrix of full rank {}",
                    cp.class,
                    index.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    sel.len(),
                    staircase.len()
                ))
            })?;
            Ok(AuxiliaryCertificate {
                class: cp.class,
                delta: staircase.delta,
                poly,
                points: cp.indices(sel),
                region: Region::Cube { index: index.iter().map(|c| c.to_string()).collect() },
                depth: 0,
            })
        })
        .collect()
}

/// Classes without a chart are handled only when they hold fewer than `μ`
/// points.
pub fn chartless_class(cp: &ClassPoints, staircase: &Staircase) -> Result<Vec<AuxiliaryCertificate>> {
    if cp.members.is_empty() {
        return Ok(Vec::new());
    }
    if cp.members.len() >= staircase.len() {
        return Err(Error::Unsupported(format!(
            "class {} has {} points and no chart",
            cp.class,
            cp.members.len()
        )));
    }
    Ok(vec![cp.whole(staircase)?.expect("fewer points than monomials")])
}

/// Support of `g` lies in `M(δ)`.
pub fn support_in_staircase(g: &Polynomial, gb: &GroebnerBasis, delta: u32) -> bool {
    g.support().all(|e: &ExponentVector| e.degree() == delta && !gb.in_leading_ideal(e))
}

//! Independent re-checking of certificates and stored reports.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::cover::support_in_staircase;
use super::matrix::monomial_value;
use super::report::PipelineReport;
use crate::ideal::{GroebnerBasis, IdealFile, IdealMode};
use crate::points::{class_of, enumerate_affine, enumerate_projective, HeightBox};
use crate::poly::{GradedOrdering, Polynomial};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum VerifyOutcome {
    Pass,
    Fail { reason: String },
}

impl VerifyOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, VerifyOutcome::Pass)
    }

    fn fail(reason: impl Into<String>) -> Self {
        VerifyOutcome::Fail { reason: reason.into() }
    }
}

macro_rules! check {
    ($outcome:expr) => {
        if let VerifyOutcome::Fail { .. } = $outcome {
            return $outcome;
        }
    };
}

fn eval_int(g: &Polynomial, x: &[i64]) -> Option<BigInt> {
    let mut acc = BigInt::zero();
    for (e, c) in g.terms() {
        if !c.is_integer() {
            return None;
        }
        acc += c.numer() * monomial_value(x, e);
    }
    Some(acc)
}

fn integer_content_one(g: &Polynomial) -> VerifyOutcome {
    if !g.has_integer_coefficients() {
        return VerifyOutcome::fail("coefficients are not all integers");
    }
    let content = g.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    if !content.is_one() {
        return VerifyOutcome::fail(format!("content is {content}, not 1"));
    }
    VerifyOutcome::Pass
}

fn vanishes(g: &Polynomial, points: &[&[i64]]) -> VerifyOutcome {
    for p in points {
        match eval_int(g, p) {
            Some(v) if v.is_zero() => {}
            Some(v) => return VerifyOutcome::fail(format!("does not vanish at {p:?} (value {v})")),
            None => return VerifyOutcome::fail("non-integer coefficient"),
        }
    }
    VerifyOutcome::Pass
}

/// Nonzero, content one, support in `M(δ)`, zero at every point, and a
/// nonzero normal form.
pub fn verify_certificate(g: &Polynomial, delta: u32, points: &[&[i64]], gb: &GroebnerBasis) -> VerifyOutcome {
    if g.is_zero() {
        return VerifyOutcome::fail("zero polynomial");
    }
    if g.num_vars() != gb.num_vars() {
        return VerifyOutcome::fail("form lives in the wrong ring");
    }
    check!(integer_content_one(g));
    if let Some(e) = g.support().find(|e| e.degree() != delta) {
        return VerifyOutcome::fail(format!("monomial {:?} has degree {} instead of {delta}", e.entries(), e.degree()));
    }
    if !support_in_staircase(g, gb, delta) {
        let e = g.support().find(|e| gb.in_leading_ideal(e)).expect("some monomial is a leading term");
        return VerifyOutcome::fail(format!("monomial {:?} lies in the leading-term ideal", e.entries()));
    }
    check!(vanishes(g, points));
    match gb.normal_form(g) {
        Ok(r) if r.is_zero() => VerifyOutcome::fail("normal form is zero: the form lies in the ideal"),
        Ok(_) => VerifyOutcome::Pass,
        Err(e) => VerifyOutcome::fail(format!("normal form failed: {e}")),
    }
}

/// `g = G(1, x)` vanishes at the affine points and lies outside the ideal.
pub fn verify_affine_form(g: &Polynomial, form: &Polynomial, points: &[&[i64]], affine_gb: Option<&GroebnerBasis>) -> VerifyOutcome {
    match form.dehomogenize(0) {
        Ok(expected) if &expected == g => {}
        _ => return VerifyOutcome::fail("affine polynomial is not the dehomogenized form"),
    }
    if g.is_zero() {
        return VerifyOutcome::fail("zero affine polynomial");
    }
    check!(vanishes(g, points));
    if let Some(gb) = affine_gb {
        match gb.normal_form(g) {
            Ok(r) if r.is_zero() => return VerifyOutcome::fail("affine polynomial lies in the ideal"),
            Err(e) => return VerifyOutcome::fail(format!("normal form failed: {e}")),
            Ok(_) => {}
        }
    }
    VerifyOutcome::Pass
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportCheck {
    pub outcome: VerifyOutcome,
    pub certificates: usize,
    pub points: usize,
}

/// Re-derives everything a report claims from the ideal file alone.
///
/// Errors are reserved for problems that prevent checking (budget, bad
/// input file); anything wrong with the report itself is a failed outcome.
pub fn verify_report(report: &PipelineReport, file: &IdealFile, budget: u128) -> Result<ReportCheck> {
    let outcome = check_report(report, file, budget)?;
    Ok(ReportCheck { outcome, certificates: report.certificates.len(), points: report.points.len() })
}

fn check_report(report: &PipelineReport, file: &IdealFile, budget: u128) -> Result<VerifyOutcome> {
    let p = &report.params;
    if p.mode != file.mode || p.vars != file.vars {
        return Ok(VerifyOutcome::fail("report was produced for a different ring"));
    }
    let mut claimed = Vec::new();
    for g in &p.generators {
        match Polynomial::parse(g, &p.input_space()) {
            Ok(f) => claimed.push(f.format(&p.input_space(), GradedOrdering::GrlexLeft)),
            Err(e) => return Ok(VerifyOutcome::fail(format!("bad generator '{g}': {e}"))),
        }
    }
    let mut actual = file.ideal.format(&p.input_space(), GradedOrdering::GrlexLeft);
    claimed.sort();
    actual.sort();
    if claimed != actual {
        return Ok(VerifyOutcome::fail("report was produced for a different ideal"));
    }

    let (ring, heights, enumerated, affine_gb) = match file.mode {
        IdealMode::Affine => {
            let b = *p.heights.first().unwrap_or(&0.0);
            let ps = enumerate_affine(&file.ideal, b, budget)?;
            let gb = if file.ideal.is_zero() {
                None
            } else {
                Some(GroebnerBasis::compute(&file.ideal, GradedOrdering::Grevlex, None)?)
            };
            (file.ideal.homogenization()?, HeightBox::affine_lift(file.ideal.num_vars(), b)?, ps, gb)
        }
        IdealMode::Projective => {
            let hb = HeightBox::new(p.heights.clone())?;
            let ps = enumerate_projective(&file.ideal, &hb, budget)?;
            (file.ideal.clone(), hb, ps, None)
        }
    };
    if enumerated.points != report.points || report.point_count != report.points.len() {
        return Ok(VerifyOutcome::fail(format!(
            "report lists {} points; enumeration finds {}",
            report.points.len(),
            enumerated.len()
        )));
    }
    let lifted: Vec<Vec<i64>> = match file.mode {
        IdealMode::Affine => report.points.iter().map(|x| std::iter::once(1).chain(x.iter().copied()).collect()).collect(),
        IdealMode::Projective => report.points.clone(),
    };
    let gb = GroebnerBasis::compute(&ring, p.ordering, Some(report.delta))?;
    let mut covered = vec![false; lifted.len()];
    for (k, c) in report.certificates.iter().enumerate() {
        if let Some(&bad) = c.points.iter().find(|&&i| i >= lifted.len()) {
            return Ok(VerifyOutcome::fail(format!("certificate {k} names point {bad}, which does not exist")));
        }
        let form = match c.form(p) {
            Ok(f) => f,
            Err(e) => return Ok(VerifyOutcome::fail(format!("certificate {k}: bad polynomial: {e}"))),
        };
        let pts: Vec<&[i64]> = c.points.iter().map(|&i| lifted[i].as_slice()).collect();
        if let Some(x) = pts.iter().find(|x| class_of(x, &heights) != c.class) {
            return Ok(VerifyOutcome::fail(format!("certificate {k}: point {x:?} is not in class {}", c.class)));
        }
        if let VerifyOutcome::Fail { reason } = verify_certificate(&form, report.delta, &pts, &gb) {
            return Ok(VerifyOutcome::fail(format!("certificate {k}: {reason}")));
        }
        if file.mode == IdealMode::Affine {
            let Some(text) = &c.affine_poly else {
                return Ok(VerifyOutcome::fail(format!("certificate {k}: missing affine polynomial")));
            };
            let g = match Polynomial::parse(text, &p.input_space()) {
                Ok(g) => g,
                Err(e) => return Ok(VerifyOutcome::fail(format!("certificate {k}: bad affine polynomial: {e}"))),
            };
            let apts: Vec<&[i64]> = c.points.iter().map(|&i| report.points[i].as_slice()).collect();
            if let VerifyOutcome::Fail { reason } = verify_affine_form(&g, &form, &apts, affine_gb.as_ref()) {
                return Ok(VerifyOutcome::fail(format!("certificate {k}: {reason}")));
            }
        }
        for &i in &c.points {
            covered[i] = true;
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Ok(VerifyOutcome::fail(format!("point {:?} is not covered by any certificate", report.points[i])));
    }
    if report.k_actual != report.delta as u64 * report.certificates.len() as u64 {
        return Ok(VerifyOutcome::fail("k_actual differs from δ times the number of certificates"));
    }
    Ok(VerifyOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::Ideal;
    use crate::poly::VarSpace;

    fn setup() -> (GroebnerBasis, Vec<Vec<i64>>) {
        let i = Ideal::parse(&["x0*x2 - x1^2"], &VarSpace::new(3)).unwrap();
        let gb = GroebnerBasis::compute(&i, GradedOrdering::GrlexLeft, Some(2)).unwrap();
        (gb, vec![vec![1, 0, 0], vec![1, 1, 1]])
    }

    fn form(s: &str) -> Polynomial {
        Polynomial::parse(s, &VarSpace::new(3)).unwrap()
    }

    #[test]
    fn accepts_a_valid_form() {
        let (gb, pts) = setup();
        let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
        assert!(verify_certificate(&form("x1*x2 - x0*x2"), 2, &refs, &gb).is_pass());
    }

    #[test]
    fn rejections() {
        let (gb, pts) = setup();
        let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
        let cases = [
            ("0", "zero"),
            ("2*x1*x2 - 2*x0*x2", "content"),
            ("x1*x2 - x0", "degree"),
            ("x1^2 - x0*x2", "leading-term"),
            ("x1*x2 - x0*x2 + x0^2", "does not vanish at [1, 0, 0]"),
        ];
        for (text, needle) in cases {
            match verify_certificate(&form(text), 2, &refs, &gb) {
                VerifyOutcome::Fail { reason } => assert!(reason.contains(needle), "{text}: {reason}"),
                VerifyOutcome::Pass => panic!("{text} accepted"),
            }
        }
    }

    #[test]
    fn affine_form_must_match() {
        let g = Polynomial::parse("x1*x2 - x2", &VarSpace::affine(2)).unwrap();
        let pts: Vec<&[i64]> = vec![&[0, 0], &[1, 1]];
        assert!(verify_affine_form(&g, &form("x1*x2 - x0*x2"), &pts, None).is_pass());
        assert!(!verify_affine_form(&g, &form("x1*x2 - x0*x1"), &pts, None).is_pass());
    }
}

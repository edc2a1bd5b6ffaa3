//! The auxiliary-polynomial pipeline.
//!
//! Points of bounded height are split into classes by their dominant
//! normalized coordinate; each class is covered by regions whose monomial
//! matrix has rank below `μ = |M(δ)|`, and every region yields an integer
//! form of degree `δ` supported on the staircase.

mod chart;
mod cover;
mod delta;
mod matrix;
mod report;
mod verify;

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::ToPrimitive;

pub use chart::Chart;
pub use cover::{
    adaptive_cover, auxiliary_for_box, chart_norms, chart_point, support_in_staircase, theoretical_cover,
    theoretical_rho, AuxiliaryCertificate, ClassPoints, Region, RhoChoice,
};
pub use delta::{choose_delta, DeltaChoice, DEFAULT_DELTA_MAX};
pub use matrix::{det_integer, det_rational, MonomialMatrix};
pub use report::{AffineBoundRecord, CertificateRecord, PipelineReport, RunParams};
pub use verify::{verify_affine_form, verify_certificate, verify_report, ReportCheck, VerifyOutcome};

use crate::detbound;
use crate::ideal::{default_window_end, AffineOrderingBound, GroebnerBasis, HilbertPolynomial, Ideal, IdealFile, IdealMode};
use crate::ideal::rational_string;
use crate::points::{class_of, enumerate_affine, enumerate_projective, HeightBox, PointSet, DEFAULT_BUDGET};
use crate::poly::{GradedOrdering, VarSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Bisect until every box certifies.
    Adaptive,
    /// Cube grid of the side forced by the determinant estimate, on
    /// user-supplied polynomial charts.
    Theoretical { charts: Vec<Chart>, norm_bound: Option<f64> },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Adaptive => "adaptive",
            Strategy::Theoretical { .. } => "theoretical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSpec {
    Fixed(u32),
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub delta: DeltaSpec,
    pub ordering: GradedOrdering,
    pub strategy: Strategy,
    pub budget: u128,
    pub delta_max: u32,
    /// Degree where the `a_i` are measured; defaults to `delta_max`.
    pub probe: Option<u32>,
    pub timings: bool,
}

impl PipelineConfig {
    pub fn new(delta: DeltaSpec) -> Self {
        PipelineConfig {
            delta,
            ordering: GradedOrdering::GrlexLeft,
            strategy: Strategy::Adaptive,
            budget: DEFAULT_BUDGET,
            delta_max: DEFAULT_DELTA_MAX,
            probe: None,
            timings: false,
        }
    }

    fn probe(&self) -> u32 {
        self.probe.unwrap_or(self.delta_max)
    }
}

struct Clock {
    on: bool,
    start: Instant,
    laps: BTreeMap<String, f64>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock { on, start: Instant::now(), laps: BTreeMap::new() }
    }

    fn lap(&mut self, name: &str) {
        if self.on {
            let now = Instant::now();
            self.laps.insert(name.to_string(), (now - self.start).as_secs_f64());
            self.start = now;
        }
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.on.then_some(self.laps)
    }
}

/// Everything derived from the homogeneous ideal before any point is seen.
struct Setup {
    gb: GroebnerBasis,
    hilbert: HilbertPolynomial,
    delta: u32,
    delta_choice: Option<DeltaChoice>,
    staircase: crate::ideal::Staircase,
    budget: Option<detbound::ExponentBudget>,
}

impl Setup {
    fn new(ideal: &Ideal, cfg: &PipelineConfig) -> Result<Setup> {
        let window = default_window_end(ideal.num_vars());
        let fixed = match cfg.delta {
            DeltaSpec::Fixed(d) => d,
            DeltaSpec::Epsilon(_) => 0,
        };
        let cap = window.max(cfg.delta_max).max(cfg.probe()).max(fixed);
        let gb = GroebnerBasis::compute(ideal, cfg.ordering, Some(cap))?;
        let hilbert = gb.hilbert_polynomial(0..=window)?;
        let m = hilbert.dimension.unwrap_or(0);
        let (delta, delta_choice) = match cfg.delta {
            DeltaSpec::Fixed(d) => (d, None),
            DeltaSpec::Epsilon(eps) => {
                let c = choose_delta(&gb, eps, hilbert.degree_f64(), m, cfg.delta_max, cfg.probe())?;
                (c.delta, Some(c))
            }
        };
        let staircase = gb.staircase(delta)?;
        if staircase.is_empty() {
            return Err(Error::input(format!("staircase empty at δ = {delta}")));
        }
        let mu = staircase.len() as u64;
        let budget = (m > 0 && mu > 1).then(|| detbound::choose_nu(mu, m as u32));
        Ok(Setup { gb, hilbert, delta, delta_choice, staircase, budget })
    }

    fn m(&self) -> usize {
        self.hilbert.dimension.unwrap_or(0)
    }
}

/// Builds the certificates for every class of `points` (in the ring of `setup`).
fn cover_classes(
    setup: &Setup,
    classes: Vec<ClassPoints>,
    heights: &HeightBox,
    strategy: &Strategy,
    notes: &mut Vec<String>,
) -> Result<(Vec<AuxiliaryCertificate>, Option<RhoChoice>)> {
    let (certs, rho) = cover_with(setup, &classes, heights, strategy, notes)?;
    let coords: BTreeMap<usize, &[i64]> =
        classes.iter().flat_map(|c| c.members.iter().map(|(k, x)| (*k, x.as_slice()))).collect();
    for c in &certs {
        let pts: Vec<&[i64]> = c.points.iter().map(|k| coords[k]).collect();
        if let VerifyOutcome::Fail { reason } = verify_certificate(&c.poly, setup.delta, &pts, &setup.gb) {
            return Err(Error::contract(format!("constructed form failed its check: {reason}")));
        }
    }
    Ok((certs, rho))
}

fn cover_with(
    setup: &Setup,
    classes: &[ClassPoints],
    heights: &HeightBox,
    strategy: &Strategy,
    notes: &mut Vec<String>,
) -> Result<(Vec<AuxiliaryCertificate>, Option<RhoChoice>)> {
    let st = &setup.staircase;
    let mut certs = Vec::new();
    match strategy {
        Strategy::Adaptive => {
            for cp in classes {
                certs.extend(adaptive_cover(cp, heights, st)?);
            }
            Ok((certs, None))
        }
        Strategy::Theoretical { charts, norm_bound } => {
            let m = setup.m();
            let budget = setup
                .budget
                .ok_or_else(|| Error::Degenerate("theoretical covering needs m >= 1 and μ >= 2".into()))?;
            let mut rho: Option<RhoChoice> = None;
            for cp in classes {
                if cp.members.is_empty() {
                    continue;
                }
                let Some(chart) = charts.iter().find(|c| c.class == cp.class) else {
                    notes.push(format!("class {} has no chart; covered as a whole", cp.class));
                    certs.extend(cover::chartless_class(cp, st)?);
                    continue;
                };
                if chart.params != m {
                    return Err(Error::input(format!(
                        "chart for class {} has {} parameters; the variety has dimension {m}",
                        cp.class, chart.params
                    )));
                }
                let norms = match norm_bound {
                    Some(r) => vec![*r; st.len()],
                    None => chart_norms(chart, st, budget.nu)?,
                };
                let choice = theoretical_rho(heights, &st.sigmas(), st.len() as u64, m as u32, &norms)?;
                certs.extend(theoretical_cover(cp, heights, st, chart, choice.rho)?);
                if rho.is_none_or(|r| choice.rho < r.rho) {
                    rho = Some(choice);
                }
            }
            Ok((certs, rho))
        }
    }
}

struct Assembled<'a> {
    params: RunParams,
    setup: &'a Setup,
    heights: &'a HeightBox,
    points: Vec<Vec<i64>>,
    class_sizes: Vec<usize>,
    certs: Vec<AuxiliaryCertificate>,
    rho: Option<RhoChoice>,
    affine_bound: Option<AffineBoundRecord>,
    affine_forms: Option<Vec<String>>,
    notes: Vec<String>,
    timings: Option<BTreeMap<String, f64>>,
}

fn assemble(a: Assembled<'_>) -> PipelineReport {
    let s = a.setup;
    let st = &s.staircase;
    let sigma = st.sigmas();
    let m = s.m();
    let f = s.budget.map(|b| b.e as u64);
    let exps = f.map(|f| sigma.iter().map(|&x| m as f64 * x as f64 / f as f64).collect::<Vec<f64>>());
    let k_bound_log = exps.as_ref().map(|e| {
        (s.delta as f64).ln() + e.iter().zip(a.heights.bounds()).map(|(x, b)| x * b.ln()).sum::<f64>()
    });
    let nonempty = a.class_sizes.iter().filter(|&&c| c > 0).count().max(1);
    let k_bound_explicit_log = a.rho.map(|r| (s.delta as f64).ln() + (nonempty as f64).ln() + r.cubes.ln());
    let space = VarSpace::new(a.heights.len());
    let ord = a.params.ordering;
    let max_depth = a.certs.iter().map(|c| c.depth).max().unwrap_or(0);
    let certificates: Vec<CertificateRecord> = a
        .certs
        .iter()
        .enumerate()
        .map(|(k, c)| CertificateRecord {
            class: c.class,
            poly: c.poly.format(&space, ord),
            affine_poly: a.affine_forms.as_ref().map(|v| v[k].clone()),
            points: c.points.clone(),
            region: c.region.clone(),
            depth: c.depth,
        })
        .collect();
    let mut notes = a.notes;
    if a.points.is_empty() {
        notes.push("no points in the box: the statement is vacuous".into());
    }
    notes.push("a_i and exponents are finite-degree values; their limits hold up to O(1/δ)".to_string());
    notes.push("dimension and degree come from the Hilbert polynomial of the given ideal; they match the geometric ones for irreducible varieties".into());
    PipelineReport {
        delta: s.delta,
        mu: st.len() as u64,
        nu: s.budget.map(|b| b.nu),
        f,
        sigma,
        dimension: s.hilbert.dimension,
        degree: rational_string(&s.hilbert.degree),
        hilbert_polynomial: s.hilbert.coefficients.iter().map(rational_string).collect(),
        box_heights: a.heights.bounds().to_vec(),
        delta_choice: s.delta_choice.clone(),
        rho: a.rho.map(|r| r.rho),
        cubes: a.rho.map(|r| r.cubes),
        k_bound_exponents: exps,
        k_bound_log,
        k_bound_explicit_log,
        point_count: a.points.len(),
        class_count: a.points.len(),
        class_sizes: a.class_sizes,
        k_actual: s.delta as u64 * certificates.len() as u64,
        certificates,
        max_depth,
        affine_bound: a.affine_bound,
        notes,
        timings: a.timings,
        points: a.points,
        params: a.params,
    }
}

fn run_params(file_mode: IdealMode, vars: usize, gens: Vec<String>, heights: Vec<f64>, cfg: &PipelineConfig) -> RunParams {
    let (delta, epsilon) = match cfg.delta {
        DeltaSpec::Fixed(d) => (Some(d), None),
        DeltaSpec::Epsilon(e) => (None, Some(e)),
    };
    let norm_bound = match &cfg.strategy {
        Strategy::Theoretical { norm_bound, .. } => *norm_bound,
        Strategy::Adaptive => None,
    };
    RunParams {
        mode: file_mode,
        vars,
        generators: gens,
        heights,
        delta,
        epsilon,
        ordering: cfg.ordering,
        strategy: cfg.strategy.name().into(),
        norm_bound,
        delta_max: cfg.delta_max,
        probe: cfg.probe(),
    }
}

/// Projective pipeline on `S(X, B)`: every class is covered separately.
pub fn cover_and_construct(ideal: &Ideal, heights: &HeightBox, cfg: &PipelineConfig) -> Result<PipelineReport> {
    if !ideal.is_homogeneous() {
        return Err(Error::contract("the projective pipeline needs a homogeneous ideal"));
    }
    let mut clock = Clock::new(cfg.timings);
    let setup = Setup::new(ideal, cfg)?;
    clock.lap("setup");
    let ps = enumerate_projective(ideal, heights, cfg.budget)?;
    clock.lap("points");
    let mut classes: Vec<ClassPoints> =
        (0..heights.len()).map(|class| ClassPoints { class, members: Vec::new() }).collect();
    for (k, p) in ps.points.iter().enumerate() {
        classes[class_of(p, heights)].members.push((k, p.clone()));
    }
    let class_sizes = classes.iter().map(|c| c.members.len()).collect();
    let mut notes = Vec::new();
    let (certs, rho) = cover_classes(&setup, classes, heights, &cfg.strategy, &mut notes)?;
    clock.lap("cover");
    let vars = ideal.num_vars();
    let params = run_params(
        IdealMode::Projective,
        vars,
        ideal.format(&VarSpace::new(vars), cfg.ordering),
        heights.bounds().to_vec(),
        cfg,
    );
    notes.push("the per-class forms are kept separate; their product is the single form of the projective statement".into());
    Ok(assemble(Assembled {
        params,
        setup: &setup,
        heights,
        points: ps.points,
        class_sizes,
        certs,
        rho,
        affine_bound: None,
        affine_forms: None,
        notes,
        timings: clock.finish(),
    }))
}

/// Affine pipeline on `X(Z, B)`: points `x` are lifted to `(1, x)` in the
/// box `(1, B, ..., B)` for the homogenization, covered there, and each
/// form `G` is returned with `g(x) = G(1, x)`.
pub fn affine_pipeline(ideal: &Ideal, b: f64, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let mut clock = Clock::new(cfg.timings);
    let n = ideal.num_vars();
    let ih = ideal.homogenization()?;
    let setup = Setup::new(&ih, cfg)?;
    clock.lap("setup");
    let ps: PointSet = enumerate_affine(ideal, b, cfg.budget)?;
    clock.lap("points");
    let heights = HeightBox::affine_lift(n, b)?;
    let lifted: Vec<(usize, Vec<i64>)> = ps
        .points
        .iter()
        .enumerate()
        .map(|(k, x)| (k, std::iter::once(1).chain(x.iter().copied()).collect()))
        .collect();
    if let Some((_, p)) = lifted.iter().find(|(_, p)| class_of(p, &heights) != 0) {
        return Err(Error::contract(format!("lifted point {p:?} is not in class 0")));
    }
    let mut class_sizes = vec![0; n + 1];
    class_sizes[0] = lifted.len();
    let mut notes = Vec::new();
    let classes = vec![ClassPoints { class: 0, members: lifted }];
    let (certs, rho) = cover_classes(&setup, classes, &heights, &cfg.strategy, &mut notes)?;
    clock.lap("cover");

    let affine_space = VarSpace::affine(n);
    let affine_gb = if ideal.is_zero() { None } else { Some(GroebnerBasis::compute(ideal, GradedOrdering::Grevlex, None)?) };
    let mut affine_forms = Vec::with_capacity(certs.len());
    for c in &certs {
        let g = c.poly.dehomogenize(0)?;
        let pts: Vec<&[i64]> = c.points.iter().map(|&i| ps.points[i].as_slice()).collect();
        if let VerifyOutcome::Fail { reason } = verify_affine_form(&g, &c.poly, &pts, affine_gb.as_ref()) {
            return Err(Error::contract(format!("dehomogenized form failed its check: {reason}")));
        }
        affine_forms.push(g.format(&affine_space, cfg.ordering));
    }
    let affine_bound = match AffineOrderingBound::compute(ideal, setup.delta.max(1)) {
        Ok(b) => Some(AffineBoundRecord::from(&b)),
        Err(e) => {
            notes.push(format!("adapted-ordering bound unavailable: {e}"));
            None
        }
    };
    clock.lap("affine");
    let params = run_params(
        IdealMode::Affine,
        n + 1,
        ideal.format(&affine_space, cfg.ordering),
        vec![b],
        cfg,
    );
    Ok(assemble(Assembled {
        params,
        setup: &setup,
        heights: &heights,
        points: ps.points,
        class_sizes,
        certs,
        rho,
        affine_bound,
        affine_forms: Some(affine_forms),
        notes,
        timings: clock.finish(),
    }))
}

/// Runs the pipeline matching the file's mode. `heights` is `[B]` for affine
/// files and `[B_0, ..., B_n]` (or a single value, repeated) for projective ones.
pub fn run(file: &IdealFile, heights: &[f64], cfg: &PipelineConfig) -> Result<PipelineReport> {
    match file.mode {
        IdealMode::Affine => {
            let [b] = heights else {
                return Err(Error::input("affine mode takes a single height B"));
            };
            affine_pipeline(&file.ideal, *b, cfg)
        }
        IdealMode::Projective => {
            let hb = if heights.len() == 1 {
                HeightBox::uniform(file.vars, heights[0])?
            } else {
                HeightBox::new(heights.to_vec())?
            };
            cover_and_construct(&file.ideal, &hb, cfg)
        }
    }
}

/// Runs the pipeline, then re-verifies the report from scratch.
pub fn construct_and_verify(file: &IdealFile, heights: &[f64], cfg: &PipelineConfig) -> Result<(PipelineReport, ReportCheck)> {
    let report = run(file, heights, cfg)?;
    let check = verify_report(&report, file, cfg.budget)?;
    Ok((report, check))
}

/// Exponent of `B` for a sweep fit: least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `Σ_{i>=1} m σ_i / f`: the exponent of `B` in the affine count bound.
pub fn affine_exponent(report: &PipelineReport) -> Option<f64> {
    report.k_bound_exponents.as_ref().map(|e| e[1..].iter().sum())
}

/// Integer `k` as `f64`, for tabulation.
pub fn as_f64(k: u64) -> f64 {
    k.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine_file(text: &str) -> IdealFile {
        IdealFile::parse(text, IdealMode::Affine).unwrap()
    }

    #[test]
    fn parabola_adaptive() {
        let f = affine_file("vars: 3\nx2 - x1^2\n");
        let cfg = PipelineConfig::new(DeltaSpec::Fixed(2));
        let (r, check) = construct_and_verify(&f, &[100.0], &cfg).unwrap();
        assert!(check.outcome.is_pass(), "{:?}", check.outcome);
        assert_eq!(r.point_count, 21);
        assert_eq!(r.mu, 5);
        assert_eq!(r.k_actual, 2 * r.certificates.len() as u64);
        assert!(r.affine_bound.as_ref().unwrap().holds);
        assert_eq!(r.dimension, Some(1));
        assert_eq!(r.degree, "2");
    }

    #[test]
    fn circle_one_certificate() {
        let f = affine_file("vars: 3\nx1^2 + x2^2 - 1\n");
        let (r, check) = construct_and_verify(&f, &[10.0], &PipelineConfig::new(DeltaSpec::Fixed(2))).unwrap();
        assert!(check.outcome.is_pass());
        assert_eq!(r.certificates.len(), 1);
        assert_eq!(r.certificates[0].points.len(), 4);
    }

    #[test]
    fn empty_variety_is_vacuous() {
        let f = affine_file("vars: 3\nx1^2 + 1\n");
        let (r, check) = construct_and_verify(&f, &[10.0], &PipelineConfig::new(DeltaSpec::Epsilon(0.25))).unwrap();
        assert!(check.outcome.is_pass());
        assert!(r.certificates.is_empty());
        assert!(r.notes.iter().any(|n| n.contains("vacuous")));
    }

    #[test]
    fn single_point_cannot_be_certified() {
        let f = affine_file("vars: 3\nx1 - 2\nx2 - 3\n");
        let err = run(&f, &[5.0], &PipelineConfig::new(DeltaSpec::Fixed(1))).unwrap_err();
        assert!(matches!(err, Error::Uncoverable(_)));
        let err = run(&f, &[5.0], &PipelineConfig::new(DeltaSpec::Epsilon(0.5))).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn projective_conic_classes() {
        let f = IdealFile::parse("vars: 3\nx0*x2 - x1^2\n", IdealMode::Projective).unwrap();
        let (r, check) = construct_and_verify(&f, &[6.0], &PipelineConfig::new(DeltaSpec::Fixed(2))).unwrap();
        assert!(check.outcome.is_pass(), "{:?}", check.outcome);
        assert_eq!(r.class_sizes.iter().sum::<usize>(), r.point_count);
    }

    #[test]
    fn theoretical_projective_conic() {
        let f = IdealFile::parse("vars: 3\nx0*x2 - x1^2\n", IdealMode::Projective).unwrap();
        let charts = Chart::parse_file("class: 0\nparams: 1\nx1 = t0\nx2 = t0^2\n", 3).unwrap();
        let mut cfg = PipelineConfig::new(DeltaSpec::Fixed(2));
        cfg.strategy = Strategy::Theoretical { charts, norm_bound: None };
        let (r, check) = construct_and_verify(&f, &[1.0, 10.0, 100.0], &cfg).unwrap();
        assert!(check.outcome.is_pass(), "{:?}", check.outcome);
        assert!(r.rho.unwrap() > 0.0);
        assert_eq!(r.point_count, 22);
    }

    #[test]
    fn empty_staircase_is_an_input_error() {
        let f = IdealFile::parse("vars: 2\nx0\nx1\n", IdealMode::Projective).unwrap();
        let err = run(&f, &[3.0], &PipelineConfig::new(DeltaSpec::Fixed(1))).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("staircase empty")), "{err:?}");
    }

    #[test]
    fn slope() {
        let xs = [10.0, 100.0, 1000.0];
        let ys = [3.0, 30.0, 300.0];
        assert!((log_log_slope(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_none());
    }
}

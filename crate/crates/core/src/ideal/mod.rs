//! Ideals, truncated Gröbner bases, staircases and Hilbert functions.

mod groebner;
mod hilbert;

use serde::{Deserialize, Serialize};

use crate::poly::{GradedOrdering, Polynomial, VarSpace};
use crate::{Error, Result};

pub use groebner::GroebnerBasis;
pub use hilbert::{default_window_end, AffineOrderingBound, HilbertPolynomial, Staircase};
pub(crate) use hilbert::rational_string;

/// Whether an ideal file lists affine equations in `x1..xn` or forms in `x0..xn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealMode {
    Affine,
    Projective,
}

impl std::str::FromStr for IdealMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(IdealMode::Affine),
            "projective" => Ok(IdealMode::Projective),
            other => Err(Error::input(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    generators: Vec<Polynomial>,
    num_vars: usize,
    homogeneous: bool,
}

impl Ideal {
    /// Zero generators are dropped; at least one nonzero generator is required.
    pub fn new(generators: Vec<Polynomial>) -> Result<Self> {
        let num_vars = generators
            .first()
            .map(|g| g.num_vars())
            .ok_or_else(|| Error::input("an ideal needs at least one generator"))?;
        Ideal::with_vars(num_vars, generators)
    }

    fn with_vars(num_vars: usize, generators: Vec<Polynomial>) -> Result<Self> {
        if generators.iter().any(|g| g.num_vars() != num_vars) {
            return Err(Error::input("generators live in different polynomial rings"));
        }
        let generators: Vec<Polynomial> = generators.into_iter().filter(|g| !g.is_zero()).collect();
        if generators.is_empty() {
            return Err(Error::input("all generators are zero; use Ideal::zero"));
        }
        let homogeneous = generators.iter().all(|g| g.is_homogeneous());
        Ok(Ideal { generators, num_vars, homogeneous })
    }

    /// The zero ideal, whose staircase is every monomial.
    pub fn zero(num_vars: usize) -> Self {
        Ideal { generators: Vec::new(), num_vars, homogeneous: true }
    }

    /// Parses generators given as text in the space `vars`.
    pub fn parse(lines: &[&str], vars: &VarSpace) -> Result<Self> {
        let gens = lines
            .iter()
            .enumerate()
            .map(|(i, l)| Polynomial::parse_line(l, vars, i + 1))
            .collect::<Result<Vec<_>>>()?;
        if gens.iter().all(|g| g.is_zero()) {
            return Ok(Ideal::zero(vars.count));
        }
        Ideal::with_vars(vars.count, gens)
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Adds generators (same ring).
    pub fn extended(&self, more: impl IntoIterator<Item = Polynomial>) -> Result<Ideal> {
        let mut gens = self.generators.clone();
        gens.extend(more);
        if gens.iter().all(|g| g.is_zero()) {
            return Ok(Ideal::zero(self.num_vars));
        }
        Ideal::with_vars(self.num_vars, gens)
    }

    /// The homogenization `I^h` in one more variable, inserted at position 0.
    ///
    /// Homogenizes a Gröbner basis under a graded ordering; homogenizing the
    /// raw generators does not give `I^h` in general.
    pub fn homogenization(&self) -> Result<Ideal> {
        if self.is_zero() {
            return Ok(Ideal::zero(self.num_vars + 1));
        }
        let gb = GroebnerBasis::compute(self, GradedOrdering::Grevlex, None)?;
        let gens = gb
            .basis()
            .iter()
            .map(|g| g.homogenize(0))
            .collect::<Result<Vec<_>>>()?;
        Ideal::with_vars(self.num_vars + 1, gens)
    }

    pub fn format(&self, vars: &VarSpace, ord: GradedOrdering) -> Vec<String> {
        self.generators.iter().map(|g| g.format(vars, ord)).collect()
    }
}

/// A parsed ideal file: a `vars: N` header and one generator per line.
///
/// `#` starts a comment. In affine mode the generators use `x1..x{N-1}`
/// and `x0` is reserved for homogenization.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealFile {
    pub vars: usize,
    pub ideal: Ideal,
    pub mode: IdealMode,
}

impl IdealFile {
    pub fn parse(text: &str, mode: IdealMode) -> Result<Self> {
        let mut vars: Option<usize> = None;
        let mut gens = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if vars.is_none() {
                let rest = line.strip_prefix("vars:").ok_or(Error::Syntax {
                    line: line_no,
                    column: 1,
                    message: "expected header 'vars: N'".into(),
                })?;
                let n: usize = rest.trim().parse().map_err(|_| Error::Syntax {
                    line: line_no,
                    column: 6,
                    message: format!("bad variable count '{}'", rest.trim()),
                })?;
                let min = if mode == IdealMode::Affine { 2 } else { 1 };
                if n < min {
                    return Err(Error::input(format!("vars: {n} is too small for {mode:?} mode")));
                }
                vars = Some(n);
                continue;
            }
            let n = vars.expect("header parsed");
            let space = match mode {
                IdealMode::Affine => VarSpace::affine(n - 1),
                IdealMode::Projective => VarSpace::new(n),
            };
            gens.push(Polynomial::parse_line(line, &space, line_no)?);
        }
        let vars = vars.ok_or_else(|| Error::input("missing 'vars: N' header"))?;
        let ring = if mode == IdealMode::Affine { vars - 1 } else { vars };
        let ideal = if gens.iter().all(|g| g.is_zero()) {
            Ideal::zero(ring)
        } else {
            Ideal::with_vars(ring, gens)?
        };
        Ok(IdealFile { vars, ideal, mode })
    }

    pub fn var_space(&self) -> VarSpace {
        match self.mode {
            IdealMode::Affine => VarSpace::affine(self.vars - 1),
            IdealMode::Projective => VarSpace::new(self.vars),
        }
    }

    pub fn to_text(&self, ord: GradedOrdering) -> String {
        let mut s = format!("vars: {}\n", self.vars);
        for g in self.ideal.format(&self.var_space(), ord) {
            s.push_str(&g);
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_flag_checked() {
        let v = VarSpace::new(3);
        assert!(Ideal::parse(&["x0*x2 - x1^2"], &v).unwrap().is_homogeneous());
        assert!(!Ideal::parse(&["x2 - x1^2"], &v).unwrap().is_homogeneous());
    }

    #[test]
    fn zero_generators_dropped() {
        let v = VarSpace::new(2);
        let i = Ideal::parse(&["0", "x0"], &v).unwrap();
        assert_eq!(i.generators().len(), 1);
        assert!(Ideal::parse(&["0"], &v).unwrap().is_zero());
        assert!(Ideal::new(vec![]).is_err());
    }

    #[test]
    fn file_format() {
        let text = "# parabola\nvars: 3\nx2 - x1^2  # y = x^2\n\n";
        let f = IdealFile::parse(text, IdealMode::Affine).unwrap();
        assert_eq!(f.vars, 3);
        assert_eq!(f.ideal.num_vars(), 2);
        let again = IdealFile::parse(&f.to_text(GradedOrdering::GrlexLeft), IdealMode::Affine).unwrap();
        assert_eq!(again, f);

        let err = IdealFile::parse("vars: 3\nx0 + x1\n", IdealMode::Affine).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        assert!(IdealFile::parse("x0\n", IdealMode::Projective).is_err());
        assert!(IdealFile::parse("vars: three\n", IdealMode::Projective).is_err());
        let p = IdealFile::parse("vars: 3\nx0*x2 - x1^2\n", IdealMode::Projective).unwrap();
        assert!(p.ideal.is_homogeneous());
    }

    #[test]
    fn homogenization_uses_a_graded_basis() {
        // affine twisted cubic: raw generators homogenize to a non-saturated ideal
        let v = VarSpace::affine(3);
        let i = Ideal::parse(&["x2 - x1^2", "x3 - x1*x2"], &v).unwrap();
        let ih = i.homogenization().unwrap();
        assert!(ih.is_homogeneous());
        assert_eq!(ih.num_vars(), 4);
        let gb = GroebnerBasis::compute(&ih, GradedOrdering::GrlexLeft, Some(6)).unwrap();
        let twisted = Ideal::parse(
            &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"],
            &VarSpace::new(4),
        )
        .unwrap();
        let gb2 = GroebnerBasis::compute(&twisted, GradedOrdering::GrlexLeft, Some(6)).unwrap();
        assert_eq!(gb.basis(), gb2.basis());
    }
}

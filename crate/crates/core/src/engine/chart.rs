//! Polynomial graph charts for the theoretical covering.

use num_rational::BigRational;

use crate::poly::{ExponentVector, Polynomial, VarSpace};
use crate::{Error, Result};

/// A chart for one class `i` in graph form.
///
/// With `y = τ(x)` and `z_j = y_j / y_i`, the chart says `z_j = φ_j(t)` for
/// every `j != i`. Each parameter `t_k` is itself one of the `z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub class: usize,
    pub params: usize,
    /// `φ_j` in the parameters; `None` at the class coordinate.
    pub components: Vec<Option<Polynomial>>,
    /// Coordinate carrying each parameter.
    pub param_coords: Vec<usize>,
}

impl Chart {
    pub fn new(class: usize, params: usize, components: Vec<Option<Polynomial>>) -> Result<Self> {
        if class >= components.len() {
            return Err(Error::input(format!("chart class {class} out of range")));
        }
        if params == 0 {
            return Err(Error::input("a chart needs at least one parameter"));
        }
        for (j, c) in components.iter().enumerate() {
            match c {
                None if j != class => return Err(Error::input(format!("chart for class {class} leaves x{j} undefined"))),
                Some(_) if j == class => return Err(Error::input(format!("chart for class {class} defines x{class}"))),
                Some(p) if p.num_vars() != params => return Err(Error::input("chart component in the wrong parameter ring")),
                _ => {}
            }
        }
        let param_coords = (0..params)
            .map(|k| {
                let t = Polynomial::var(params, k);
                components
                    .iter()
                    .position(|c| c.as_ref() == Some(&t))
                    .ok_or_else(|| Error::input(format!("chart for class {class}: no coordinate equals t{k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Chart { class, params, components, param_coords })
    }

    /// Parses chart blocks:
    ///
    /// ```text
    /// class: 0
    /// params: 1
    /// x1 = t0
    /// x2 = t0^2
    /// ```
    pub fn parse_file(text: &str, num_vars: usize) -> Result<Vec<Chart>> {
        struct Block {
            class: usize,
            params: Option<usize>,
            lines: Vec<(usize, usize, String)>,
        }
        let mut blocks: Vec<Block> = Vec::new();
        let syntax = |line: usize, message: String| Error::Syntax { line, column: 1, message };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("class:") {
                let class = rest.trim().parse().map_err(|_| syntax(line_no, format!("bad class '{}'", rest.trim())))?;
                blocks.push(Block { class, params: None, lines: Vec::new() });
                continue;
            }
            let block = blocks.last_mut().ok_or_else(|| syntax(line_no, "expected 'class: i'".into()))?;
            if let Some(rest) = line.strip_prefix("params:") {
                let p = rest.trim().parse().map_err(|_| syntax(line_no, format!("bad parameter count '{}'", rest.trim())))?;
                block.params = Some(p);
                continue;
            }
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| syntax(line_no, "expected 'xj = polynomial'".into()))?;
            let j = VarSpace::new(num_vars)
                .lookup(lhs.trim())
                .ok_or_else(|| syntax(line_no, format!("unknown coordinate '{}'", lhs.trim())))?;
            block.lines.push((line_no, j, rhs.to_string()));
        }
        blocks
            .into_iter()
            .map(|b| {
                let params = b.params.ok_or_else(|| Error::input(format!("chart for class {} lacks 'params:'", b.class)))?;
                let space = VarSpace::new(params).with_prefix("t");
                let mut comps: Vec<Option<Polynomial>> = vec![None; num_vars];
                for (line_no, j, rhs) in b.lines {
                    if comps[j].is_some() {
                        return Err(syntax(line_no, format!("x{j} defined twice")));
                    }
                    comps[j] = Some(Polynomial::parse_line(&rhs, &space, line_no)?);
                }
                Chart::new(b.class, params, comps)
            })
            .collect()
    }

    /// Parameter values of the chart point `z`.
    pub fn parameters(&self, z: &[BigRational]) -> Vec<BigRational> {
        self.param_coords.iter().map(|&j| z[j].clone()).collect()
    }

    /// Whether `z` lies on the chart, exactly.
    pub fn contains(&self, z: &[BigRational]) -> Result<bool> {
        let u = self.parameters(z);
        for (j, c) in self.components.iter().enumerate() {
            if let Some(phi) = c {
                if phi.evaluate(&u)? != z[j] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `ψ_e(t) = Π_{j != i} φ_j(t)^{e_j}`.
    pub fn psi(&self, e: &ExponentVector) -> Polynomial {
        let mut acc = Polynomial::one(self.params);
        for (j, c) in self.components.iter().enumerate() {
            if let Some(phi) = c {
                if e.get(j) > 0 {
                    acc = &acc * &phi.pow(e.get(j));
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn parse_parabola_chart() {
        let charts = Chart::parse_file("# conic\nclass: 0\nparams: 1\nx1 = t0\nx2 = t0^2\n", 3).unwrap();
        assert_eq!(charts.len(), 1);
        let c = &charts[0];
        assert_eq!(c.param_coords, vec![1]);
        let z = vec![rat(1), BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 4.into())];
        assert!(c.contains(&z).unwrap());
        let off = vec![rat(1), BigRational::new(1.into(), 2.into()), rat(0)];
        assert!(!c.contains(&off).unwrap());
        let psi = c.psi(&ExponentVector::new(vec![0, 1, 1]));
        assert_eq!(psi, Polynomial::parse("t0^3", &VarSpace::new(1).with_prefix("t")).unwrap());
    }

    #[test]
    fn rejects_bad_charts() {
        assert!(Chart::parse_file("class: 0\nparams: 1\nx1 = t0\n", 3).is_err());
        assert!(Chart::parse_file("class: 0\nparams: 1\nx1 = t0^2\nx2 = t0^3\n", 3).is_err());
        assert!(Chart::parse_file("params: 1\n", 3).is_err());
        assert!(Chart::parse_file("class: 0\nparams: 1\nx0 = t0\nx1 = t0\nx2 = t0\n", 3).is_err());
        assert!(Chart::parse_file("class: 0\nparams: 1\nx1 = t0\nx1 = t0\nx2 = 1\n", 3).is_err());
    }
}

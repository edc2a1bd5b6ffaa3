use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExponentVector;
use crate::{Error, Result};

/// Graded monomial orderings. Both compare total degree first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GradedOrdering {
    /// Equal-degree ties: `a < b` iff the left-most nonzero entry of `a - b`
    /// is positive. Monomials heavy in the first variable are the smallest.
    #[default]
    GrlexLeft,
    /// Graded reverse lexicographic with `x0 > x1 > ... > xn`: `a > b` iff the
    /// right-most nonzero entry of `a - b` is negative.
    Grevlex,
}

impl GradedOrdering {
    pub const ALL: [GradedOrdering; 2] = [GradedOrdering::GrlexLeft, GradedOrdering::Grevlex];

    /// Compares two exponent vectors; errors on a length mismatch.
    pub fn compare(self, a: &ExponentVector, b: &ExponentVector) -> Result<Ordering> {
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "exponent vectors of different lengths ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        Ok(self.cmp(a, b))
    }

    /// Unchecked comparison. Callers guarantee equal lengths.
    pub fn cmp(self, a: &ExponentVector, b: &ExponentVector) -> Ordering {
        debug_assert_eq!(a.len(), b.len());
        match a.degree().cmp(&b.degree()) {
            Ordering::Equal => {}
            other => return other,
        }
        match self {
            GradedOrdering::GrlexLeft => {
                for (x, y) in a.entries().iter().zip(b.entries()) {
                    if x != y {
                        // positive difference means `a` is the smaller one
                        return if x > y { Ordering::Less } else { Ordering::Greater };
                    }
                }
                Ordering::Equal
            }
            GradedOrdering::Grevlex => {
                for (x, y) in a.entries().iter().zip(b.entries()).rev() {
                    if x != y {
                        return if x < y { Ordering::Greater } else { Ordering::Less };
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GradedOrdering::GrlexLeft => "grlex-left",
            GradedOrdering::Grevlex => "grevlex",
        }
    }
}

impl fmt::Display for GradedOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GradedOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grlex-left" | "grlex_left" => Ok(GradedOrdering::GrlexLeft),
            "grevlex" => Ok(GradedOrdering::Grevlex),
            other => Err(Error::input(format!("unknown ordering '{other}'"))),
        }
    }
}

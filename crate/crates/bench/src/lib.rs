//! Shared inputs for the benchmarks.

use detmethod::{Ideal, VarSpace};

pub fn parabola() -> Ideal {
    Ideal::parse(&["x2 - x1^2"], &VarSpace::affine(2)).expect("valid ideal")
}

pub fn twisted_cubic() -> Ideal {
    Ideal::parse(
        &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"],
        &VarSpace::new(4),
    )
    .expect("valid ideal")
}

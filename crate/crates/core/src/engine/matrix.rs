//! Monomial matrices and exact fraction-free linear algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ideal::Staircase;
use crate::poly::ExponentVector;
use crate::{Error, Result};

/// Rows are staircase exponents in ordering, columns are points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub rows: Vec<ExponentVector>,
    /// `entries[r][c] = (x^(c))^(rows[r])`.
    pub entries: Vec<Vec<BigInt>>,
    pub cols: usize,
}

impl MonomialMatrix {
    pub fn build(points: &[&[i64]], staircase: &Staircase) -> Result<Self> {
        if let Some(n) = staircase.exponents.first().map(|e| e.len()) {
            if let Some(p) = points.iter().find(|p| p.len() != n) {
                return Err(Error::input(format!("point of length {} against monomials in {n} variables", p.len())));
            }
        }
        let entries = staircase
            .exponents
            .iter()
            .map(|e| points.iter().map(|p| monomial_value(p, e)).collect())
            .collect();
        Ok(MonomialMatrix { rows: staircase.exponents.clone(), entries, cols: points.len() })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Rows of `A^T`: one linear condition on the coefficient vector per point.
    fn transpose(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.entries.iter().map(|row| row[c].clone()).collect()).collect()
    }

    pub fn rank(&self) -> usize {
        echelon(self.transpose(), self.num_rows()).pivots.len()
    }

    /// Primitive integer vectors spanning `{c : Σ_e c_e (x^(j))^e = 0 for all j}`.
    ///
    /// One vector per free column of the echelon form, in column order; each
    /// is scaled to coprime integers with a positive first nonzero entry.
    pub fn exact_kernel(&self) -> Vec<Vec<BigInt>> {
        let mu = self.num_rows();
        let ech = echelon(self.transpose(), mu);
        let free: Vec<usize> = (0..mu).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter().map(|&f| kernel_vector(&ech, mu, f)).collect()
    }

    /// The kernel vector belonging to the first free column, if any.
    pub fn first_kernel_vector(&self) -> Option<Vec<BigInt>> {
        let mu = self.num_rows();
        let ech = echelon(self.transpose(), mu);
        let f = (0..mu).find(|c| !ech.pivots.contains(c))?;
        Some(kernel_vector(&ech, mu, f))
    }
}

pub(crate) fn monomial_value(p: &[i64], e: &ExponentVector) -> BigInt {
    p.iter()
        .zip(e.entries())
        .filter(|(_, &k)| k > 0)
        .fold(BigInt::one(), |acc, (&x, &k)| acc * num_traits::pow(BigInt::from(x), k as usize))
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Bareiss elimination; stops early once every column has a pivot.
fn echelon(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..ncols {
                let v = &pivot_row[col] * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots }
}

fn kernel_vector(ech: &Echelon, ncols: usize, free: usize) -> Vec<BigInt> {
    let mut x = vec![BigRational::zero(); ncols];
    x[free] = BigRational::one();
    for (k, &p) in ech.pivots.iter().enumerate().rev() {
        let row = &ech.rows[k];
        let s: BigRational = (p + 1..ncols)
            .filter(|&j| !x[j].is_zero() && !row[j].is_zero())
            .map(|j| BigRational::from_integer(row[j].clone()) * &x[j])
            .sum();
        x[p] = -s / BigRational::from_integer(row[p].clone());
    }
    primitive(&x)
}

/// Coprime integer multiple with a positive first nonzero entry.
pub(crate) fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = x.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return ints;
    }
    let sign = if ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    ints.into_iter().map(|c| c / &g * sign).collect()
}

/// Exact determinant of a square integer matrix.
pub fn det_integer(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact determinant of a square rational matrix.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            let factor = &a[i][k] / &a[k][k];
            for j in k..n {
                let v = &a[k][j] * &factor;
                a[i][j] -= v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{GroebnerBasis, Ideal};
    use crate::poly::{GradedOrdering, VarSpace};
    use proptest::prelude::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn staircase(gens: &[&str], n: usize, delta: u32) -> Staircase {
        let i = if gens.is_empty() { Ideal::zero(n) } else { Ideal::parse(gens, &VarSpace::new(n)).unwrap() };
        GroebnerBasis::compute(&i, GradedOrdering::GrlexLeft, Some(delta)).unwrap().staircase(delta).unwrap()
    }

    fn apply(m: &MonomialMatrix, v: &[BigInt]) -> Vec<BigInt> {
        (0..m.cols).map(|c| m.entries.iter().zip(v).map(|(row, x)| &row[c] * x).sum()).collect()
    }

    #[test]
    fn single_point_has_rank_one() {
        let st = staircase(&["x0*x2 - x1^2"], 3, 3);
        let m = MonomialMatrix::build(&[&[1, 2, 4]], &st).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.exact_kernel().len(), st.len() - 1);
        let zero = MonomialMatrix::build(&[&[0, 0, 0]], &st).unwrap();
        assert_eq!(zero.rank(), 0);
    }

    #[test]
    fn linear_monomials_give_coordinates() {
        let st = staircase(&["x0*x2 - x1^2"], 3, 1);
        assert_eq!(st.len(), 3);
        let m = MonomialMatrix::build(&[&[1, 2, 4], &[1, -1, 1]], &st).unwrap();
        for (r, e) in m.rows.iter().enumerate() {
            let var = e.entries().iter().position(|&k| k == 1).unwrap();
            assert_eq!(m.entries[r], vec![BigInt::from([1, 2, 4][var]), BigInt::from([1, -1, 1][var])]);
        }
    }

    #[test]
    fn vandermonde_three_points() {
        // P^1, δ = 2: rows x1^2, x0x1, x0^2 at (1,0), (1,1), (1,2)
        let st = staircase(&[], 2, 2);
        let m = MonomialMatrix::build(&[&[1, 0], &[1, 1], &[1, 2]], &st).unwrap();
        assert_eq!(m.rank(), 3);
        assert!(m.exact_kernel().is_empty());
        assert_eq!(det_integer(&m.entries).abs(), BigInt::from(2));
    }

    #[test]
    fn repeated_column_has_kernel_in_transpose() {
        let st = staircase(&[], 2, 1);
        let m = MonomialMatrix::build(&[&[1, 3], &[2, 6]], &st).unwrap();
        assert_eq!(m.rank(), 1);
        let k = m.exact_kernel();
        assert_eq!(k.len(), 1);
        assert!(apply(&m, &k[0]).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn full_parabola_box_is_full_rank() {
        let st = staircase(&["x0*x2 - x1^2"], 3, 2);
        assert_eq!(st.len(), 5);
        let pts: Vec<Vec<i64>> = (-10..=10).map(|t| vec![1, t, t * t]).collect();
        let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
        let m = MonomialMatrix::build(&refs, &st).unwrap();
        assert_eq!(m.rank(), 5);
        // four points leave a one-dimensional kernel
        let m4 = MonomialMatrix::build(&refs[..4], &st).unwrap();
        let k = m4.exact_kernel();
        assert_eq!(k.len(), 1);
        assert!(apply(&m4, &k[0]).iter().all(|v| v.is_zero()));
        assert!(k[0].iter().find(|c| !c.is_zero()).unwrap().is_positive());
    }

    #[test]
    fn determinants() {
        assert_eq!(det_integer(&big(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(det_integer(&big(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det_integer(&big(&[&[1, 2], &[2, 4]])), BigInt::zero());
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let m = vec![vec![q(1, 2), q(1, 3)], vec![q(1, 4), q(1, 5)]];
        assert_eq!(det_rational(&m), q(1, 10) - q(1, 12));
    }

    fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
        let mut a: Vec<Vec<BigRational>> =
            rows.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect();
        let ncols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..a.len() {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for j in 0..ncols {
                        let v = &a[rank][j] * &f;
                        a[i][j] -= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn kernel_and_rank_agree_with_rational_elimination(
            pts in prop::collection::vec(prop::collection::vec(-4i64..5, 3), 1..9),
            delta in 1u32..4,
        ) {
            let st = staircase(&["x0*x2 - x1^2"], 3, delta);
            let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
            let m = MonomialMatrix::build(&refs, &st).unwrap();
            let rank = m.rank();
            prop_assert_eq!(rank, rational_rank(&m.entries));
            let k = m.exact_kernel();
            prop_assert_eq!(k.len(), st.len() - rank);
            for v in &k {
                prop_assert!(apply(&m, v).iter().all(|x| x.is_zero()));
                let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
                prop_assert_eq!(g, BigInt::one());
            }
        }

        #[test]
        fn integer_minors_vanish_or_exceed_one(
            pts in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 5),
        ) {
            let st = staircase(&["x0*x2 - x1^2"], 3, 2);
            let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
            let m = MonomialMatrix::build(&refs, &st).unwrap();
            let d = det_integer(&m.entries);
            prop_assert!(d.is_zero() || d.abs() >= BigInt::one());
            let rat: Vec<Vec<BigRational>> = m.entries.iter()
                .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect();
            prop_assert_eq!(BigRational::from_integer(d), det_rational(&rat));
        }
    }
}

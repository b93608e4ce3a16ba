//! Small dense linear-algebra helpers shared by every module.
//!
//! All model systems live in dimension 2 or 3, so dynamically sized
//! `nalgebra` matrices are used throughout; the allocation cost is noise
//! next to the field evaluations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Square integer matrix stored row-major, serialized as nested arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("integer matrix must be square and non-empty".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.data.chunks(m.n).map(|r| r.to_vec()).collect()
    }
}

impl IntMatrix {
    pub fn from_rows<const N: usize>(rows: [[i64; N]; N]) -> Self {
        Self {
            n: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Row-major 2x2 from four entries `[p, q, r, s]` meaning `[[p, q], [r, s]]`.
    pub fn from_flat2(e: [i64; 4]) -> Self {
        Self::from_rows([[e[0], e[1]], [e[2], e[3]]])
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> i64 {
        let g = |i, j| self.get(i, j);
        match self.n {
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            3 => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
            _ => self.to_f64().determinant().round() as i64,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        IntMatrix { n, data }
    }

    /// Exact inverse of a unimodular matrix via the adjugate.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let d = self.det();
        if d.abs() != 1 {
            return Err(Error::NotUnimodular(d as f64));
        }
        let n = self.n;
        let inv = self.to_f64().try_inverse().ok_or(Error::NotUnimodular(0.0))?;
        Ok(IntMatrix {
            n,
            data: inv.transpose().iter().map(|x| x.round() as i64).collect(),
        })
    }

    /// `self^k` for any integer `k` (negative powers use the exact inverse).
    pub fn pow(&self, k: i32) -> Result<IntMatrix> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = IntMatrix::identity(self.n);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Matrix {
        DMatrix::from_row_slice(self.n, self.n, &self.data.iter().map(|&x| x as f64).collect::<Vec<_>>())
    }
}

/// Real eigen-data of a hyperbolic 2x2 matrix.
#[derive(Clone, Debug)]
pub struct HyperbolicEigen {
    /// Eigenvalue with modulus < 1.
    pub lambda_s: f64,
    /// Eigenvalue with modulus > 1.
    pub lambda_u: f64,
    /// Unit eigenvector for `lambda_s`.
    pub e_s: [f64; 2],
    /// Unit eigenvector for `lambda_u`.
    pub e_u: [f64; 2],
}

/// Eigen-decomposition of a 2x2 real matrix with real eigenvalues of
/// distinct modulus on either side of 1. Returns `None` otherwise.
pub fn hyperbolic_eigen(m: &Matrix) -> Option<HyperbolicEigen> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let l1 = 0.5 * (tr + sq);
    let l2 = 0.5 * (tr - sq);
    let (ls, lu) = if l1.abs() < l2.abs() { (l1, l2) } else { (l2, l1) };
    if !(ls.abs() < 1.0 && lu.abs() > 1.0) {
        return None;
    }
    let eig = |l: f64| -> [f64; 2] {
        // (a - l) x + b y = 0 or c x + (d - l) y = 0; pick the better-conditioned row.
        let v = if b.abs() + (a - l).abs() >= c.abs() + (d - l).abs() {
            [b, l - a]
        } else {
            [l - d, c]
        };
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let mut v = [v[0] / n, v[1] / n];
        // Orientation convention: first nonzero component positive.
        if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
            v = [-v[0], -v[1]];
        }
        v
    };
    Some(HyperbolicEigen {
        lambda_s: ls,
        lambda_u: lu,
        e_s: eig(ls),
        e_u: eig(lu),
    })
}

/// Jacobian of `f` at `p` by central differences with one Richardson
/// extrapolation level: `(4 D_{h/2} - D_h) / 3`, error O(h^4).
pub fn richardson_jacobian<F>(f: F, p: &Vector, h: f64) -> Matrix
where
    F: Fn(&Vector) -> Vector,
{
    let n = p.len();
    let m = f(p).len();
    let mut jac = Matrix::zeros(m, n);
    let central = |j: usize, step: f64| -> Vector {
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus[j] += step;
        minus[j] -= step;
        (f(&plus) - f(&minus)) / (2.0 * step)
    };
    for j in 0..n {
        let coarse = central(j, h);
        let fine = central(j, 0.5 * h);
        let col = (fine * 4.0 - coarse) / 3.0;
        jac.set_column(j, &col);
    }
    jac
}

/// Sup norm of a matrix difference.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Row-major nested representation used in JSON reports.
pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Fractional part in `[0, 1)`, robust to `x - floor(x)` rounding up to 1.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Signed distance on the circle `R/Z`, in `[-0.5, 0.5)`.
pub fn circle_diff(a: f64, b: f64) -> f64 {
    frac(a - b + 0.5) - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_inverse_and_power() {
        let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
        let inv = cat.inverse().unwrap();
        assert_eq!(inv, IntMatrix::from_flat2([1, -1, -1, 2]));
        assert_eq!(cat.mul(&inv), IntMatrix::identity(2));
        assert_eq!(cat.pow(2).unwrap(), IntMatrix::from_flat2([5, 3, 3, 2]));
        assert_eq!(cat.pow(-1).unwrap(), inv);
        let m3 = IntMatrix::from_rows([[0, 0, 1], [1, 0, -6], [0, 1, 5]]);
        assert_eq!(m3.det(), 1);
        assert_eq!(m3.mul(&m3.inverse().unwrap()), IntMatrix::identity(3));
    }

    #[test]
    fn cat_eigen() {
        let e = hyperbolic_eigen(&IntMatrix::from_flat2([2, 1, 1, 1]).to_f64()).unwrap();
        let phi = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((e.lambda_u - phi).abs() < 1e-14);
        assert!((e.lambda_s - 1.0 / phi).abs() < 1e-14);
        // A e_u = lambda_u e_u
        assert!((2.0 * e.e_u[0] + e.e_u[1] - phi * e.e_u[0]).abs() < 1e-14);
        assert!(hyperbolic_eigen(&IntMatrix::from_flat2([1, 1, 0, 1]).to_f64()).is_none());
    }

    #[test]
    fn richardson_is_fourth_order() {
        let f = |p: &Vector| Vector::from_vec(vec![p[0].sin() * p[1], p[1].exp()]);
        let p = Vector::from_vec(vec![0.3, -0.2]);
        let j = richardson_jacobian(f, &p, 1e-2);
        assert!((j[(0, 0)] - 0.3f64.cos() * -0.2).abs() < 1e-9);
        assert!((j[(0, 1)] - 0.3f64.sin()).abs() < 1e-9);
        assert!((j[(1, 1)] - (-0.2f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn frac_and_circle_diff() {
        assert_eq!(frac(-0.7), 0.30000000000000004);
        assert_eq!(frac(2.0), 0.0);
        assert!((circle_diff(0.95, 0.05) + 0.1).abs() < 1e-12);
    }
}

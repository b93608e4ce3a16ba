//! Decision procedures: conjugacy class of a 2x2 unimodular cocycle,
//! recognition of three-dimensional Lie algebras from structure constants,
//! and routing of three-dimensional autonomous systems.

use serde::{Deserialize, Serialize};

use crate::cocycle::{CocycleReport, PartialHyperbolicSpec};
use crate::error::{Error, Result};
use crate::fields::{jacobi_residual, StructureTensor};
use crate::linalg::{Matrix, Vector};

/// Tolerance on `|det| = 1` for [`classify_2d`].
pub const UNIMODULAR_TOL: f64 = 1e-6;
/// Width of the parabolic band `||tr| - 2| < PARABOLIC_BAND`.
pub const PARABOLIC_BAND: f64 = 1e-9;
/// Tensors with a larger Jacobi residual are rejected.
pub const JACOBI_TOL: f64 = 1e-4;
/// Relative singular-value threshold for the derived-algebra rank.
pub const RANK_TOL: f64 = 1e-6;
/// Relative zero band for Killing-form eigenvalues.
pub const KILLING_ZERO_BAND: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixClass2D {
    Hyperbolic,
    Elliptic,
    ParabolicPlus,
    ParabolicMinus,
    /// Orientation reversing with zero trace (an involution up to sign).
    Degenerate,
}

/// Classifies a 2x2 matrix with determinant ±1 by trace and determinant.
pub fn classify_2d(m: &Matrix) -> Result<MatrixClass2D> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            got: m.nrows(),
        });
    }
    let det = m.determinant();
    let tr = m.trace();
    if (det - 1.0).abs() < UNIMODULAR_TOL {
        Ok(if (tr.abs() - 2.0).abs() < PARABOLIC_BAND {
            if tr > 0.0 {
                MatrixClass2D::ParabolicPlus
            } else {
                MatrixClass2D::ParabolicMinus
            }
        } else if tr.abs() > 2.0 {
            MatrixClass2D::Hyperbolic
        } else {
            MatrixClass2D::Elliptic
        })
    } else if (det + 1.0).abs() < UNIMODULAR_TOL {
        // Eigenvalues solve λ² - tr λ - 1 = 0: always real, product -1.
        Ok(if tr.abs() < PARABOLIC_BAND {
            MatrixClass2D::Degenerate
        } else {
            MatrixClass2D::Hyperbolic
        })
    } else {
        Err(Error::NotUnimodular(det))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraClass {
    Abelian,
    Heis3,
    Sol,
    Euc,
    Sl2,
    Su2,
    Unknown,
}

/// Basis-invariant data behind a classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraEvidence {
    pub class: AlgebraClass,
    pub jacobi_residual: f64,
    pub derived_rank: usize,
    pub singular_values: Vec<f64>,
    /// Eigenvalues `(re, im)` of `ad` of a complement generator on the
    /// derived algebra (rank 2 only).
    pub ad_eigenvalues: Vec<(f64, f64)>,
    /// Killing form signature `(positive, negative, zero)` (rank 3 only).
    pub killing_signature: Option<(usize, usize, usize)>,
}

fn basis(n: usize, i: usize) -> Vector {
    Vector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// Classifies a three-dimensional real Lie algebra.
pub fn classify_algebra(t: &StructureTensor) -> Result<AlgebraClass> {
    Ok(classify_algebra_detailed(t)?.class)
}

pub fn classify_algebra_detailed(t: &StructureTensor) -> Result<AlgebraEvidence> {
    let jac = jacobi_residual(t)?.amax();
    if jac >= JACOBI_TOL {
        return Err(Error::NotALieAlgebra(jac));
    }
    let n = 3;
    let mut brackets = Matrix::zeros(n, n);
    for (col, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        brackets.set_column(col, &t.bracket(&basis(n, i), &basis(n, j)));
    }
    // Left singular data from the symmetric eigenproblem of B Bᵀ; more
    // accurate than the SVD routine when singular values nearly coincide.
    let eig = (&brackets * brackets.transpose()).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let sv: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let u = eig.eigenvectors;
    let scale = sv[0];
    let rank = if scale < 1e-12 {
        0
    } else {
        sv.iter().filter(|&&s| s > RANK_TOL * scale).count()
    };
    let mut ev = AlgebraEvidence {
        class: AlgebraClass::Unknown,
        jacobi_residual: jac,
        derived_rank: rank,
        singular_values: sv,
        ad_eigenvalues: Vec::new(),
        killing_signature: None,
    };
    let small = |v: &Vector| v.amax() <= RANK_TOL * scale.max(1e-12) * 10.0;
    ev.class = match rank {
        0 => AlgebraClass::Abelian,
        1 => {
            let d = u.column(order[0]).into_owned();
            if (0..n).all(|i| small(&t.bracket(&d, &basis(n, i)))) {
                AlgebraClass::Heis3
            } else {
                AlgebraClass::Unknown
            }
        }
        2 => {
            let d1 = u.column(order[0]).into_owned();
            let d2 = u.column(order[1]).into_owned();
            let w = u.column(order[2]).into_owned();
            if !small(&t.bracket(&d1, &d2)) {
                AlgebraClass::Unknown
            } else {
                // ad_w restricted to D = span(d1, d2), in that orthonormal basis.
                let proj = |v: Vector| [d1.dot(&v), d2.dot(&v)];
                let c1 = proj(t.bracket(&w, &d1));
                let c2 = proj(t.bracket(&w, &d2));
                let r = Matrix::from_row_slice(2, 2, &[c1[0], c2[0], c1[1], c2[1]]);
                ev.ad_eigenvalues = r.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
                let norm = r.norm().max(1e-300);
                let tr = r.trace();
                let disc = tr * tr - 4.0 * r.determinant();
                if tr.abs() > RANK_TOL * norm {
                    AlgebraClass::Unknown
                } else if disc > RANK_TOL * norm * norm {
                    AlgebraClass::Sol
                } else if disc < -RANK_TOL * norm * norm {
                    AlgebraClass::Euc
                } else {
                    AlgebraClass::Unknown
                }
            }
        }
        _ => {
            let ads: Vec<Matrix> = (0..n).map(|i| t.ad(&basis(n, i))).collect();
            let killing = Matrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace());
            let eig = killing.symmetric_eigenvalues();
            let band = KILLING_ZERO_BAND * eig.amax().max(1e-300);
            let pos = eig.iter().filter(|&&x| x > band).count();
            let neg = eig.iter().filter(|&&x| x < -band).count();
            let zero = n - pos - neg;
            ev.killing_signature = Some((pos, neg, zero));
            match (pos, neg) {
                (2, 1) => AlgebraClass::Sl2,
                (0, 3) => AlgebraClass::Su2,
                _ => AlgebraClass::Unknown,
            }
        }
    };
    Ok(ev)
}

/// Exact structure tensors of the six unimodular three-dimensional
/// algebras, in the order abelian, heis, sol, euc, sl2, su2.
pub fn standard_tensors() -> Vec<(AlgebraClass, StructureTensor)> {
    vec![
        (AlgebraClass::Abelian, StructureTensor::zero(3)),
        // [X, Y] = Z
        (AlgebraClass::Heis3, StructureTensor::from_entries(3, &[(0, 1, 2, 1.0)])),
        // [T, X] = X, [T, Y] = -Y
        (AlgebraClass::Sol, StructureTensor::from_entries(3, &[(0, 1, 1, 1.0), (0, 2, 2, -1.0)])),
        // [T, X] = Y, [T, Y] = -X
        (AlgebraClass::Euc, StructureTensor::from_entries(3, &[(0, 1, 2, 1.0), (0, 2, 1, -1.0)])),
        // [H, E] = 2E, [H, F] = -2F, [E, F] = H
        (
            AlgebraClass::Sl2,
            StructureTensor::from_entries(3, &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)]),
        ),
        // cross product
        (
            AlgebraClass::Su2,
            StructureTensor::from_entries(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]),
        ),
    ]
}

/// Which model a three-dimensional autonomous partially hyperbolic system
/// is routed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum Branch3D {
    AnosovTorus,
    Suspension,
    Algebraic { group: AlgebraClass },
}

/// Tolerance on `|λ_c| = 1` when routing.
pub const CENTRAL_UNIT_TOL: f64 = 1e-6;

/// Routes an autonomous system: non-unit central eigenvalue → Anosov torus;
/// non-constant structure constants → suspension; otherwise the algebra
/// of the constant structure constants.
pub fn classify_3d(
    report: &CocycleReport,
    spec: &PartialHyperbolicSpec,
    tensor: &StructureTensor,
    constant: bool,
) -> Result<Branch3D> {
    if !report.autonomous {
        return Err(Error::NotAutonomous(report.max_deviation));
    }
    if (spec.lambda_c.abs() - 1.0).abs() > CENTRAL_UNIT_TOL {
        return Ok(Branch3D::AnosovTorus);
    }
    if !constant {
        return Ok(Branch3D::Suspension);
    }
    match classify_algebra(tensor)? {
        AlgebraClass::Su2 => Err(Error::ExcludedAlgebra("su2".into())),
        AlgebraClass::Euc => Err(Error::ExcludedAlgebra("euc".into())),
        AlgebraClass::Unknown => Err(Error::UnrecognizedAlgebra),
        group => Ok(Branch3D::Algebraic { group }),
    }
}

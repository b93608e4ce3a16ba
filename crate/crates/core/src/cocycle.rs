//! Derivative cocycles over framings, autonomy certification, Lyapunov
//! spectra and partial hyperbolicity checks.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{bracket_coefficients, coordinates_in_framing, Framing};
use crate::geometry::{ChartPoint, ModelManifold};
use crate::linalg::{richardson_jacobian, to_rows, Matrix, Vector};

/// Autonomy tolerance when the map has an exact Jacobian.
pub const EXACT_AUTONOMY_TOL: f64 = 1e-6;
/// Autonomy tolerance when the Jacobian comes from finite differences.
pub const FD_AUTONOMY_TOL: f64 = 1e-3;
/// Band around `|det| = 1` accepted by [`determinant_check`].
pub const DET_TOL: f64 = 1e-6;
/// Default finite-difference step for map Jacobians.
pub const DEFAULT_MAP_STEP: f64 = 1e-4;

type MapFn = dyn Fn(&ChartPoint) -> ChartPoint + Send + Sync;
type JacFn = dyn Fn(&ChartPoint) -> Matrix + Send + Sync;

/// Chart lift of a diffeomorphism of a model manifold.
#[derive(Clone)]
pub struct Diffeo {
    descriptor: String,
    dim: usize,
    forward: Arc<MapFn>,
    inverse: Option<Arc<MapFn>>,
    jacobian: Option<Arc<JacFn>>,
    fd_step: f64,
}

impl fmt::Debug for Diffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffeo")
            .field("descriptor", &self.descriptor)
            .field("dim", &self.dim)
            .field("has_inverse", &self.inverse.is_some())
            .field("exact_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl Diffeo {
    pub fn new<F>(descriptor: impl Into<String>, dim: usize, forward: F) -> Self
    where
        F: Fn(&ChartPoint) -> ChartPoint + Send + Sync + 'static,
    {
        Self {
            descriptor: descriptor.into(),
            dim,
            forward: Arc::new(forward),
            inverse: None,
            jacobian: None,
            fd_step: DEFAULT_MAP_STEP,
        }
    }

    pub fn with_inverse<F>(mut self, inverse: F) -> Self
    where
        F: Fn(&ChartPoint) -> ChartPoint + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&ChartPoint) -> Matrix + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// Identity of `R^n`.
    pub fn identity(n: usize) -> Self {
        Self::new("identity", n, |p| p.clone())
            .with_inverse(|p| p.clone())
            .with_jacobian(move |_| Matrix::identity(n, n))
    }

    /// Affine map `p ↦ A p + v`.
    pub fn affine(descriptor: impl Into<String>, a: Matrix, v: Vector) -> Result<Self> {
        let n = a.nrows();
        let a_inv = a.clone().try_inverse().ok_or_else(|| Error::NotInvertible("affine linear part".into()))?;
        let (af, vf, vi) = (a.clone(), v.clone(), v);
        Ok(Self::new(descriptor, n, move |p| &af * p + &vf)
            .with_inverse(move |p| &a_inv * (p - &vi))
            .with_jacobian(move |_| a.clone()))
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, p: &ChartPoint) -> ChartPoint {
        (self.forward)(p)
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn has_exact_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Exact chart Jacobian, or Richardson central differences.
    pub fn jacobian(&self, p: &ChartPoint) -> Matrix {
        match &self.jacobian {
            Some(j) => j(p),
            None => richardson_jacobian(|q| self.apply(q), p, self.fd_step),
        }
    }

    /// The inverse diffeomorphism. Its Jacobian is exact whenever this
    /// map's Jacobian is.
    pub fn inverse(&self) -> Result<Diffeo> {
        let inv = self
            .inverse
            .clone()
            .ok_or_else(|| Error::NotInvertible(format!("{} has no inverse", self.descriptor)))?;
        let mut out = Diffeo {
            descriptor: format!("inv({})", self.descriptor),
            dim: self.dim,
            forward: inv.clone(),
            inverse: Some(self.forward.clone()),
            jacobian: None,
            fd_step: self.fd_step,
        };
        if let Some(j) = self.jacobian.clone() {
            let dim = self.dim;
            out.jacobian = Some(Arc::new(move |p: &ChartPoint| {
                j(&inv(p)).try_inverse().unwrap_or_else(|| Matrix::from_element(dim, dim, f64::NAN))
            }));
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Diffeo) -> Diffeo {
        let (f, g) = (self.forward.clone(), other.forward.clone());
        let mut out = Diffeo {
            descriptor: format!("{}∘{}", self.descriptor, other.descriptor),
            dim: self.dim,
            forward: Arc::new(move |p: &ChartPoint| f(&g(p))),
            inverse: None,
            jacobian: None,
            fd_step: self.fd_step.min(other.fd_step),
        };
        if let (Some(fi), Some(gi)) = (self.inverse.clone(), other.inverse.clone()) {
            out.inverse = Some(Arc::new(move |p: &ChartPoint| gi(&fi(p))));
        }
        if self.jacobian.is_some() && other.jacobian.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out.jacobian = Some(Arc::new(move |p: &ChartPoint| a.jacobian(&b.apply(p)) * b.jacobian(p)));
        }
        out
    }

    /// Sup over samples of `|φ⁻¹(φ(p)) - p|`.
    pub fn inverse_residual(&self, samples: &[ChartPoint]) -> Result<f64> {
        let inv = self.inverse()?;
        Ok(samples
            .iter()
            .map(|p| (inv.apply(&self.apply(p)) - p).amax())
            .fold(0.0, f64::max))
    }
}

/// `F(φ(p))⁻¹ Dφ(p) F(p)`.
pub fn derivative_cocycle(phi: &Diffeo, framing: &Framing, p: &ChartPoint) -> Result<Matrix> {
    let q = phi.apply(p);
    let pushed = phi.jacobian(p) * framing.matrix(p);
    let n = framing.dim();
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let col = coordinates_in_framing(&pushed.column(j).into_owned(), &q, framing)?;
        out.set_column(j, &col);
    }
    Ok(out)
}

/// How the map Jacobian was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Exact,
    FiniteDifference,
}

/// Outcome of [`autonomy_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    /// Candidate constant cocycle (row-major).
    pub m: Vec<Vec<f64>>,
    pub max_deviation: f64,
    pub det: f64,
    pub sample_count: usize,
    pub tolerance: f64,
    pub autonomous: bool,
    pub jacobian_mode: JacobianMode,
}

impl CocycleReport {
    pub fn matrix(&self) -> Matrix {
        crate::linalg::from_rows(&self.m)
    }
}

/// Samples the cocycle, takes the entrywise mean as `M` and the sup
/// entrywise deviation from it. `tolerance` overrides the default, which
/// depends on whether the Jacobian is exact.
pub fn autonomy_check(
    phi: &Diffeo,
    framing: &Framing,
    samples: &[ChartPoint],
    tolerance: Option<f64>,
) -> Result<CocycleReport> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mode = if phi.has_exact_jacobian() {
        JacobianMode::Exact
    } else {
        JacobianMode::FiniteDifference
    };
    let tolerance = tolerance.unwrap_or(match mode {
        JacobianMode::Exact => EXACT_AUTONOMY_TOL,
        JacobianMode::FiniteDifference => FD_AUTONOMY_TOL,
    });
    let mats: Vec<Matrix> = samples
        .par_iter()
        .map(|p| derivative_cocycle(phi, framing, p))
        .collect::<Result<_>>()?;
    let n = framing.dim();
    let mean = mats.iter().fold(Matrix::zeros(n, n), |acc, m| acc + m) / mats.len() as f64;
    let max_deviation = mats
        .iter()
        .map(|m| crate::linalg::max_abs_diff(m, &mean))
        .fold(0.0, f64::max);
    Ok(CocycleReport {
        m: to_rows(&mean),
        max_deviation,
        det: mean.determinant(),
        sample_count: samples.len(),
        tolerance,
        autonomous: max_deviation < tolerance,
        jacobian_mode: mode,
    })
}

/// Orientation character of an autonomous cocycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetSign {
    Plus,
    Minus,
    Fail,
}

pub fn determinant_check(report: &CocycleReport) -> DetSign {
    if (report.det.abs() - 1.0).abs() >= DET_TOL {
        DetSign::Fail
    } else if report.det > 0.0 {
        DetSign::Plus
    } else {
        DetSign::Minus
    }
}

/// Lyapunov exponents from QR re-orthonormalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    /// Averages over starting points, sorted descending.
    pub exponents: Vec<f64>,
    /// Max over exponent index of the spread across starting points.
    pub per_point_spread: f64,
    /// Exponents per starting point, each sorted descending.
    pub per_point: Vec<Vec<f64>>,
    pub n_iter: usize,
    /// Running estimates along the first orbit, one row per iteration.
    #[serde(skip)]
    pub history: Vec<Vec<f64>>,
}

fn orbit_exponents(
    phi: &Diffeo,
    framing: &Framing,
    manifold: &ModelManifold,
    start: &ChartPoint,
    n_iter: usize,
    keep_history: bool,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = framing.dim();
    // A frame aligned with invariant directions would stay stuck on them;
    // start generic and let it settle before accumulating.
    let mut q = generic_frame(n);
    let mut p = manifold.reduce_to_fundamental_domain(start)?;
    for _ in 0..warmup_steps(n_iter) {
        let c = derivative_cocycle(phi, framing, &p)?;
        q = (c * &q).qr().q();
        p = manifold.reduce_to_fundamental_domain(&phi.apply(&p))?;
    }
    let mut sums = vec![0.0; n];
    let mut history = Vec::new();
    for it in 0..n_iter {
        let c = derivative_cocycle(phi, framing, &p)?;
        let qr = (c * &q).qr();
        let r = qr.r();
        let mut qm = qr.q();
        for (k, s) in sums.iter_mut().enumerate() {
            let d = r[(k, k)];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::NotInvertible("cocycle became singular along orbit".into()));
            }
            *s += d.abs().ln();
            if d < 0.0 {
                let col = -qm.column(k);
                qm.set_column(k, &col);
            }
        }
        q = qm;
        p = manifold.reduce_to_fundamental_domain(&phi.apply(&p))?;
        if keep_history {
            history.push(sums.iter().map(|s| s / (it + 1) as f64).collect());
        }
    }
    let mut exps: Vec<f64> = sums.iter().map(|s| s / n_iter as f64).collect();
    exps.sort_by(|a, b| b.total_cmp(a));
    Ok((exps, history))
}

/// Orthonormal frame in general position with respect to coordinate
/// subspaces.
fn generic_frame(n: usize) -> Matrix {
    let m = Matrix::from_fn(n, n, |i, j| 1.0 / (i + 2 * j + 1) as f64 + if i == j { 0.5 } else { 0.0 });
    m.qr().q()
}

/// Unrecorded iterations before accumulation.
pub fn warmup_steps(n_iter: usize) -> usize {
    (n_iter / 10).max(20)
}

/// Lyapunov spectrum in the framing metric from several starting points.
/// Each orbit first runs [`warmup_steps`] iterations to align the frame.
pub fn lyapunov_exponents(
    phi: &Diffeo,
    framing: &Framing,
    manifold: &ModelManifold,
    starts: &[ChartPoint],
    n_iter: usize,
) -> Result<LyapunovSpectrum> {
    if starts.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if n_iter == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let results: Vec<(Vec<f64>, Vec<Vec<f64>>)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| orbit_exponents(phi, framing, manifold, s, n_iter, i == 0))
        .collect::<Result<_>>()?;
    let n = framing.dim();
    let per_point: Vec<Vec<f64>> = results.iter().map(|r| r.0.clone()).collect();
    let exponents: Vec<f64> = (0..n)
        .map(|k| per_point.iter().map(|e| e[k]).sum::<f64>() / per_point.len() as f64)
        .collect();
    let per_point_spread = (0..n)
        .map(|k| {
            let (lo, hi) = per_point
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e[k]), hi.max(e[k])));
            hi - lo
        })
        .fold(0.0, f64::max);
    Ok(LyapunovSpectrum {
        exponents,
        per_point_spread,
        per_point,
        n_iter,
        history: results.into_iter().next().map(|r| r.1).unwrap_or_default(),
    })
}

/// `log |eigenvalue|` of `m`, sorted descending.
pub fn log_moduli(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm().ln()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues of a partially hyperbolic cocycle ordered by modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialHyperbolicSpec {
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub lambda_u: f64,
}

impl PartialHyperbolicSpec {
    /// Eigenvalue attached to framing index `i` in the order `(s, c, u)`.
    pub fn lambda(&self, i: usize) -> f64 {
        [self.lambda_s, self.lambda_c, self.lambda_u][i]
    }
}

/// Checks `|λ_s| < 1 < |λ_u|` and `|λ_s| < |λ_c| < |λ_u|` (all strict).
pub fn verify_partial_hyperbolicity(m: &Matrix) -> Result<PartialHyperbolicSpec> {
    if m.nrows() != 3 || m.ncols() != 3 {
        return Err(Error::UnsupportedDimension {
            expected: 3,
            got: m.nrows(),
        });
    }
    let eig = m.complex_eigenvalues();
    let scale = eig.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    if let Some(z) = eig.iter().find(|z| z.im.abs() > 1e-9 * scale) {
        return Err(Error::NotRealDiagonalizable(z.im));
    }
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let (s, c, u) = (re[0], re[1], re[2]);
    let fail = |what: &str| Err(Error::NotPartiallyHyperbolic(format!("{what} violated by ({s}, {c}, {u})")));
    if s.abs() >= 1.0 {
        return fail("|λ_s| < 1");
    }
    if u.abs() <= 1.0 {
        return fail("|λ_u| > 1");
    }
    if s.abs() >= c.abs() {
        return fail("|λ_s| < |λ_c|");
    }
    if c.abs() >= u.abs() {
        return fail("|λ_c| < |λ_u|");
    }
    Ok(PartialHyperbolicSpec {
        lambda_s: s,
        lambda_c: c,
        lambda_u: u,
    })
}

/// Result of [`bracket_coefficient_equivariance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    /// `sup |β(φ p) - λ_k / (λ_i λ_j) β(p)|`.
    pub max_violation: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Largest off-`k` framing coordinate of `[X_i, X_j]`.
    pub proportionality_residual: f64,
}

/// Tests `β(φ(p)) = λ_k / (λ_i λ_j) β(p)` where `[X_i, X_j] = β X_k`, with
/// framing indices in the order `(s, c, u)`. Images are reduced to the
/// canonical box before evaluating brackets.
pub fn bracket_coefficient_equivariance(
    phi: &Diffeo,
    framing: &Framing,
    manifold: &ModelManifold,
    (i, j, k): (usize, usize, usize),
    spec: &PartialHyperbolicSpec,
    samples: &[ChartPoint],
    h: f64,
) -> Result<EquivarianceReport> {
    let factor = spec.lambda(k) / (spec.lambda(i) * spec.lambda(j));
    let rows: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|p| {
            let p = manifold.reduce_to_fundamental_domain(p)?;
            let q = manifold.reduce_to_fundamental_domain(&phi.apply(&p))?;
            let cp = bracket_coefficients(framing, i, j, &p, h)?;
            let cq = bracket_coefficients(framing, i, j, &q, h)?;
            let off = |c: &Vector| (0..c.len()).filter(|&l| l != k).map(|l| c[l].abs()).fold(0.0, f64::max);
            Ok((cp[k], (cq[k] - factor * cp[k]).abs(), off(&cp).max(off(&cq))))
        })
        .collect::<Result<_>>()?;
    let proportionality_residual = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    if proportionality_residual >= 1e-3 {
        return Err(Error::NotProportional {
            i,
            j,
            k,
            residual: proportionality_residual,
        });
    }
    Ok(EquivarianceReport {
        max_violation: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        beta_min: rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        beta_max: rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
        proportionality_residual,
    })
}

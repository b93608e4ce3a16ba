//! Vector fields and framings in chart coordinates, Lie brackets and
//! structure constants.
//!
//! Bracket convention: `[X, Y](p) = DY(p) X(p) - DX(p) Y(p)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::Diffeo;
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, ModelManifold, TangentVector};
use crate::linalg::{richardson_jacobian, Matrix, Vector};

/// Default finite-difference step for brackets.
pub const DEFAULT_BRACKET_STEP: f64 = 1e-3;
/// Structure tensors with sup-residual below this are constant-coefficient.
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-4;
/// Minimum |det| of a frame matrix.
pub const FRAME_DET_MIN: f64 = 1e-8;

type EvalFn = dyn Fn(&ChartPoint) -> TangentVector + Send + Sync;
type JacFn = dyn Fn(&ChartPoint) -> Matrix + Send + Sync;

/// A smooth vector field on the universal cover, optionally with an exact
/// chart Jacobian.
#[derive(Clone)]
pub struct VectorField {
    descriptor: String,
    dim: usize,
    eval: Arc<EvalFn>,
    jacobian: Option<Arc<JacFn>>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("descriptor", &self.descriptor)
            .field("dim", &self.dim)
            .field("exact_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl VectorField {
    pub fn new<F>(descriptor: impl Into<String>, dim: usize, eval: F) -> Self
    where
        F: Fn(&ChartPoint) -> TangentVector + Send + Sync + 'static,
    {
        Self {
            descriptor: descriptor.into(),
            dim,
            eval: Arc::new(eval),
            jacobian: None,
        }
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&ChartPoint) -> Matrix + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    /// Constant field with the given chart coordinates.
    pub fn constant(descriptor: impl Into<String>, v: &[f64]) -> Self {
        let n = v.len();
        let c = Vector::from_row_slice(v);
        Self::new(descriptor, n, move |_| c.clone()).with_jacobian(move |_| Matrix::zeros(n, n))
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, p: &ChartPoint) -> TangentVector {
        (self.eval)(p)
    }

    pub fn has_exact_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Exact Jacobian if available, otherwise Richardson-extrapolated
    /// central differences with step `h`.
    pub fn jacobian(&self, p: &ChartPoint, h: f64) -> Matrix {
        match &self.jacobian {
            Some(j) => j(p),
            None => richardson_jacobian(|q| self.eval(q), p, h),
        }
    }

    /// `scale * self`, keeping an exact Jacobian if present.
    pub fn scaled(&self, scale: f64) -> VectorField {
        let base = self.clone();
        let mut out = VectorField::new(format!("{}*{scale}", self.descriptor), self.dim, move |p| base.eval(p) * scale);
        if let Some(j) = self.jacobian.clone() {
            out = out.with_jacobian(move |p| j(p) * scale);
        }
        out
    }

    /// Constant-coefficient combination `Σ c_i X_i`.
    pub fn combination(descriptor: impl Into<String>, terms: &[(f64, VectorField)]) -> VectorField {
        let dim = terms.first().map_or(0, |t| t.1.dim);
        let exact = terms.iter().all(|t| t.1.has_exact_jacobian());
        let ev = terms.to_vec();
        let mut out = VectorField::new(descriptor, dim, move |p| {
            ev.iter().fold(Vector::zeros(dim), |acc, (c, x)| acc + x.eval(p) * *c)
        });
        if exact {
            let jt = terms.to_vec();
            out = out.with_jacobian(move |p| {
                jt.iter()
                    .fold(Matrix::zeros(dim, dim), |acc, (c, x)| acc + x.jacobian(p, DEFAULT_BRACKET_STEP) * *c)
            });
        }
        out
    }

    /// Sup over samples and deck generators of `|X(g p) - Dg X(p)|`.
    pub fn deck_equivariance_residual(&self, manifold: &ModelManifold, samples: &[ChartPoint]) -> f64 {
        let gens = manifold.deck_generators();
        samples
            .iter()
            .flat_map(|p| {
                gens.iter().map(move |g| {
                    let lhs = self.eval(&g.apply(p));
                    let rhs = g.jacobian(p) * self.eval(p);
                    (lhs - rhs).amax()
                })
            })
            .fold(0.0, f64::max)
    }
}

/// An ordered list of `n` vector fields on an `n`-dimensional cover.
#[derive(Clone, Debug)]
pub struct Framing {
    descriptor: String,
    fields: Vec<VectorField>,
}

impl Framing {
    pub fn new(descriptor: impl Into<String>, fields: Vec<VectorField>) -> Result<Self> {
        let n = fields.len();
        if let Some(bad) = fields.iter().find(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        Ok(Self {
            descriptor: descriptor.into(),
            fields,
        })
    }

    /// Coordinate framing `(∂_1, ..., ∂_n)`.
    pub fn canonical(n: usize) -> Self {
        let fields = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                VectorField::constant(format!("d{i}"), &e)
            })
            .collect();
        Self {
            descriptor: "canonical".into(),
            fields,
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    pub fn has_exact_jacobians(&self) -> bool {
        self.fields.iter().all(VectorField::has_exact_jacobian)
    }

    /// Frame matrix whose columns are the fields at `p`.
    pub fn matrix(&self, p: &ChartPoint) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (j, f) in self.fields.iter().enumerate() {
            m.set_column(j, &f.eval(p));
        }
        m
    }

    /// Checks linear independence at every sample point.
    pub fn check_independent(&self, samples: &[ChartPoint]) -> Result<()> {
        for p in samples {
            let det = self.matrix(p).determinant();
            if det.abs() <= FRAME_DET_MIN {
                return Err(Error::DegenerateFraming {
                    point: p.iter().copied().collect(),
                    det,
                });
            }
        }
        Ok(())
    }
}

/// `[X, Y](p) = DY X - DX Y`.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &ChartPoint, h: f64) -> Result<TangentVector> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    if x.dim() != p.len() || y.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: x.dim().max(y.dim()),
        });
    }
    Ok(y.jacobian(p, h) * x.eval(p) - x.jacobian(p, h) * y.eval(p))
}

/// Solves `F(p) c = v`.
pub fn coordinates_in_framing(v: &TangentVector, p: &ChartPoint, framing: &Framing) -> Result<Vector> {
    let m = framing.matrix(p);
    if v.len() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: v.len(),
        });
    }
    let det = m.determinant();
    let degenerate = || Error::DegenerateFraming {
        point: p.iter().copied().collect(),
        det,
    };
    if det.abs() <= 1e-12 {
        return Err(degenerate());
    }
    m.lu().solve(v).ok_or_else(degenerate)
}

/// Framing coordinates of `[X_i, X_j](p)`.
pub fn bracket_coefficients(framing: &Framing, i: usize, j: usize, p: &ChartPoint, h: f64) -> Result<Vector> {
    let b = lie_bracket(framing.field(i), framing.field(j), p, h)?;
    coordinates_in_framing(&b, p, framing)
}

/// Coefficients `a^{ij}_k` of `[X_i, X_j] = Σ_k a^{ij}_k X_k`, stored densely
/// and kept antisymmetric in `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    a: Vec<f64>,
    /// Sup over samples of `|[X_i,X_j] - Σ_k a^{ij}_k X_k|` (chart norm).
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    i: usize,
    j: usize,
    k: usize,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    dim: usize,
    entries: Vec<TensorEntry>,
    residual: f64,
}

impl Serialize for StructureTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    entries.push(TensorEntry {
                        i,
                        j,
                        k,
                        value: self.get(i, j, k),
                    });
                }
            }
        }
        TensorRepr {
            dim: self.dim,
            entries,
            residual: self.residual,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TensorRepr::deserialize(d)?;
        let mut t = StructureTensor::zero(repr.dim);
        for e in repr.entries {
            if e.i >= repr.dim || e.j >= repr.dim || e.k >= repr.dim || e.i == e.j {
                return Err(serde::de::Error::custom("structure tensor index out of range"));
            }
            t.set(e.i, e.j, e.k, e.value);
        }
        t.residual = repr.residual;
        Ok(t)
    }
}

impl StructureTensor {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            a: vec![0.0; dim * dim * dim],
            residual: 0.0,
        }
    }

    /// Builds a tensor from `(i, j, k, a^{ij}_k)` entries.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Self {
        let mut t = Self::zero(dim);
        for &(i, j, k, v) in entries {
            t.set(i, j, k, v);
        }
        t
    }

    /// The partially hyperbolic normal form in the order `(s, c, u)`:
    /// `[X_c,X_s] = a_cs X_s`, `[X_c,X_u] = a_cu X_u`, `[X_s,X_u] = a_su X_c`.
    pub fn normal_form(a_cs: f64, a_cu: f64, a_su: f64) -> Self {
        Self::from_entries(3, &[(1, 0, 0, a_cs), (1, 2, 2, a_cu), (0, 2, 1, a_su)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.a[self.idx(i, j, k)]
    }

    /// Sets `a^{ij}_k = v` and `a^{ji}_k = -v`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        if i == j {
            return;
        }
        let ij = self.idx(i, j, k);
        let ji = self.idx(j, i, k);
        self.a[ij] = v;
        self.a[ji] = -v;
    }

    /// Bracket of two algebra elements given in basis coordinates.
    pub fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let c = u[i] * v[j];
                if c == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += c * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_u`, columns indexed by basis vectors.
    pub fn ad(&self, u: &Vector) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let ej = Vector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
            m.set_column(j, &self.bracket(u, &ej));
        }
        m
    }

    /// Structure constants in the basis whose `i`-th vector is the `i`-th
    /// column of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<Self> {
        let n = self.dim;
        let p_inv = p.clone().try_inverse().ok_or_else(|| Error::NotInvertible("change of basis".into()))?;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let bi = p.column(i).into_owned();
                let bj = p.column(j).into_owned();
                let br = &p_inv * self.bracket(&bi, &bj);
                for k in 0..n {
                    out.set(i, j, k, br[k]);
                }
            }
        }
        out.residual = self.residual;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_constant(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

/// Sample-mean structure constants of a framing, with the sup residual of
/// the constant fit.
pub fn structure_constants(framing: &Framing, samples: &[ChartPoint], h: f64) -> Result<StructureTensor> {
    if samples.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            got: samples.len(),
        });
    }
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    let n = framing.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    // Per sample: bracket vectors and their framing coordinates for each pair.
    let per_sample: Vec<Vec<(TangentVector, Vector)>> = samples
        .par_iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(i, j)| {
                    let b = lie_bracket(framing.field(i), framing.field(j), p, h)?;
                    let c = coordinates_in_framing(&b, p, framing)?;
                    Ok((b, c))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = StructureTensor::zero(n);
    let count = samples.len() as f64;
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let mean = per_sample.iter().fold(Vector::zeros(n), |acc, s| acc + &s[pi].1) / count;
        for k in 0..n {
            t.set(i, j, k, mean[k]);
        }
    }
    let residual = samples
        .par_iter()
        .zip(per_sample.par_iter())
        .map(|(p, s)| {
            let frame = framing.matrix(p);
            pairs
                .iter()
                .enumerate()
                .map(|(pi, &(i, j))| {
                    let coeffs = Vector::from_fn(n, |k, _| t.get(i, j, k));
                    (&s[pi].0 - &frame * coeffs).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    t.residual = residual;
    Ok(t)
}

/// Cyclic sum `[[e0,e1],e2] + [[e1,e2],e0] + [[e2,e0],e1]` computed from the
/// structure constants.
pub fn jacobi_residual(t: &StructureTensor) -> Result<Vector> {
    if t.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            expected: 3,
            got: t.dim(),
        });
    }
    let e = |i: usize| Vector::from_fn(3, |r, _| if r == i { 1.0 } else { 0.0 });
    let mut sum = Vector::zeros(3);
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        sum += t.bracket(&t.bracket(&e(a), &e(b)), &e(c));
    }
    Ok(sum)
}

/// `(φ_* X)(p) = Dφ(φ⁻¹ p) X(φ⁻¹ p)`.
pub fn pushforward_field(phi: &Diffeo, x: &VectorField) -> Result<VectorField> {
    let inv = phi.inverse()?;
    let fwd = phi.clone();
    let field = x.clone();
    Ok(VectorField::new(
        format!("push({},{})", phi.descriptor(), x.descriptor()),
        x.dim(),
        move |p| {
            let q = inv.apply(p);
            fwd.jacobian(&q) * field.eval(&q)
        },
    ))
}

/// Right-invariant fields on the Heisenberg group: `X̃ = (1,0,y)`,
/// `Ỹ = (0,1,0)`, `Z̃ = (0,0,1)`; `[X̃, Ỹ] = -Z̃`.
pub fn heis_right_invariant() -> [VectorField; 3] {
    let x = VectorField::new("heis-right-invariant-X", 3, |p| Vector::from_row_slice(&[1.0, 0.0, p[1]]))
        .with_jacobian(|_| {
            let mut j = Matrix::zeros(3, 3);
            j[(2, 1)] = 1.0;
            j
        });
    [
        x,
        VectorField::constant("heis-right-invariant-Y", &[0.0, 1.0, 0.0]),
        VectorField::constant("heis-right-invariant-Z", &[0.0, 0.0, 1.0]),
    ]
}

/// Right-invariant fields on Sol: `T̃ = (1, v1, -v2)`, `X̃ = (0,1,0)`,
/// `Ỹ = (0,0,1)`; `[T̃, X̃] = -X̃`, `[T̃, Ỹ] = Ỹ`.
pub fn sol_right_invariant() -> [VectorField; 3] {
    let t = VectorField::new("sol-right-invariant-T", 3, |p| Vector::from_row_slice(&[1.0, p[1], -p[2]]))
        .with_jacobian(|_| Matrix::from_diagonal(&Vector::from_row_slice(&[0.0, 1.0, -1.0])));
    [
        t,
        VectorField::constant("sol-right-invariant-X", &[0.0, 1.0, 0.0]),
        VectorField::constant("sol-right-invariant-Y", &[0.0, 0.0, 1.0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    /// Fields with no exact Jacobian, forcing the finite-difference path.
    fn strip(f: &VectorField) -> VectorField {
        let g = f.clone();
        VectorField::new(f.descriptor().to_string(), f.dim(), move |p| g.eval(p))
    }

    #[test]
    fn brackets_of_model_fields() {
        let p = v(&[0.3, -0.4, 1.7]);
        let [x, y, _] = heis_right_invariant();
        let b = lie_bracket(&x, &y, &p, 1e-3).unwrap();
        assert!((b - v(&[0.0, 0.0, -1.0])).amax() < 1e-12);
        let b = lie_bracket(&strip(&x), &strip(&y), &p, 1e-3).unwrap();
        assert!((b - v(&[0.0, 0.0, -1.0])).amax() < 1e-9);

        let [t, sx, sy] = sol_right_invariant();
        let b = lie_bracket(&strip(&t), &strip(&sx), &p, 1e-3).unwrap();
        assert!((b - v(&[0.0, -1.0, 0.0])).amax() < 1e-9);
        let b = lie_bracket(&t, &sy, &p, 1e-3).unwrap();
        assert!((b - v(&[0.0, 0.0, 1.0])).amax() < 1e-12);

        let c = Framing::canonical(2);
        let b = lie_bracket(c.field(0), c.field(1), &v(&[0.1, 0.2]), 1e-3).unwrap();
        assert_eq!(b, v(&[0.0, 0.0]));
        assert!(matches!(lie_bracket(&x, &y, &p, 0.0), Err(Error::InvalidStep(_))));
    }

    #[test]
    fn coordinates_examples() {
        let [x, y, z] = heis_right_invariant();
        let f = Framing::new("heis", vec![x, y.clone(), z]).unwrap();
        let p = v(&[0.2, 0.9, 0.1]);
        let c = coordinates_in_framing(&y.eval(&p), &p, &f).unwrap();
        assert!((c - v(&[0.0, 1.0, 0.0])).amax() < 1e-14);
        assert_eq!(coordinates_in_framing(&Vector::zeros(3), &p, &f).unwrap(), Vector::zeros(3));
        let c3 = Framing::canonical(3);
        assert_eq!(coordinates_in_framing(&v(&[1.0, 2.0, 3.0]), &p, &c3).unwrap(), v(&[1.0, 2.0, 3.0]));
        let bad = Framing::new(
            "bad",
            vec![VectorField::constant("a", &[1.0, 0.0]), VectorField::constant("b", &[2.0, 0.0])],
        )
        .unwrap();
        assert!(matches!(
            coordinates_in_framing(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), &bad),
            Err(Error::DegenerateFraming { .. })
        ));
    }

    #[test]
    fn structure_constants_of_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vector> = (0..50).map(|_| v(&[rng.gen(), rng.gen(), rng.gen()])).collect();
        let t = structure_constants(&Framing::canonical(3), &pts, 1e-3).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert!(t.residual < 1e-8);

        let heis = Framing::new("heis", heis_right_invariant().iter().map(strip).collect()).unwrap();
        let t = structure_constants(&heis, &pts, 1e-3).unwrap();
        assert!((t.get(0, 1, 2) + 1.0).abs() < 1e-9);
        assert!(t.residual < 1e-6);
        assert!(t.is_constant(DEFAULT_CONSTANCY_TOL));

        let sol = Framing::new("sol", sol_right_invariant().to_vec()).unwrap();
        let t = structure_constants(&sol, &pts, 1e-3).unwrap();
        assert!((t.get(0, 1, 1) + 1.0).abs() < 1e-12);
        assert!((t.get(0, 2, 2) - 1.0).abs() < 1e-12);
        assert!(t.residual < 1e-6);
        assert!(matches!(
            structure_constants(&sol, &pts[..5], 1e-3),
            Err(Error::InsufficientSamples { needed: 10, got: 5 })
        ));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_residual(&StructureTensor::zero(3)).unwrap(), Vector::zeros(3));
        let r = jacobi_residual(&StructureTensor::normal_form(1.0, 1.0, 2.0)).unwrap();
        assert!((r - v(&[0.0, -4.0, 0.0])).amax() < 1e-15);
        let r = jacobi_residual(&StructureTensor::normal_form(1.0, -1.0, 1.0)).unwrap();
        assert_eq!(r, Vector::zeros(3));
        assert!(matches!(
            jacobi_residual(&StructureTensor::zero(2)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn right_invariant_fields_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let heis = ModelManifold::heis(2).unwrap();
        let pts = heis.sample_points(&mut rng, 100);
        for f in heis_right_invariant() {
            assert!(f.deck_equivariance_residual(&heis, &pts) < 1e-12);
        }
        let sol = ModelManifold::sol(&IntMatrix::from_flat2([2, 1, 1, 1])).unwrap();
        let pts = sol.sample_points(&mut rng, 100);
        for f in sol_right_invariant() {
            assert!(f.deck_equivariance_residual(&sol, &pts) < 1e-12);
        }
    }

    #[test]
    fn tensor_json_round_trip() {
        let t = StructureTensor::normal_form(1.0, -1.0, 0.5);
        let s = serde_json::to_string(&t).unwrap();
        let back: StructureTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    fn quadratic_field(c: [f64; 6]) -> VectorField {
        VectorField::new("q", 2, move |p| {
            v(&[
                c[0] * p[0] * p[1] + c[1] * p[1].sin(),
                c[2] * p[0] * p[0] + c[3] * p[1] + c[4] * (p[0] * c[5]).cos(),
            ])
        })
    }

    proptest! {
        #[test]
        fn bracket_antisymmetric_and_bilinear(
            c1 in prop::array::uniform6(-2.0f64..2.0),
            c2 in prop::array::uniform6(-2.0f64..2.0),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            x in -1.0f64..1.0, y in -1.0f64..1.0,
        ) {
            let (f, g) = (quadratic_field(c1), quadratic_field(c2));
            let p = v(&[x, y]);
            let fg = lie_bracket(&f, &g, &p, 1e-3).unwrap();
            let gf = lie_bracket(&g, &f, &p, 1e-3).unwrap();
            prop_assert!((&fg + &gf).amax() < 1e-9);
            let lhs = lie_bracket(&f.scaled(a), &g.scaled(b), &p, 1e-3).unwrap();
            prop_assert!((lhs - fg * (a * b)).amax() < 1e-8);
        }

        #[test]
        fn change_basis_round_trip(entries in prop::collection::vec(-2.0f64..2.0, 9), m in prop::collection::vec(-2.0f64..2.0, 9)) {
            let mut t = StructureTensor::zero(3);
            let mut it = entries.iter();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                for k in 0..3 {
                    t.set(i, j, k, *it.next().unwrap());
                }
            }
            let p = Matrix::from_row_slice(3, 3, &m) + Matrix::identity(3, 3) * 7.0;
            let back = t.change_basis(&p).unwrap().change_basis(&p.clone().try_inverse().unwrap()).unwrap();
            for i in 0..3 { for j in 0..3 { for k in 0..3 {
                prop_assert!((back.get(i, j, k) - t.get(i, j, k)).abs() < 1e-9);
            }}}
        }
    }
}

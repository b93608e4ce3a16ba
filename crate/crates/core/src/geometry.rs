//! Model manifolds as quotients of a universal cover by an explicit deck
//! group.
//!
//! Chart conventions (universal-cover coordinates):
//!
//! * `Torus { n }`: `R^n / Z^n`, canonical box `[0,1)^n`.
//! * `HeisQuotient { k }`: Mal'cev coordinates `(x, y, z)` with the law
//!   `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')`, i.e. the upper
//!   triangular matrix with entries `x`, `z` in the first row and `y` above
//!   the diagonal in the second. The lattice `Γ_k` is `{(m, n, l/k)}` acting
//!   on the right; canonical box `[0,1)^2 x [0,1/k)`.
//! * `SolQuotient`: coordinates `(t, v)` with the law
//!   `(t,v)(t',v') = (t+t', v + diag(e^t, e^-t) v')`. The lattice is
//!   `{(nα, P m)}` where `P` intertwines the diagonal action with the integer
//!   monodromy. The canonical domain is `t ∈ [0, α)` together with the
//!   sheared parallelogram `diag(e^t, e^-t) P [0,1)^2` in the fibre over `t`.
//! * `MappingTorus`: `T^2 x R` modulo integer translations of the base and
//!   the gluing `τ(x, t) = (f(x), t + 1)` with `f = A^m ∘ T_w`.
//! * `ProductT2xS1`: `R^3 / Z^3`, coordinates `(x, y, θ)`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Framing;
use crate::linalg::{frac, hyperbolic_eigen, IntMatrix, Matrix, Vector};

/// Point of the universal cover in chart coordinates.
pub type ChartPoint = Vector;
/// Tangent vector in chart coordinates.
pub type TangentVector = Vector;

/// Tolerance for deck-equivalence comparisons.
pub const DECK_TOL: f64 = 1e-9;
/// Default word radius for [`ModelManifold::deck_equivalent`].
pub const DEFAULT_WORD_RADIUS: usize = 3;

/// Serializable descriptor of a supported manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ManifoldKind {
    Torus { n: usize },
    HeisQuotient { k: u32 },
    SolQuotient { monodromy: IntMatrix },
    MappingTorus { base: IntMatrix, power: i32, shift: [f64; 2] },
    ProductT2xS1,
}

/// Lattice data of a Sol quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct SolLattice {
    /// Monodromy as given.
    pub monodromy: IntMatrix,
    /// Monodromy with positive eigenvalues (`sign(tr) * A`).
    pub positive: IntMatrix,
    /// `log` of the larger eigenvalue.
    pub alpha: f64,
    /// `P` with `diag(e^α, e^-α) P = P A₊`; lattice translations are `P Z^2`.
    pub p: Matrix,
    pub p_inv: Matrix,
}

impl SolLattice {
    pub fn new(monodromy: &IntMatrix) -> Result<Self> {
        if monodromy.dim() != 2 || monodromy.det() != 1 || monodromy.trace().abs() <= 2 {
            return Err(Error::NotHyperbolicMonodromy(monodromy.trace()));
        }
        let sign = monodromy.trace().signum();
        let positive = IntMatrix::from_flat2([
            sign * monodromy.get(0, 0),
            sign * monodromy.get(0, 1),
            sign * monodromy.get(1, 0),
            sign * monodromy.get(1, 1),
        ]);
        let eig = hyperbolic_eigen(&positive.to_f64())
            .ok_or(Error::NotHyperbolicMonodromy(monodromy.trace()))?;
        // Columns of Q are eigenvectors (larger eigenvalue first), sup-norm 1.
        let sup = |v: [f64; 2]| {
            let s = v[0].abs().max(v[1].abs());
            [v[0] / s, v[1] / s]
        };
        let qu = sup(eig.e_u);
        let qs = sup(eig.e_s);
        let q = DMatrix::from_row_slice(2, 2, &[qu[0], qs[0], qu[1], qs[1]]);
        let p = q.clone().try_inverse().expect("eigenbasis is invertible");
        Ok(Self {
            monodromy: monodromy.clone(),
            positive,
            alpha: eig.lambda_u.ln(),
            p_inv: q,
            p,
        })
    }

    /// `diag(e^t, e^-t)`.
    pub fn hyperbolic(t: f64) -> Matrix {
        DMatrix::from_row_slice(2, 2, &[t.exp(), 0.0, 0.0, (-t).exp()])
    }
}

/// Group laws of the simply connected covers.
pub mod group {
    /// Heisenberg product in Mal'cev coordinates.
    pub fn heis_mul(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]
    }

    pub fn heis_inv(a: [f64; 3]) -> [f64; 3] {
        [-a[0], -a[1], -a[2] + a[0] * a[1]]
    }

    /// Sol product `(t, v)(t', v') = (t + t', v + diag(e^t, e^-t) v')`.
    pub fn sol_mul(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] + b[0], a[1] + a[0].exp() * b[1], a[2] + (-a[0]).exp() * b[2]]
    }

    pub fn sol_inv(a: [f64; 3]) -> [f64; 3] {
        [-a[0], -(-a[0]).exp() * a[1], -a[0].exp() * a[2]]
    }
}

/// A single deck transformation of the universal cover.
#[derive(Clone, Debug, PartialEq)]
pub enum DeckTransform {
    /// `p ↦ p + v` (tori, products, mapping-torus base).
    Translate(Vec<f64>),
    /// `p ↦ p · γ` in the Heisenberg group.
    HeisRight([f64; 3]),
    /// `p ↦ p · γ` in Sol.
    SolRight([f64; 3]),
    /// Mapping-torus gluing `(x, t) ↦ (M (x + w), t + 1)`, or its inverse
    /// `(x, t) ↦ (M⁻¹ x - w, t - 1)` when `forward` is false. `matrix` is
    /// always the forward `A^m`.
    Gluing {
        matrix: IntMatrix,
        inverse: IntMatrix,
        shift: [f64; 2],
        forward: bool,
    },
}

impl DeckTransform {
    pub fn apply(&self, p: &ChartPoint) -> ChartPoint {
        match self {
            DeckTransform::Translate(v) => {
                Vector::from_iterator(p.len(), p.iter().zip(v).map(|(a, b)| a + b))
            }
            DeckTransform::HeisRight(g) => {
                Vector::from_row_slice(&group::heis_mul([p[0], p[1], p[2]], *g))
            }
            DeckTransform::SolRight(g) => {
                Vector::from_row_slice(&group::sol_mul([p[0], p[1], p[2]], *g))
            }
            DeckTransform::Gluing {
                matrix,
                inverse,
                shift,
                forward,
            } => {
                let (x, y) = (p[0], p[1]);
                let (nx, ny) = if *forward {
                    let (a, b) = (x + shift[0], y + shift[1]);
                    (
                        matrix.get(0, 0) as f64 * a + matrix.get(0, 1) as f64 * b,
                        matrix.get(1, 0) as f64 * a + matrix.get(1, 1) as f64 * b,
                    )
                } else {
                    (
                        inverse.get(0, 0) as f64 * x + inverse.get(0, 1) as f64 * y - shift[0],
                        inverse.get(1, 0) as f64 * x + inverse.get(1, 1) as f64 * y - shift[1],
                    )
                };
                let dt = if *forward { 1.0 } else { -1.0 };
                Vector::from_row_slice(&[nx, ny, p[2] + dt])
            }
        }
    }

    pub fn inverse(&self) -> DeckTransform {
        match self {
            DeckTransform::Translate(v) => DeckTransform::Translate(v.iter().map(|x| -x).collect()),
            DeckTransform::HeisRight(g) => DeckTransform::HeisRight(group::heis_inv(*g)),
            DeckTransform::SolRight(g) => DeckTransform::SolRight(group::sol_inv(*g)),
            DeckTransform::Gluing {
                matrix,
                inverse,
                shift,
                forward,
            } => DeckTransform::Gluing {
                matrix: matrix.clone(),
                inverse: inverse.clone(),
                shift: *shift,
                forward: !forward,
            },
        }
    }

    /// Chart Jacobian of the transformation at `p`.
    pub fn jacobian(&self, p: &ChartPoint) -> Matrix {
        match self {
            DeckTransform::Translate(v) => Matrix::identity(v.len(), v.len()),
            DeckTransform::HeisRight(g) => {
                // (x,y,z) ↦ (x+a, y+b, z+c+x b)
                let mut j = Matrix::identity(3, 3);
                j[(2, 0)] = g[1];
                j
            }
            DeckTransform::SolRight(g) => {
                // (t,v) ↦ (t+a, v1 + e^t b1, v2 + e^-t b2)
                let mut j = Matrix::identity(3, 3);
                j[(1, 0)] = p[0].exp() * g[1];
                j[(2, 0)] = -(-p[0]).exp() * g[2];
                j
            }
            DeckTransform::Gluing {
                matrix,
                inverse,
                forward,
                ..
            } => {
                let m = if *forward { matrix } else { inverse };
                let mut j = Matrix::identity(3, 3);
                for r in 0..2 {
                    for c in 0..2 {
                        j[(r, c)] = m.get(r, c) as f64;
                    }
                }
                j
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Cache {
    None,
    Sol(Box<SolLattice>),
    Gluing { forward: IntMatrix, inverse: IntMatrix },
}

/// A supported model manifold. Construct through the validating
/// constructors; the serialized form is its [`ManifoldKind`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ManifoldKind", into = "ManifoldKind")]
pub struct ModelManifold {
    kind: ManifoldKind,
    cache: Cache,
}

impl TryFrom<ManifoldKind> for ModelManifold {
    type Error = Error;

    fn try_from(kind: ManifoldKind) -> Result<Self> {
        match kind {
            ManifoldKind::Torus { n } => Self::torus(n),
            ManifoldKind::HeisQuotient { k } => Self::heis(k),
            ManifoldKind::SolQuotient { monodromy } => Self::sol(&monodromy),
            ManifoldKind::MappingTorus { base, power, shift } => Self::mapping_torus(&base, power, shift),
            ManifoldKind::ProductT2xS1 => Ok(Self::product_t2_s1()),
        }
    }
}

impl From<ModelManifold> for ManifoldKind {
    fn from(m: ModelManifold) -> Self {
        m.kind
    }
}

impl ModelManifold {
    pub fn torus(n: usize) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedManifold(format!("Torus({n}): dimension must be 2 or 3")));
        }
        Ok(Self {
            kind: ManifoldKind::Torus { n },
            cache: Cache::None,
        })
    }

    pub fn heis(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::UnsupportedManifold("HeisQuotient requires k >= 1".into()));
        }
        Ok(Self {
            kind: ManifoldKind::HeisQuotient { k },
            cache: Cache::None,
        })
    }

    pub fn sol(monodromy: &IntMatrix) -> Result<Self> {
        let lattice = SolLattice::new(monodromy)?;
        Ok(Self {
            kind: ManifoldKind::SolQuotient {
                monodromy: monodromy.clone(),
            },
            cache: Cache::Sol(Box::new(lattice)),
        })
    }

    pub fn mapping_torus(base: &IntMatrix, power: i32, shift: [f64; 2]) -> Result<Self> {
        if base.dim() != 2 || !base.is_unimodular() {
            return Err(Error::UnsupportedManifold("mapping torus base must be in GL(2,Z)".into()));
        }
        let forward = base.pow(power)?;
        let inverse = forward.inverse()?;
        Ok(Self {
            kind: ManifoldKind::MappingTorus {
                base: base.clone(),
                power,
                shift,
            },
            cache: Cache::Gluing { forward, inverse },
        })
    }

    pub fn product_t2_s1() -> Self {
        Self {
            kind: ManifoldKind::ProductT2xS1,
            cache: Cache::None,
        }
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            ManifoldKind::Torus { n } => n,
            _ => 3,
        }
    }

    pub fn sol_lattice(&self) -> Option<&SolLattice> {
        match &self.cache {
            Cache::Sol(l) => Some(l),
            _ => None,
        }
    }

    /// Generators of the deck group (inverses not included).
    pub fn deck_generators(&self) -> Vec<DeckTransform> {
        let unit = |n: usize, i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            DeckTransform::Translate(v)
        };
        match (&self.kind, &self.cache) {
            (ManifoldKind::Torus { n }, _) => (0..*n).map(|i| unit(*n, i)).collect(),
            (ManifoldKind::ProductT2xS1, _) => (0..3).map(|i| unit(3, i)).collect(),
            (ManifoldKind::HeisQuotient { k }, _) => vec![
                DeckTransform::HeisRight([1.0, 0.0, 0.0]),
                DeckTransform::HeisRight([0.0, 1.0, 0.0]),
                DeckTransform::HeisRight([0.0, 0.0, 1.0 / *k as f64]),
            ],
            (ManifoldKind::SolQuotient { .. }, Cache::Sol(l)) => vec![
                DeckTransform::SolRight([l.alpha, 0.0, 0.0]),
                DeckTransform::SolRight([0.0, l.p[(0, 0)], l.p[(1, 0)]]),
                DeckTransform::SolRight([0.0, l.p[(0, 1)], l.p[(1, 1)]]),
            ],
            (ManifoldKind::MappingTorus { shift, .. }, Cache::Gluing { forward, inverse }) => vec![
                unit(3, 0),
                unit(3, 1),
                DeckTransform::Gluing {
                    matrix: forward.clone(),
                    inverse: inverse.clone(),
                    shift: *shift,
                    forward: true,
                },
            ],
            _ => unreachable!("cache is built by the constructors"),
        }
    }

    fn check_dim(&self, p: &ChartPoint) -> Result<()> {
        if p.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Deck-equivalent representative of `p` inside the canonical box.
    pub fn reduce_to_fundamental_domain(&self, p: &ChartPoint) -> Result<ChartPoint> {
        self.check_dim(p)?;
        let mut q = p.clone();
        match (&self.kind, &self.cache) {
            (ManifoldKind::Torus { .. }, _) | (ManifoldKind::ProductT2xS1, _) => {
                q.iter_mut().for_each(|x| *x = frac(*x));
            }
            (ManifoldKind::HeisQuotient { k }, _) => {
                let kf = *k as f64;
                // Right-multiply by (0, -n, 0), then (-m, 0, 0), then (0, 0, -l/k).
                let n = q[1].floor();
                q[1] = frac(q[1]);
                q[2] -= q[0] * n;
                q[0] = frac(q[0]);
                let l = (q[2] * kf).floor();
                let z = q[2] - l / kf;
                q[2] = if z >= 1.0 / kf || z < 0.0 { frac(z * kf) / kf } else { z };
            }
            (ManifoldKind::SolQuotient { .. }, Cache::Sol(l)) => {
                let n = (q[0] / l.alpha).floor();
                let mut t = q[0] - n * l.alpha;
                if t >= l.alpha || t < 0.0 {
                    t = 0.0;
                }
                q[0] = t;
                // Fibre lattice over t is diag(e^t, e^-t) P Z^2.
                let basis = SolLattice::hyperbolic(t) * &l.p;
                let basis_inv = basis.clone().try_inverse().expect("invertible");
                let v = Vector::from_row_slice(&[q[1], q[2]]);
                let w = &basis_inv * &v;
                let wr = Vector::from_iterator(2, w.iter().map(|x| frac(*x)));
                let v2 = &basis * &wr;
                q[1] = v2[0];
                q[2] = v2[1];
            }
            (ManifoldKind::MappingTorus { shift, .. }, Cache::Gluing { forward, inverse }) => {
                let n = q[2].floor();
                let steps = n.abs().min(1e6) as usize;
                let tau = DeckTransform::Gluing {
                    matrix: forward.clone(),
                    inverse: inverse.clone(),
                    shift: *shift,
                    forward: n < 0.0,
                };
                for _ in 0..steps {
                    q = tau.apply(&q);
                    q[0] = frac(q[0]);
                    q[1] = frac(q[1]);
                }
                q[0] = frac(q[0]);
                q[1] = frac(q[1]);
                q[2] = frac(q[2]);
            }
            _ => unreachable!("cache is built by the constructors"),
        }
        Ok(q)
    }

    /// Whether `p` lies in the canonical box (componentwise half-open).
    pub fn in_canonical_box(&self, p: &ChartPoint) -> bool {
        let unit = |x: f64| (0.0..1.0).contains(&x);
        match (&self.kind, &self.cache) {
            (ManifoldKind::HeisQuotient { k }, _) => {
                unit(p[0]) && unit(p[1]) && (0.0..1.0 / *k as f64).contains(&p[2])
            }
            (ManifoldKind::SolQuotient { .. }, Cache::Sol(l)) => {
                if !(0.0..l.alpha).contains(&p[0]) {
                    return false;
                }
                let basis = SolLattice::hyperbolic(p[0]) * &l.p;
                let w = basis.try_inverse().expect("invertible") * Vector::from_row_slice(&[p[1], p[2]]);
                w.iter().all(|x| (-1e-12..1.0).contains(x))
            }
            _ => p.iter().all(|x| unit(*x)),
        }
    }

    /// True iff some deck word of length at most `word_radius` maps `p` to
    /// `q` within [`DECK_TOL`] (sup norm).
    pub fn deck_equivalent(&self, p: &ChartPoint, q: &ChartPoint, word_radius: usize) -> bool {
        if p.len() != q.len() || p.len() != self.dimension() {
            return false;
        }
        let close = |a: &ChartPoint| (a - q).amax() <= DECK_TOL;
        if close(p) {
            return true;
        }
        let mut letters = self.deck_generators();
        let inverses: Vec<_> = letters.iter().map(DeckTransform::inverse).collect();
        letters.extend(inverses);
        let mut frontier = vec![p.clone()];
        for _ in 0..word_radius {
            let mut next = Vec::with_capacity(frontier.len() * letters.len());
            for pt in &frontier {
                for g in &letters {
                    let img = g.apply(pt);
                    if close(&img) {
                        return true;
                    }
                    next.push(img);
                }
            }
            frontier = next;
        }
        false
    }

    /// Uniform sample from the canonical box.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ChartPoint {
        match (&self.kind, &self.cache) {
            (ManifoldKind::HeisQuotient { k }, _) => {
                Vector::from_row_slice(&[rng.gen(), rng.gen(), rng.gen::<f64>() / *k as f64])
            }
            (ManifoldKind::SolQuotient { .. }, Cache::Sol(l)) => {
                let t = rng.gen::<f64>() * l.alpha;
                let w = Vector::from_row_slice(&[rng.gen(), rng.gen()]);
                let v = SolLattice::hyperbolic(t) * &l.p * w;
                Vector::from_row_slice(&[t, v[0], v[1]])
            }
            _ => Vector::from_iterator(self.dimension(), (0..self.dimension()).map(|_| rng.gen())),
        }
    }

    pub fn sample_points<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<ChartPoint> {
        (0..count).map(|_| self.sample_point(rng)).collect()
    }
}

/// Length of `v` in the Riemannian metric that makes the framing
/// orthonormal at `p`.
pub fn frame_metric_norm(v: &TangentVector, p: &ChartPoint, framing: &Framing) -> Result<f64> {
    Ok(crate::fields::coordinates_in_framing(v, p, framing)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    #[test]
    fn torus_reduction_examples() {
        let t2 = ModelManifold::torus(2).unwrap();
        let r = t2.reduce_to_fundamental_domain(&v(&[2.3, -0.7])).unwrap();
        assert!((r - v(&[0.3, 0.3])).amax() < 1e-12);
        let t3 = ModelManifold::torus(3).unwrap();
        assert_eq!(t3.reduce_to_fundamental_domain(&v(&[0.0, 0.0, 0.0])).unwrap(), v(&[0.0, 0.0, 0.0]));
        assert!(matches!(ModelManifold::torus(4), Err(Error::UnsupportedManifold(_))));
        assert!(matches!(
            t2.reduce_to_fundamental_domain(&v(&[0.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn heis_reduction_is_deck_equivalent() {
        let h = ModelManifold::heis(1).unwrap();
        let p = v(&[1.5, 2.0, 0.25]);
        let r = h.reduce_to_fundamental_domain(&p).unwrap();
        assert!(h.in_canonical_box(&r));
        // Brute force: p · (m, n, l) for small integer words.
        let mut found = false;
        for m in -3..=3 {
            for n in -3..=3 {
                for l in -6..=6 {
                    let img = group::heis_mul([p[0], p[1], p[2]], [m as f64, n as f64, l as f64]);
                    if (v(&img) - &r).amax() < 1e-9 {
                        found = true;
                    }
                }
            }
        }
        assert!(found, "reduced point {r:?} not found among small deck words");
    }

    #[test]
    fn deck_equivalence_examples() {
        let t2 = ModelManifold::torus(2).unwrap();
        assert!(t2.deck_equivalent(&v(&[0.1, 0.1]), &v(&[1.1, -0.9]), 2));
        assert!(!t2.deck_equivalent(&v(&[0.1, 0.1]), &v(&[0.2, 0.1]), 3));
        let h = ModelManifold::heis(1).unwrap();
        assert!(h.deck_equivalent(&v(&[0.0, 0.0, 0.0]), &v(&[1.0, 0.0, 0.0]), 1));
    }

    #[test]
    fn generators_invert_and_respect_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
        let manifolds = vec![
            ModelManifold::torus(2).unwrap(),
            ModelManifold::heis(3).unwrap(),
            ModelManifold::sol(&cat).unwrap(),
            ModelManifold::mapping_torus(&cat, 1, [0.0, 0.0]).unwrap(),
            ModelManifold::product_t2_s1(),
        ];
        for m in &manifolds {
            for g in m.deck_generators() {
                for _ in 0..50 {
                    let p = m.sample_point(&mut rng);
                    let back = g.inverse().apply(&g.apply(&p));
                    assert!((back - &p).amax() < 1e-12, "{:?}", m.kind());
                }
            }
        }
        // Right multiplications commute with left multiplications.
        for _ in 0..50 {
            let a = [rng.gen(), rng.gen(), rng.gen()];
            let b: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            let g = [0.3, -1.0, 0.5];
            let lhs = DeckTransform::HeisRight(g).apply(&v(&group::heis_mul(a, b)));
            let rhs = group::heis_mul(a, {
                let x = DeckTransform::HeisRight(g).apply(&v(&b));
                [x[0], x[1], x[2]]
            });
            assert!((lhs - v(&rhs)).amax() < 1e-12);
            let lhs = DeckTransform::SolRight(g).apply(&v(&group::sol_mul(a, b)));
            let rhs = group::sol_mul(a, {
                let x = DeckTransform::SolRight(g).apply(&v(&b));
                [x[0], x[1], x[2]]
            });
            assert!((lhs - v(&rhs)).amax() < 1e-12);
        }
    }

    #[test]
    fn sol_lattice_intertwines_monodromy() {
        let l = SolLattice::new(&IntMatrix::from_flat2([2, 1, 1, 1])).unwrap();
        let lhs = SolLattice::hyperbolic(l.alpha) * &l.p;
        let rhs = &l.p * l.positive.to_f64();
        assert!((lhs - rhs).amax() < 1e-12);
        assert!(matches!(
            SolLattice::new(&IntMatrix::from_flat2([1, 1, 0, 1])),
            Err(Error::NotHyperbolicMonodromy(2))
        ));
    }

    #[test]
    fn reduction_is_idempotent_and_deck_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
        let manifolds = vec![
            ModelManifold::torus(3).unwrap(),
            ModelManifold::heis(2).unwrap(),
            ModelManifold::sol(&cat).unwrap(),
            ModelManifold::mapping_torus(&cat, 1, [0.0, 0.0]).unwrap(),
            ModelManifold::product_t2_s1(),
        ];
        for m in &manifolds {
            for _ in 0..10_000 {
                let p = m.sample_point(&mut rng) * 3.0 - Vector::repeat(m.dimension(), 1.0);
                let r = m.reduce_to_fundamental_domain(&p).unwrap();
                assert!(m.in_canonical_box(&r), "{:?} {r:?}", m.kind());
                let rr = m.reduce_to_fundamental_domain(&r).unwrap();
                assert!((&rr - &r).amax() < 1e-9, "{:?}", m.kind());
            }
            for g in m.deck_generators() {
                for _ in 0..200 {
                    // Keep away from box boundaries where the representative flips.
                    let p = m.sample_point(&mut rng);
                    let r0 = m.reduce_to_fundamental_domain(&p).unwrap();
                    let r1 = m.reduce_to_fundamental_domain(&g.apply(&p)).unwrap();
                    let wrapped = (&r1 - &r0).iter().all(|d| d.abs() < 1e-9);
                    assert!(wrapped || m.deck_equivalent(&r0, &r1, 2), "{:?}", m.kind());
                }
            }
        }
    }
}

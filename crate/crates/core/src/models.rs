//! Constructors for the model systems: toral affine maps, Heisenberg
//! automorphisms, Sol translations, suspensions, circle extensions and the
//! parabolic twist.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cocycle::Diffeo;
use crate::error::{Error, Result};
use crate::fields::{heis_right_invariant, sol_right_invariant, structure_constants, Framing, StructureTensor, VectorField};
use crate::geometry::{group, ChartPoint, ModelManifold, SolLattice};
use crate::linalg::{circle_diff, frac, hyperbolic_eigen, HyperbolicEigen, IntMatrix, Matrix, Vector};

/// Amplitude of the shear in the perturbed cat map.
pub const PERTURBATION_AMPLITUDE: f64 = 0.1;
/// Default framing warp for suspensions.
pub const DEFAULT_SUSPENSION_WARP: f64 = 0.05;

/// A model manifold, a framing, and a diffeomorphism.
#[derive(Clone, Debug)]
pub struct FramedSystem {
    pub name: String,
    pub manifold: ModelManifold,
    pub framing: Framing,
    pub map: Diffeo,
    pub data: SystemData,
}

impl FramedSystem {
    pub fn dim(&self) -> usize {
        self.manifold.dimension()
    }

    pub fn sample_points<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<ChartPoint> {
        self.manifold.sample_points(rng, count)
    }

    pub fn structure_tensor(&self, samples: &[ChartPoint], h: f64) -> Result<StructureTensor> {
        structure_constants(&self.framing, samples, h)
    }

    /// True when the framing is ordered `(s, c, u)` and the cocycle is
    /// diagonal in it.
    pub fn eigen_adapted(&self) -> bool {
        match &self.data {
            SystemData::Heis(h) => h.eigen_framing,
            SystemData::Sol(_) | SystemData::Suspension(_) => true,
            SystemData::CircleExtension(c) => c.base_framing == BaseFraming::Eigen,
            _ => false,
        }
    }
}

/// Constructor parameters, kept for reports and downstream analyses.
#[derive(Clone, Debug)]
pub enum SystemData {
    ToralAffine { a: IntMatrix, v: Vec<f64> },
    PerturbedCat,
    Heis(HeisAutomorphismData),
    Sol(SolTranslationData),
    Suspension(SuspensionData),
    CircleExtension(CircleExtensionData),
    ParabolicTwist { k: i64, eps: f64 },
}

fn canonical_frame_check(a: &IntMatrix) -> Result<()> {
    if !a.is_unimodular() {
        return Err(Error::NotUnimodular(a.det() as f64));
    }
    Ok(())
}

/// `p ↦ A p + v` on the torus with the coordinate framing.
pub fn toral_affine(a: &IntMatrix, v: &[f64]) -> Result<FramedSystem> {
    canonical_frame_check(a)?;
    let n = a.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let manifold = ModelManifold::torus(n)?;
    let map = Diffeo::affine(format!("affine{:?}", Vec::<Vec<i64>>::from(a.clone())), a.to_f64(), Vector::from_row_slice(v))?;
    Ok(FramedSystem {
        name: "toral-affine".into(),
        manifold,
        framing: Framing::canonical(n),
        map,
        data: SystemData::ToralAffine {
            a: a.clone(),
            v: v.to_vec(),
        },
    })
}

/// The cat map `[[2,1],[1,1]]`.
pub fn cat_map() -> FramedSystem {
    let mut s = toral_affine(&IntMatrix::from_flat2([2, 1, 1, 1]), &[0.0, 0.0]).expect("cat map is unimodular");
    s.name = "cat-map".into();
    s
}

/// Companion matrix of `λ³ - 5λ² + 6λ - 1`: integer, determinant 1, three
/// real eigenvalues none of unit modulus.
pub fn anosov_3d_matrix() -> IntMatrix {
    IntMatrix::from_rows([[0, 0, 1], [1, 0, -6], [0, 1, 5]])
}

/// Cat map composed with the shear `(x, y) ↦ (x + 0.1 sin 2πy, y)`, with the
/// coordinate framing. Not autonomous.
pub fn perturbed_cat() -> FramedSystem {
    let eps = PERTURBATION_AMPLITUDE;
    let shear = move |p: &ChartPoint| Vector::from_row_slice(&[p[0] + eps * (TAU * p[1]).sin(), p[1]]);
    let map = Diffeo::new("cat∘shear", 2, move |p| {
        let q = shear(p);
        Vector::from_row_slice(&[2.0 * q[0] + q[1], q[0] + q[1]])
    })
    .with_inverse(move |p| {
        let (x, y) = (p[0] - p[1], 2.0 * p[1] - p[0]);
        Vector::from_row_slice(&[x - eps * (TAU * y).sin(), y])
    })
    .with_jacobian(move |p| {
        let s = eps * TAU * (TAU * p[1]).cos();
        Matrix::from_row_slice(2, 2, &[2.0, 2.0 * s + 1.0, 1.0, s + 1.0])
    });
    FramedSystem {
        name: "perturbed-cat".into(),
        manifold: ModelManifold::torus(2).expect("valid"),
        framing: Framing::canonical(2),
        map,
        data: SystemData::PerturbedCat,
    }
}

/// Data of a lattice-preserving Heisenberg automorphism
/// `(x, y, z) ↦ (B(x, y), det(B) z + c(x, y))`, optionally followed by a
/// left translation.
#[derive(Clone, Debug)]
pub struct HeisAutomorphismData {
    pub b: IntMatrix,
    pub k: u32,
    pub left: Option<[f64; 3]>,
    pub eigen_framing: bool,
}

impl HeisAutomorphismData {
    fn entries(&self) -> (f64, f64, f64, f64) {
        let g = |i, j| self.b.get(i, j) as f64;
        (g(0, 0), g(0, 1), g(1, 0), g(1, 1))
    }

    /// `c(x, y) = pr x(x-1)/2 + qs y(y-1)/2 + qr x y`.
    pub fn correction(&self, x: f64, y: f64) -> f64 {
        let (p, q, r, s) = self.entries();
        p * r * x * (x - 1.0) / 2.0 + q * s * y * (y - 1.0) / 2.0 + q * r * x * y
    }

    /// The automorphism itself (without left translation).
    pub fn apply(&self, a: [f64; 3]) -> [f64; 3] {
        let (p, q, r, s) = self.entries();
        let det = self.b.det() as f64;
        [p * a[0] + q * a[1], r * a[0] + s * a[1], det * a[2] + self.correction(a[0], a[1])]
    }

    /// `|φ(ab) - φ(a)φ(b)|` (sup norm).
    pub fn homomorphism_defect(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let lhs = self.apply(group::heis_mul(a, b));
        let rhs = group::heis_mul(self.apply(a), self.apply(b));
        (0..3).map(|i| (lhs[i] - rhs[i]).abs()).fold(0.0, f64::max)
    }

    /// Derivative at the identity, i.e. the induced Lie algebra map in the
    /// basis `(X̃, Ỹ, Z̃)`.
    pub fn algebra_matrix(&self) -> Matrix {
        let (p, q, r, s) = self.entries();
        let det = self.b.det() as f64;
        Matrix::from_row_slice(3, 3, &[p, q, 0.0, r, s, 0.0, -p * r / 2.0, -q * s / 2.0, det])
    }

    fn jacobian(&self, a: &ChartPoint) -> Matrix {
        let (p, q, r, s) = self.entries();
        let det = self.b.det() as f64;
        let cx = p * r * (2.0 * a[0] - 1.0) / 2.0 + q * r * a[1];
        let cy = q * s * (2.0 * a[1] - 1.0) / 2.0 + q * r * a[0];
        Matrix::from_row_slice(3, 3, &[p, q, 0.0, r, s, 0.0, cx, cy, det])
    }
}

fn heis_lattice_check(data: &HeisAutomorphismData) -> Result<()> {
    let kf = data.k as f64;
    let gens = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0 / kf]];
    for g in gens {
        let img = data.apply(g);
        let off = [img[0], img[1], img[2] * kf].iter().map(|x| (x - x.round()).abs()).fold(0.0, f64::max);
        if off > 1e-9 {
            return Err(Error::LatticeNotPreserved(format!("generator {g:?} maps to {img:?}")));
        }
    }
    Ok(())
}

fn heis_map(data: &HeisAutomorphismData) -> Result<Diffeo> {
    let inv_b = data.b.inverse()?;
    let (fwd, inv, jac) = (data.clone(), data.clone(), data.clone());
    let (ip, iq, ir, is) = (
        inv_b.get(0, 0) as f64,
        inv_b.get(0, 1) as f64,
        inv_b.get(1, 0) as f64,
        inv_b.get(1, 1) as f64,
    );
    let det = data.b.det() as f64;
    let left = data.left;
    Ok(Diffeo::new("heis-automorphism", 3, move |p| {
        let mut q = fwd.apply([p[0], p[1], p[2]]);
        if let Some(g) = left {
            q = group::heis_mul(g, q);
        }
        Vector::from_row_slice(&q)
    })
    .with_inverse(move |p| {
        let mut q = [p[0], p[1], p[2]];
        if let Some(g) = left {
            q = group::heis_mul(group::heis_inv(g), q);
        }
        let (x, y) = (ip * q[0] + iq * q[1], ir * q[0] + is * q[1]);
        let z = (q[2] - inv.correction(x, y)) / det;
        Vector::from_row_slice(&[x, y, z])
    })
    .with_jacobian(move |p| {
        let j = jac.jacobian(p);
        match left {
            Some(g) => {
                let mut lg = Matrix::identity(3, 3);
                lg[(2, 1)] = g[0];
                lg * j
            }
            None => j,
        }
    }))
}

/// Lattice-preserving automorphism of `Heis / Γ_k` for any `B ∈ GL(2,Z)`,
/// optionally post-composed with the left translation by `left`, with the
/// right-invariant framing `(X̃, Ỹ, Z̃)`.
pub fn heis_automorphism(b: &IntMatrix, k: u32, left: Option<[f64; 3]>) -> Result<FramedSystem> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    canonical_frame_check(b)?;
    let data = HeisAutomorphismData {
        b: b.clone(),
        k,
        left,
        eigen_framing: false,
    };
    heis_lattice_check(&data)?;
    Ok(FramedSystem {
        name: "heis-automorphism".into(),
        manifold: ModelManifold::heis(k)?,
        framing: Framing::new("heis-right-invariant", heis_right_invariant().to_vec())?,
        map: heis_map(&data)?,
        data: SystemData::Heis(data),
    })
}

/// Partially hyperbolic Heisenberg automorphism for hyperbolic `B`, with
/// the right-invariant framing adapted to `(stable, center, unstable)`; its
/// cocycle is `diag(λ_s, det B, λ_u)`.
pub fn heis_system(b: &IntMatrix, k: u32) -> Result<FramedSystem> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    canonical_frame_check(b)?;
    let eig = hyperbolic_eigen(&b.to_f64())
        .ok_or_else(|| Error::NotPartiallyHyperbolic(format!("B with trace {} is not hyperbolic", b.trace())))?;
    let mut sys = heis_automorphism(b, k, None)?;
    let data = match &mut sys.data {
        SystemData::Heis(d) => {
            d.eigen_framing = true;
            d.clone()
        }
        _ => unreachable!(),
    };
    let (p, q, r, s) = data.entries();
    let det = b.det() as f64;
    let lift = |u: [f64; 2], lambda: f64| -> [f64; 3] {
        let w = (-p * r * u[0] - q * s * u[1]) / (2.0 * (lambda - det));
        [u[0], u[1], w]
    };
    let [x, y, z] = heis_right_invariant();
    let field = |name: &str, c: [f64; 3]| {
        VectorField::combination(name, &[(c[0], x.clone()), (c[1], y.clone()), (c[2], z.clone())])
    };
    sys.framing = Framing::new(
        "heis-eigen",
        vec![
            field("heis-stable", lift(eig.e_s, eig.lambda_s)),
            z.clone(),
            field("heis-unstable", lift(eig.e_u, eig.lambda_u)),
        ],
    )?;
    sys.name = "heis".into();
    Ok(sys)
}

/// Data of the Sol translation by `(α, 0)`.
#[derive(Clone, Debug)]
pub struct SolTranslationData {
    pub lattice: SolLattice,
    pub alpha: f64,
}

/// Left translation by `(α, 0)` on the Sol quotient with monodromy `A`,
/// with the right-invariant framing ordered `(Ỹ, T̃, X̃)`; cocycle
/// `diag(e^-α, 1, e^α)`.
pub fn sol_system(a: &IntMatrix) -> Result<FramedSystem> {
    let manifold = ModelManifold::sol(a)?;
    let lattice = manifold.sol_lattice().expect("sol manifold").clone();
    let alpha = lattice.alpha;
    let (ea, eb) = (alpha.exp(), (-alpha).exp());
    let map = Diffeo::new("sol-translation", 3, move |p| Vector::from_row_slice(&[p[0] + alpha, ea * p[1], eb * p[2]]))
        .with_inverse(move |p| Vector::from_row_slice(&[p[0] - alpha, eb * p[1], ea * p[2]]))
        .with_jacobian(move |_| Matrix::from_diagonal(&Vector::from_row_slice(&[1.0, ea, eb])));
    let [t, x, y] = sol_right_invariant();
    Ok(FramedSystem {
        name: "sol".into(),
        manifold,
        framing: Framing::new("sol-right-invariant", vec![y, t, x])?,
        map,
        data: SystemData::Sol(SolTranslationData { lattice, alpha }),
    })
}

/// Data of a suspension of `A` glued by `f = A^m ∘ T_w`.
#[derive(Clone, Debug)]
pub struct SuspensionData {
    pub a: IntMatrix,
    pub power: i32,
    pub shift: [f64; 2],
    pub warp: f64,
    pub eigen: HyperbolicEigen,
}

impl SuspensionData {
    /// `(log-scale of X_s, log-scale of X_u)` at height `t`.
    pub fn scales(&self, t: f64) -> (f64, f64) {
        let m = self.power as f64;
        let w = self.warp * (TAU * t).sin();
        (m * self.eigen.lambda_s.abs().ln() * t + w, m * self.eigen.lambda_u.abs().ln() * t - w)
    }

    /// `a_cs(t)`, the coefficient in `[X_c, X_s] = a_cs X_s`.
    pub fn a_cs(&self, t: f64) -> f64 {
        self.power as f64 * self.eigen.lambda_s.abs().ln() + TAU * self.warp * (TAU * t).cos()
    }
}

/// Suspension of the Anosov map `A` on the mapping torus of
/// `f = A^m ∘ T_w`. The map is `(x, t) ↦ (A x, t)`; the framing is
/// `(e^{g_s(t)} e_s, ∂_t, e^{g_u(t)} e_u)` with
/// `g_{s,u}(t) = m log|λ_{s,u}| t ± warp sin 2πt`, which makes the bracket
/// coefficients depend on `t` whenever `warp ≠ 0`.
pub fn suspension(a: &IntMatrix, power: i32, shift: [f64; 2], warp: f64) -> Result<FramedSystem> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    canonical_frame_check(a)?;
    let eigen = hyperbolic_eigen(&a.to_f64())
        .ok_or_else(|| Error::NotPartiallyHyperbolic(format!("suspension base with trace {} is not Anosov", a.trace())))?;
    let f = a.pow(power)?.to_f64();
    let af = a.to_f64();
    // Commutation of A and f on the torus.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut dev = 0.0f64;
    for _ in 0..1000 {
        let x = Vector::from_row_slice(&[rng.gen(), rng.gen()]);
        let w = Vector::from_row_slice(&shift);
        let afx = &af * (&f * (&x + &w));
        let fax = &f * (&af * &x + &w);
        dev = dev.max(circle_diff(afx[0], fax[0]).abs()).max(circle_diff(afx[1], fax[1]).abs());
    }
    if dev > 1e-8 {
        return Err(Error::NotCommuting(dev));
    }
    if eigen.lambda_s.powi(power) <= 0.0 {
        return Err(Error::NotPartiallyHyperbolic(
            "gluing power reverses the eigendirections; use an even power".into(),
        ));
    }
    let manifold = ModelManifold::mapping_torus(a, power, shift)?;
    let a_inv = a.inverse()?.to_f64();
    let af2 = af.clone();
    let map = Diffeo::new("suspension", 3, move |p| {
        let x = &af * Vector::from_row_slice(&[p[0], p[1]]);
        Vector::from_row_slice(&[x[0], x[1], p[2]])
    })
    .with_inverse(move |p| {
        let x = &a_inv * Vector::from_row_slice(&[p[0], p[1]]);
        Vector::from_row_slice(&[x[0], x[1], p[2]])
    })
    .with_jacobian(move |_| {
        let mut j = Matrix::identity(3, 3);
        j.view_mut((0, 0), (2, 2)).copy_from(&af2);
        j
    });
    let data = SuspensionData {
        a: a.clone(),
        power,
        shift,
        warp,
        eigen,
    };
    let mk = |name: &str, dir: [f64; 2], stable: bool| {
        let (d1, d2) = (data.clone(), data.clone());
        VectorField::new(name, 3, move |p| {
            let (gs, gu) = d1.scales(p[2]);
            let s = if stable { gs } else { gu }.exp();
            Vector::from_row_slice(&[s * dir[0], s * dir[1], 0.0])
        })
        .with_jacobian(move |p| {
            let (gs, gu) = d2.scales(p[2]);
            let m = d2.power as f64;
            let wcos = TAU * d2.warp * (TAU * p[2]).cos();
            let (g, dg) = if stable {
                (gs, m * d2.eigen.lambda_s.abs().ln() + wcos)
            } else {
                (gu, m * d2.eigen.lambda_u.abs().ln() - wcos)
            };
            let s = g.exp() * dg;
            let mut j = Matrix::zeros(3, 3);
            j[(0, 2)] = s * dir[0];
            j[(1, 2)] = s * dir[1];
            j
        })
    };
    let framing = Framing::new(
        "suspension-eigen",
        vec![
            mk("suspension-stable", data.eigen.e_s, true),
            VectorField::constant("suspension-dt", &[0.0, 0.0, 1.0]),
            mk("suspension-unstable", data.eigen.e_u, false),
        ],
    )?;
    Ok(FramedSystem {
        name: "suspension".into(),
        manifold,
        framing,
        map,
        data: SystemData::Suspension(data),
    })
}

/// One Fourier mode `cos·cos(2π k·x) + sin·sin(2π k·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub kx: i32,
    pub ky: i32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Real trigonometric polynomial on `T^2`, the fibre phase `r` of a circle
/// extension (in turns).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierSum {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<FourierTerm>,
}

impl FourierSum {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            terms: Vec::new(),
        }
    }

    /// `amplitude · sin(2π x)`.
    pub fn sin_x(amplitude: f64) -> Self {
        Self {
            constant: 0.0,
            terms: vec![FourierTerm {
                kx: 1,
                ky: 0,
                cos: 0.0,
                sin: amplitude,
            }],
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| (t.kx == 0 && t.ky == 0) || (t.cos == 0.0 && t.sin == 0.0))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, t| {
            let a = TAU * (t.kx as f64 * x + t.ky as f64 * y);
            acc + t.cos * a.cos() + t.sin * a.sin()
        })
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.terms.iter().fold([0.0, 0.0], |acc, t| {
            let a = TAU * (t.kx as f64 * x + t.ky as f64 * y);
            let d = TAU * (t.sin * a.cos() - t.cos * a.sin());
            [acc[0] + d * t.kx as f64, acc[1] + d * t.ky as f64]
        })
    }

    /// `dr_x(v)`.
    pub fn directional(&self, x: f64, y: f64, v: [f64; 2]) -> f64 {
        let g = self.gradient(x, y);
        g[0] * v[0] + g[1] * v[1]
    }
}

/// Which base framing the horizontal lifts of a circle extension follow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseFraming {
    /// `(∂_θ, H(∂_x), H(∂_y))`, cocycle `diag(1, A)`.
    #[default]
    Canonical,
    /// `(H(e_s), ∂_θ, H(e_u))`, cocycle `diag(λ_s, 1, λ_u)`.
    Eigen,
}

/// Data of the circle extension `(x, θ) ↦ (A x, θ + r(x))`.
#[derive(Clone, Debug)]
pub struct CircleExtensionData {
    pub a: IntMatrix,
    pub rho: FourierSum,
    pub eigen: HyperbolicEigen,
    pub base_framing: BaseFraming,
    /// Number of terms in the invariant-slope series.
    pub series_terms: usize,
}

fn apply2(m: &IntMatrix, x: f64, y: f64) -> (f64, f64) {
    (
        m.get(0, 0) as f64 * x + m.get(0, 1) as f64 * y,
        m.get(1, 0) as f64 * x + m.get(1, 1) as f64 * y,
    )
}

impl CircleExtensionData {
    /// Invariant vertical slope over `e_u`:
    /// `σ_u(x) = Σ_{n≥1} λ_u^{-n} dr_{A^{-n} x}(e_u)`, truncated to `terms`.
    pub fn unstable_slope(&self, x: f64, y: f64, terms: usize) -> f64 {
        let inv = self.a.inverse().expect("unimodular");
        let (mut px, mut py) = (frac(x), frac(y));
        let mut weight = 1.0;
        let mut sum = 0.0;
        for _ in 0..terms {
            let (nx, ny) = apply2(&inv, px, py);
            px = frac(nx);
            py = frac(ny);
            weight /= self.eigen.lambda_u;
            sum += weight * self.rho.directional(px, py, self.eigen.e_u);
        }
        sum
    }

    /// Invariant vertical slope over `e_s`:
    /// `σ_s(x) = -Σ_{n≥0} λ_s^n dr_{A^n x}(e_s)`, truncated to `terms`.
    pub fn stable_slope(&self, x: f64, y: f64, terms: usize) -> f64 {
        let (mut px, mut py) = (frac(x), frac(y));
        let mut weight = 1.0;
        let mut sum = 0.0;
        for _ in 0..terms {
            sum -= weight * self.rho.directional(px, py, self.eigen.e_s);
            let (nx, ny) = apply2(&self.a, px, py);
            px = frac(nx);
            py = frac(ny);
            weight *= self.eigen.lambda_s;
        }
        sum
    }

    /// Vertical component of the invariant horizontal lift of the base
    /// vector `v`.
    pub fn lift_slope(&self, x: f64, y: f64, v: [f64; 2]) -> f64 {
        // v = a_s e_s + a_u e_u
        let (es, eu) = (self.eigen.e_s, self.eigen.e_u);
        let det = es[0] * eu[1] - es[1] * eu[0];
        let a_s = (v[0] * eu[1] - v[1] * eu[0]) / det;
        let a_u = (es[0] * v[1] - es[1] * v[0]) / det;
        let n = self.series_terms;
        let mut out = 0.0;
        if a_s != 0.0 {
            out += a_s * self.stable_slope(x, y, n);
        }
        if a_u != 0.0 {
            out += a_u * self.unstable_slope(x, y, n);
        }
        out
    }
}

fn series_terms(eigen: &HyperbolicEigen) -> usize {
    let rate = eigen.lambda_u.abs().ln().min(-eigen.lambda_s.abs().ln());
    ((18.0 * std::f64::consts::LN_10) / rate).ceil() as usize + 1
}

/// Circle extension `(x, θ) ↦ (A x, θ + r(x))` of an Anosov map of `T^2` on
/// `T^2 × S^1`, framed by the vertical field and the invariant horizontal
/// lifts of the chosen base framing.
pub fn circle_extension(a: &IntMatrix, rho: FourierSum, base_framing: BaseFraming) -> Result<FramedSystem> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    canonical_frame_check(a)?;
    let eigen = hyperbolic_eigen(&a.to_f64())
        .ok_or_else(|| Error::NotPartiallyHyperbolic(format!("base with trace {} is not Anosov", a.trace())))?;
    let data = CircleExtensionData {
        a: a.clone(),
        rho: rho.clone(),
        series_terms: series_terms(&eigen),
        eigen,
        base_framing,
    };
    let inv = a.inverse()?;
    let (a1, a2, a3) = (a.clone(), a.to_f64(), rho.clone());
    let r1 = rho.clone();
    let map = Diffeo::new("circle-extension", 3, move |p| {
        let (x, y) = apply2(&a1, p[0], p[1]);
        Vector::from_row_slice(&[x, y, p[2] + r1.eval(p[0], p[1])])
    })
    .with_inverse(move |p| {
        let (x, y) = apply2(&inv, p[0], p[1]);
        Vector::from_row_slice(&[x, y, p[2] - a3.eval(x, y)])
    })
    .with_jacobian(move |p| {
        let g = rho.gradient(p[0], p[1]);
        let mut j = Matrix::identity(3, 3);
        j.view_mut((0, 0), (2, 2)).copy_from(&a2);
        j[(2, 0)] = g[0];
        j[(2, 1)] = g[1];
        j
    });
    let lift = |name: &str, v: [f64; 2]| {
        let d = Arc::new(data.clone());
        VectorField::new(name, 3, move |p| Vector::from_row_slice(&[v[0], v[1], d.lift_slope(p[0], p[1], v)]))
    };
    let vertical = VectorField::constant("vertical", &[0.0, 0.0, 1.0]);
    let fields = match base_framing {
        BaseFraming::Canonical => vec![vertical, lift("horizontal-x", [1.0, 0.0]), lift("horizontal-y", [0.0, 1.0])],
        BaseFraming::Eigen => vec![
            lift("horizontal-stable", data.eigen.e_s),
            vertical,
            lift("horizontal-unstable", data.eigen.e_u),
        ],
    };
    Ok(FramedSystem {
        name: "circle-extension".into(),
        manifold: ModelManifold::product_t2_s1(),
        framing: Framing::new("circle-extension", fields)?,
        map,
        data: SystemData::CircleExtension(data),
    })
}

/// Parabolic twist `(x, y) ↦ (x + α(y), y)` with `α(y) = k y + eps sin 2πy`,
/// framed by `(∂_x, ∂_y / α'(y))`; its cocycle is `[[1, 1], [0, 1]]`.
pub fn parabolic_twist(k: i64, eps: f64) -> Result<FramedSystem> {
    let kf = k as f64;
    if kf.abs() <= TAU * eps.abs() {
        return Err(Error::NotLocalDiffeo(kf.abs() - TAU * eps.abs()));
    }
    let alpha = move |y: f64| kf * y + eps * (TAU * y).sin();
    let dalpha = move |y: f64| kf + TAU * eps * (TAU * y).cos();
    let ddalpha = move |y: f64| -TAU * TAU * eps * (TAU * y).sin();
    let map = Diffeo::new("parabolic-twist", 2, move |p| Vector::from_row_slice(&[p[0] + alpha(p[1]), p[1]]))
        .with_inverse(move |p| Vector::from_row_slice(&[p[0] - alpha(p[1]), p[1]]))
        .with_jacobian(move |p| Matrix::from_row_slice(2, 2, &[1.0, dalpha(p[1]), 0.0, 1.0]));
    let y_field = VectorField::new("twist-y", 2, move |p| Vector::from_row_slice(&[0.0, 1.0 / dalpha(p[1])]))
        .with_jacobian(move |p| {
            let d = dalpha(p[1]);
            Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -ddalpha(p[1]) / (d * d)])
        });
    Ok(FramedSystem {
        name: "parabolic-twist".into(),
        manifold: ModelManifold::torus(2)?,
        framing: Framing::new("twist", vec![VectorField::constant("twist-x", &[1.0, 0.0]), y_field])?,
        map,
        data: SystemData::ParabolicTwist { k, eps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{autonomy_check, verify_partial_hyperbolicity};
    use rand_chacha::ChaCha8Rng;

    fn cat() -> IntMatrix {
        IntMatrix::from_flat2([2, 1, 1, 1])
    }

    fn check_autonomous(sys: &FramedSystem, expected: &Matrix, tol: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts = sys.sample_points(&mut rng, 500);
        let rep = autonomy_check(&sys.map, &sys.framing, &pts, None).unwrap();
        assert!(rep.max_deviation < tol, "{}: deviation {}", sys.name, rep.max_deviation);
        assert!((rep.matrix() - expected).amax() < 1e-9, "{}: {:?}", sys.name, rep.m);
    }

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_row_slice(v))
    }

    #[test]
    fn heis_homomorphism_and_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for b in [cat(), IntMatrix::from_flat2([0, 1, 1, 0]), IntMatrix::from_flat2([3, 2, 1, 1])] {
            let d = HeisAutomorphismData {
                b,
                k: 2,
                left: None,
                eigen_framing: false,
            };
            for _ in 0..10_000 {
                let a = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
                let c = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
                assert!(d.homomorphism_defect(a, c) < 1e-10);
            }
            for m in -10..=10 {
                for n in -10..=10 {
                    let c = d.correction(m as f64, n as f64);
                    assert_eq!(c, c.round());
                }
            }
        }
    }

    #[test]
    fn heis_models() {
        let phi = (3.0 + 5f64.sqrt()) / 2.0;
        for k in [1, 2] {
            let sys = heis_system(&cat(), k).unwrap();
            check_autonomous(&sys, &diag(&[1.0 / phi, 1.0, phi]), 1e-9);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let pts = sys.sample_points(&mut rng, 100);
            assert!(sys.map.inverse_residual(&pts).unwrap() < 1e-10);
            for g in sys.manifold.deck_generators() {
                for p in &pts {
                    let a = sys.map.apply(&g.apply(p));
                    let b = sys.map.apply(p);
                    assert!(sys.manifold.deck_equivalent(&b, &a, 3) || {
                        let ra = sys.manifold.reduce_to_fundamental_domain(&a).unwrap();
                        let rb = sys.manifold.reduce_to_fundamental_domain(&b).unwrap();
                        (ra - rb).amax() < 1e-9
                    });
                }
            }
        }
        let id = heis_automorphism(&IntMatrix::identity(2), 1, None).unwrap();
        check_autonomous(&id, &Matrix::identity(3, 3), 1e-12);
        assert!(matches!(
            heis_system(&IntMatrix::identity(2), 1),
            Err(Error::NotPartiallyHyperbolic(_))
        ));
        // With a left translation the cocycle is Ad(g) times the algebra map.
        let g = [0.3, 0.4, 0.0];
        let sys = heis_automorphism(&cat(), 1, Some(g)).unwrap();
        let ad = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -g[1], g[0], 1.0]);
        let d = match &sys.data {
            SystemData::Heis(d) => d.clone(),
            _ => unreachable!(),
        };
        check_autonomous(&sys, &(ad * d.algebra_matrix()), 1e-9);
    }

    #[test]
    fn sol_models() {
        let sys = sol_system(&cat()).unwrap();
        let phi = (3.0 + 5f64.sqrt()) / 2.0;
        check_autonomous(&sys, &diag(&[1.0 / phi, 1.0, phi]), 1e-9);
        let s = sol_system(&IntMatrix::from_flat2([3, 2, 1, 1])).unwrap();
        match &s.data {
            SystemData::Sol(d) => assert!((d.alpha - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12),
            _ => unreachable!(),
        }
        assert!(matches!(
            sol_system(&IntMatrix::from_flat2([1, 1, 0, 1])),
            Err(Error::NotHyperbolicMonodromy(2))
        ));
        // Negative trace monodromy is handled through -A.
        let neg = sol_system(&IntMatrix::from_flat2([-2, -1, -1, -1])).unwrap();
        check_autonomous(&neg, &diag(&[1.0 / phi, 1.0, phi]), 1e-9);
    }

    #[test]
    fn suspension_models() {
        let phi = (3.0 + 5f64.sqrt()) / 2.0;
        let d = diag(&[1.0 / phi, 1.0, phi]);
        for (power, warp) in [(0, 0.0), (1, 0.0), (1, 0.05), (2, 0.1)] {
            let sys = suspension(&cat(), power, [0.0, 0.0], warp).unwrap();
            check_autonomous(&sys, &d, 1e-9);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let pts = sys.sample_points(&mut rng, 50);
            for f in sys.framing.fields() {
                assert!(f.deck_equivariance_residual(&sys.manifold, &pts) < 1e-9);
            }
        }
        // w = (A - I)^{-1} (1, 0) = (0, 1) for the cat map.
        assert!(suspension(&cat(), 1, [0.0, 1.0], 0.0).is_ok());
        assert!(matches!(
            suspension(&cat(), 1, [0.3, 0.0], 0.0),
            Err(Error::NotCommuting(_))
        ));
    }

    #[test]
    fn circle_extension_models() {
        let two_modes = FourierSum {
            constant: 0.1,
            terms: vec![
                FourierTerm {
                    kx: 1,
                    ky: 0,
                    cos: 0.0,
                    sin: 0.2,
                },
                FourierTerm {
                    kx: 1,
                    ky: 2,
                    cos: 0.05,
                    sin: 0.0,
                },
            ],
        };
        let mut block = Matrix::identity(3, 3);
        block.view_mut((1, 1), (2, 2)).copy_from(&cat().to_f64());
        for rho in [FourierSum::constant(0.3), FourierSum::sin_x(0.2), two_modes] {
            let sys = circle_extension(&cat(), rho.clone(), BaseFraming::Canonical).unwrap();
            check_autonomous(&sys, &block, 1e-9);
            let sys = circle_extension(&cat(), rho, BaseFraming::Eigen).unwrap();
            let phi = (3.0 + 5f64.sqrt()) / 2.0;
            check_autonomous(&sys, &diag(&[1.0 / phi, 1.0, phi]), 1e-9);
        }
        let r = FourierSum::sin_x(0.2);
        for x in [0.1, 0.37, 0.9] {
            assert!((r.eval(x + 1.0, 0.3) - r.eval(x, 0.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn parabolic_twist_cocycle() {
        let sys = parabolic_twist(3, 0.0).unwrap();
        check_autonomous(&sys, &Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-12);
        let sys = parabolic_twist(2, 0.1).unwrap();
        check_autonomous(&sys, &Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-9);
        assert!(matches!(parabolic_twist(0, 0.1), Err(Error::NotLocalDiffeo(_))));
    }

    #[test]
    fn perturbed_cat_fails_autonomy() {
        let sys = perturbed_cat();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = sys.sample_points(&mut rng, 1000);
        let rep = autonomy_check(&sys.map, &sys.framing, &pts, None).unwrap();
        assert!(rep.max_deviation > 0.1);
        assert!(sys.map.inverse_residual(&pts).unwrap() < 1e-12);
    }

    #[test]
    fn anosov_3d_has_no_unit_eigenvalue() {
        let a = anosov_3d_matrix();
        assert_eq!(a.det(), 1);
        let spec = verify_partial_hyperbolicity(&a.to_f64()).unwrap();
        // Roots of λ³ - 5λ² + 6λ - 1 by bisection on sign changes.
        let p = |l: f64| l * l * l - 5.0 * l * l + 6.0 * l - 1.0;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p(lo) * p(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let roots = [bisect(0.0, 0.5), bisect(1.0, 2.0), bisect(3.0, 4.0)];
        assert!((spec.lambda_s - roots[0]).abs() < 1e-9);
        assert!((spec.lambda_c - roots[1]).abs() < 1e-9);
        assert!((spec.lambda_u - roots[2]).abs() < 1e-9);
        assert!((spec.lambda_c.abs() - 1.0).abs() > 0.5);
    }
}

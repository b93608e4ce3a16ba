//! Rotation numbers, fiberwise rotation profiles and the conjugacies that
//! straighten a fibered framing-preserving map of `T^2` into rigid
//! rotations and then into the linear parabolic model
//! `A_k: (z, θ) ↦ (z, θ + k z)`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ManifoldKind;
use crate::linalg::{circle_diff, frac, Vector};
use crate::models::FramedSystem;

/// Smallest orbit length accepted by [`rotation_number`].
pub const MIN_ROTATION_ITER: usize = 1000;
/// Smallest number of base samples in a rotation profile.
pub const MIN_PROFILE_SAMPLES: usize = 256;
/// Largest number of base samples the profile refinement will try.
pub const MAX_PROFILE_SAMPLES: usize = 1 << 14;
/// Tolerance of the pushforward check in [`arclength_rotation`].
pub const FRAMING_PRESERVATION_TOL: f64 = 1e-6;
/// Tolerance of the fiber preservation check.
pub const FIBER_TOL: f64 = 1e-9;
/// Threshold below which `|α'|` counts as vanishing.
pub const LOCAL_DIFFEO_MIN: f64 = 1e-6;

const SIMPSON_PANELS: usize = 1 << 12;
const SIMPSON_REL_TOL: f64 = 1e-8;
const SIMPSON_MAX_PANELS: usize = 1 << 20;
const MONOTONE_SAMPLES: usize = 1024;
const PRESERVATION_SAMPLES: usize = 256;
const DERIV_STEP: f64 = 1e-6;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Lift `F: R → R` of a circle map, with `F(x + 1) = F(x) + degree`.
#[derive(Clone)]
pub struct CircleMapLift {
    pub descriptor: String,
    pub degree: i32,
    f: RealFn,
}

impl std::fmt::Debug for CircleMapLift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleMapLift")
            .field("descriptor", &self.descriptor)
            .field("degree", &self.degree)
            .finish()
    }
}

impl CircleMapLift {
    pub fn new<F>(descriptor: impl Into<String>, degree: i32, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            descriptor: descriptor.into(),
            degree,
            f: Arc::new(f),
        }
    }

    /// Rigid rotation `x ↦ x + alpha`.
    pub fn rotation(alpha: f64) -> Self {
        Self::new(format!("rotation({alpha})"), 1, move |x| x + alpha)
    }

    pub fn identity() -> Self {
        Self::new("identity", 1, |x| x)
    }

    /// Time-`time` flow of the field `g(θ) ∂_θ`, integrated with RK4.
    pub fn flow<G>(g: G, time: f64, steps: usize) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let steps = steps.max(1);
        Self::new(format!("flow(t={time})"), 1, move |x| {
            let dt = time / steps as f64;
            let mut y = x;
            for _ in 0..steps {
                let k1 = g(y);
                let k2 = g(y + 0.5 * dt * k1);
                let k3 = g(y + 0.5 * dt * k2);
                let k4 = g(y + dt * k3);
                y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            y
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CircleMapLift) -> CircleMapLift {
        let (a, b) = (self.f.clone(), other.f.clone());
        Self::new(
            format!("{}∘{}", self.descriptor, other.descriptor),
            self.degree * other.degree,
            move |x| a(b(x)),
        )
    }

    /// Inverse of a monotone degree-one lift, by bisection.
    pub fn inverse(&self) -> Result<CircleMapLift> {
        if self.degree != 1 {
            return Err(Error::NotADiffeomorphism(format!("degree {} lift has no inverse", self.degree)));
        }
        check_monotone(self)?;
        let f = self.f.clone();
        let f0 = f(0.0);
        Ok(Self::new(format!("{}⁻¹", self.descriptor), 1, move |y| {
            // F(x) - x is 1-periodic and monotonicity bounds it within 1 of F(0).
            let (mut lo, mut hi) = (y - f0 - 1.0, y - f0 + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) < y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }))
    }

    /// Largest `|F(x + 1) - F(x) - degree|` over `samples`.
    pub fn periodicity_residual(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .map(|&x| (self.eval(x + 1.0) - self.eval(x) - self.degree as f64).abs())
            .fold(0.0, f64::max)
    }
}

fn check_monotone(lift: &CircleMapLift) -> Result<()> {
    let mut prev = lift.eval(0.0);
    for i in 1..=MONOTONE_SAMPLES {
        let x = i as f64 / MONOTONE_SAMPLES as f64;
        let v = lift.eval(x);
        if !(v > prev) {
            return Err(Error::NotADiffeomorphism(format!(
                "{} is not increasing near x = {x}",
                lift.descriptor
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Rotation number of a degree-one lift in `[0, 1)`: the displacement over
/// half an orbit, averaged over the second half of `n_iter` iterates of `0`.
pub fn rotation_number(lift: &CircleMapLift, n_iter: usize) -> Result<f64> {
    if lift.degree != 1 {
        return Err(Error::NotADiffeomorphism(format!("degree {} lift", lift.degree)));
    }
    if n_iter < MIN_ROTATION_ITER {
        return Err(Error::InsufficientSamples {
            needed: MIN_ROTATION_ITER,
            got: n_iter,
        });
    }
    check_monotone(lift)?;
    // Orbit kept as integer part plus fractional part for precision.
    let mut whole = Vec::with_capacity(n_iter + 1);
    let mut part = Vec::with_capacity(n_iter + 1);
    let (mut m, mut u) = (0.0f64, 0.0f64);
    whole.push(m);
    part.push(u);
    for _ in 0..n_iter {
        let y = lift.eval(u);
        let k = y.floor();
        m += k;
        u = y - k;
        whole.push(m);
        part.push(u);
    }
    let h = n_iter / 2;
    let count = n_iter - h + 1;
    let mut sum = 0.0;
    for j in h..=n_iter {
        sum += (whole[j] - whole[j - h]) + (part[j] - part[j - h]);
    }
    Ok(frac(sum / (count as f64 * h as f64)))
}

/// Cumulative framing-metric length `∫ dθ / g(θ)` along one circle fiber,
/// tabulated for fast evaluation at arbitrary points.
#[derive(Clone, Debug)]
pub struct FiberLength {
    /// Length of the whole circle.
    pub total: f64,
    nodes: Vec<f64>,
    panels: usize,
}

fn simpson_fixed<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = g(a) + g(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Composite Simpson rule, doubling the panel count until the relative
/// change drops below `1e-8`.
pub fn simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, min_panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n = min_panels.max(2);
    n += n % 2;
    let mut prev = simpson_fixed(g, a, b, n);
    loop {
        n *= 2;
        let cur = simpson_fixed(g, a, b, n);
        if (cur - prev).abs() <= SIMPSON_REL_TOL * cur.abs() || n >= SIMPSON_MAX_PANELS {
            return cur;
        }
        prev = cur;
    }
}

impl FiberLength {
    /// Tabulates the length of the field `g(θ) ∂_θ` on `[0, 1]`.
    pub fn new<G: Fn(f64) -> f64>(g: &G) -> Result<Self> {
        let density = |t: f64| 1.0 / g(t);
        for i in 0..PRESERVATION_SAMPLES {
            let t = i as f64 / PRESERVATION_SAMPLES as f64;
            let v = g(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::DegenerateFraming { point: vec![t], det: v });
            }
        }
        let mut panels = SIMPSON_PANELS;
        let build = |panels: usize| {
            let h = 1.0 / panels as f64;
            let mut nodes = Vec::with_capacity(panels / 2 + 1);
            nodes.push(0.0);
            let mut acc = 0.0;
            for p in 0..panels / 2 {
                let a = 2.0 * p as f64 * h;
                acc += h / 3.0 * (density(a) + 4.0 * density(a + h) + density(a + 2.0 * h));
                nodes.push(acc);
            }
            nodes
        };
        let mut nodes = build(panels);
        loop {
            let finer = build(panels * 2);
            let (a, b) = (nodes[nodes.len() - 1], finer[finer.len() - 1]);
            panels *= 2;
            nodes = finer;
            if (b - a).abs() <= SIMPSON_REL_TOL * b.abs() || panels >= SIMPSON_MAX_PANELS {
                break;
            }
        }
        Ok(Self {
            total: nodes[nodes.len() - 1],
            nodes,
            panels,
        })
    }

    /// Signed length from `0` to `theta`, for any real `theta`.
    pub fn length_to<G: Fn(f64) -> f64>(&self, g: &G, theta: f64) -> f64 {
        let turns = theta.floor();
        let t = theta - turns;
        let pairs = self.panels / 2;
        let node = ((t * pairs as f64).floor() as usize).min(pairs - 1);
        let start = node as f64 / pairs as f64;
        let density = |s: f64| 1.0 / g(s);
        turns * self.total + self.nodes[node] + simpson(&density, start, t, 8)
    }

    /// Normalized fiber coordinate `l(θ) / d` in `[0, 1)`.
    pub fn normalized<G: Fn(f64) -> f64>(&self, g: &G, theta: f64) -> f64 {
        frac(self.length_to(g, theta) / self.total)
    }
}

/// Largest relative defect of `F'(θ) g(θ) = g(F(θ))`.
fn preservation_defect<G: Fn(f64) -> f64>(lift: &CircleMapLift, g: &G) -> f64 {
    (0..PRESERVATION_SAMPLES)
        .map(|i| {
            let t = i as f64 / PRESERVATION_SAMPLES as f64;
            let d = circle_diff(lift.eval(t + DERIV_STEP), lift.eval(t - DERIV_STEP)) / (2.0 * DERIV_STEP);
            let target = g(lift.eval(t));
            (d * g(t) - target).abs() / target.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn snap_unit(x: f64) -> f64 {
    if 1.0 - x < 1e-12 {
        0.0
    } else {
        x
    }
}

/// Rotation number of a map preserving the field `g(θ) ∂_θ`, as the
/// normalized framing length `l / d` of the arc from `0` to `F(0)`.
pub fn arclength_rotation<G: Fn(f64) -> f64>(lift: &CircleMapLift, g: &G) -> Result<f64> {
    let defect = preservation_defect(lift, g);
    if !(defect <= FRAMING_PRESERVATION_TOL) {
        return Err(Error::NotAutonomous(defect));
    }
    let length = FiberLength::new(g)?;
    Ok(snap_unit(frac(length.length_to(g, lift.eval(0.0)) / length.total)))
}

/// Which torus coordinate runs along the fibers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberAxis {
    /// Fibers `{y = z}`, parametrized by `x`.
    #[default]
    X,
    /// Fibers `{x = z}`, parametrized by `y`.
    Y,
}

/// A map of `T^2` preserving each circle `{z} × S^1` together with a
/// fiber-tangent framing field `g(z, θ) ∂_θ`.
#[derive(Clone)]
pub struct FiberedMap {
    pub name: String,
    fiber: PlaneFn,
    field: PlaneFn,
}

impl std::fmt::Debug for FiberedMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberedMap").field("name", &self.name).finish()
    }
}

impl FiberedMap {
    /// `fiber(z, θ)` is the lift of the fiber map over `z`; `field(z, θ)` is
    /// the positive fiber component of the framing field.
    pub fn new<F, G>(name: impl Into<String>, fiber: F, field: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            fiber: Arc::new(fiber),
            field: Arc::new(field),
        }
    }

    /// Reads a fibered map off a system on `T^2`. The fiber field is the
    /// framing field with no base component.
    pub fn from_system(sys: &FramedSystem, axis: FiberAxis) -> Result<Self> {
        if !matches!(sys.manifold.kind(), ManifoldKind::Torus { n: 2 }) {
            return Err(Error::UnsupportedManifold(format!(
                "fiber rotation needs a system on T^2, got {}",
                sys.name
            )));
        }
        let (fi, bi) = match axis {
            FiberAxis::X => (0, 1),
            FiberAxis::Y => (1, 0),
        };
        let point = move |z: f64, t: f64| {
            let mut p = Vector::zeros(2);
            p[fi] = t;
            p[bi] = z;
            p
        };
        let n = 32;
        let grid: Vec<(f64, f64)> = (0..n * n)
            .map(|k| ((k / n) as f64 / n as f64 + 0.013, (k % n) as f64 / n as f64 + 0.007))
            .collect();
        let defect = grid
            .iter()
            .map(|&(z, t)| circle_diff(sys.map.apply(&point(z, t))[bi], z).abs())
            .fold(0.0, f64::max);
        if defect > FIBER_TOL {
            return Err(Error::NotFiberPreserving(defect));
        }
        let field_index = (0..sys.framing.dim())
            .find(|&i| {
                grid.iter().all(|&(z, t)| {
                    let v = sys.framing.field(i).eval(&point(z, t));
                    v[bi].abs() <= FIBER_TOL && v[fi] > 0.0
                })
            })
            .ok_or(Error::NotFiberPreserving(f64::NAN))?;
        let map = sys.map.clone();
        let field = sys.framing.field(field_index).clone();
        Ok(Self::new(
            sys.name.clone(),
            move |z, t| map.apply(&point(z, t))[fi],
            move |z, t| field.eval(&point(z, t))[fi],
        ))
    }

    pub fn fiber_lift(&self, z: f64) -> CircleMapLift {
        let f = self.fiber.clone();
        let f0 = f(z, 0.0);
        // Re-anchor so that the lift is continuous even when the map reduces
        // its output modulo 1.
        CircleMapLift::new(format!("{}@{z}", self.name), 1, move |t| {
            let v = f(z, t);
            let drift = circle_diff(v, f0 + t);
            f0 + t + drift
        })
    }

    pub fn field_at(&self, z: f64, t: f64) -> f64 {
        (self.field)(z, t)
    }

    /// Rotation number of the fiber over `z`.
    pub fn fiber_rotation(&self, z: f64) -> Result<f64> {
        let g = |t: f64| self.field_at(z, t);
        arclength_rotation(&self.fiber_lift(z), &g)
    }
}

/// Rotation numbers `α(z)` of the fibers over a uniform base grid and the
/// winding number of `z ↦ α(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationProfile {
    pub z: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Continuous lift of `alpha` starting at `alpha[0]`.
    pub unwrapped: Vec<f64>,
    pub degree_k: i64,
}

impl RotationProfile {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "z,alpha")?;
        for (z, a) in self.z.iter().zip(&self.alpha) {
            writeln!(w, "{z},{a}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Unwrapped increments between consecutive samples, including the
    /// closing step from the last sample back to the first.
    pub fn increments(&self) -> Vec<f64> {
        let n = self.unwrapped.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    self.unwrapped[i + 1] - self.unwrapped[i]
                } else {
                    self.unwrapped[0] + self.degree_k as f64 - self.unwrapped[n - 1]
                }
            })
            .collect()
    }

    /// Lift of `α` at an arbitrary `z`, continuous with `unwrapped`.
    pub fn lift_at(&self, z: f64, alpha: f64) -> f64 {
        let n = self.z.len();
        let turns = z.floor();
        let u = z - turns;
        let i = ((u * n as f64).round() as usize) % n;
        let base = self.unwrapped[i] + if i == 0 && u > 0.5 { self.degree_k as f64 } else { 0.0 };
        base + circle_diff(alpha, base) + turns * self.degree_k as f64
    }
}

/// Rotation profile of a fibered map over at least `samples` base points.
pub fn rotation_profile(map: &FiberedMap, samples: usize) -> Result<RotationProfile> {
    let mut n = samples.max(MIN_PROFILE_SAMPLES);
    loop {
        let z: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let alpha = z.par_iter().map(|&zi| map.fiber_rotation(zi)).collect::<Result<Vec<_>>>()?;
        let mut unwrapped = Vec::with_capacity(n);
        unwrapped.push(alpha[0]);
        let mut worst = 0.0f64;
        for i in 1..n {
            let d = circle_diff(alpha[i], alpha[i - 1]);
            worst = worst.max(d.abs());
            unwrapped.push(unwrapped[i - 1] + d);
        }
        let closing = circle_diff(alpha[0], alpha[n - 1]);
        worst = worst.max(closing.abs());
        let total = unwrapped[n - 1] + closing - unwrapped[0];
        // Steps near 1/2 make the unwrapping ambiguous.
        if worst > 0.25 && n < MAX_PROFILE_SAMPLES {
            n *= 2;
            continue;
        }
        return Ok(RotationProfile {
            z,
            alpha,
            unwrapped,
            degree_k: total.round() as i64,
        });
    }
}

/// Rotation profile of a fiber-preserving system on `T^2`.
pub fn fiber_rotation_profile(sys: &FramedSystem, axis: FiberAxis) -> Result<RotationProfile> {
    rotation_profile(&FiberedMap::from_system(sys, axis)?, MIN_PROFILE_SAMPLES)
}

/// Fiberwise coordinate change `(z, θ) ↦ (z, l_z(θ) / d(z))` that turns
/// every fiber map into a rigid rotation.
#[derive(Clone, Debug)]
pub struct FiberConjugacy {
    pub map: FiberedMap,
}

impl FiberConjugacy {
    pub fn fiber_length(&self, z: f64) -> Result<FiberLength> {
        let g = |t: f64| self.map.field_at(z, t);
        FiberLength::new(&g)
    }

    pub fn apply(&self, z: f64, theta: f64) -> Result<(f64, f64)> {
        let g = |t: f64| self.map.field_at(z, t);
        Ok((z, self.fiber_length(z)?.normalized(&g, theta)))
    }

    /// Largest deviation of the conjugated fiber maps from the rotations by
    /// the profile values, over an `nz × nt` grid.
    pub fn rotation_defect(&self, nz: usize, nt: usize) -> Result<f64> {
        let per_fiber = (0..nz)
            .into_par_iter()
            .map(|i| {
                let z = i as f64 / nz as f64;
                let g = |t: f64| self.map.field_at(z, t);
                let len = FiberLength::new(&g)?;
                let lift = self.map.fiber_lift(z);
                let alpha = arclength_rotation(&lift, &g)?;
                Ok((0..nt)
                    .map(|j| {
                        let t = j as f64 / nt as f64;
                        let u = len.normalized(&g, t);
                        let v = len.normalized(&g, lift.eval(t));
                        circle_diff(v, u + alpha).abs()
                    })
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(per_fiber.into_iter().fold(0.0, f64::max))
    }
}

/// Fiber straightening of a fibered map.
pub fn conjugate_fibers_to_rotations(map: &FiberedMap) -> FiberConjugacy {
    FiberConjugacy { map: map.clone() }
}

/// Coordinate change `(z, θ) ↦ (α̃(z) / k, l_z(θ) / d(z))` conjugating a
/// fibered map with a covering profile of degree `k` to `A_k`.
#[derive(Clone, Debug)]
pub struct ParabolicLinearization {
    pub k: i64,
    pub profile: RotationProfile,
    pub map: FiberedMap,
}

/// Summary of a linearization check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    pub k: i64,
    pub grid: usize,
    pub sup_distance: f64,
    pub min_alpha_slope: f64,
}

impl ParabolicLinearization {
    /// Image of `(z, θ)`, as `(base, fiber)`.
    pub fn apply(&self, z: f64, theta: f64) -> Result<(f64, f64)> {
        let g = |t: f64| self.map.field_at(z, t);
        let len = FiberLength::new(&g)?;
        let alpha = arclength_rotation(&self.map.fiber_lift(z), &g)?;
        Ok((
            frac(self.profile.lift_at(z, alpha) / self.k as f64),
            len.normalized(&g, theta),
        ))
    }

    /// Sup distance between the conjugated map and `A_k` on an `n × n` grid.
    pub fn conjugacy_defect(&self, n: usize) -> Result<f64> {
        let k = self.k as f64;
        let per_fiber = (0..n)
            .into_par_iter()
            .map(|i| {
                let z = i as f64 / n as f64;
                let g = |t: f64| self.map.field_at(z, t);
                let len = FiberLength::new(&g)?;
                let lift = self.map.fiber_lift(z);
                let alpha = arclength_rotation(&lift, &g)?;
                let base = frac(self.profile.lift_at(z, alpha) / k);
                Ok((0..n)
                    .map(|j| {
                        let t = j as f64 / n as f64;
                        let u = len.normalized(&g, t);
                        let v = len.normalized(&g, lift.eval(t));
                        // The base coordinate is fixed by both maps.
                        circle_diff(v, u + k * base).abs()
                    })
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(per_fiber.into_iter().fold(0.0, f64::max))
    }

    pub fn report(&self, n: usize) -> Result<LinearizationReport> {
        Ok(LinearizationReport {
            k: self.k,
            grid: n,
            sup_distance: self.conjugacy_defect(n)?,
            min_alpha_slope: min_slope(&self.profile),
        })
    }
}

/// Smallest `sign(k) · α'` over the profile samples.
fn min_slope(profile: &RotationProfile) -> f64 {
    let n = profile.z.len() as f64;
    let sign = if profile.degree_k < 0 { -1.0 } else { 1.0 };
    profile
        .increments()
        .iter()
        .map(|d| sign * d * n)
        .fold(f64::INFINITY, f64::min)
}

/// Builds the conjugacy to `A_k` for a fibered map whose profile is a
/// covering of degree `k`.
pub fn linearize_parabolic(map: &FiberedMap, samples: usize) -> Result<ParabolicLinearization> {
    let profile = rotation_profile(map, samples)?;
    let slope = min_slope(&profile);
    if profile.degree_k == 0 || !(slope > LOCAL_DIFFEO_MIN) {
        return Err(Error::NotLocalDiffeo(slope));
    }
    Ok(ParabolicLinearization {
        k: profile.degree_k,
        profile,
        map: map.clone(),
    })
}

/// [`linearize_parabolic`] for a fiber-preserving system on `T^2`.
pub fn linearize_parabolic_system(sys: &FramedSystem, axis: FiberAxis) -> Result<ParabolicLinearization> {
    linearize_parabolic(&FiberedMap::from_system(sys, axis)?, MIN_PROFILE_SAMPLES)
}

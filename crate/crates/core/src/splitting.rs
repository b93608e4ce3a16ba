//! Invariant line fields of circle extensions by the graph transform.
//!
//! A line inside the plane spanned by a base eigendirection `e` and the
//! vertical `∂_θ` is stored as its slope `s`, meaning the span of
//! `(e, s)`. For the unstable direction the transform (pulled back to the
//! node `q`) is
//!
//! ```text
//! s'(q) = (s(φ⁻¹ q) + dr_{φ⁻¹ q}(e_u)) / λ_u
//! ```
//!
//! and for the stable direction, using `φ⁻¹`,
//!
//! ```text
//! s'(q) = λ_s s(φ q) - dr_q(e_s).
//! ```
//!
//! Binary grid format (little endian): 8-byte magic `FLGRID\0\x01`, then
//! `u32` `nx`, `ny`, `nθ`, a reserved `u32` (zero), then `nx·ny·nθ` `f64`
//! slopes in row-major `(x, y, θ)` order with `θ` fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frac, IntMatrix};
use crate::models::{CircleExtensionData, FramedSystem, SystemData};

pub const GRID_MAGIC: [u8; 8] = *b"FLGRID\x00\x01";
pub const GRID_HEADER_LEN: usize = 24;
/// Default grid resolution.
pub const DEFAULT_GRID: (usize, usize, usize) = (256, 256, 64);
/// Grid used for regularity estimates in heavy mode.
pub const HEAVY_GRID: (usize, usize, usize) = (512, 512, 8);
/// Holder exponents are clamped to `(0, HOLDER_CAP]`.
pub const HOLDER_CAP: f64 = 1.05;

/// Slopes on a regular `nx × ny × nθ` grid of `T^2 × S^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLineField {
    pub nx: usize,
    pub ny: usize,
    pub nth: usize,
    /// Row-major `(x, y, θ)`, `θ` fastest.
    pub slope: Vec<f64>,
}

impl GridLineField {
    pub fn constant(nx: usize, ny: usize, nth: usize, value: f64) -> Self {
        Self {
            nx,
            ny,
            nth,
            slope: vec![value; nx * ny * nth],
        }
    }

    /// Field with values `f(x, y, θ)` at the nodes.
    pub fn from_fn<F>(nx: usize, ny: usize, nth: usize, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Sync,
    {
        let mut slope = vec![0.0; nx * ny * nth];
        slope.par_chunks_mut(nth).enumerate().for_each(|(b, chunk)| {
            let (i, j) = (b / ny, b % ny);
            for (t, v) in chunk.iter_mut().enumerate() {
                *v = f(i as f64 / nx as f64, j as f64 / ny as f64, t as f64 / nth as f64);
            }
        });
        Self { nx, ny, nth, slope }
    }

    pub fn len(&self) -> usize {
        self.slope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slope.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.ny + j) * self.nth + t
    }

    pub fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        self.slope[self.index(i, j, t)]
    }

    pub fn sup_distance(&self, other: &GridLineField) -> f64 {
        self.slope
            .par_iter()
            .zip(other.slope.par_iter())
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// `sup - inf` of the slopes.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .slope
            .par_iter()
            .fold(
                || (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), &v| (lo.min(v), hi.max(v)),
            )
            .reduce(
                || (f64::INFINITY, f64::NEG_INFINITY),
                |a, b| (a.0.min(b.0), a.1.max(b.1)),
            );
        hi - lo
    }

    pub fn all_finite(&self) -> bool {
        self.slope.par_iter().all(|v| v.is_finite())
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&GRID_MAGIC)?;
        for d in [self.nx, self.ny, self.nth] {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        w.write_all(&0u32.to_le_bytes())?;
        for v in &self.slope {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = [0u8; GRID_HEADER_LEN];
        r.read_exact(&mut header)?;
        if header[..8] != GRID_MAGIC {
            return Err(Error::Config(format!("{}: not a grid field file", path.display())));
        }
        let dim = |k: usize| u32::from_le_bytes(header[8 + 4 * k..12 + 4 * k].try_into().expect("4 bytes")) as usize;
        let (nx, ny, nth) = (dim(0), dim(1), dim(2));
        let count = nx * ny * nth;
        let mut bytes = Vec::with_capacity(count * 8);
        r.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(Error::Config(format!(
                "{}: expected {} bytes of data, found {}",
                path.display(),
                count * 8,
                bytes.len()
            )));
        }
        let slope = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(Self { nx, ny, nth, slope })
    }

    /// CSV rows `x,y,theta,slope` on the `θ = 0` slice, subsampled so that at
    /// most `max_per_axis` nodes are written along each base axis.
    pub fn write_csv_slice(&self, path: &Path, max_per_axis: usize) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "x,y,theta,slope")?;
        let sx = self.nx.div_ceil(max_per_axis.max(1));
        let sy = self.ny.div_ceil(max_per_axis.max(1));
        for i in (0..self.nx).step_by(sx) {
            for j in (0..self.ny).step_by(sy) {
                writeln!(
                    w,
                    "{},{},{},{}",
                    i as f64 / self.nx as f64,
                    j as f64 / self.ny as f64,
                    0.0,
                    self.get(i, j, 0)
                )?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Which invariant line field to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Unstable,
    Stable,
}

/// Base part of the sampling stencil: up to four weighted base nodes.
#[derive(Clone, Debug)]
struct BaseStencil {
    nodes: [(usize, f64); 4],
    len: usize,
}

/// Precomputed graph transform of a circle extension on a fixed grid.
#[derive(Clone, Debug)]
pub struct GraphTransform {
    pub nx: usize,
    pub ny: usize,
    pub nth: usize,
    pub direction: Direction,
    /// Multiplier applied to the sampled slope.
    pub factor: f64,
    stencils: Vec<BaseStencil>,
    /// θ shift of the sampling point, in grid units.
    shifts: Vec<f64>,
    forcing: Vec<f64>,
}

fn extension_data(sys: &FramedSystem) -> Result<&CircleExtensionData> {
    match &sys.data {
        SystemData::CircleExtension(d) => Ok(d),
        _ => Err(Error::UnsupportedManifold(format!(
            "graph transform needs a circle extension, got {}",
            sys.name
        ))),
    }
}

fn base_stencil(nx: usize, ny: usize, m: &IntMatrix, i: usize, j: usize) -> (BaseStencil, f64, f64) {
    let g = |r, c| m.get(r, c);
    if nx == ny {
        // Integer matrices map grid nodes to grid nodes.
        let n = nx as i64;
        let (ii, jj) = (i as i64, j as i64);
        let pi = (g(0, 0) * ii + g(0, 1) * jj).rem_euclid(n) as usize;
        let pj = (g(1, 0) * ii + g(1, 1) * jj).rem_euclid(n) as usize;
        let st = BaseStencil {
            nodes: [(pi * ny + pj, 1.0), (0, 0.0), (0, 0.0), (0, 0.0)],
            len: 1,
        };
        return (st, pi as f64 / nx as f64, pj as f64 / ny as f64);
    }
    let (x, y) = (i as f64 / nx as f64, j as f64 / ny as f64);
    let px = frac(g(0, 0) as f64 * x + g(0, 1) as f64 * y);
    let py = frac(g(1, 0) as f64 * x + g(1, 1) as f64 * y);
    let (ux, uy) = (px * nx as f64, py * ny as f64);
    let (i0, j0) = (ux.floor() as usize % nx, uy.floor() as usize % ny);
    let (wx, wy) = (ux - ux.floor(), uy - uy.floor());
    let (i1, j1) = ((i0 + 1) % nx, (j0 + 1) % ny);
    let st = BaseStencil {
        nodes: [
            (i0 * ny + j0, (1.0 - wx) * (1.0 - wy)),
            (i1 * ny + j0, wx * (1.0 - wy)),
            (i0 * ny + j1, (1.0 - wx) * wy),
            (i1 * ny + j1, wx * wy),
        ],
        len: 4,
    };
    (st, px, py)
}

impl GraphTransform {
    pub fn new(sys: &FramedSystem, (nx, ny, nth): (usize, usize, usize), direction: Direction) -> Result<Self> {
        let data = extension_data(sys)?;
        if nx < 2 || ny < 2 || nth < 1 {
            return Err(Error::InsufficientResolution(nx.min(ny)));
        }
        let eig = &data.eigen;
        let (m, factor) = match direction {
            Direction::Unstable => (data.a.inverse()?, 1.0 / eig.lambda_u),
            Direction::Stable => (data.a.clone(), eig.lambda_s),
        };
        let nb = nx * ny;
        let rows: Vec<(BaseStencil, f64, f64)> = (0..nb)
            .into_par_iter()
            .map(|b| {
                let (i, j) = (b / ny, b % ny);
                let (st, px, py) = base_stencil(nx, ny, &m, i, j);
                let (x, y) = (i as f64 / nx as f64, j as f64 / ny as f64);
                let (shift, forcing) = match direction {
                    // Preimage under φ: θ - r(A⁻¹ x).
                    Direction::Unstable => (-data.rho.eval(px, py), data.rho.directional(px, py, eig.e_u) * factor),
                    // Image under φ: θ + r(x).
                    Direction::Stable => (data.rho.eval(x, y), -data.rho.directional(x, y, eig.e_s)),
                };
                (st, shift * nth as f64, forcing)
            })
            .collect();
        let mut stencils = Vec::with_capacity(nb);
        let mut shifts = Vec::with_capacity(nb);
        let mut forcing = Vec::with_capacity(nb);
        for (st, s, f) in rows {
            stencils.push(st);
            shifts.push(s);
            forcing.push(f);
        }
        Ok(Self {
            nx,
            ny,
            nth,
            direction,
            factor,
            stencils,
            shifts,
            forcing,
        })
    }

    fn check(&self, field: &GridLineField) -> Result<()> {
        if (field.nx, field.ny, field.nth) != (self.nx, self.ny, self.nth) {
            return Err(Error::DimensionMismatch {
                expected: self.nx * self.ny * self.nth,
                got: field.len(),
            });
        }
        Ok(())
    }

    /// One application of the transform, writing into `out`.
    pub fn step_into(&self, field: &GridLineField, out: &mut GridLineField) -> Result<()> {
        self.check(field)?;
        self.check(out)?;
        let nth = self.nth;
        let src = &field.slope;
        out.slope.par_chunks_mut(nth).enumerate().for_each(|(b, chunk)| {
            let st = &self.stencils[b];
            let shift = self.shifts[b];
            let forcing = self.forcing[b];
            for (t, v) in chunk.iter_mut().enumerate() {
                let u = (t as f64 + shift).rem_euclid(nth as f64);
                let t0 = (u.floor() as usize) % nth;
                let w = u - u.floor();
                let t1 = (t0 + 1) % nth;
                let mut sampled = 0.0;
                for &(node, weight) in &st.nodes[..st.len] {
                    let base = node * nth;
                    sampled += weight * ((1.0 - w) * src[base + t0] + w * src[base + t1]);
                }
                *v = self.factor * sampled + forcing;
            }
        });
        Ok(())
    }

    pub fn step(&self, field: &GridLineField) -> Result<GridLineField> {
        let mut out = field.clone();
        self.step_into(field, &mut out)?;
        Ok(out)
    }

    /// Sup over nodes of the angle between the transported line and the
    /// stored line.
    pub fn invariance_residual(&self, field: &GridLineField) -> Result<f64> {
        let image = self.step(field)?;
        Ok(image
            .slope
            .par_iter()
            .zip(field.slope.par_iter())
            .map(|(a, b)| (a.atan() - b.atan()).abs())
            .reduce(|| 0.0, f64::max))
    }
}

/// One unstable graph-transform step.
pub fn graph_transform_step(field: &GridLineField, sys: &FramedSystem) -> Result<GridLineField> {
    GraphTransform::new(sys, (field.nx, field.ny, field.nth), Direction::Unstable)?.step(field)
}

/// Progress of a cone iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeIterationReport {
    pub direction: Direction,
    pub iterations: usize,
    pub sup_deltas: Vec<f64>,
    /// Geometric mean of consecutive delta ratios above the roundoff floor.
    pub contraction_estimate: Option<f64>,
    pub invariance_residual: f64,
    pub converged: bool,
}

/// Deltas below this are dominated by rounding and excluded from the
/// contraction estimate.
const DELTA_FLOOR: f64 = 1e-13;

fn contraction(deltas: &[f64]) -> Option<f64> {
    let ratios: Vec<f64> = deltas
        .windows(2)
        .filter(|w| w[0] > DELTA_FLOOR && w[1] > DELTA_FLOOR)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    if ratios.is_empty() {
        None
    } else {
        Some((ratios.iter().sum::<f64>() / ratios.len() as f64).exp())
    }
}

/// Iterates the transform until the sup-delta drops below `tol`.
pub fn cone_converge_with(
    transform: &GraphTransform,
    init: GridLineField,
    tol: f64,
    max_iter: usize,
) -> Result<(GridLineField, ConeIterationReport)> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("cone tolerance must be positive, got {tol}")));
    }
    let mut cur = init;
    let mut next = cur.clone();
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        transform.step_into(&cur, &mut next)?;
        let d = next.sup_distance(&cur);
        std::mem::swap(&mut cur, &mut next);
        deltas.push(d);
        if d < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotContracting {
            iterations: deltas.len(),
            last_delta: deltas.last().copied().unwrap_or(f64::NAN),
        });
    }
    let report = ConeIterationReport {
        direction: transform.direction,
        iterations: deltas.len(),
        contraction_estimate: contraction(&deltas),
        invariance_residual: transform.invariance_residual(&cur)?,
        sup_deltas: deltas,
        converged,
    };
    Ok((cur, report))
}

/// Unstable cone iteration for a circle extension.
pub fn cone_converge(
    sys: &FramedSystem,
    init: GridLineField,
    tol: f64,
    max_iter: usize,
) -> Result<(GridLineField, ConeIterationReport)> {
    let t = GraphTransform::new(sys, (init.nx, init.ny, init.nth), Direction::Unstable)?;
    cone_converge_with(&t, init, tol, max_iter)
}

/// The truncated series solution sampled at the grid nodes.
pub fn series_field(sys: &FramedSystem, dims: (usize, usize, usize), direction: Direction, terms: usize) -> Result<GridLineField> {
    let data = extension_data(sys)?;
    Ok(GridLineField::from_fn(dims.0, dims.1, dims.2, |x, y, _| match direction {
        Direction::Unstable => data.unstable_slope(x, y, terms),
        Direction::Stable => data.stable_slope(x, y, terms),
    }))
}

/// Base axis along which regularity is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    X,
    Y,
}

/// Result of [`holder_exponent`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    /// `R^2` of the log-log fit.
    pub fit_quality: f64,
    /// `(δ, osc(δ))` pairs used in the fit.
    pub scales: Vec<(f64, f64)>,
}

/// Oscillations below this count as a constant field.
const CONSTANT_OSC: f64 = 1e-12;

/// Fits `log osc(δ)` against `log δ` over dyadic separations `δ = d / N`,
/// `d = 1, 2, 4, ..., N/8`, where `osc(δ)` is the largest slope difference
/// between nodes `d` apart along `axis` (pairs that do not wrap around).
pub fn holder_exponent(field: &GridLineField, axis: Axis) -> Result<HolderEstimate> {
    let n = match axis {
        Axis::X => field.nx,
        Axis::Y => field.ny,
    };
    let mut ds = Vec::new();
    let mut d = 1;
    while d <= n / 8 {
        ds.push(d);
        d *= 2;
    }
    if ds.len() < 4 {
        return Err(Error::InsufficientResolution(n));
    }
    let (nx, ny, nth) = (field.nx, field.ny, field.nth);
    let osc = |d: usize| -> f64 {
        (0..nx * ny)
            .into_par_iter()
            .map(|b| {
                let (i, j) = (b / ny, b % ny);
                let partner = match axis {
                    Axis::X if i + d < nx => Some((i + d, j)),
                    Axis::Y if j + d < ny => Some((i, j + d)),
                    _ => None,
                };
                let Some((pi, pj)) = partner else { return 0.0 };
                (0..nth)
                    .map(|t| (field.get(pi, pj, t) - field.get(i, j, t)).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    };
    let scales: Vec<(f64, f64)> = ds.iter().map(|&d| (d as f64 / n as f64, osc(d))).collect();
    if scales.iter().all(|s| s.1 < CONSTANT_OSC) {
        return Ok(HolderEstimate {
            exponent: HOLDER_CAP,
            fit_quality: 1.0,
            scales,
        });
    }
    let usable: Vec<(f64, f64)> = scales
        .iter()
        .filter(|s| s.1 >= CONSTANT_OSC)
        .map(|s| (s.0.ln(), s.1.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientResolution(n));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(HolderEstimate {
        exponent: slope.clamp(1e-6, HOLDER_CAP),
        fit_quality: r2,
        scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{circle_extension, BaseFraming, FourierSum};

    fn cat() -> IntMatrix {
        IntMatrix::from_flat2([2, 1, 1, 1])
    }

    fn lambda_u() -> f64 {
        (3.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn constant_rho_steps() {
        let sys = circle_extension(&cat(), FourierSum::constant(0.3), BaseFraming::Canonical).unwrap();
        let zero = GridLineField::constant(16, 16, 8, 0.0);
        assert_eq!(graph_transform_step(&zero, &sys).unwrap().range(), 0.0);
        assert_eq!(graph_transform_step(&zero, &sys).unwrap().slope[0], 0.0);
        let one = GridLineField::constant(16, 16, 8, 1.0);
        let img = graph_transform_step(&one, &sys).unwrap();
        assert!(img.slope.iter().all(|v| (v - 1.0 / lambda_u()).abs() < 1e-14));
    }

    #[test]
    fn sine_rho_one_step_closed_form() {
        let sys = circle_extension(&cat(), FourierSum::sin_x(0.2), BaseFraming::Canonical).unwrap();
        let data = match &sys.data {
            SystemData::CircleExtension(d) => d.clone(),
            _ => unreachable!(),
        };
        let n = 32;
        let img = graph_transform_step(&GridLineField::constant(n, n, 4, 0.0), &sys).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                // φ⁻¹ on the base: A⁻¹ = [[1, -1], [-1, 2]].
                let px = frac(x - y);
                let expected = 0.2 * std::f64::consts::TAU * (std::f64::consts::TAU * px).cos() * data.eigen.e_u[0]
                    / lambda_u();
                for t in 0..4 {
                    assert!((img.get(i, j, t) - expected).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn cone_converges_to_series() {
        let sys = circle_extension(&cat(), FourierSum::sin_x(0.2), BaseFraming::Canonical).unwrap();
        let dims = (32, 32, 8);
        let (field, rep) = cone_converge(&sys, GridLineField::constant(dims.0, dims.1, dims.2, 0.0), 1e-10, 80).unwrap();
        assert!(rep.converged && rep.iterations <= 80);
        assert!((rep.contraction_estimate.unwrap() - 1.0 / lambda_u()).abs() < 0.02);
        assert!(rep.invariance_residual <= 1e-9);
        let oracle = series_field(&sys, dims, Direction::Unstable, 40).unwrap();
        assert!(field.sup_distance(&oracle) < 1e-8);
        assert!(field.range() > 1e-3);
        // Fixed point.
        let again = graph_transform_step(&field, &sys).unwrap();
        assert!(again.sup_distance(&field) < 1e-9);
    }

    #[test]
    fn stable_direction_matches_series() {
        let sys = circle_extension(&cat(), FourierSum::sin_x(0.2), BaseFraming::Canonical).unwrap();
        let dims = (32, 32, 4);
        let t = GraphTransform::new(&sys, dims, Direction::Stable).unwrap();
        let (field, rep) = cone_converge_with(&t, GridLineField::constant(32, 32, 4, 0.0), 1e-10, 80).unwrap();
        assert!((rep.contraction_estimate.unwrap() - 1.0 / lambda_u()).abs() < 0.02);
        let oracle = series_field(&sys, dims, Direction::Stable, 60).unwrap();
        assert!(field.sup_distance(&oracle) < 1e-8);
    }

    #[test]
    fn random_init_contracts_to_zero() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let sys = circle_extension(&cat(), FourierSum::constant(0.0), BaseFraming::Canonical).unwrap();
        let mut init = GridLineField::constant(16, 16, 4, 0.0);
        init.slope.iter_mut().for_each(|v| *v = rng.gen_range(-5.0..5.0));
        let (field, rep) = cone_converge(&sys, init, 1e-10, 80).unwrap();
        assert!(field.slope.iter().all(|v| v.abs() < 1e-9));
        let c = rep.contraction_estimate.unwrap();
        assert!((c - 1.0 / lambda_u()).abs() < 0.02, "{c}");
    }

    #[test]
    fn not_contracting_reported() {
        let sys = circle_extension(&cat(), FourierSum::sin_x(0.2), BaseFraming::Canonical).unwrap();
        let r = cone_converge(&sys, GridLineField::constant(16, 16, 2, 0.0), 1e-10, 3);
        assert!(matches!(r, Err(Error::NotContracting { iterations: 3, .. })));
    }

    #[test]
    fn unequal_grid_uses_interpolation() {
        let sys = circle_extension(&cat(), FourierSum::constant(0.0), BaseFraming::Canonical).unwrap();
        let f = GridLineField::constant(16, 24, 2, 1.0);
        let img = graph_transform_step(&f, &sys).unwrap();
        assert!(img.slope.iter().all(|v| (v - 1.0 / lambda_u()).abs() < 1e-14));
    }

    #[test]
    fn holder_calibration() {
        let lin = GridLineField::from_fn(256, 8, 1, |x, _, _| x);
        let h = holder_exponent(&lin, Axis::X).unwrap();
        assert!((0.95..=1.05).contains(&h.exponent));
        assert!(h.fit_quality > 0.999);
        let c = GridLineField::constant(64, 64, 2, 0.7);
        assert_eq!(holder_exponent(&c, Axis::X).unwrap().exponent, HOLDER_CAP);
        let sq = GridLineField::from_fn(1024, 4, 1, |x, _, _| x.sqrt());
        let h = holder_exponent(&sq, Axis::X).unwrap();
        assert!((h.exponent - 0.5).abs() < 0.02, "{h:?}");
        assert!(matches!(
            holder_exponent(&GridLineField::constant(16, 16, 1, 0.0), Axis::X),
            Err(Error::InsufficientResolution(16))
        ));
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = GridLineField::from_fn(4, 3, 2, |x, y, t| x + 10.0 * y + 100.0 * t);
        let p = dir.path().join("f.bin");
        f.write_binary(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[..8], b"FLGRID\x00\x01");
        assert_eq!(bytes.len(), GRID_HEADER_LEN + 8 * 24);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 0);
        assert_eq!(GridLineField::read_binary(&p).unwrap(), f);
        let c = dir.path().join("f.csv");
        f.write_csv_slice(&c, 128).unwrap();
        let text = std::fs::read_to_string(&c).unwrap();
        assert!(text.starts_with("x,y,theta,slope\n"));
        assert_eq!(text.lines().count(), 1 + 12);
    }
}

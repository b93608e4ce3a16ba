//! Rotation numbers, fiber rotation profiles, and the linearization of a
//! parabolic twist (x, y) ↦ (x + 2y + 0.1 sin 2πy, y).

use framelab::circle::{
    arclength_rotation, fiber_rotation_profile, linearize_parabolic_system, rotation_number, CircleMapLift, FiberAxis,
};
use framelab::linalg::IntMatrix;
use framelab::models::{parabolic_twist, toral_affine};
use std::f64::consts::TAU;

fn main() -> framelab::Result<()> {
    let r = CircleMapLift::rotation(0.25);
    println!("rho(R_0.25) = {:.12}", rotation_number(&r, 1_000)?);
    let f = CircleMapLift::new("arnold", 1, |x| x + 0.3 + 0.05 * (TAU * x).sin());
    println!("rho(arnold) = {:.6}", rotation_number(&f, 100_000)?);

    // Time-1 flow of a nonvanishing field on the circle, measured in its own
    // arclength, is a rigid rotation.
    let g = |t: f64| 1.0 + 0.5 * (TAU * t).cos();
    let flow = CircleMapLift::flow(g, 0.3, 400);
    println!("arclength rotation of flow = {:.9}", arclength_rotation(&flow, &g)?);

    let a3 = toral_affine(&IntMatrix::from_flat2([1, 3, 0, 1]), &[0.0, 0.0])?;
    let profile = fiber_rotation_profile(&a3, FiberAxis::X)?;
    let max_err = profile
        .z
        .iter()
        .zip(&profile.unwrapped)
        .map(|(z, a)| (a - 3.0 * z).abs())
        .fold(0.0, f64::max);
    println!("A_3 profile: degree {}, sup |alpha - 3y| = {max_err:.2e}", profile.degree_k);

    let twist = parabolic_twist(2, 0.1)?;
    let lin = linearize_parabolic_system(&twist, FiberAxis::X)?;
    let rep = lin.report(256)?;
    println!(
        "twist linearization: k = {}, sup distance to A_k on {}^2 grid = {:.2e}, min alpha' = {:.4}",
        rep.k, rep.grid, rep.sup_distance, rep.min_alpha_slope
    );
    Ok(())
}

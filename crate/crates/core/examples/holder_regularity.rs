//! Hölder exponent of the unstable line field: Lipschitz for constant ρ,
//! strictly below one for ρ = 0.2 sin 2πx.

use framelab::linalg::IntMatrix;
use framelab::models::{circle_extension, BaseFraming, FourierSum};
use framelab::splitting::{holder_exponent, series_field, Axis, Direction, GridLineField};

fn report(name: &str, field: &GridLineField) -> framelab::Result<()> {
    for axis in [Axis::X, Axis::Y] {
        let h = holder_exponent(field, axis)?;
        println!("{name:<22} {axis:?}: exponent {:.4}  R^2 {:.4}", h.exponent, h.fit_quality);
    }
    Ok(())
}

fn main() -> framelab::Result<()> {
    let n = 256;
    let a = IntMatrix::from_flat2([2, 1, 1, 1]);
    report("linear calibration", &GridLineField::from_fn(n, n, 2, |x, _, _| x))?;
    for (name, rho) in [("constant rho", FourierSum::constant(0.3)), ("rho = 0.2 sin 2pi x", FourierSum::sin_x(0.2))] {
        let sys = circle_extension(&a, rho, BaseFraming::Canonical)?;
        report(name, &series_field(&sys, (n, n, 2), Direction::Unstable, 40)?)?;
    }
    Ok(())
}

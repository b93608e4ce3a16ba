//! Lyapunov exponents from several starting points against the logarithms
//! of the cocycle eigenvalues.

use framelab::cocycle::{autonomy_check, log_moduli, lyapunov_exponents};
use framelab::linalg::IntMatrix;
use framelab::models::{cat_map, heis_system, sol_system, toral_affine, anosov_3d_matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
    let systems = [
        cat_map(),
        heis_system(&cat, 1)?,
        sol_system(&cat)?,
        toral_affine(&anosov_3d_matrix(), &[0.0; 3])?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for sys in systems {
        let samples = sys.sample_points(&mut rng, 1_000);
        let m = autonomy_check(&sys.map, &sys.framing, &samples, None)?.matrix();
        let starts = sys.sample_points(&mut rng, 16);
        let spec = lyapunov_exponents(&sys.map, &sys.framing, &sys.manifold, &starts, 1_000)?;
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:+.5}")).collect::<Vec<_>>().join(" ");
        println!("{}", sys.name);
        println!("  exponents  {}", fmt(&spec.exponents));
        println!("  log|eig M| {}", fmt(&log_moduli(&m)));
        println!("  spread     {:.2e}", spec.per_point_spread);
    }
    Ok(())
}

//! Mapping torus of the cat map: the cocycle is constant but the structure
//! constants vary along the circle, so the system routes to the suspension
//! branch. The bracket coefficient transforms by the predicted factor.

use framelab::classify::classify_3d;
use framelab::cocycle::{autonomy_check, bracket_coefficient_equivariance, verify_partial_hyperbolicity};
use framelab::fields::DEFAULT_BRACKET_STEP;
use framelab::linalg::IntMatrix;
use framelab::models::{suspension, DEFAULT_SUSPENSION_WARP};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let sys = suspension(&IntMatrix::from_flat2([2, 1, 1, 1]), 1, [0.0, 0.0], DEFAULT_SUSPENSION_WARP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples = sys.sample_points(&mut rng, 2_000);

    let report = autonomy_check(&sys.map, &sys.framing, &samples, None)?;
    let spec = verify_partial_hyperbolicity(&report.matrix())?;
    let tensor = sys.structure_tensor(&samples[..64], DEFAULT_BRACKET_STEP)?;
    let constant = tensor.is_constant(1e-4);
    println!("M = {:?}", report.m);
    println!("structure constants constant: {constant}");
    println!("branch: {:?}", classify_3d(&report, &spec, &tensor, constant)?);

    // [X_s, X_c] = beta X_s with framing order (s, c, u).
    let eq = bracket_coefficient_equivariance(
        &sys.map,
        &sys.framing,
        &sys.manifold,
        (0, 1, 0),
        &spec,
        &samples[..256],
        DEFAULT_BRACKET_STEP,
    )?;
    println!(
        "beta in [{:.4}, {:.4}], equivariance violation {:.2e}",
        eq.beta_min, eq.beta_max, eq.max_violation
    );
    Ok(())
}

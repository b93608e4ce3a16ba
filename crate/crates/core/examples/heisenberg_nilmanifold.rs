//! Lattice automorphism of the Heisenberg nilmanifold: constant cocycle,
//! constant structure constants, and routing to the heis3 branch.

use framelab::classify::{classify_3d, classify_algebra};
use framelab::cocycle::{autonomy_check, verify_partial_hyperbolicity};
use framelab::fields::{jacobi_residual, DEFAULT_BRACKET_STEP};
use framelab::linalg::IntMatrix;
use framelab::models::heis_system;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let sys = heis_system(&IntMatrix::from_flat2([2, 1, 1, 1]), 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = sys.sample_points(&mut rng, 2_000);

    let report = autonomy_check(&sys.map, &sys.framing, &samples, None)?;
    let spec = verify_partial_hyperbolicity(&report.matrix())?;
    println!("framing {}: M = {:?}", sys.framing.descriptor(), report.m);
    println!("lambda_s, lambda_c, lambda_u = {:.6}, {:.6}, {:.6}", spec.lambda_s, spec.lambda_c, spec.lambda_u);

    let tensor = sys.structure_tensor(&samples[..64], DEFAULT_BRACKET_STEP)?;
    let constant = tensor.is_constant(1e-4);
    println!("structure constants constant: {constant}");
    println!("Jacobi residual: {:.2e}", jacobi_residual(&tensor)?.amax());
    println!("algebra: {:?}", classify_algebra(&tensor)?);
    println!("branch: {:?}", classify_3d(&report, &spec, &tensor, constant)?);
    Ok(())
}

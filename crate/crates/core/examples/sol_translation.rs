//! Time-one translation on a Sol manifold and the deck group it respects.

use framelab::classify::{classify_3d, classify_algebra};
use framelab::cocycle::{autonomy_check, verify_partial_hyperbolicity};
use framelab::fields::DEFAULT_BRACKET_STEP;
use framelab::linalg::IntMatrix;
use framelab::models::sol_system;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let sys = sol_system(&IntMatrix::from_flat2([2, 1, 1, 1]))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples = sys.sample_points(&mut rng, 2_000);

    let p = &samples[0];
    let q = sys.map.apply(p);
    let reduced = sys.manifold.reduce_to_fundamental_domain(&q)?;
    println!("p = {:?}", p.as_slice());
    println!("phi(p) = {:?}, reduced {:?}", q.as_slice(), reduced.as_slice());
    println!("deck equivalent: {}", sys.manifold.deck_equivalent(&q, &reduced, 3));

    let report = autonomy_check(&sys.map, &sys.framing, &samples, None)?;
    let spec = verify_partial_hyperbolicity(&report.matrix())?;
    let tensor = sys.structure_tensor(&samples[..64], DEFAULT_BRACKET_STEP)?;
    println!("M = {:?} (max deviation {:.1e})", report.m, report.max_deviation);
    println!("algebra: {:?}", classify_algebra(&tensor)?);
    println!("branch: {:?}", classify_3d(&report, &spec, &tensor, tensor.is_constant(1e-4))?);
    Ok(())
}

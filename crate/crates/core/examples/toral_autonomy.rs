//! Autonomy check on toral maps: the cat map has a constant derivative
//! cocycle, the perturbed cat map does not.

use framelab::classify::classify_2d;
use framelab::cocycle::{autonomy_check, determinant_check};
use framelab::models::{cat_map, perturbed_cat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for sys in [cat_map(), perturbed_cat()] {
        let samples = sys.sample_points(&mut rng, 10_000);
        let report = autonomy_check(&sys.map, &sys.framing, &samples, None)?;
        println!("{}", sys.name);
        println!("  M             = {:?}", report.m);
        println!("  max deviation = {:.3e}", report.max_deviation);
        println!("  autonomous    = {}", report.autonomous);
        if report.autonomous {
            println!("  det sign      = {:?}", determinant_check(&report));
            println!("  class         = {:?}", classify_2d(&report.matrix())?);
        }
    }
    Ok(())
}

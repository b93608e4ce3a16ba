//! The six unimodular three-dimensional Lie algebras, recognized from their
//! structure constants in a random basis.

use framelab::classify::{classify_algebra_detailed, standard_tensors};
use framelab::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (class, tensor) in standard_tensors() {
        let p = loop {
            let m = Matrix::from_fn(3, 3, |_, _| rng.gen_range(-2.0..2.0));
            if m.determinant().abs() > 0.2 {
                break m;
            }
        };
        let ev = classify_algebra_detailed(&tensor.change_basis(&p)?)?;
        println!(
            "{:<9} -> {:<9} rank {} killing {:?} ad eigenvalues {:?}",
            format!("{class:?}"),
            format!("{:?}", ev.class),
            ev.derived_rank,
            ev.killing_signature,
            ev.ad_eigenvalues
                .iter()
                .map(|(re, im)| format!("{re:.3}{im:+.3}i"))
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}

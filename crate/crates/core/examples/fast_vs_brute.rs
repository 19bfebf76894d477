//! Linear-time conjugate against the quadratic oracle on random nonconvex data.

use std::time::Instant;

use econvex::funcmodel::make_uniform_grid;
use econvex::transform::{e_conjugate_brute, e_conjugate_fast};
use econvex::{ErrorFunction, ExtReal, SampledFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> econvex::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 4096;
    let grid = make_uniform_grid(-3.0, 3.0, n)?;
    let values = (0..n)
        .map(|_| if rng.gen_bool(0.1) { ExtReal::POS_INF } else { ExtReal::of(rng.gen_range(-10.0..10.0)) })
        .collect();
    let f = SampledFunction::new(grid, values)?;
    let dual = make_uniform_grid(-20.0, 20.0, n + 1)?;

    for e in [ErrorFunction::Zero, ErrorFunction::quadratic(2.0)?, ErrorFunction::scaled_distance(1.5)?] {
        let t0 = Instant::now();
        let fast = e_conjugate_fast(&f, &e, 0.25, &dual)?;
        let t1 = Instant::now();
        let brute = e_conjugate_brute(&f, &e, 0.25, &dual)?;
        let t2 = Instant::now();
        println!(
            "{:<16} max diff {:.1e}   fast {:>8.2?}   brute {:>8.2?}",
            e.kind_name(),
            fast.max_abs_diff(&brute).value(),
            t1 - t0,
            t2 - t1
        );
    }
    Ok(())
}

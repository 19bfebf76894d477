//! Runtime of the linear-time conjugate as n doubles.

use std::time::Instant;

use econvex::funcmodel::make_uniform_grid;
use econvex::transform::e_conjugate_fast;
use econvex::{ErrorFunction, SampledFunction};

fn main() -> econvex::Result<()> {
    let e = ErrorFunction::quadratic(1.0)?;
    let mut prev: Option<f64> = None;
    for p in 12..=18 {
        let n = 1usize << p;
        let grid = make_uniform_grid(-3.0, 3.0, n)?;
        let f = SampledFunction::from_fn(grid, |x| (7.0 * x).sin() * 10.0)?;
        let dual = make_uniform_grid(-40.0, 40.0, n)?;
        let best = (0..5)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(e_conjugate_fast(&f, &e, 0.5, &dual).unwrap());
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        let ratio = prev.map(|p| format!("{:.2}", best / p)).unwrap_or_default();
        println!("n = 2^{p:<2} {:>9.3} ms  {ratio}", best * 1e3);
        prev = Some(best);
    }
    Ok(())
}

//! (e,y)-conjugate and biconjugate of `-x^2` with the quadratic kernel.
//!
//! `cargo run --example conjugate`

use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::transform::{e_biconjugate, e_conjugate_fast};
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let grid = make_uniform_grid(-2.0, 2.0, 401)?;
    let dual = make_uniform_grid(-6.0, 6.0, 241)?;
    let f = sample(&ClosedForm::NegSquare, &grid);
    let e = ErrorFunction::quadratic(1.0)?;
    let y = 1.0;

    // f + (x - y)^2 = 1 - 2x is affine, so on [-2, 2] the conjugate is 2|s + 2| - 1.
    let t = e_conjugate_fast(&f, &e, y, &dual)?;
    for j in [0, 80, 120, 180] {
        let s = dual.points()[j];
        println!("f*({s:>4}) = {:<20} 2|s + 2| - 1 = {}", t.values[j].to_string(), 2.0 * (s + 2.0).abs() - 1.0);
    }

    let b = e_biconjugate(&f, &e, y, &dual, &grid)?;
    let worst = (0..grid.len())
        .map(|i| (b.value(i).value() - (1.0 - 2.0 * grid.points()[i])).abs())
        .fold(0.0, f64::max);
    println!("max |f** - (1 - 2x)| = {worst:.3e} (dual step {})", dual.step().unwrap());
    Ok(())
}

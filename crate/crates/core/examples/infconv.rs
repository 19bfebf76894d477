//! Infimal convolution and the sum-conjugate inequality.

use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::transform::inf_convolution;
use econvex::verify::check_sum_conjugate_infconv;
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let grid = make_uniform_grid(-2.0, 2.0, 81)?;
    let half_sq = sample(&ClosedForm::Quad { a: 1.0, b: 0.0, c: 0.0 }, &grid);
    let out = make_uniform_grid(-2.0, 2.0, 9)?;

    // (x^2/2) box (x^2/2) = x^2/4
    let h = inf_convolution(&half_sq, &half_sq, &out)?;
    for (x, v) in out.points().iter().zip(h.values()) {
        println!("x = {x:>5}: {v:<8} (x^2/4 = {})", x * x / 4.0);
    }

    let dual = make_uniform_grid(-4.0, 4.0, 161)?;
    let r = check_sum_conjugate_infconv(&half_sq, &half_sq, &ErrorFunction::Zero, &ErrorFunction::Zero, 0.0, 0.0, &dual)?;
    println!("lhs {} rhs {} split {:?} equality {}", r.lhs, r.rhs, r.split, r.equality_flag);
    Ok(())
}

//! Optimality certificates on the double well `x^4 - x^2`.

use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::verify::{certify_global_min, certify_local_min, check_subdiff_inclusion, Inclusion};
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let grid = make_uniform_grid(-1.5, 1.5, 301)?;
    let f = sample(&ClosedForm::QuarticWell, &grid);
    let e = ErrorFunction::quadratic(1.0)?;

    let argmin = f.point(f.argmin().expect("proper"));
    let g = certify_global_min(&f, &e, argmin)?;
    println!("global at {argmin:+.2}: certified {} interval {:?}", g.certified, g.interval);
    for x0 in [-0.71, 0.0, 0.71] {
        let l = certify_local_min(&f, &e, x0)?;
        println!("local  at {x0:+.2}: certified {} (grid local min {})", l.certified, l.is_local_min);
    }

    // f - g minimal at 0 with f = x^2 + |x|, g = |x|.
    let f2 = sample(&ClosedForm::Quad { a: 2.0, b: 0.0, c: 0.0 }, &grid).add(&sample(&ClosedForm::Abs, &grid))?;
    let g2 = sample(&ClosedForm::Abs, &grid);
    let r = check_subdiff_inclusion(&f2, &g2, &ErrorFunction::Zero, 0.0, Inclusion::Global)?;
    println!("inclusion gap {} at {:?}", r.max_violation, r.witness);
    Ok(())
}

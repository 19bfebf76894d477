//! e-subdifferential intervals, point-cloud membership and e-monotonicity.

use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::subdiff::{check_e_monotone, e2_subdiff_interval, e_subdiff_interval, e_subdiff_membership, PointCloud};
use econvex::verify::sampled_gradient;
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let grid = make_uniform_grid(-1.0, 1.0, 201)?;
    let abs = sample(&ClosedForm::Abs, &grid);
    println!("d|.|(0)          = {:?}", e_subdiff_interval(&abs, &ErrorFunction::Zero, 0.0)?);

    let g2 = make_uniform_grid(-2.0, 2.0, 401)?;
    let negsq = sample(&ClosedForm::NegSquare, &g2);
    let e = ErrorFunction::quadratic(1.0)?;
    for x in [-1.0, 0.5] {
        println!("d^e(-x^2)({x:>4})  = {:?}", e_subdiff_interval(&negsq, &e, x)?);
        println!("d^2e(-x^2)({x:>4}) = {:?}", e2_subdiff_interval(&negsq, &e, x)?);
    }

    let cloud = PointCloud::from_sampled(&negsq, &e)?;
    println!("-1 in d^e f(0.5)? {}", e_subdiff_membership(&cloud, &[0.5], &[-1.0])?);
    println!(" 0 in d^e f(0.5)? {}", e_subdiff_membership(&cloud, &[0.5], &[0.0])?);

    let gradient = sampled_gradient(&ClosedForm::NegSquare, &make_uniform_grid(-2.0, 2.0, 41)?)?;
    let r = check_e_monotone(&gradient, &e, 2.0)?;
    println!("gradient of -x^2 is 2e-monotone: worst {} at {:?}", r.max_violation, r.witness);
    Ok(())
}

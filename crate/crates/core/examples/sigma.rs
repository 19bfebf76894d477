//! Lower bound on the sigma function of `-x^2` at the origin.

use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::verify::sigma_lower_bound;
use econvex::ClosedForm;

fn main() -> econvex::Result<()> {
    for a in [1.0, 10.0, 100.0] {
        let grid = make_uniform_grid(-a, a, 401)?;
        let f = sample(&ClosedForm::NegSquare, &grid);
        let s = sigma_lower_bound(&f, 0.0)?;
        println!("a = {a:>5}: sigma(0) >= {:.4} (at x = {}, t = {})", s.bound, s.x, s.t);
    }
    Ok(())
}

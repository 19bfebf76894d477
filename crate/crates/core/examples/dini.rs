//! Upper Dini derivatives and the two-point Dini bound.

use econvex::subdiff::dini_upper;
use econvex::verify::{check_dini_bound, pair_grid};
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let abs = ClosedForm::Abs;
    for u in [1.0, -1.0] {
        let d = dini_upper(&abs, 0.0, u)?;
        println!("D|.|(0; {u:+}) = {} (converged {})", d.value, d.converged);
    }

    let pairs = pair_grid(-1.0, 1.0, 50)?;
    let cases = [
        ("-x^2", ClosedForm::NegSquare, ErrorFunction::quadratic(1.0)?),
        ("sin", ClosedForm::Sine, ErrorFunction::scaled_distance(1.0)?),
    ];
    for (name, f, e) in cases {
        let r = check_dini_bound(&f, &e, &pairs)?;
        println!(
            "{name:<5} worst {:.3e} at {:?}, converged {:.1}%",
            r.report.max_violation.value(),
            r.report.witness,
            100.0 * r.converged_fraction
        );
    }
    Ok(())
}

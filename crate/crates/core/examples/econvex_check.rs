//! Definition and slope characterizations of e-convexity on sampled fixtures.

use econvex::errorfn::validate_error;
use econvex::funcmodel::{make_uniform_grid, sample};
use econvex::verify::{check_char_slopes, check_e_convex_def, TMode};
use econvex::{ClosedForm, ErrorFunction};

fn main() -> econvex::Result<()> {
    let grid = make_uniform_grid(-2.0, 2.0, 201)?;
    let cases = [
        ("-x^2, (x-y)^2", ClosedForm::NegSquare, ErrorFunction::quadratic(1.0)?),
        ("-x^2, zero", ClosedForm::NegSquare, ErrorFunction::Zero),
        ("x exp(-x), exp kernel", ClosedForm::XExpNeg, ErrorFunction::ExpKernel),
        ("sin, |x-y|", ClosedForm::Sine, ErrorFunction::scaled_distance(1.0)?),
    ];
    for (name, cf, e) in cases {
        let f = sample(&cf, &grid);
        let def = check_e_convex_def(&f, &e, &TMode::AllNodeTriples)?;
        let slopes = check_char_slopes(&f, &e)?;
        println!(
            "{name:<24} def {:>11.3e} at {:?}   slopes {:>11.3e}",
            def.max_violation.value(),
            def.witness,
            slopes.max_violation.value()
        );
    }

    let v = validate_error(&ErrorFunction::ExpKernel, &grid)?;
    println!("exp kernel: symmetric {}, nonneg {}, zero diagonal {}, triangle {}", v.symmetric_ok, v.nonneg_ok, v.zero_diag_ok, v.triangle_ok);
    Ok(())
}

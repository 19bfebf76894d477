use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Closed-form test functions `ℝ → ℝ ∪ {+∞}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// `−x²`
    NegSquare,
    /// `x·exp(−x)`
    XExpNeg,
    /// `(a/2)x² + bx + c`
    Quad { a: f64, b: f64, c: f64 },
    /// `|x|`
    Abs,
    /// `x⁴ − x²`, wells at `±1/√2`
    QuarticWell,
    /// `sin x`
    Sine,
    /// `0` at `x0`, `+∞` elsewhere
    IndicatorPoint { x0: f64 },
}

/// Names accepted by [`ClosedForm::from_name`].
pub const REGISTRY: &[&str] = &[
    "neg_square",
    "x_exp_neg",
    "quad",
    "abs",
    "quartic_well",
    "sine",
    "indicator_point",
];

impl ClosedForm {
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "quad" => &["a", "b", "c"],
            "indicator_point" => &["x0"],
            n if REGISTRY.contains(&n) => &[],
            _ => return Err(Error::UnknownFixture(name.to_string())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidFunction(format!(
                "fixture `{name}` has no parameter `{k}`"
            )));
        }
        if let Some((k, v)) = params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("parameter `{k}` = {v}")));
        }
        let p = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        Ok(match name {
            "neg_square" => ClosedForm::NegSquare,
            "x_exp_neg" => ClosedForm::XExpNeg,
            "quad" => ClosedForm::Quad {
                a: p("a", 1.0),
                b: p("b", 0.0),
                c: p("c", 0.0),
            },
            "abs" => ClosedForm::Abs,
            "quartic_well" => ClosedForm::QuarticWell,
            "sine" => ClosedForm::Sine,
            "indicator_point" => ClosedForm::IndicatorPoint { x0: p("x0", 0.0) },
            _ => unreachable!(),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::NegSquare => "neg_square",
            ClosedForm::XExpNeg => "x_exp_neg",
            ClosedForm::Quad { .. } => "quad",
            ClosedForm::Abs => "abs",
            ClosedForm::QuarticWell => "quartic_well",
            ClosedForm::Sine => "sine",
            ClosedForm::IndicatorPoint { .. } => "indicator_point",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match *self {
            ClosedForm::Quad { a, b, c } => {
                m.insert("a".into(), a);
                m.insert("b".into(), b);
                m.insert("c".into(), c);
            }
            ClosedForm::IndicatorPoint { x0 } => {
                m.insert("x0".into(), x0);
            }
            _ => {}
        }
        m
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        let v = match *self {
            ClosedForm::NegSquare => -(x * x),
            ClosedForm::XExpNeg => x * (-x).exp(),
            ClosedForm::Quad { a, b, c } => 0.5 * a * x * x + b * x + c,
            ClosedForm::Abs => x.abs(),
            ClosedForm::QuarticWell => x.powi(4) - x * x,
            ClosedForm::Sine => x.sin(),
            ClosedForm::IndicatorPoint { x0 } => {
                if (x - x0).abs() <= 1e-12 * x0.abs().max(1.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        };
        ExtReal::of(v)
    }

    /// Classical derivative where it exists.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match *self {
            ClosedForm::NegSquare => Some(-2.0 * x),
            ClosedForm::XExpNeg => Some((1.0 - x) * (-x).exp()),
            ClosedForm::Quad { a, b, .. } => Some(a * x + b),
            ClosedForm::Abs => (x != 0.0).then(|| x.signum()),
            ClosedForm::QuarticWell => Some(4.0 * x.powi(3) - 2.0 * x),
            ClosedForm::Sine => Some(x.cos()),
            ClosedForm::IndicatorPoint { .. } => None,
        }
    }

    /// Whether the function is finite and differentiable on all of ℝ.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, ClosedForm::Abs | ClosedForm::IndicatorPoint { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registry_name_resolves() {
        for name in REGISTRY {
            let f = ClosedForm::from_name(name, &BTreeMap::new()).unwrap();
            assert_eq!(f.name(), *name);
        }
        assert_eq!(
            ClosedForm::from_name("cubic", &BTreeMap::new()),
            Err(Error::UnknownFixture("cubic".into()))
        );
    }

    #[test]
    fn rejects_unknown_parameter() {
        let mut p = BTreeMap::new();
        p.insert("q".to_string(), 1.0);
        assert!(ClosedForm::from_name("quad", &p).is_err());
        assert!(ClosedForm::from_name("abs", &p).is_err());
    }

    #[test]
    fn values() {
        assert_eq!(ClosedForm::XExpNeg.eval(0.0), 0.0);
        assert_eq!(ClosedForm::NegSquare.eval(3.0), -9.0);
        assert_eq!(ClosedForm::Quad { a: 2.0, b: 0.0, c: 0.0 }.eval(3.0), 9.0);
        assert_eq!(ClosedForm::QuarticWell.eval(1.0), 0.0);
        assert!(ClosedForm::IndicatorPoint { x0: 0.0 }.eval(1.0).is_pos_inf());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for f in [
            ClosedForm::NegSquare,
            ClosedForm::XExpNeg,
            ClosedForm::Quad { a: 1.5, b: -0.5, c: 2.0 },
            ClosedForm::QuarticWell,
            ClosedForm::Sine,
        ] {
            for &x in &[-1.3, -0.2, 0.0, 0.7, 1.9] {
                let fd = (f.eval(x + h).value() - f.eval(x - h).value()) / (2.0 * h);
                assert!((fd - f.derivative(x).unwrap()).abs() < 1e-6, "{f:?} at {x}");
            }
        }
    }
}

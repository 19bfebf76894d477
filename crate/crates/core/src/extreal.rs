//! Extended reals `ℝ ∪ {±∞}` with the asymmetric infinity convention
//! `(+∞) + (−∞) = (−∞) + (+∞) = −∞`.
//!
//! Under this convention `−∞` is absorbing in every sum, so a maximand of
//! the form `⟨s, x⟩ − f(x) − e(x, y)` with `f(x) = +∞` evaluates to `−∞`
//! and never wins a supremum.
//!
//! Because `−∞` absorbs, a multi-term sum is `−∞` as soon as any term is
//! `−∞` and an ordinary (possibly `+∞`) float sum otherwise, so the grouping
//! of infinite terms never changes the class of the result. Finite terms
//! still round, and every multi-term expression in this crate is evaluated
//! strictly left to right.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite real, `+∞` or `−∞`. NaN is never representable.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const POS_INF: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps a float; `±inf` map to the infinities, NaN is rejected.
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else {
            Ok(ExtReal(v))
        }
    }

    /// Wraps a float produced by finite arithmetic. Panics on NaN.
    pub fn of(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN is not an extended real");
        ExtReal(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// The underlying float, with infinities as `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Multiplication by a finite scalar with `0 · (±∞) = 0`.
    pub fn scale(self, k: f64) -> Self {
        assert!(k.is_finite(), "scale factor must be finite");
        if k == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * k)
        }
    }

    /// Division by a finite nonzero scalar.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, d: f64) -> Self {
        assert!(d.is_finite() && d != 0.0, "divisor must be finite and nonzero");
        ExtReal(self.0 / d)
    }

    /// Absolute value.
    pub fn abs(self) -> Self {
        ExtReal(self.0.abs())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// Sum under the convention `(+∞) + (−∞) = −∞`.
pub fn add_ext(a: ExtReal, b: ExtReal) -> ExtReal {
    if a.is_neg_inf() || b.is_neg_inf() {
        ExtReal::NEG_INF
    } else {
        ExtReal(a.0 + b.0)
    }
}

pub fn neg_ext(a: ExtReal) -> ExtReal {
    ExtReal(-a.0)
}

/// `a + (−b)`; in particular `(+∞) − (+∞) = −∞`.
pub fn sub_ext(a: ExtReal, b: ExtReal) -> ExtReal {
    add_ext(a, neg_ext(b))
}

pub fn max_ext(values: &[ExtReal]) -> Result<ExtReal> {
    values
        .iter()
        .copied()
        .reduce(ExtReal::max)
        .ok_or(Error::EmptyReduction)
}

pub fn min_ext(values: &[ExtReal]) -> Result<ExtReal> {
    values
        .iter()
        .copied()
        .reduce(ExtReal::min)
        .ok_or(Error::EmptyReduction)
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        add_ext(self, rhs)
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        sub_ext(self, rhs)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        neg_ext(self)
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        add_ext(self, ExtReal::of(rhs))
    }
}

impl Sub<f64> for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: f64) -> ExtReal {
        sub_ext(self, ExtReal::of(rhs))
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded at construction, so partial_cmp is total here.
        self.0.partial_cmp(&other.0).expect("ExtReal is never NaN")
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.write_str("inf")
        } else if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "Infinity" | "+Infinity" => Ok(ExtReal::POS_INF),
            "-inf" | "-Infinity" => Ok(ExtReal::NEG_INF),
            t => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("`{t}` is not an extended real")))?;
                if v.is_infinite() {
                    // Only the spelled-out forms above are accepted for infinities.
                    return Err(Error::Parse(format!("`{t}` is not an extended real")));
                }
                ExtReal::new(v).map_err(|_| Error::Parse(format!("`{t}` is not an extended real")))
            }
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.serialize_str(if self.is_pos_inf() { "inf" } else { "-inf" })
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtRealVisitor;

        impl Visitor<'_> for ExtRealVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                ExtReal::new(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtRealVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ExtReal = ExtReal::POS_INF;
    const N: ExtReal = ExtReal::NEG_INF;

    #[test]
    fn convention_table() {
        let two = ExtReal::of(2.0);
        let cases = [
            (P, P, P),
            (P, N, N),
            (N, P, N),
            (N, N, N),
            (P, two, P),
            (two, P, P),
            (N, two, N),
            (two, N, N),
            (two, two, ExtReal::of(4.0)),
        ];
        for (a, b, want) in cases {
            assert_eq!(add_ext(a, b), want, "{a} + {b}");
        }
    }

    #[test]
    fn spec_examples() {
        assert_eq!(add_ext(ExtReal::of(1.5), ExtReal::of(2.5)), ExtReal::of(4.0));
        assert_eq!(add_ext(N, ExtReal::of(7.0)), N);
        assert_eq!(neg_ext(P), N);
        assert_eq!(max_ext(&[N, ExtReal::of(3.0), P]).unwrap(), P);
        assert_eq!(sub_ext(P, P), N);
        assert_eq!(max_ext(&[]), Err(Error::EmptyReduction));
        assert_eq!(min_ext(&[]), Err(Error::EmptyReduction));
    }

    #[test]
    fn nan_rejected() {
        assert_eq!(ExtReal::new(f64::NAN), Err(Error::NotANumber));
        assert!("nan".parse::<ExtReal>().is_err());
    }

    #[test]
    fn order() {
        assert!(N < ExtReal::of(-1e308));
        assert!(ExtReal::of(1e308) < P);
        assert_eq!(min_ext(&[P, ExtReal::of(0.0), N]).unwrap(), N);
    }

    #[test]
    fn text_forms() {
        assert_eq!(P.to_string(), "inf");
        assert_eq!(N.to_string(), "-inf");
        assert_eq!(ExtReal::of(0.1).to_string(), "0.1");
        assert_eq!("-inf".parse::<ExtReal>().unwrap(), N);
        assert_eq!("2.5".parse::<ExtReal>().unwrap(), ExtReal::of(2.5));
        let json = serde_json::to_string(&vec![ExtReal::of(1.5), P, N]).unwrap();
        assert_eq!(json, r#"[1.5,"inf","-inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(r#"[1.5,"inf","-inf",3]"#).unwrap();
        assert_eq!(back, vec![ExtReal::of(1.5), P, N, ExtReal::of(3.0)]);
    }

    #[test]
    fn scaling() {
        assert_eq!(P.scale(0.0), ExtReal::ZERO);
        assert_eq!(P.scale(-2.0), N);
        assert_eq!(ExtReal::of(3.0).div(-2.0), ExtReal::of(-1.5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ext() -> impl Strategy<Value = ExtReal> {
            prop_oneof![
                1 => Just(ExtReal::POS_INF),
                1 => Just(ExtReal::NEG_INF),
                4 => (-1e6f64..1e6).prop_map(ExtReal::of),
            ]
        }

        proptest! {
            #[test]
            fn add_commutes(a in ext(), b in ext()) {
                prop_assert_eq!(add_ext(a, b), add_ext(b, a));
            }

            #[test]
            fn double_negation(a in ext()) {
                prop_assert_eq!(neg_ext(neg_ext(a)), a);
            }

            #[test]
            fn add_associates_on_classes(a in ext(), b in ext(), c in ext()) {
                let l = (a + b) + c;
                let r = a + (b + c);
                prop_assert_eq!(l.is_finite(), r.is_finite());
                if !l.is_finite() {
                    prop_assert_eq!(l, r);
                }
            }

            #[test]
            fn finite_add_associates(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3) {
                // Integers keep the float sums exact.
                let (a, b, c) = (ExtReal::of(a.round()), ExtReal::of(b.round()), ExtReal::of(c.round()));
                prop_assert_eq!((a + b) + c, a + (b + c));
            }
        }
    }
}

//! Discrete Legendre transforms of node data `(xᵢ, fᵢ, eᵢ)`:
//! `φ(s) = maxᵢ (s xᵢ − fᵢ) − eᵢ`, by enumeration or by a lower-hull sweep.

use crate::extreal::ExtReal;

/// One term of the maximand, evaluated left to right.
#[inline]
pub(crate) fn term(x: f64, f: ExtReal, e: ExtReal, s: f64) -> ExtReal {
    ExtReal::of(s * x) - f - e
}

/// `maxᵢ term(xᵢ, fᵢ, eᵢ, s)`, `−∞` when every term is `−∞`.
pub(crate) fn brute_sup(x: &[f64], f: &[ExtReal], e: &[ExtReal], s: f64) -> ExtReal {
    x.iter()
        .zip(f)
        .zip(e)
        .fold(ExtReal::NEG_INF, |acc, ((&xi, &fi), &ei)| acc.max(term(xi, fi, ei, s)))
}

/// Indices of the lower convex hull of the finite points `(xᵢ, fᵢ + eᵢ)`,
/// `x` strictly increasing. Collinear middle points are dropped.
pub(crate) fn lower_hull(x: &[f64], f: &[ExtReal], e: &[ExtReal]) -> Vec<usize> {
    let g = |i: usize| f[i].value() + e[i].value();
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        if !(f[i].is_finite() && e[i].is_finite()) {
            continue;
        }
        let gi = g(i);
        while let [.., a, b] = hull[..] {
            let cross = (x[b] - x[a]) * (gi - g(a)) - (g(b) - g(a)) * (x[i] - x[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Linear-time transform at increasing `slopes`: build the lower hull once,
/// then walk it with a single pointer. The pointer only advances on a strict
/// increase of the maximand, so ties resolve to the leftmost vertex.
pub(crate) fn sweep_sup(x: &[f64], f: &[ExtReal], e: &[ExtReal], slopes: &[f64]) -> Vec<ExtReal> {
    let hull = lower_hull(x, f, e);
    if hull.is_empty() {
        return vec![ExtReal::NEG_INF; slopes.len()];
    }
    let at = |k: usize, s: f64| {
        let i = hull[k];
        term(x[i], f[i], e[i], s)
    };
    let mut k = 0;
    slopes
        .iter()
        .map(|&s| {
            while k + 1 < hull.len() && at(k + 1, s) > at(k, s) {
                k += 1;
            }
            at(k, s)
        })
        .collect()
}

//! Dense real polynomials in the monomial basis, coefficients in ascending
//! order of power.

use alloc::vec::Vec;

pub(crate) fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub(crate) fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0.0)
}

/// All real roots of the polynomial in `[lo, hi]`, sorted ascending.
///
/// Roots are isolated recursively: the critical points (roots of the
/// derivative) split the interval into pieces on which the polynomial is
/// monotone, so each piece holds at most one root, found by bisection.
pub(crate) fn real_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let deg = match degree(coeffs) {
        None | Some(0) => return roots,
        Some(d) => d,
    };
    if deg == 1 {
        let r = -coeffs[0] / coeffs[1];
        if (lo..=hi).contains(&r) {
            roots.push(r);
        }
        return roots;
    }

    let mut knots = Vec::with_capacity(deg + 1);
    knots.push(lo);
    knots.extend(
        real_roots(&derivative(&coeffs[..=deg]), lo, hi)
            .into_iter()
            .filter(|&c| c > lo && c < hi),
    );
    knots.push(hi);

    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (eval(coeffs, a), eval(coeffs, b));
        if fa == 0.0 {
            push_unique(&mut roots, a);
        }
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            push_unique(&mut roots, bisect(coeffs, a, b, fa));
        }
        if fb == 0.0 {
            push_unique(&mut roots, b);
        }
    }
    roots
}

fn push_unique(roots: &mut Vec<f64>, r: f64) {
    if roots.last().is_none_or(|&last| (r - last).abs() > 1e-14) {
        roots.push(r);
    }
}

fn bisect(coeffs: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn horner_matches_direct_sum() {
        let p = [1.0, -2.0, 0.5, 3.0];
        let x = 0.7_f64;
        let direct = 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x;
        assert!((eval(&p, x) - direct).abs() < 1e-15);
    }

    #[test]
    fn roots_of_cubic_with_three_real_roots() {
        // (x + 0.5) x (x - 0.25) = x^3 + 0.25 x^2 - 0.125 x
        let p = [0.0, -0.125, 0.25, 1.0];
        let roots = real_roots(&p, -1.0, 1.0);
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([-0.5, 0.0, 0.25]) {
            assert!((r - want).abs() < 1e-14, "{r} vs {want}");
        }
    }

    #[test]
    fn roots_skip_double_root_touching_zero() {
        // x^2 has a double root at 0, reported once.
        let roots = real_roots(&[0.0, 0.0, 1.0], -1.0, 1.0);
        assert_eq!(roots, vec![0.0]);
    }

    #[test]
    fn no_roots_for_positive_polynomial() {
        assert!(real_roots(&[1.0, 0.0, 1.0], -2.0, 2.0).is_empty());
    }
}

//! Sign-change bracketing and bisection on sampled grids.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// `None` unless `lo < hi` and the values differ in sign (or one is zero).
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Option<Self> {
        let opposite = (f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0);
        (lo < hi && f_lo.is_finite() && f_hi.is_finite() && opposite && !(f_lo == 0.0 && f_hi == 0.0))
            .then_some(Self { lo, hi, f_lo, f_hi })
    }
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
                .collect()
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    uniform_grid(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Brackets between consecutive samples whose values change sign.
/// Non-finite samples break the chain.
pub fn sign_change_brackets(xs: &[f64], fs: &[f64]) -> Vec<RootBracket> {
    xs.windows(2)
        .zip(fs.windows(2))
        .filter_map(|(x, f)| {
            // a zero sample is claimed by the bracket on its left only
            if f[0] == 0.0 && f[1] != 0.0 && x[0] != xs[0] {
                return None;
            }
            RootBracket::new(x[0], x[1], f[0], f[1])
        })
        .collect()
}

/// Bisects until the bracket is no wider than `x_tol` or cannot shrink any
/// further in floating point; returns the endpoint with the smaller `|f|`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, bracket: RootBracket, x_tol: f64) -> f64 {
    let RootBracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = bracket;
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    while hi - lo > x_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if !f_mid.is_finite() {
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Sorts and collapses roots closer than `tol` into their first representative.
pub fn merge_close(roots: &mut Vec<f64>, tol: f64) {
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|later, kept| (*later - *kept).abs() <= tol);
}

/// Grid points where `|f|` has a small local minimum without a sign change:
/// places where a double root may hide.
pub fn tangential_suspects(xs: &[f64], fs: &[f64], rel_tol: f64) -> Vec<f64> {
    let scale = fs
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    (1..fs.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, c) = (fs[i - 1], fs[i], fs[i + 1]);
            a.is_finite()
                && b.is_finite()
                && c.is_finite()
                && b.abs() < a.abs()
                && b.abs() < c.abs()
                && a.signum() == b.signum()
                && b.signum() == c.signum()
                && b.abs() < rel_tol * scale
        })
        .map(|i| xs[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_reaches_machine_precision() {
        let f = |x: f64| x * x - 2.0;
        let br = RootBracket::new(1.0, 2.0, f(1.0), f(2.0)).unwrap();
        let r = bisect(f, br, 0.0);
        assert!((r - 2f64.sqrt()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn bracket_requires_sign_change() {
        assert!(RootBracket::new(0.0, 1.0, 1.0, 2.0).is_none());
        assert!(RootBracket::new(1.0, 0.0, -1.0, 2.0).is_none());
        assert!(RootBracket::new(0.0, 1.0, f64::NAN, 2.0).is_none());
        assert!(RootBracket::new(0.0, 1.0, 0.0, 2.0).is_some());
    }

    #[test]
    fn exact_zero_on_grid_is_found_once() {
        let xs = uniform_grid(-1.0, 1.0, 5);
        let fs: Vec<f64> = xs.iter().map(|x| *x).collect();
        let brackets = sign_change_brackets(&xs, &fs);
        assert_eq!(brackets.len(), 1);
    }

    #[test]
    fn merging() {
        let mut r = vec![0.3, 0.1, 0.1 + 1e-12, 0.2];
        merge_close(&mut r, 1e-10);
        assert_eq!(r, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn double_root_is_flagged() {
        let xs = uniform_grid(-1.0, 1.0, 64);
        let fs: Vec<f64> = xs.iter().map(|x| (x - 0.3) * (x - 0.3) + 1e-6).collect();
        assert!(sign_change_brackets(&xs, &fs).is_empty());
        let s = tangential_suspects(&xs, &fs, 1e-2);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 0.3).abs() < 0.04);
    }
}

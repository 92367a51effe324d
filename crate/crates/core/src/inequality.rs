//! Inequalities between the Bessel products `d_n(M) = I_{n+1/2}(M) K_{n+1/2}(M)`.
//!
//! The main one is `d_n d_{n-1} < d_0 d_1` for every `n >= 2`, which follows
//! from the Turán-type monotonicity `d_n < d_{n-2}`. It makes `|p_j|^2` smallest
//! at `j = 1/2`, which in turn makes the uncertainty-type inequality for the
//! shell sharp exactly on the `j = 1/2`, `k = 1` modes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::shell::{
    closed_coeffs, d_ladder, dispersion_shell, lambda_for_b, p_sq, AngularMode, GapEnergy,
    PhysParams, ShellCoupling, Sign,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub decay: f64,
    pub n: u32,
    pub margin: f64,
}

/// Result of checking `d_n d_{n-1} < d_0 d_1`, `2 <= n <= n_max`, over a grid of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n_max: u32,
    pub decays: Vec<f64>,
    /// Smallest `d_0 d_1 - d_n d_{n-1}` found.
    pub worst_margin: f64,
    pub worst_decay: f64,
    pub worst_n: u32,
    pub violations: Vec<Violation>,
}

/// Result of checking `d_n < d_{n-2}`, `2 <= n <= n_max`, over a grid of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuranReport {
    pub n_max: u32,
    pub decays: Vec<f64>,
    /// Smallest `d_{n-2} - d_n` found.
    pub worst_margin: f64,
    pub worst_decay: f64,
    pub worst_n: u32,
    /// Largest `d_{n-1} (d_n - d_{n-2})`, the induction increment; never positive.
    pub max_induction_term: f64,
    pub violations: Vec<Violation>,
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max < 2 {
        return Err(Error::Domain {
            name: "n_max",
            value: n_max as f64,
            expected: "n_max >= 2",
        });
    }
    Ok(())
}

/// `(n, margin)` for every `n` in `2..=n_max` at one `M`.
fn margins_at<F>(n_max: u32, decay: f64, margin: F) -> Result<Vec<(u32, f64)>>
where
    F: Fn(&[f64], usize) -> f64,
{
    let d = d_ladder(n_max, decay)?;
    Ok((2..=n_max).map(|n| (n, margin(&d, n as usize))).collect())
}

struct Summary {
    worst: (f64, f64, u32),
    violations: Vec<Violation>,
}

fn summarise(decays: &[f64], per_decay: &[Vec<(u32, f64)>]) -> Summary {
    let mut worst = (f64::INFINITY, f64::NAN, 0);
    let mut violations = Vec::new();
    for (&decay, margins) in decays.iter().zip(per_decay) {
        for &(n, margin) in margins {
            if margin < worst.0 {
                worst = (margin, decay, n);
            }
            if !(margin > 0.0) {
                violations.push(Violation { decay, n, margin });
            }
        }
    }
    Summary { worst, violations }
}

pub fn conjecture_scan(n_max: u32, decays: &[f64], workers: Option<usize>) -> Result<ConjectureReport> {
    check_n_max(n_max)?;
    let per_decay = par_map(workers, decays, |&decay| {
        margins_at(n_max, decay, |d, n| d[0] * d[1] - d[n] * d[n - 1])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let summary = summarise(decays, &per_decay);
    Ok(ConjectureReport {
        n_max,
        decays: decays.to_vec(),
        worst_margin: summary.worst.0,
        worst_decay: summary.worst.1,
        worst_n: summary.worst.2,
        violations: summary.violations,
    })
}

pub fn turan_scan(n_max: u32, decays: &[f64], workers: Option<usize>) -> Result<TuranReport> {
    check_n_max(n_max)?;
    let per_decay = par_map(workers, decays, |&decay| {
        let margins = margins_at(n_max, decay, |d, n| d[n - 2] - d[n])?;
        let d = d_ladder(n_max, decay)?;
        let induction = (2..=n_max as usize)
            .map(|n| d[n - 1] * (d[n] - d[n - 2]))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((margins, induction))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (margins, induction): (Vec<_>, Vec<_>) = per_decay.into_iter().unzip();
    let summary = summarise(decays, &margins);
    Ok(TuranReport {
        n_max,
        decays: decays.to_vec(),
        worst_margin: summary.worst.0,
        worst_decay: summary.worst.1,
        worst_n: summary.worst.2,
        max_induction_term: induction.into_iter().fold(f64::NEG_INFINITY, f64::max),
        violations: summary.violations,
    })
}

/// `d_2 - d_0 = [3 (M^3 + 2M^2 + 3M + 3) sinh M - 3M (M^2 + 3M + 3) cosh M] / (e^M M^5)`.
///
/// Cancels badly for small `M`; meant as an independent check for `M` of order one.
pub fn d2_minus_d0_closed(decay: f64) -> f64 {
    let m = decay;
    let numerator = 3.0 * (m.powi(3) + 2.0 * m * m + 3.0 * m + 3.0) * m.sinh()
        - 3.0 * m * (m * m + 3.0 * m + 3.0) * m.cosh();
    numerator / (m.exp() * m.powi(5))
}

/// `RHS - 1` of the sharp inequality restricted to the spinor harmonics of `mode`:
///
/// ```text
/// RHS = c_0 |p_j|^2 / (2 d_*^2 c_n') + c_n' / (2 c_0),   c_k = 1/lambda + (m + a) d_k,
/// ```
///
/// with `n'` the lower index of the mode. Nonnegative, and zero only for
/// `j = 1/2`, `k = 1`.
pub fn per_mode_gap(
    mode: AngularMode,
    gap: GapEnergy,
    coupling: ShellCoupling,
    phys: &PhysParams,
) -> Result<f64> {
    let decay = gap.decay();
    let d = d_ladder(mode.lower_index().max(1), decay)?;
    let dstar = closed_coeffs(decay)?.dstar;
    let p2 = p_sq(mode, decay)?;
    let weight = phys.m + gap.a();
    let c = |k: usize| 1.0 / coupling.value() + weight * d[k];
    let (c0, cn) = (c(0), c(mode.lower_index() as usize));
    Ok(c0 * p2 / (2.0 * dstar * dstar * cn) + cn / (2.0 * c0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerLink {
    pub lambda: f64,
    /// The `j = 1/2` mode whose dispersion relation the strength solves.
    pub mode: AngularMode,
    pub residual: f64,
    pub check: bool,
}

/// Strength `lambda > 0` with `lambda^2/4 - ((m + a) d_0 - (m - a) d_1) lambda = 1`,
/// or with `d_0` and `d_1` exchanged, and the `j = 1/2` mode it belongs to.
pub fn minimizer_link(gap: GapEnergy, phys: &PhysParams, exchanged: bool) -> Result<MinimizerLink> {
    let c = closed_coeffs(gap.decay())?;
    let (m, a) = (phys.m, gap.a());
    let (b, sign) = if exchanged {
        ((m + a) * c.d1 - (m - a) * c.d0, Sign::Plus)
    } else {
        ((m + a) * c.d0 - (m - a) * c.d1, Sign::Minus)
    };
    let lambda = ShellCoupling::new(lambda_for_b(b))?;
    let mode = AngularMode::new(1, sign)?;
    let residual = dispersion_shell(mode, gap, lambda, phys)?.value.abs();
    Ok(MinimizerLink {
        lambda: lambda.value(),
        mode,
        residual,
        check: residual < 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::log_grid;
    use approx::assert_relative_eq;

    fn unit() -> PhysParams {
        PhysParams::new(1.0).unwrap()
    }

    #[test]
    fn conjecture_holds_on_grid() {
        let grid = log_grid(0.1, 10.0, 25);
        let report = conjecture_scan(50, &grid, None).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.worst_margin > 0.0);
    }

    #[test]
    fn smallest_case() {
        let report = conjecture_scan(2, &[1.0], Some(1)).unwrap();
        let d = d_ladder(2, 1.0).unwrap();
        assert_eq!(report.worst_n, 2);
        assert_eq!(report.worst_margin, d[0] * d[1] - d[2] * d[1]);
        assert!(conjecture_scan(1, &[1.0], None).is_err());
    }

    #[test]
    fn small_decay_margin() {
        // d_n -> 1/(2n+1): d_0 d_1 - d_2 d_1 -> 1/3 - 1/15 = 4/15
        let report = conjecture_scan(2, &[1e-6], None).unwrap();
        assert_relative_eq!(report.worst_margin, 4.0 / 15.0, max_relative = 1e-5);
    }

    #[test]
    fn turan_chain() {
        let report = turan_scan(10, &[1.0], None).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.max_induction_term < 0.0);
        let d = d_ladder(10, 1.0).unwrap();
        for k in (2..=10).step_by(2) {
            assert!(d[k] < d[k - 2]);
        }
    }

    #[test]
    fn d2_minus_d0_example() {
        let e = std::f64::consts::E;
        let expected = (27.0 * 1f64.sinh() - 21.0 * 1f64.cosh()) / e;
        assert_relative_eq!(d2_minus_d0_closed(1.0), expected, max_relative = 1e-15);
        assert_relative_eq!(d2_minus_d0_closed(1.0), -0.248046797678705, max_relative = 1e-13);
        let d = d_ladder(2, 1.0).unwrap();
        assert_relative_eq!(d[2] - d[0], expected, max_relative = 1e-12);
    }

    #[test]
    fn equality_mode_has_zero_gap() {
        let phys = unit();
        let mode = AngularMode::new(1, Sign::Plus).unwrap();
        for a in [-0.5, 0.0, 0.5] {
            let gap = GapEnergy::new(a, &phys).unwrap();
            let g = per_mode_gap(mode, gap, ShellCoupling::new(2.0).unwrap(), &phys).unwrap();
            assert!(g.abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn other_modes_are_strict() {
        let phys = unit();
        let gap = GapEnergy::new(0.0, &phys).unwrap();
        for mode in AngularMode::all_up_to(21).into_iter().skip(1) {
            let g = per_mode_gap(mode, gap, ShellCoupling::new(1.0).unwrap(), &phys).unwrap();
            assert!(g > 1e-4, "{mode}: {g}");
        }
    }

    #[test]
    fn minimizer_link_example() {
        let phys = unit();
        let gap = GapEnergy::new(0.0, &phys).unwrap();
        let link = minimizer_link(gap, &phys, false).unwrap();
        assert!(link.check);
        assert_eq!(link.mode.sign(), Sign::Minus);
        assert_relative_eq!(link.lambda, 2.34928956078995, max_relative = 1e-13);
        let swapped = minimizer_link(gap, &phys, true).unwrap();
        assert!(swapped.check);
        assert_eq!(swapped.mode.sign(), Sign::Plus);
        assert_relative_eq!(swapped.lambda, 1.702642393156079556, max_relative = 1e-13);
    }
}

//! Point sets `(a, lambda)` of the squeezed and shell dispersion relations
//! at `m = 1`, `j = 1/2`, `k = 1` and `eps = 2^-10`.

use serde::Serialize;

use deltashell::approx::FixedEnergy;
use deltashell::parallel::par_map;
use deltashell::roots::{bisect, sign_change_brackets};
use deltashell::shell::{dispersion_shell, lambda_from_a};
use deltashell::{AngularMode, GapEnergy, PhysParams, Sign};

use crate::output::{num, Record};
use crate::CliError;

pub const FIGURE_EPS: f64 = 1.0 / 1024.0;
pub const LAMBDA_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigurePoint {
    pub a: f64,
    pub lambda: f64,
    /// `|D|` at the point.
    pub residual: f64,
}

impl Record for FigurePoint {
    const HEADER: &'static [&'static str] = &["a", "lambda", "residual"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.a), num(self.lambda), num(self.residual)]
    }
}

/// Midpoints of `n` equal cells of `(lo, hi)`, so both ends stay excluded.
pub fn cell_midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect()
}

fn figure_setup() -> (PhysParams, AngularMode) {
    let phys = PhysParams::new(1.0).expect("m = 1");
    let mode = AngularMode::new(1, Sign::Plus).expect("j = 1/2");
    (phys, mode)
}

/// Roots in `lambda` of `D_eps(a, .)` on one column of the grid.
fn squeezed_column(a: f64, lambdas: &[f64], tol: f64) -> Result<Vec<FigurePoint>, CliError> {
    let (phys, mode) = figure_setup();
    let gap = GapEnergy::new(a, &phys)?;
    let fixed = FixedEnergy::new(mode, gap, FIGURE_EPS, &phys)?;
    // NaN outside the real-momentum regime; brackets never straddle a NaN
    let f = |mu: f64| fixed.dispersion(mu).unwrap_or(f64::NAN);
    let values: Vec<f64> = lambdas.iter().map(|&mu| f(mu)).collect();
    Ok(sign_change_brackets(lambdas, &values)
        .into_iter()
        .map(|br| {
            let lambda = bisect(f, br, 0.0);
            FigurePoint {
                a,
                lambda,
                residual: f(lambda).abs(),
            }
        })
        .filter(|p| p.residual < tol)
        .collect())
}

fn shell_point(a: f64, tol: f64) -> Result<Option<FigurePoint>, CliError> {
    let (phys, mode) = figure_setup();
    let gap = GapEnergy::new(a, &phys)?;
    let lambda = lambda_from_a(mode, gap, &phys)?;
    let residual = dispersion_shell(mode, gap, lambda, &phys)?.value.abs();
    let keep = lambda.value() < LAMBDA_MAX && residual < tol;
    Ok(keep.then_some(FigurePoint {
        a,
        lambda: lambda.value(),
        residual,
    }))
}

/// Figure 1: zeros of the squeezed relation found on a `grid x grid` lattice
/// over `(-1, 1) x (0, 10)`. Figure 2: the shell curve on the same `a` grid.
/// Points are ordered by `a`, then by `lambda`.
pub fn figure_points(
    figure: u8,
    grid: usize,
    tol: f64,
    workers: Option<usize>,
) -> Result<Vec<FigurePoint>, CliError> {
    if grid < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {grid}")));
    }
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let a_grid = cell_midpoints(-1.0, 1.0, grid);
    let columns: Vec<Vec<FigurePoint>> = match figure {
        1 => {
            let lambdas = cell_midpoints(0.0, LAMBDA_MAX, grid);
            par_map(workers, &a_grid, |&a| squeezed_column(a, &lambdas, tol))
                .into_iter()
                .collect::<Result<_, _>>()?
        }
        2 => par_map(workers, &a_grid, |&a| shell_point(a, tol))
            .into_iter()
            .map(|p| p.map(|p| p.into_iter().collect()))
            .collect::<Result<_, _>>()?,
        other => return Err(CliError::Usage(format!("--figure must be 1 or 2, got {other}"))),
    };
    Ok(columns.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_stay_inside() {
        let xs = cell_midpoints(-1.0, 1.0, 4);
        assert_eq!(xs, vec![-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn small_figures() {
        let one = figure_points(1, 32, 1e-8, Some(1)).unwrap();
        assert!(!one.is_empty());
        let two = figure_points(2, 32, 1e-9, Some(1)).unwrap();
        assert!(!two.is_empty());
        assert!(two.iter().all(|p| p.lambda > 0.0 && p.lambda < LAMBDA_MAX));
        assert!(figure_points(3, 32, 1e-8, None).is_err());
    }
}

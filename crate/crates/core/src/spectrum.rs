//! Gap eigenvalues of the shell operator, mode by mode.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::roots::{bisect, merge_close, sign_change_brackets, tangential_suspects, uniform_grid};
use crate::shell::{
    dispersion_shell, lambda_from_a, AngularMode, GapEnergy, PhysParams, ShellCoupling,
    DEFAULT_EDGE_MARGIN,
};

/// Roots closer than this (times `m`) are reported once.
pub const MERGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub grid_n: usize,
    pub workers: Option<usize>,
    /// Scans cover `[-m + margin m, m - margin m]`.
    pub edge_margin: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid_n: 2048,
            workers: None,
            edge_margin: DEFAULT_EDGE_MARGIN,
        }
    }
}

impl ScanConfig {
    pub fn with_grid(grid_n: usize) -> Self {
        Self {
            grid_n,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid_n < 16 {
            return Err(Error::Domain {
                name: "grid_n",
                value: self.grid_n as f64,
                expected: "at least 16 grid points",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Local minima of `|D|` without a sign change; a double root may be
    /// hiding there and a finer grid would tell.
    pub tangential_suspects: Vec<f64>,
}

/// Scans any real function of `a` over the gap: sample, bracket, bisect.
pub(crate) fn scan_gap<F>(phys: &PhysParams, cfg: &ScanConfig, f: F) -> Result<ScanReport>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let (lo, hi) = phys.gap_window(cfg.edge_margin);
    let xs = uniform_grid(lo, hi, cfg.grid_n);
    let fs = par_map(cfg.workers, &xs, |&a| f(a));
    let brackets = sign_change_brackets(&xs, &fs);
    let mut roots = par_map(cfg.workers, &brackets, |br| bisect(&f, *br, 0.0));
    merge_close(&mut roots, MERGE_TOL * phys.m);
    let residuals = roots.iter().map(|&a| f(a).abs()).collect();
    Ok(ScanReport {
        roots,
        residuals,
        tangential_suspects: tangential_suspects(&xs, &fs, 1e-3),
    })
}

fn shell_value(mode: AngularMode, coupling: ShellCoupling, phys: &PhysParams, a: f64) -> f64 {
    GapEnergy::new(a, phys)
        .and_then(|gap| dispersion_shell(mode, gap, coupling, phys))
        .map_or(f64::NAN, |d| d.value)
}

pub fn scan_shell(
    mode: AngularMode,
    coupling: ShellCoupling,
    phys: &PhysParams,
    cfg: &ScanConfig,
) -> Result<ScanReport> {
    scan_gap(phys, cfg, |a| shell_value(mode, coupling, phys, a))
}

/// All sign-change roots of `D(., lambda)` in the gap, ascending.
pub fn scan_roots(
    mode: AngularMode,
    coupling: ShellCoupling,
    phys: &PhysParams,
    cfg: &ScanConfig,
) -> Result<Vec<GapEnergy>> {
    scan_shell(mode, coupling, phys, cfg)?
        .roots
        .into_iter()
        .map(|a| GapEnergy::new(a, phys))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCurve {
    pub mode: AngularMode,
    /// `(a, lambda)` sorted by `a`.
    pub points: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
}

/// The eigenvalue curve `a -> lambda(a)` of one mode.
pub fn spectral_curve(mode: AngularMode, phys: &PhysParams, a_grid: &[f64]) -> Result<SpectralCurve> {
    let mut grid = a_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(grid.len());
    let mut residuals = Vec::with_capacity(grid.len());
    for a in grid {
        let gap = GapEnergy::new(a, phys)?;
        let lambda = lambda_from_a(mode, gap, phys)?;
        residuals.push(dispersion_shell(mode, gap, lambda, phys)?.value.abs());
        points.push((a, lambda.value()));
    }
    Ok(SpectralCurve {
        mode,
        points,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRoots {
    pub mode: AngularMode,
    /// Each root is shared by the `2j + 1` values of `m_j`.
    pub multiplicity: u32,
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tangential_suspects: Vec<f64>,
}

/// Gap eigenvalues of every mode with `j <= twice_j_max / 2`.
pub fn mode_sweep(
    twice_j_max: u32,
    coupling: ShellCoupling,
    phys: &PhysParams,
    cfg: &ScanConfig,
) -> Result<Vec<ModeRoots>> {
    if twice_j_max == 0 {
        return Err(Error::Domain {
            name: "j_max",
            value: 0.0,
            expected: "j_max >= 1/2",
        });
    }
    let modes = AngularMode::all_up_to(twice_j_max);
    // modes run in parallel; each scan runs serially inside
    let inner = ScanConfig {
        workers: Some(1),
        ..*cfg
    };
    par_map(cfg.workers, &modes, |&mode| {
        scan_shell(mode, coupling, phys, &inner).map(|report| ModeRoots {
            mode,
            multiplicity: mode.multiplicity(),
            roots: report.roots,
            residuals: report.residuals,
            tangential_suspects: report.tangential_suspects,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell::{d_coeff, Sign};

    fn unit() -> PhysParams {
        PhysParams::new(1.0).unwrap()
    }

    fn plus_half() -> AngularMode {
        AngularMode::new(1, Sign::Plus).unwrap()
    }

    #[test]
    fn recovers_constructed_root() {
        let phys = unit();
        let gap = GapEnergy::new(0.5, &phys).unwrap();
        let lambda = lambda_from_a(plus_half(), gap, &phys).unwrap();
        let roots = scan_roots(plus_half(), lambda, &phys, &ScanConfig::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].a() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn critical_strength_root_balances_coefficients() {
        // lambda = 2 means b(a) = 0, i.e. (m + a) d_1 = (m - a) d_0; bisect that directly.
        let phys = unit();
        let roots = scan_roots(plus_half(), ShellCoupling::new(2.0).unwrap(), &phys, &ScanConfig::default()).unwrap();
        assert_eq!(roots.len(), 1);
        let b = |a: f64| {
            let mm = (1.0 - a * a).sqrt();
            (1.0 + a) * d_coeff(1, mm).unwrap() - (1.0 - a) * d_coeff(0, mm).unwrap()
        };
        let (mut lo, mut hi) = (-0.999, 0.999);
        assert!(b(lo) < 0.0 && b(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if b(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((roots[0].a() - lo).abs() < 1e-12);
    }

    #[test]
    fn weak_coupling_has_no_roots() {
        let phys = unit();
        let report = scan_shell(plus_half(), ShellCoupling::new(1e-6).unwrap(), &phys, &ScanConfig::with_grid(256)).unwrap();
        assert!(report.roots.is_empty());
    }

    #[test]
    fn grid_must_be_reasonable() {
        let phys = unit();
        assert!(scan_roots(plus_half(), ShellCoupling::new(1.0).unwrap(), &phys, &ScanConfig::with_grid(8)).is_err());
    }

    #[test]
    fn sweep_reports_multiplicities() {
        let phys = unit();
        let sweep = mode_sweep(5, ShellCoupling::new(2.0).unwrap(), &phys, &ScanConfig::with_grid(512)).unwrap();
        assert_eq!(sweep.len(), 6);
        for entry in &sweep {
            assert_eq!(entry.multiplicity, entry.mode.twice_j() + 1);
            for r in &entry.residuals {
                assert!(*r < 1e-10);
            }
        }
    }

    #[test]
    fn curves_for_both_signs_differ() {
        let phys = unit();
        let grid = uniform_grid(-0.9, 0.9, 19);
        let plus = spectral_curve(plus_half(), &phys, &grid).unwrap();
        let minus = spectral_curve(AngularMode::new(1, Sign::Minus).unwrap(), &phys, &grid).unwrap();
        for (p, q) in plus.points.iter().zip(&minus.points) {
            assert!((p.1 - q.1).abs() > 1e-3);
        }
        let zero = plus.points.iter().find(|p| p.0.abs() < 1e-12).unwrap();
        assert!((zero.1 - 1.702642393156079556).abs() < 1e-12);
    }
}

use serde::Serialize;

use deltashell::approx::{
    dispersion_squeezed, renormalized_coupling, root_track, squeezed_roots, RootTrack,
    SqueezeParams, TrackConfig,
};
use deltashell::eigenfun::{shell_eigenfunction, squeezed_eigenfunction, RadialSpinor};
use deltashell::inequality::{
    conjecture_scan, d2_minus_d0_closed, minimizer_link, per_mode_gap, turan_scan,
    ConjectureReport, MinimizerLink, TuranReport,
};
use deltashell::roots::log_grid;
use deltashell::shell::{closed_coeffs, d_ladder, p_sq, DEFAULT_EDGE_MARGIN};
use deltashell::spectrum::{mode_sweep, scan_roots, spectral_curve, ScanConfig};
use deltashell::{AngularMode, GapEnergy, Sign};

use crate::args::{
    ApproxArgs, Cli, Command, ConjectureArgs, ConvergeArgs, CurveArgs, EigenfunArgs, FiguresArgs,
    ReportKind, SpectrumArgs,
};
use crate::figures::{cell_midpoints, figure_points};
use crate::output::{num, opt_num, write_json, write_table, Record};
use crate::{
    parse_eps, parse_eps_list, parse_f64_list, parse_mode, parse_twice_j, phys, shell_coupling,
    squeeze_strength, CliError,
};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(args) => spectrum(&args),
        Command::Curve(args) => curve(&args),
        Command::Approx(args) => approx(&args),
        Command::Converge(args) => converge(&args),
        Command::Conjecture(args) => conjecture(&args),
        Command::Eigenfun(args) => eigenfun(&args),
        Command::Figures(args) => figures(&args),
    }
}

const NO_SUMMARY: Option<&()> = None;

fn check_grid(grid: usize) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {grid}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    j: f64,
    sign: i32,
    kappa: i32,
    multiplicity: u32,
    a: f64,
    residual: f64,
}

impl Record for SpectrumRow {
    const HEADER: &'static [&'static str] = &["j", "sign", "kappa", "multiplicity", "a", "residual"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.j.to_string(),
            self.sign.to_string(),
            self.kappa.to_string(),
            self.multiplicity.to_string(),
            num(self.a),
            num(self.residual),
        ]
    }
}

fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let phys = phys(args.common.m)?;
    let lambda = shell_coupling(args.lambda)?;
    let twice_j_max = parse_twice_j("j-max", &args.j_max)?;
    check_grid(args.grid)?;
    let cfg = ScanConfig {
        grid_n: args.grid,
        workers: args.common.workers,
        ..ScanConfig::default()
    };
    let sweep = mode_sweep(twice_j_max, lambda, &phys, &cfg)?;
    let mut rows = Vec::new();
    for modes in &sweep {
        for &a in &modes.tangential_suspects {
            eprintln!("warning: {}: possible double root near a = {a} missed by the sign scan", modes.mode);
        }
        for (&a, &residual) in modes.roots.iter().zip(&modes.residuals) {
            rows.push(SpectrumRow {
                j: modes.mode.j(),
                sign: modes.mode.sign().value(),
                kappa: modes.mode.kappa(),
                multiplicity: modes.multiplicity,
                a,
                residual,
            });
        }
    }
    write_table("spectrum", args, &rows, NO_SUMMARY, args.common.format, args.common.out.as_deref())?;
    if rows.is_empty() {
        return Err(CliError::NothingFound(format!("no gap eigenvalue for lambda = {}", args.lambda)));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveRow {
    a: f64,
    lambda: f64,
    residual: f64,
}

impl Record for CurveRow {
    const HEADER: &'static [&'static str] = &["a", "lambda", "residual"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.a), num(self.lambda), num(self.residual)]
    }
}

fn curve(args: &CurveArgs) -> Result<(), CliError> {
    let phys = phys(args.common.m)?;
    let mode = parse_mode(&args.mode.j, &args.mode.sign)?;
    check_grid(args.grid)?;
    let grid = cell_midpoints(-phys.m, phys.m, args.grid);
    let curve = spectral_curve(mode, &phys, &grid)?;
    let rows: Vec<CurveRow> = curve
        .points
        .iter()
        .zip(&curve.residuals)
        .map(|(&(a, lambda), &residual)| CurveRow { a, lambda, residual })
        .collect();
    write_table("curve", args, &rows, NO_SUMMARY, args.common.format, args.common.out.as_deref())
}

#[derive(Debug, Serialize)]
struct ApproxRow {
    a: f64,
    residual: f64,
}

impl Record for ApproxRow {
    const HEADER: &'static [&'static str] = &["a", "residual"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.a), num(self.residual)]
    }
}

/// Roots of `D_eps(., mu)` in the part of the gap where `L` is real.
fn squeezed_gap_roots(
    mode: AngularMode,
    squeeze: SqueezeParams,
    phys: &deltashell::PhysParams,
    grid: usize,
) -> Result<Vec<f64>, CliError> {
    let (lo, gap_hi) = phys.gap_window(DEFAULT_EDGE_MARGIN);
    let hi = gap_hi.min((squeeze.height() - phys.m) * (1.0 - 1e-12));
    if !(lo < hi) {
        return Err(deltashell::Error::ComplexRegime {
            eps: squeeze.eps(),
            threshold: squeeze.mu() / (2.0 * (phys.m + lo)),
        }
        .into());
    }
    Ok(squeezed_roots(mode, squeeze, phys, lo, hi, grid))
}

fn approx(args: &ApproxArgs) -> Result<(), CliError> {
    let phys = phys(args.common.m)?;
    let mode = parse_mode(&args.mode.j, &args.mode.sign)?;
    let mu = squeeze_strength(args.mu)?;
    let squeeze = SqueezeParams::new(parse_eps(&args.eps)?, mu)?;
    check_grid(args.grid)?;
    let rows = squeezed_gap_roots(mode, squeeze, &phys, args.grid)?
        .into_iter()
        .map(|a| {
            let gap = GapEnergy::new(a, &phys)?;
            let residual = dispersion_squeezed(mode, gap, squeeze, &phys)?.value.abs();
            Ok(ApproxRow { a, residual })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_table("approx", args, &rows, NO_SUMMARY, args.common.format, args.common.out.as_deref())?;
    if rows.is_empty() {
        return Err(CliError::NothingFound(format!("no squeezed eigenvalue for mu = {mu}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ConvergeRow {
    eps: f64,
    a_eps: Option<f64>,
    a_star: f64,
    abs_err: Option<f64>,
    /// Previous error over this one.
    ratio: Option<f64>,
    /// `ok`, or why no root was found at this `eps`.
    status: String,
}

impl Record for ConvergeRow {
    const HEADER: &'static [&'static str] = &["eps", "a_eps", "a_star", "abs_err", "ratio", "status"];

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.eps),
            opt_num(self.a_eps),
            num(self.a_star),
            opt_num(self.abs_err),
            opt_num(self.ratio),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Serialize)]
struct TrackSummary {
    mu: f64,
    coupling: f64,
    a_star: f64,
    extrapolated: Option<f64>,
    extrapolated_err: Option<f64>,
    found: usize,
    failed: usize,
}

fn converge_rows(track: &RootTrack) -> Vec<ConvergeRow> {
    let errors = track.errors();
    track
        .points
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (point, &err))| {
            let prev = if i > 0 { errors[i - 1] } else { None };
            ConvergeRow {
                eps: point.eps,
                a_eps: point.a_eps,
                a_star: track.a_star,
                abs_err: err,
                ratio: prev.zip(err).map(|(p, e)| p / e),
                status: point.failure.clone().unwrap_or_else(|| "ok".to_string()),
            }
        })
        .collect()
}

fn converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let phys = phys(args.common.m)?;
    let mode = parse_mode(&args.mode.j, &args.mode.sign)?;
    let mu = squeeze_strength(args.mu)?;
    if mu >= std::f64::consts::PI {
        return Err(CliError::Usage(format!("--mu must lie in (0, pi), got {mu}")));
    }
    renormalized_coupling(mu)?;
    let eps_list = parse_eps_list(&args.eps_list)?;
    check_grid(args.grid)?;
    let cfg = TrackConfig {
        grid_n: args.grid,
        window: None,
        workers: args.common.workers,
    };
    let tracks = root_track(mode, mu, &phys, &eps_list, &cfg)?;
    let rows: Vec<ConvergeRow> = tracks.iter().flat_map(converge_rows).collect();
    let summary: Vec<TrackSummary> = tracks
        .iter()
        .map(|t| {
            let found = t.points.iter().filter(|p| p.a_eps.is_some()).count();
            TrackSummary {
                mu,
                coupling: t.coupling,
                a_star: t.a_star,
                extrapolated: t.extrapolated,
                extrapolated_err: t.extrapolated.map(|x| (x - t.a_star).abs()),
                found,
                failed: t.points.len() - found,
            }
        })
        .collect();
    write_table("converge", args, &rows, Some(&summary), args.common.format, args.common.out.as_deref())?;
    if rows.iter().all(|r| r.a_eps.is_none()) {
        return Err(CliError::NothingFound(format!("no squeezed eigenvalue at any eps for mu = {mu}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct HyperbolicCheck {
    decay: f64,
    closed: f64,
    ladder: f64,
    rel_err: f64,
}

#[derive(Debug, Serialize)]
struct ConjectureOutput<'a> {
    command: &'static str,
    kind: ReportKind,
    config: &'a ConjectureArgs,
    conjecture: ConjectureReport,
    turan: TuranReport,
    d2_minus_d0: Vec<HyperbolicCheck>,
    violations: usize,
}

#[derive(Debug, Serialize)]
struct ModeGap {
    j: f64,
    sign: i32,
    kappa: i32,
    lambda: f64,
    a: f64,
    gap: f64,
    equality: bool,
}

#[derive(Debug, Serialize)]
struct InequalityOutput<'a> {
    command: &'static str,
    kind: ReportKind,
    config: &'a ConjectureArgs,
    /// Largest `| |p_1|^2 / d_*^2 - 1 |` over the decay grid.
    sharp_constant_max_rel_err: f64,
    smallest_gap: f64,
    gaps: Vec<ModeGap>,
    minimizers: Vec<MinimizerLink>,
    violations: usize,
}

fn conjecture(args: &ConjectureArgs) -> Result<(), CliError> {
    if !(args.m_min > 0.0 && args.m_min < args.m_max && args.m_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "need 0 < --m-min < --m-max, got {} and {}",
            args.m_min, args.m_max
        )));
    }
    check_grid(args.grid)?;
    let decays = log_grid(args.m_min, args.m_max, args.grid);
    let workers = args.common.workers;
    let violations = match args.kind {
        ReportKind::Conjecture => {
            let conjecture = conjecture_scan(args.n_max, &decays, workers)?;
            let turan = turan_scan(args.n_max, &decays, workers)?;
            let d2_minus_d0 = [0.5, 1.0, 2.0]
                .into_iter()
                .map(|decay| {
                    let d = d_ladder(2, decay)?;
                    let closed = d2_minus_d0_closed(decay);
                    let ladder = d[2] - d[0];
                    Ok(HyperbolicCheck {
                        decay,
                        closed,
                        ladder,
                        rel_err: ((ladder - closed) / closed).abs(),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let violations = conjecture.violations.len()
                + turan.violations.len()
                + d2_minus_d0.iter().filter(|c| !(c.rel_err < 1e-10)).count();
            write_json(
                &ConjectureOutput {
                    command: "conjecture",
                    kind: args.kind,
                    config: args,
                    conjecture,
                    turan,
                    d2_minus_d0,
                    violations,
                },
                args.common.out.as_deref(),
            )?;
            violations
        }
        ReportKind::Inequality => {
            let report = inequality_report(args, &decays)?;
            let violations = report.violations;
            write_json(&report, args.common.out.as_deref())?;
            violations
        }
    };
    if violations > 0 {
        return Err(CliError::Violations(violations));
    }
    Ok(())
}

fn inequality_report<'a>(args: &'a ConjectureArgs, decays: &[f64]) -> Result<InequalityOutput<'a>, CliError> {
    let phys = phys(args.common.m)?;
    let twice_j_max = parse_twice_j("j-max", &args.j_max)?;
    let lambdas = parse_f64_list("lambda-list", &args.lambda_list)?
        .into_iter()
        .map(shell_coupling)
        .collect::<Result<Vec<_>, _>>()?;
    let energies = parse_f64_list("a-list", &args.a_list)?
        .into_iter()
        .map(|a| GapEnergy::new(a, &phys))
        .collect::<Result<Vec<_>, _>>()?;
    let first = AngularMode::new(1, Sign::Plus)?;

    let mut sharp = 0.0f64;
    for &decay in decays {
        let dstar = closed_coeffs(decay)?.dstar;
        sharp = sharp.max((p_sq(first, decay)? / (dstar * dstar) - 1.0).abs());
    }
    let mut violations = usize::from(!(sharp < 1e-10));

    let mut gaps = Vec::new();
    for mode in AngularMode::all_up_to(twice_j_max) {
        for &lambda in &lambdas {
            for &gap in &energies {
                let value = per_mode_gap(mode, gap, lambda, &phys)?;
                let equality = value.abs() <= args.tol;
                // equality belongs to j = 1/2, k = 1 and nowhere else
                if value < -args.tol || equality != (mode == first) {
                    violations += 1;
                }
                gaps.push(ModeGap {
                    j: mode.j(),
                    sign: mode.sign().value(),
                    kappa: mode.kappa(),
                    lambda: lambda.value(),
                    a: gap.a(),
                    gap: value,
                    equality,
                });
            }
        }
    }
    let mut minimizers = Vec::new();
    for &gap in &energies {
        for exchanged in [false, true] {
            let link = minimizer_link(gap, &phys, exchanged)?;
            violations += usize::from(!link.check);
            minimizers.push(link);
        }
    }
    Ok(InequalityOutput {
        command: "conjecture",
        kind: args.kind,
        config: args,
        sharp_constant_max_rel_err: sharp,
        smallest_gap: gaps.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min),
        gaps,
        minimizers,
        violations,
    })
}

#[derive(Debug, Serialize)]
struct SampleRow {
    r: f64,
    f: f64,
    g: f64,
}

impl Record for SampleRow {
    const HEADER: &'static [&'static str] = &["r", "f", "g"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.r), num(self.f), num(self.g)]
    }
}

#[derive(Debug, Serialize)]
struct EigenfunSummary {
    a: f64,
    roots: Vec<f64>,
}

fn pick_root(roots: &[f64], index: usize) -> Result<f64, CliError> {
    roots.get(index).copied().ok_or_else(|| {
        CliError::NothingFound(format!(
            "--root {index} requested but the mode has {} gap eigenvalue(s)",
            roots.len()
        ))
    })
}

fn eigenfun(args: &EigenfunArgs) -> Result<(), CliError> {
    let phys = phys(args.common.m)?;
    let mode = parse_mode(&args.mode.j, &args.mode.sign)?;
    check_grid(args.grid)?;
    if !(args.r_max > 0.0 && args.r_max.is_finite()) {
        return Err(CliError::Usage(format!("--r-max must be positive, got {}", args.r_max)));
    }
    let (spinor, roots): (RadialSpinor, Vec<f64>) = match (args.lambda, args.mu) {
        (Some(lambda), None) => {
            let lambda = shell_coupling(lambda)?;
            let cfg = ScanConfig {
                workers: args.common.workers,
                ..ScanConfig::default()
            };
            let roots: Vec<f64> = scan_roots(mode, lambda, &phys, &cfg)?.iter().map(|g| g.a()).collect();
            let a = pick_root(&roots, args.root)?;
            (shell_eigenfunction(mode, GapEnergy::new(a, &phys)?, lambda, &phys)?, roots)
        }
        (None, Some(mu)) => {
            let squeeze = SqueezeParams::new(parse_eps(&args.eps)?, squeeze_strength(mu)?)?;
            let roots = squeezed_gap_roots(mode, squeeze, &phys, 2048)?;
            let a = pick_root(&roots, args.root)?;
            (squeezed_eigenfunction(mode, GapEnergy::new(a, &phys)?, squeeze, &phys)?, roots)
        }
        _ => return Err(CliError::Usage("give exactly one of --lambda and --mu".into())),
    };
    let radii: Vec<f64> = (1..=args.grid)
        .map(|i| args.r_max * i as f64 / args.grid as f64)
        .collect();
    let rows: Vec<SampleRow> = spinor
        .sample(&radii)
        .into_iter()
        .map(|(r, f, g)| SampleRow { r, f, g })
        .collect();
    let summary = EigenfunSummary { a: spinor.a, roots };
    write_table("eigenfun", args, &rows, Some(&summary), args.common.format, args.common.out.as_deref())
}

fn figures(args: &FiguresArgs) -> Result<(), CliError> {
    if args.common.m != 1.0 {
        eprintln!("warning: figures are drawn at m = 1; --m is ignored");
    }
    let points = figure_points(args.figure, args.grid, args.tol, args.common.workers)?;
    write_table("figures", args, &points, NO_SUMMARY, args.common.format, args.common.out.as_deref())?;
    if points.is_empty() {
        return Err(CliError::NothingFound(format!("figure {} has no points", args.figure)));
    }
    Ok(())
}

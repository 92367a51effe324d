//! Squeezed-potential approximation of the shell.
//!
//! The shell of strength `lambda` is replaced by the electrostatic potential
//! `mu / (2 eps)` on the annulus `1 - eps < r < 1 + eps`. Inside the annulus
//! the radial solutions oscillate with momentum
//! `L = sqrt((mu / (2 eps) - a)^2 - m^2)`, and matching them to the `I` and `K`
//! pieces at `r = 1 -+ eps` gives a 4x4 homogeneous system whose determinant
//! is the squeezed dispersion function `D_eps`. As `eps -> 0`,
//!
//! ```text
//! D_eps(a, mu) -> -C(a, mu) D(a, 2 tan(mu / 2)),
//! C(a, mu) = 4 (a + m) / (mu pi (1 + tan^2(mu / 2))),
//! ```
//!
//! so squeezed eigenvalues converge to those of the shell with the
//! renormalised strength `2 tan(mu / 2)`, not `mu`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::parallel::par_map;
use crate::roots::{bisect, merge_close, sign_change_brackets, uniform_grid};
use crate::shell::{
    dispersion_shell, AngularMode, DispersionValue, GapEnergy, PhysParams, ShellCoupling,
    DEFAULT_EDGE_MARGIN,
};
use crate::specfun::{
    bessel_i_half_ladder, bessel_j_half_ladder, bessel_k_half_ladder, bessel_y_half_ladder,
    ScaledPair,
};
use crate::spectrum::{scan_roots, ScanConfig};

/// Half-width `eps` of the annulus and potential strength `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeParams {
    eps: f64,
    mu: f64,
}

impl SqueezeParams {
    pub fn new(eps: f64, mu: f64) -> Result<Self> {
        let eps = positive("eps", eps)?;
        if eps >= 1.0 {
            return Err(Error::Domain {
                name: "eps",
                value: eps,
                expected: "0 < eps < 1",
            });
        }
        Ok(Self {
            eps,
            mu: positive("mu", mu)?,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Height `mu / (2 eps)` of the potential on the annulus.
    pub fn height(&self) -> f64 {
        self.mu / (2.0 * self.eps)
    }
}

/// Shell strength `2 tan(mu / 2)` reached in the limit.
pub fn renormalized_coupling(mu: f64) -> Result<ShellCoupling> {
    let mu = positive("mu", mu)?;
    let reduced = mu.rem_euclid(2.0 * PI);
    let lambda = 2.0 * (0.5 * mu).tan();
    if !(reduced > 0.0 && reduced < PI && lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            expected: "mu in (0, pi) modulo 2 pi so that 2 tan(mu/2) > 0",
        });
    }
    ShellCoupling::new(lambda)
}

/// Momentum `L > 0` inside the annulus.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct EffectiveMomentum(f64);

impl EffectiveMomentum {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Largest `eps` for which `L` is real at this energy: `mu / (2 (m + a))`.
pub fn real_regime_threshold(gap: GapEnergy, mu: f64, phys: &PhysParams) -> f64 {
    mu / (2.0 * (phys.m + gap.a()))
}

pub fn l_param(
    squeeze: SqueezeParams,
    gap: GapEnergy,
    phys: &PhysParams,
) -> Result<EffectiveMomentum> {
    let shifted = squeeze.height() - gap.a();
    let m = phys.m;
    // (shifted - m)(shifted + m) keeps the radicand accurate near the threshold
    let radicand = (shifted - m) * (shifted + m);
    if shifted > m && radicand > 0.0 {
        Ok(EffectiveMomentum(radicand.sqrt()))
    } else {
        Err(Error::ComplexRegime {
            eps: squeeze.eps(),
            threshold: real_regime_threshold(gap, squeeze.mu(), phys),
        })
    }
}

/// Every Bessel value the matching conditions at `r = 1 -+ eps` need.
#[derive(Debug, Clone, Copy)]
struct Annulus {
    m_plus_a: f64,
    decay: f64,
    momentum: f64,
    eps: f64,
    /// `2 eps (a + m) - mu`, negative in the real regime.
    beta: f64,
    sigma: f64,
    i_p: ScaledPair,
    i_q: ScaledPair,
    k_p: ScaledPair,
    k_q: ScaledPair,
    /// `[order p or q][inner or outer]`.
    j: [[f64; 2]; 2],
    y: [[f64; 2]; 2],
}

/// The `I` and `K` values at `r = 1 -+ eps`, which do not depend on `mu`.
#[derive(Debug, Clone, Copy)]
pub struct FixedEnergy {
    mode: AngularMode,
    gap: GapEnergy,
    eps: f64,
    phys: PhysParams,
    i_p: ScaledPair,
    i_q: ScaledPair,
    k_p: ScaledPair,
    k_q: ScaledPair,
}

impl FixedEnergy {
    pub fn new(mode: AngularMode, gap: GapEnergy, eps: f64, phys: &PhysParams) -> Result<Self> {
        // validates eps; mu is irrelevant here
        SqueezeParams::new(eps, 1.0)?;
        let decay = gap.decay();
        let top = mode.max_index();
        let (p, q) = (mode.upper_index() as usize, mode.lower_index() as usize);
        let i = bessel_i_half_ladder(top, decay * (1.0 - eps))?;
        let k = bessel_k_half_ladder(top, decay * (1.0 + eps))?;
        Ok(Self {
            mode,
            gap,
            eps,
            phys: *phys,
            i_p: i[p],
            i_q: i[q],
            k_p: k[p],
            k_q: k[q],
        })
    }

    fn annulus(&self, mu: f64) -> Result<Annulus> {
        let squeeze = SqueezeParams::new(self.eps, mu)?;
        let momentum = l_param(squeeze, self.gap, &self.phys)?.value();
        let eps = self.eps;
        let top = self.mode.max_index();
        let (p, q) = (self.mode.upper_index() as usize, self.mode.lower_index() as usize);
        let j_in = bessel_j_half_ladder(top, momentum * (1.0 - eps))?;
        let j_out = bessel_j_half_ladder(top, momentum * (1.0 + eps))?;
        let y_in = bessel_y_half_ladder(top, momentum * (1.0 - eps))?;
        let y_out = bessel_y_half_ladder(top, momentum * (1.0 + eps))?;
        let m_plus_a = self.phys.m + self.gap.a();
        Ok(Annulus {
            m_plus_a,
            decay: self.gap.decay(),
            momentum,
            eps,
            beta: 2.0 * eps * m_plus_a - mu,
            sigma: self.mode.sign().as_f64(),
            i_p: self.i_p,
            i_q: self.i_q,
            k_p: self.k_p,
            k_q: self.k_q,
            j: [[j_in[p], j_out[p]], [j_in[q], j_out[q]]],
            y: [[y_in[p], y_out[p]], [y_in[q], y_out[q]]],
        })
    }

    /// `D_eps(a, mu)` for this energy and annulus.
    pub fn dispersion(&self, mu: f64) -> Result<f64> {
        Ok(self.annulus(mu)?.closed_form())
    }
}

impl Annulus {
    fn new(mode: AngularMode, gap: GapEnergy, squeeze: SqueezeParams, phys: &PhysParams) -> Result<Self> {
        // check the regime before paying for any Bessel ladder
        l_param(squeeze, gap, phys)?;
        FixedEnergy::new(mode, gap, squeeze.eps(), phys)?.annulus(squeeze.mu())
    }

    /// Factor of the annulus `g` relative to the `J`, `Y` combination of `f`'s
    /// partner order: `s L / (a - mu/(2 eps) + m)`.
    fn layer_ratio(&self) -> f64 {
        self.sigma * 2.0 * self.eps * self.momentum / self.beta
    }

    fn closed_form(&self) -> f64 {
        const P: usize = 0;
        const Q: usize = 1;
        const IN: usize = 0;
        const OUT: usize = 1;
        let (j, y) = (&self.j, &self.y);
        let x1 = j[Q][OUT] * y[Q][IN] - j[Q][IN] * y[Q][OUT];
        let x2 = j[P][IN] * y[Q][OUT] - j[Q][OUT] * y[P][IN];
        let x3 = j[P][OUT] * y[Q][IN] - j[Q][IN] * y[P][OUT];
        let x4 = j[P][OUT] * y[P][IN] - j[P][IN] * y[P][OUT];

        let (ma, mm, l, eps, beta, sigma) = (
            self.m_plus_a,
            self.decay,
            self.momentum,
            self.eps,
            self.beta,
            self.sigma,
        );
        let kp_ip = (self.k_p * self.i_p).unscaled();
        let kp_iq = (self.k_p * self.i_q).unscaled();
        let kq_ip = (self.k_q * self.i_p).unscaled();
        let kq_iq = (self.k_q * self.i_q).unscaled();

        let first = 2.0 * ma * l / (beta * beta)
            * (-2.0 * l * eps * ma * kp_ip * x1 - sigma * mm * beta * kp_iq * x2);
        let second = mm / (eps * beta)
            * (-sigma * 2.0 * l * eps * ma * kq_ip * x3 + mm * beta * kq_iq * x4);
        first + second
    }

    /// The matching matrix with the `A` column divided by the `I` scale and the
    /// `C` column by the `K` scale; returns it with `ln` of the removed factor.
    fn scaled_matrix(&self) -> ([[f64; 4]; 4], f64) {
        let eps = self.eps;
        let c = self.decay / self.m_plus_a;
        let gamma = self.layer_ratio();
        let (si, sk) = (self.i_p.log_scale, self.k_p.log_scale);
        let (ip, iq) = (self.i_p.rescaled_to(si), self.i_q.rescaled_to(si));
        let (kp, kq) = (self.k_p.rescaled_to(sk), self.k_q.rescaled_to(sk));
        let (j, y) = (&self.j, &self.y);
        let inner = (1.0 - eps).sqrt();
        let outer = (1.0 + eps).sqrt();
        let rows = [
            [ip, -j[0][0], -y[0][0], 0.0],
            [c * iq, -gamma * j[1][0], -gamma * y[1][0], 0.0],
            [0.0, j[0][1], y[0][1], -kp],
            [0.0, gamma * j[1][1], gamma * y[1][1], c * kq],
        ];
        let mut out = rows;
        for (r, row) in out.iter_mut().enumerate() {
            let w = if r < 2 { inner } else { outer };
            for v in row.iter_mut() {
                *v *= w;
            }
        }
        (out, si + sk)
    }
}

/// Determinant of a 4x4 matrix by cofactor expansion along the first row.
pub fn det4(a: &[[f64; 4]; 4]) -> f64 {
    let minor = |skip: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        let m = |r: usize, c: usize| a[r][cols[c]];
        m(1, 0) * (m(2, 1) * m(3, 2) - m(2, 2) * m(3, 1))
            - m(1, 1) * (m(2, 0) * m(3, 2) - m(2, 2) * m(3, 0))
            + m(1, 2) * (m(2, 0) * m(3, 1) - m(2, 1) * m(3, 0))
    };
    (0..4)
        .map(|c| {
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][c] * minor(c)
        })
        .sum()
}

/// The continuity conditions for `f` and `g` at `r = 1 - eps` and `r = 1 + eps`
/// acting on `(A, B1, B2, C)`.
pub fn squeezed_matrix(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
) -> Result<[[f64; 4]; 4]> {
    let annulus = Annulus::new(mode, gap, squeeze, phys)?;
    let (mut matrix, ln_scale) = annulus.scaled_matrix();
    for row in matrix.iter_mut() {
        row[0] = ScaledPair::new(row[0], ln_scale - annulus.k_p.log_scale).unscaled();
        row[3] = ScaledPair::new(row[3], ln_scale - annulus.i_p.log_scale).unscaled();
    }
    Ok(matrix)
}

/// Closed form of the squeezed dispersion function `D_eps(a, mu)`.
pub fn dispersion_squeezed(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
) -> Result<DispersionValue> {
    let value = Annulus::new(mode, gap, squeeze, phys)?.closed_form();
    Ok(DispersionValue {
        value,
        mode,
        a: gap.a(),
        coupling: squeeze.mu(),
    })
}

/// `D_eps` recovered from the matching determinant: `det (a + m)^2 / (eps (eps^2 - 1))`.
pub fn dispersion_squeezed_det(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
) -> Result<f64> {
    let annulus = Annulus::new(mode, gap, squeeze, phys)?;
    let (matrix, ln_scale) = annulus.scaled_matrix();
    let eps = squeeze.eps();
    let det = ScaledPair::new(det4(&matrix), ln_scale).unscaled();
    Ok(det * annulus.m_plus_a * annulus.m_plus_a / (eps * (eps * eps - 1.0)))
}

/// `C(a, mu) = 4 (a + m) / (mu pi (1 + tan^2(mu / 2)))`.
pub fn limit_constant(gap: GapEnergy, mu: f64, phys: &PhysParams) -> f64 {
    let t = (0.5 * mu).tan();
    4.0 * (gap.a() + phys.m) / (mu * PI * (1.0 + t * t))
}

/// `lim_{eps -> 0} D_eps(a, mu) = -C(a, mu) D(a, 2 tan(mu / 2))`.
pub fn squeezed_limit(mode: AngularMode, gap: GapEnergy, mu: f64, phys: &PhysParams) -> Result<f64> {
    let coupling = renormalized_coupling(mu)?;
    let shell = dispersion_shell(mode, gap, coupling, phys)?.value;
    Ok(-limit_constant(gap, mu, phys) * shell)
}

/// `|D_eps(a, mu) - lim D_eps(a, mu)|`.
pub fn limit_residual(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
) -> Result<f64> {
    let limit = squeezed_limit(mode, gap, squeeze.mu(), phys)?;
    Ok((dispersion_squeezed(mode, gap, squeeze, phys)?.value - limit).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackConfig {
    /// Points of the bracketing grid over the searched interval.
    pub grid_n: usize,
    /// Half-width of the searched interval around the shell root; `None`
    /// searches the whole gap.
    pub window: Option<f64>,
    pub workers: Option<usize>,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            grid_n: 512,
            window: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackPoint {
    pub eps: f64,
    pub a_eps: Option<f64>,
    /// `|D_eps(a_eps)|`.
    pub residual: Option<f64>,
    /// Why no root was reported at this `eps`.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTrack {
    pub mode: AngularMode,
    pub mu: f64,
    /// Shell strength whose root is tracked.
    pub coupling: f64,
    pub a_star: f64,
    pub points: Vec<TrackPoint>,
    /// First-order Richardson extrapolation from the two smallest `eps` with a root.
    pub extrapolated: Option<f64>,
}

impl RootTrack {
    pub fn errors(&self) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.a_eps.map(|a| (a - self.a_star).abs()))
            .collect()
    }
}

/// Roots of `D_eps(., mu)` in `[lo, hi]`, ascending.
pub fn squeezed_roots(
    mode: AngularMode,
    squeeze: SqueezeParams,
    phys: &PhysParams,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Vec<f64> {
    let f = |a: f64| {
        GapEnergy::new(a, phys)
            .and_then(|gap| dispersion_squeezed(mode, gap, squeeze, phys))
            .map_or(f64::NAN, |d| d.value)
    };
    let xs = uniform_grid(lo, hi, grid_n.max(2));
    let fs: Vec<f64> = xs.iter().map(|&a| f(a)).collect();
    let mut roots: Vec<f64> = sign_change_brackets(&xs, &fs)
        .into_iter()
        .map(|br| bisect(f, br, 0.0))
        .collect();
    merge_close(&mut roots, 1e-10 * phys.m);
    roots
}

fn track_one(
    mode: AngularMode,
    mu: f64,
    a_star: f64,
    eps: f64,
    phys: &PhysParams,
    cfg: &TrackConfig,
) -> TrackPoint {
    let fail = |e: Error| TrackPoint {
        eps,
        a_eps: None,
        residual: None,
        failure: Some(e.to_string()),
    };
    let squeeze = match SqueezeParams::new(eps, mu) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let (gap_lo, gap_hi) = phys.gap_window(DEFAULT_EDGE_MARGIN);
    // L is real for a < mu/(2 eps) - m
    let real_hi = squeeze.height() - phys.m;
    let (mut lo, mut hi) = (gap_lo, gap_hi.min(real_hi * (1.0 - 1e-12)));
    if let Some(w) = cfg.window {
        lo = lo.max(a_star - w);
        hi = hi.min(a_star + w);
    }
    if !(lo < hi) {
        return fail(Error::ComplexRegime {
            eps,
            threshold: mu / (2.0 * (phys.m + a_star)),
        });
    }
    let roots = squeezed_roots(mode, squeeze, phys, lo, hi, cfg.grid_n);
    let nearest = roots
        .into_iter()
        .min_by(|x, y| (x - a_star).abs().total_cmp(&(y - a_star).abs()));
    match nearest {
        Some(a) => {
            let residual = GapEnergy::new(a, phys)
                .and_then(|gap| dispersion_squeezed(mode, gap, squeeze, phys))
                .map(|d| d.value.abs())
                .ok();
            TrackPoint {
                eps,
                a_eps: Some(a),
                residual,
                failure: None,
            }
        }
        None => fail(Error::NoRoot { near: a_star }),
    }
}

/// Follows the squeezed root nearest to `a_star` along `eps_list`.
pub fn track_near(
    mode: AngularMode,
    mu: f64,
    coupling: ShellCoupling,
    a_star: f64,
    eps_list: &[f64],
    phys: &PhysParams,
    cfg: &TrackConfig,
) -> RootTrack {
    let points = par_map(cfg.workers, eps_list, |&eps| {
        track_one(mode, mu, a_star, eps, phys, cfg)
    });
    let extrapolated = richardson(&points);
    RootTrack {
        mode,
        mu,
        coupling: coupling.value(),
        a_star,
        points,
        extrapolated,
    }
}

fn richardson(points: &[TrackPoint]) -> Option<f64> {
    let mut found: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.a_eps.map(|a| (p.eps, a)))
        .collect();
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    match found.as_slice() {
        [(e1, a1), (e2, a2), ..] if e1 != e2 => Some((e2 * a1 - e1 * a2) / (e2 - e1)),
        _ => None,
    }
}

/// Tracks, for every gap eigenvalue `a*` of the shell with strength `coupling`,
/// the nearest squeezed eigenvalue of strength `mu` along `eps_list`.
pub fn root_track_with(
    mode: AngularMode,
    mu: f64,
    coupling: ShellCoupling,
    phys: &PhysParams,
    eps_list: &[f64],
    cfg: &TrackConfig,
) -> Result<Vec<RootTrack>> {
    positive("mu", mu)?;
    let shell_cfg = ScanConfig {
        workers: cfg.workers,
        ..ScanConfig::default()
    };
    let stars = scan_roots(mode, coupling, phys, &shell_cfg)?;
    if stars.is_empty() {
        return Err(Error::NoRoot { near: 0.0 });
    }
    Ok(stars
        .into_iter()
        .map(|a_star| track_near(mode, mu, coupling, a_star.a(), eps_list, phys, cfg))
        .collect())
}

/// [`root_track_with`] at the renormalised strength `2 tan(mu / 2)`.
pub fn root_track(
    mode: AngularMode,
    mu: f64,
    phys: &PhysParams,
    eps_list: &[f64],
    cfg: &TrackConfig,
) -> Result<Vec<RootTrack>> {
    root_track_with(mode, mu, renormalized_coupling(mu)?, phys, eps_list, cfg)
}

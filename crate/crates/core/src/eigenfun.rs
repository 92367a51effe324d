//! Explicit radial eigenfunctions and checks of their matching conditions.
//!
//! A radial spinor `(f, g)` solves, on each piece with constant potential `V`,
//!
//! ```text
//! (m - a + V) f + (-d/dr + k/r) g = 0,
//! (d/dr + k/r) f - (m + a - V) g = 0,
//! ```
//!
//! with `V = 0` outside the annulus and `V = mu / (2 eps)` inside it.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

use crate::approx::{l_param, squeezed_matrix, SqueezeParams};
use crate::error::{Error, Result};
use crate::shell::{AngularMode, GapEnergy, PhysParams, ShellCoupling};
use crate::specfun::{
    bessel_i_half_ladder, bessel_j_half_ladder, bessel_k_half_ladder, bessel_y_half_ladder,
};

/// Largest ratio of extreme singular values accepted as a singular matching matrix.
pub const SINGULAR_RATIO: f64 = 1e-6;

/// `M^+ = (lambda/2, 1; -1, lambda/2)` and `M^- = (lambda/2, -1; 1, lambda/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionMatrices {
    pub plus: [[f64; 2]; 2],
    pub minus: [[f64; 2]; 2],
}

impl TransmissionMatrices {
    pub fn new(coupling: ShellCoupling) -> Self {
        let h = 0.5 * coupling.value();
        Self {
            plus: [[h, 1.0], [-1.0, h]],
            minus: [[h, -1.0], [1.0, h]],
        }
    }

    /// `M^- outside + M^+ inside`.
    pub fn apply(&self, outside: (f64, f64), inside: (f64, f64)) -> (f64, f64) {
        let (mm, mp) = (&self.minus, &self.plus);
        (
            mm[0][0] * outside.0 + mm[0][1] * outside.1 + mp[0][0] * inside.0 + mp[0][1] * inside.1,
            mm[1][0] * outside.0 + mm[1][1] * outside.1 + mp[1][0] * inside.0 + mp[1][1] * inside.1,
        )
    }
}

/// One closed-form piece of a radial spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Piece {
    /// `f = A sqrt(r) I_p(M r)`, `g = A M/(m+a) sqrt(r) I_q(M r)`.
    Regular { amp: f64 },
    /// `f = C sqrt(r) K_p(M r)`, `g = -C M/(m+a) sqrt(r) K_q(M r)`.
    Decaying { amp: f64 },
    /// `f = sqrt(r) (B1 J_p + B2 Y_p)(L r)`,
    /// `g = ratio sqrt(r) (B1 J_q + B2 Y_q)(L r)` on a potential step `V`.
    Oscillating {
        b1: f64,
        b2: f64,
        momentum: f64,
        ratio: f64,
        potential: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSpinor {
    pub mode: AngularMode,
    pub a: f64,
    pub m: f64,
    /// Piece `k` lives between `breakpoints[k - 1]` and `breakpoints[k]`.
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl RadialSpinor {
    fn decay(&self) -> f64 {
        ((self.m - self.a) * (self.m + self.a)).sqrt()
    }

    /// Evaluates the formula of piece `k` at any `r > 0`, also outside its interval.
    pub fn eval_piece(&self, k: usize, r: f64) -> (f64, f64) {
        let top = self.mode.max_index();
        let (p, q) = (self.mode.upper_index() as usize, self.mode.lower_index() as usize);
        let root = r.sqrt();
        let decay = self.decay();
        let c = decay / (self.m + self.a);
        match self.pieces[k] {
            Piece::Regular { amp } => {
                if amp == 0.0 {
                    return (0.0, 0.0);
                }
                let i = bessel_i_half_ladder(top, decay * r).expect("r > 0");
                (amp * root * i[p].unscaled(), amp * c * root * i[q].unscaled())
            }
            Piece::Decaying { amp } => {
                if amp == 0.0 {
                    return (0.0, 0.0);
                }
                let kk = bessel_k_half_ladder(top, decay * r).expect("r > 0");
                (amp * root * kk[p].unscaled(), -amp * c * root * kk[q].unscaled())
            }
            Piece::Oscillating {
                b1,
                b2,
                momentum,
                ratio,
                ..
            } => {
                let j = bessel_j_half_ladder(top, momentum * r).expect("r > 0");
                let y = bessel_y_half_ladder(top, momentum * r).expect("r > 0");
                (
                    root * (b1 * j[p] + b2 * y[p]),
                    ratio * root * (b1 * j[q] + b2 * y[q]),
                )
            }
        }
    }

    pub fn potential(&self, k: usize) -> f64 {
        match self.pieces[k] {
            Piece::Oscillating { potential, .. } => potential,
            _ => 0.0,
        }
    }

    /// Index of the piece containing `r`; breakpoints belong to the outer piece.
    pub fn piece_index(&self, r: f64) -> usize {
        self.breakpoints.iter().filter(|&&b| b <= r).count()
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        self.eval_piece(self.piece_index(r), r)
    }

    /// `(f, g)` at `breakpoints[k]` from the inner side.
    pub fn left_limit(&self, k: usize) -> (f64, f64) {
        self.eval_piece(k, self.breakpoints[k])
    }

    /// `(f, g)` at `breakpoints[k]` from the outer side.
    pub fn right_limit(&self, k: usize) -> (f64, f64) {
        self.eval_piece(k + 1, self.breakpoints[k])
    }

    /// `(r, f, g)` rows at the given radii.
    pub fn sample(&self, radii: &[f64]) -> Vec<(f64, f64, f64)> {
        radii
            .iter()
            .map(|&r| {
                let (f, g) = self.eval(r);
                (r, f, g)
            })
            .collect()
    }
}

pub fn build_shell(mode: AngularMode, gap: GapEnergy, phys: &PhysParams, a_coeff: f64, b_coeff: f64) -> RadialSpinor {
    RadialSpinor {
        mode,
        a: gap.a(),
        m: phys.m,
        breakpoints: vec![1.0],
        pieces: vec![
            Piece::Regular { amp: a_coeff },
            Piece::Decaying { amp: b_coeff },
        ],
    }
}

/// Three-piece spinor with coefficients `(A, B1, B2, C)`.
pub fn build_squeezed(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
    coeffs: [f64; 4],
) -> Result<RadialSpinor> {
    let momentum = l_param(squeeze, gap, phys)?.value();
    let potential = squeeze.height();
    let eps = squeeze.eps();
    let ratio = mode.sign().as_f64() * momentum / (gap.a() - potential + phys.m);
    Ok(RadialSpinor {
        mode,
        a: gap.a(),
        m: phys.m,
        breakpoints: vec![1.0 - eps, 1.0 + eps],
        pieces: vec![
            Piece::Regular { amp: coeffs[0] },
            Piece::Oscillating {
                b1: coeffs[1],
                b2: coeffs[2],
                momentum,
                ratio,
                potential,
            },
            Piece::Decaying { amp: coeffs[3] },
        ],
    })
}

/// `|M^- phi(1+) + M^+ phi(1-)|` for a spinor with its single breakpoint at 1.
pub fn jump_residual(spinor: &RadialSpinor, coupling: ShellCoupling) -> f64 {
    let t = TransmissionMatrices::new(coupling);
    let (x, y) = t.apply(spinor.right_limit(0), spinor.left_limit(0));
    x.hypot(y)
}

/// Largest jump `|phi(b+) - phi(b-)|` over all breakpoints.
pub fn continuity_residual(spinor: &RadialSpinor) -> f64 {
    (0..spinor.breakpoints.len())
        .map(|k| {
            let (l, r) = (spinor.left_limit(k), spinor.right_limit(k));
            (l.0 - r.0).hypot(l.1 - r.1)
        })
        .fold(0.0, f64::max)
}

/// The transmission conditions at `r = 1` acting on `(A, B)`.
pub fn shell_matrix(
    mode: AngularMode,
    gap: GapEnergy,
    coupling: ShellCoupling,
    phys: &PhysParams,
) -> Result<[[f64; 2]; 2]> {
    let decay = gap.decay();
    let top = mode.max_index();
    let (p, q) = (mode.upper_index() as usize, mode.lower_index() as usize);
    let i = bessel_i_half_ladder(top, decay)?;
    let k = bessel_k_half_ladder(top, decay)?;
    let (ip, iq, kp, kq) = (i[p].unscaled(), i[q].unscaled(), k[p].unscaled(), k[q].unscaled());
    let c = decay / (phys.m + gap.a());
    let h = 0.5 * coupling.value();
    Ok([
        [c * iq + h * ip, c * kq + h * kp],
        [h * c * iq - ip, kp - h * c * kq],
    ])
}

/// The coupling of the problem whose matching matrix is inspected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Shell(ShellCoupling),
    Squeezed(SqueezeParams),
}

fn column_scales<const N: usize>(rows: &[[f64; N]; N]) -> [f64; N] {
    let mut scales = [0.0; N];
    for (c, s) in scales.iter_mut().enumerate() {
        *s = rows.iter().map(|row| row[c].abs()).fold(0.0, f64::max);
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    scales
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    // fix the overall sign so the first sizeable entry is positive
    if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-8) {
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Null direction of a 2x2 matrix from the larger row of its adjugate.
fn null2(rows: [[f64; 2]; 2]) -> Result<Vec<f64>> {
    let s = column_scales(&rows);
    let m = Matrix2::new(rows[0][0] / s[0], rows[0][1] / s[1], rows[1][0] / s[0], rows[1][1] / s[1]);
    let frob2 = m.norm_squared();
    let det = m.determinant().abs();
    // singular values of a 2x2: s1^2 + s2^2 = |m|_F^2, s1 s2 = |det|
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max = (0.5 * (frob2 + disc)).sqrt();
    let s_min = if s_max > 0.0 { det / s_max } else { 0.0 };
    let ratio = if s_max > 0.0 { s_min / s_max } else { 0.0 };
    if ratio > SINGULAR_RATIO {
        return Err(Error::NotARoot { ratio });
    }
    let first = (m[(0, 1)], -m[(0, 0)]);
    let second = (m[(1, 1)], -m[(1, 0)]);
    let pick = if first.0.hypot(first.1) >= second.0.hypot(second.1) {
        first
    } else {
        second
    };
    Ok(unit(vec![pick.0 / s[0], pick.1 / s[1]]))
}

/// Smallest right singular direction of a 4x4 matrix.
fn null4(rows: [[f64; 4]; 4]) -> Result<Vec<f64>> {
    let s = column_scales(&rows);
    let m = Matrix4::from_fn(|r, c| rows[r][c] / s[c]);
    let svd = m.svd(false, true);
    let values = svd.singular_values;
    let (i_min, s_min) = values.argmin();
    let s_max = values.max();
    let ratio = if s_max > 0.0 { s_min / s_max } else { 0.0 };
    if ratio > SINGULAR_RATIO {
        return Err(Error::NotARoot { ratio });
    }
    let v_t = svd.v_t.expect("requested");
    let v: Vector4<f64> = v_t.row(i_min).transpose();
    Ok(unit((0..4).map(|c| v[c] / s[c]).collect()))
}

/// Unit coefficient vector `(A, B)` or `(A, B1, B2, C)` of a bound state.
pub fn nullspace_coeffs(
    mode: AngularMode,
    gap: GapEnergy,
    coupling: Coupling,
    phys: &PhysParams,
) -> Result<Vec<f64>> {
    match coupling {
        Coupling::Shell(lambda) => null2(shell_matrix(mode, gap, lambda, phys)?),
        Coupling::Squeezed(squeeze) => null4(squeezed_matrix(mode, gap, squeeze, phys)?),
    }
}

/// The bound-state spinor of the shell at a root `(a, lambda)`.
pub fn shell_eigenfunction(
    mode: AngularMode,
    gap: GapEnergy,
    coupling: ShellCoupling,
    phys: &PhysParams,
) -> Result<RadialSpinor> {
    let c = nullspace_coeffs(mode, gap, Coupling::Shell(coupling), phys)?;
    Ok(build_shell(mode, gap, phys, c[0], c[1]))
}

/// The bound-state spinor of the squeezed potential at a root `(a, mu, eps)`.
pub fn squeezed_eigenfunction(
    mode: AngularMode,
    gap: GapEnergy,
    squeeze: SqueezeParams,
    phys: &PhysParams,
) -> Result<RadialSpinor> {
    let c = nullspace_coeffs(mode, gap, Coupling::Squeezed(squeeze), phys)?;
    build_squeezed(mode, gap, squeeze, phys, [c[0], c[1], c[2], c[3]])
}

/// Residuals of both radial equations at `r`, with derivatives of piece `k`
/// replaced by centred differences of step `h`.
pub fn ode_residual(spinor: &RadialSpinor, k: usize, r: f64, h: f64) -> (f64, f64) {
    let (f, g) = spinor.eval_piece(k, r);
    let (f_hi, g_hi) = spinor.eval_piece(k, r + h);
    let (f_lo, g_lo) = spinor.eval_piece(k, r - h);
    let df = (f_hi - f_lo) / (2.0 * h);
    let dg = (g_hi - g_lo) / (2.0 * h);
    let kappa = spinor.mode.kappa() as f64;
    let v = spinor.potential(k);
    let (m, a) = (spinor.m, spinor.a);
    (
        (m - a + v) * f - dg + kappa / r * g,
        df + kappa / r * f - (m + a - v) * g,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeCheck {
    pub h: f64,
    pub residual_h: f64,
    pub residual_half_h: f64,
    /// `log2(residual_h / residual_half_h)`; 2 for centred differences.
    pub order: f64,
}

/// Sample radii inside each piece, away from the breakpoints.
pub fn interior_samples(spinor: &RadialSpinor) -> Vec<(usize, f64)> {
    let b = &spinor.breakpoints;
    let mut out = Vec::new();
    for k in 0..spinor.pieces.len() {
        let lo = if k == 0 { 0.0 } else { b[k - 1] };
        let hi = if k < b.len() { b[k] } else { 3.0 * b[k - 1] };
        for t in [0.25, 0.5, 0.75] {
            out.push((k, lo + t * (hi - lo)));
        }
    }
    out
}

/// Step for finite differences: a thousandth of the shortest length scale.
pub fn default_step(spinor: &RadialSpinor) -> f64 {
    let momentum = spinor
        .pieces
        .iter()
        .map(|p| match p {
            Piece::Oscillating { momentum, .. } => *momentum,
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    let scale = 1.0f64.max(spinor.decay()).max(momentum);
    let width = spinor
        .breakpoints
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    (1e-3 / scale).min(0.01 * width)
}

/// Observed order of the finite-difference ODE residual between `h` and `h/2`.
pub fn fd_order(spinor: &RadialSpinor, h: f64) -> OdeCheck {
    let samples = interior_samples(spinor);
    let worst = |step: f64| {
        samples
            .iter()
            .map(|&(k, r)| {
                let (f, g) = spinor.eval_piece(k, r);
                let size = f.hypot(g).max(f64::MIN_POSITIVE);
                let (e1, e2) = ode_residual(spinor, k, r, step);
                e1.hypot(e2) / size
            })
            .fold(0.0, f64::max)
    };
    let residual_h = worst(h);
    let residual_half_h = worst(0.5 * h);
    OdeCheck {
        h,
        residual_h,
        residual_half_h,
        order: (residual_h / residual_half_h).log2(),
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// `int_lo^hi (f^2 + g^2) dr`, piece by piece.
pub fn l2_norm_sq(spinor: &RadialSpinor, lo: f64, hi: f64) -> f64 {
    let mut cuts = vec![lo];
    cuts.extend(spinor.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| {
            let k = spinor.piece_index(0.5 * (w[0] + w[1]));
            let density = |r: f64| {
                if r <= 0.0 {
                    return 0.0;
                }
                let (f, g) = spinor.eval_piece(k, r);
                f * f + g * g
            };
            simpson(density, w[0], w[1], 2000)
        })
        .sum()
}

/// Relative growth of `int_0^R (f^2 + g^2) dr` when `R` doubles from `30/M`.
pub fn tail_relative_change(spinor: &RadialSpinor) -> f64 {
    let r1 = 30.0 / spinor.decay();
    let r1 = r1.max(2.0 * spinor.breakpoints.last().copied().unwrap_or(1.0));
    let head = l2_norm_sq(spinor, 0.0, r1);
    let tail = l2_norm_sq(spinor, r1, 2.0 * r1);
    tail / (head + tail)
}

//! Partial-wave coefficients and the exact delta-shell dispersion relation.
//!
//! For a gap energy `a` with decay constant `M = sqrt(m^2 - a^2)` the sphere
//! operator `K^a` acts on the spinor harmonic of index `n` by the scalar
//! `d_n(M) = I_{n+1/2}(M) K_{n+1/2}(M)`. The radial problem of the mode
//! `(j, k = s (j + 1/2))` has a bound state at `a` exactly when
//!
//! ```text
//! D(a, lambda) = lambda^2/4 - ((m + a) d_n - (m - a) d_n') lambda - 1 = 0,
//! ```
//!
//! where `n = j + s/2` indexes the upper radial component and `n' = j - s/2`
//! the lower one.

use std::fmt;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::specfun::{bessel_i_half_ladder, bessel_k_half_ladder};

/// Below this decay constant the closed forms for `d_1` and `d_*` switch to
/// their power series; the displayed forms cancel like `1/M^3` there.
const CLOSED_FORM_SERIES_BELOW: f64 = 0.125;

/// Relative distance from `+-m` at which gap scans stop.
pub const DEFAULT_EDGE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysParams {
    pub m: f64,
}

impl PhysParams {
    pub fn new(m: f64) -> Result<Self> {
        Ok(Self { m: positive("m", m)? })
    }

    /// `[-m + delta, m - delta]` with `delta = margin * m`.
    pub fn gap_window(&self, margin: f64) -> (f64, f64) {
        let delta = margin * self.m;
        (-self.m + delta, self.m - delta)
    }
}

/// An energy strictly inside the gap `(-m, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEnergy {
    a: f64,
    decay: f64,
}

impl GapEnergy {
    pub fn new(a: f64, phys: &PhysParams) -> Result<Self> {
        let m = phys.m;
        if !(a.is_finite() && a > -m && a < m) {
            return Err(Error::Domain {
                name: "a",
                value: a,
                expected: "an energy inside the gap (-m, m)",
            });
        }
        Ok(Self {
            a,
            decay: ((m - a) * (m + a)).sqrt(),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `M = sqrt(m^2 - a^2)`.
    pub fn decay(&self) -> f64 {
        self.decay
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

/// A partial wave `(j, k_j)`: `j` is a positive half-integer and
/// `k_j = s (j + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AngularMode {
    twice_j: u32,
    sign: Sign,
}

impl AngularMode {
    pub fn new(twice_j: u32, sign: Sign) -> Result<Self> {
        if twice_j % 2 == 1 {
            Ok(Self { twice_j, sign })
        } else {
            Err(Error::Domain {
                name: "2j",
                value: twice_j as f64,
                expected: "an odd positive integer (j = 1/2, 3/2, ...)",
            })
        }
    }

    pub fn from_j(j: f64, sign: Sign) -> Result<Self> {
        let twice = 2.0 * j;
        if twice.is_finite() && twice >= 1.0 && twice.fract() == 0.0 {
            Self::new(twice as u32, sign)
        } else {
            Err(Error::Domain {
                name: "j",
                value: j,
                expected: "a half-integer >= 1/2",
            })
        }
    }

    /// Every mode with `j <= twice_j_max / 2`, both signs, ordered by `j` then sign.
    pub fn all_up_to(twice_j_max: u32) -> Vec<AngularMode> {
        (1..=twice_j_max)
            .step_by(2)
            .flat_map(|t| {
                [Sign::Plus, Sign::Minus].map(|sign| AngularMode { twice_j: t, sign })
            })
            .collect()
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// `k_j = s (j + 1/2)`.
    pub fn kappa(&self) -> i32 {
        self.sign.value() * (self.twice_j as i32 + 1) / 2
    }

    /// Index `n = j + s/2` of the upper component; its Bessel order is `n + 1/2`.
    pub fn upper_index(&self) -> u32 {
        match self.sign {
            Sign::Plus => self.twice_j.div_ceil(2),
            Sign::Minus => (self.twice_j - 1) / 2,
        }
    }

    /// Index `n' = j - s/2` of the lower component.
    pub fn lower_index(&self) -> u32 {
        match self.sign {
            Sign::Plus => (self.twice_j - 1) / 2,
            Sign::Minus => self.twice_j.div_ceil(2),
        }
    }

    /// Number of `m_j` values sharing the radial problem.
    pub fn multiplicity(&self) -> u32 {
        self.twice_j + 1
    }

    pub(crate) fn max_index(&self) -> u32 {
        self.twice_j.div_ceil(2)
    }
}

impl fmt::Display for AngularMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "j={}/2 s={} k={}", self.twice_j, s, self.kappa())
    }
}

/// Strength of the shell interaction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ShellCoupling(f64);

impl ShellCoupling {
    /// Only positive strengths are searched: `a` is an eigenvalue for `lambda`
    /// exactly when `-a` is one for `-lambda`.
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(Self(positive("lambda", lambda)?))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Value of a dispersion relation at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionValue {
    pub value: f64,
    pub mode: AngularMode,
    pub a: f64,
    pub coupling: f64,
}

/// `d_n(M)` for `n = 0..=n_max`.
pub fn d_ladder(n_max: u32, decay: f64) -> Result<Vec<f64>> {
    let decay = positive("M", decay)?;
    let i = bessel_i_half_ladder(n_max, decay)?;
    let k = bessel_k_half_ladder(n_max, decay)?;
    Ok(i.into_iter().zip(k).map(|(i, k)| (i * k).unscaled()).collect())
}

/// `d_n(M) = I_{n+1/2}(M) K_{n+1/2}(M)`.
pub fn d_coeff(n: u32, decay: f64) -> Result<f64> {
    Ok(d_ladder(n, decay)?[n as usize])
}

/// `|p_j|^2 = 1/4 - M^2 d_{j+1/2} d_{j-1/2}`; the same for both signs of the mode.
pub fn p_sq(mode: AngularMode, decay: f64) -> Result<f64> {
    let d = d_ladder(mode.max_index(), decay)?;
    let hi = (mode.twice_j() + 1) as usize / 2;
    Ok(0.25 - decay * decay * d[hi] * d[hi - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedCoeffs {
    pub d0: f64,
    pub d1: f64,
    pub dstar: f64,
}

/// Elementary closed forms of `d_0`, `d_1` and the sharp constant `d_*`.
pub fn closed_coeffs(decay: f64) -> Result<ClosedCoeffs> {
    let mm = positive("M", decay)?;
    let d0 = -(-2.0 * mm).exp_m1() / (2.0 * mm);
    let (d1, dstar) = if mm < CLOSED_FORM_SERIES_BELOW {
        closed_series(mm)
    } else {
        let e = (-2.0 * mm).exp();
        let inv = 1.0 / mm;
        let d1 = 0.5 * inv * (1.0 - inv * inv + (1.0 + inv).powi(2) * e);
        let dstar = 0.5 * inv - 0.5 * (1.0 + inv) * e;
        (d1, dstar)
    };
    Ok(ClosedCoeffs { d0, d1, dstar })
}

fn closed_series(mm: f64) -> (f64, f64) {
    // d_1 = (1 + M) e^{-M} / M^2 * (cosh M - sinh M / M),
    // cosh M - sinh M / M = sum_{k>=1} 2k M^{2k} / (2k+1)!.
    let m2 = mm * mm;
    let mut term: f64 = 1.0 / 3.0; // k = 1 coefficient, without M^2
    let mut sum: f64 = 0.0;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        sum += term;
        // ratio of coefficients 2(k+1)/(2k+3)! over 2k/(2k+1)!
        term *= m2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
        k += 1.0;
    }
    let d1 = (1.0 + mm) * (-mm).exp() * sum;

    // d_* = (1 - (1 + M) e^{-2M}) / (2M) = sum_{k>=1} (-2)^{k-1} (2 - k) M^{k-1} / (2 k!).
    let mut dstar = 0.0;
    let mut power = 1.0; // (-2M)^{k-1}
    let mut factorial = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        factorial *= kf;
        let term = power * (2.0 - kf) / (2.0 * factorial);
        dstar += term;
        if k > 3 && term.abs() < 1e-18 * dstar.abs() {
            break;
        }
        power *= -2.0 * mm;
    }
    (d1, dstar)
}

/// `b(a) = (m + a) d_n(M) - (m - a) d_n'(M)`, the linear coefficient of `D`.
pub fn shell_b(mode: AngularMode, gap: GapEnergy, phys: &PhysParams) -> Result<f64> {
    let d = d_ladder(mode.max_index(), gap.decay())?;
    let m = phys.m;
    let a = gap.a();
    Ok((m + a) * d[mode.upper_index() as usize] - (m - a) * d[mode.lower_index() as usize])
}

fn quadratic(b: f64, lambda: f64) -> f64 {
    0.25 * lambda * lambda - b * lambda - 1.0
}

/// `D(a, lambda) = lambda^2/4 - b(a) lambda - 1`.
pub fn dispersion_shell(
    mode: AngularMode,
    gap: GapEnergy,
    coupling: ShellCoupling,
    phys: &PhysParams,
) -> Result<DispersionValue> {
    let b = shell_b(mode, gap, phys)?;
    Ok(DispersionValue {
        value: quadratic(b, coupling.value()),
        mode,
        a: gap.a(),
        coupling: coupling.value(),
    })
}

/// Positive root of `lambda^2/4 - b lambda - 1 = 0`, i.e. `2 (b + sqrt(b^2 + 1))`.
pub fn lambda_for_b(b: f64) -> f64 {
    let root = b.hypot(1.0);
    if b >= 0.0 {
        2.0 * (b + root)
    } else {
        2.0 / (root - b)
    }
}

/// The unique shell strength for which `a` is an eigenvalue of `mode`.
pub fn lambda_from_a(mode: AngularMode, gap: GapEnergy, phys: &PhysParams) -> Result<ShellCoupling> {
    ShellCoupling::new(lambda_for_b(shell_b(mode, gap, phys)?))
}

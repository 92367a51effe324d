//! Command-line front end of `deltashell`: spectral scans, convergence
//! studies, inequality reports and figure point sets, written as CSV or JSON.

pub mod args;
pub mod commands;
pub mod figures;
pub mod output;

use thiserror::Error;

use deltashell::{AngularMode, PhysParams, ShellCoupling, Sign};

pub use args::Cli;
pub use commands::run;
pub use figures::{figure_points, FigurePoint};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] deltashell::Error),
    #[error("nothing found: {0}")]
    NothingFound(String),
    #[error("{0} violation(s) detected")]
    Violations(usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Core(deltashell::Error::NoRoot { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::NothingFound(_) => 3,
            CliError::Violations(_) => 4,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `2j` from `"3/2"`, `"1.5"` or `"3"`; `j` must be a positive half-odd integer.
pub fn parse_twice_j(name: &str, text: &str) -> Result<u32, CliError> {
    let text = text.trim();
    let bad = || usage(format!("--{name}: expected a half-integer such as 1/2, 3/2 or 1.5, got {text:?}"));
    let twice = if let Some((num, den)) = text.split_once('/') {
        let num: u32 = num.trim().parse().map_err(|_| bad())?;
        let den: u32 = den.trim().parse().map_err(|_| bad())?;
        match den {
            2 => num,
            1 => num.checked_mul(2).ok_or_else(bad)?,
            _ => return Err(bad()),
        }
    } else {
        let j: f64 = text.parse().map_err(|_| bad())?;
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice > 0.0 && twice.fract() == 0.0 && twice < u32::MAX as f64) {
            return Err(bad());
        }
        twice as u32
    };
    if twice % 2 == 0 {
        return Err(bad());
    }
    Ok(twice)
}

pub fn parse_sign(text: &str) -> Result<Sign, CliError> {
    match text.trim() {
        "+1" | "1" | "+" | "plus" => Ok(Sign::Plus),
        "-1" | "-" | "minus" => Ok(Sign::Minus),
        other => Err(usage(format!("--sign: expected +1 or -1, got {other:?}"))),
    }
}

pub fn parse_mode(j: &str, sign: &str) -> Result<AngularMode, CliError> {
    Ok(AngularMode::new(parse_twice_j("j", j)?, parse_sign(sign)?)?)
}

/// A half-width `eps` in `(0, 1)`, written as a number or as `2^-k`.
pub fn parse_eps(text: &str) -> Result<f64, CliError> {
    let text = text.trim();
    let bad = || usage(format!("eps: expected a number in (0, 1) or 2^-k, got {text:?}"));
    let eps = if let Some(exp) = text.strip_prefix("2^") {
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        let k: i32 = exp.parse().map_err(|_| bad())?;
        2f64.powi(k)
    } else {
        text.parse::<f64>().map_err(|_| bad())?
    };
    if !(eps > 0.0 && eps < 1.0) {
        return Err(bad());
    }
    Ok(eps)
}

pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, CliError> {
    let list = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_eps)
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(usage("--eps-list: no values given"));
    }
    Ok(list)
}

pub fn parse_f64_list(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("--{name}: not a number: {s:?}")))
        })
        .collect()
}

pub fn phys(m: f64) -> Result<PhysParams, CliError> {
    if !(m.is_finite() && m > 0.0) {
        return Err(usage(format!("--m must be positive, got {m}")));
    }
    Ok(PhysParams::new(m)?)
}

pub fn shell_coupling(lambda: f64) -> Result<ShellCoupling, CliError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(usage(format!(
            "--lambda must be positive, got {lambda}; a negative strength needs no separate run, \
             since a is an eigenvalue for lambda exactly when -a is one for -lambda"
        )));
    }
    Ok(ShellCoupling::new(lambda)?)
}

/// Checks `mu > 0` and warns when `2 tan(mu/2)` gets large.
pub fn squeeze_strength(mu: f64) -> Result<f64, CliError> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(usage(format!("--mu must be positive, got {mu}")));
    }
    if mu > 3.0 {
        eprintln!("warning: mu = {mu} is close to pi, where the limiting strength 2 tan(mu/2) blows up");
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integers() {
        assert_eq!(parse_twice_j("j", "1/2").unwrap(), 1);
        assert_eq!(parse_twice_j("j", "3/2").unwrap(), 3);
        assert_eq!(parse_twice_j("j", "1.5").unwrap(), 3);
        assert_eq!(parse_twice_j("j", "21/2").unwrap(), 21);
        for bad in ["1", "2/2", "0", "-1/2", "x", "1/3", "0.25"] {
            assert!(parse_twice_j("j", bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn signs() {
        assert_eq!(parse_sign("-1").unwrap(), Sign::Minus);
        assert_eq!(parse_sign("+1").unwrap(), Sign::Plus);
        assert!(parse_sign("0").is_err());
    }

    #[test]
    fn eps_forms() {
        assert_eq!(parse_eps("2^-10").unwrap(), 2f64.powi(-10));
        assert_eq!(parse_eps("2^(-3)").unwrap(), 0.125);
        assert_eq!(parse_eps("0.01").unwrap(), 0.01);
        assert!(parse_eps("2^0").is_err());
        assert!(parse_eps("0").is_err());
        assert_eq!(parse_eps_list("2^-6, 2^-7").unwrap(), vec![2f64.powi(-6), 2f64.powi(-7)]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(shell_coupling(-1.0).unwrap_err().exit_code(), 2);
        assert!(shell_coupling(-1.0).unwrap_err().to_string().contains("-lambda"));
        assert_eq!(CliError::Core(deltashell::Error::NoRoot { near: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::Violations(1).exit_code(), 4);
    }
}

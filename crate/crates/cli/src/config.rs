use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use cyclotrace::poincare::{Acceleration, EvalOptions, SumOptions};
use serde::Serialize;

pub const CACHE_ENV: &str = "CYCLOTRACE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Accel {
    /// smooth cutoff, error |S(X) − S(X/2)|
    Smooth,
    /// mean of the last --window partial sums
    Cesaro,
    /// plain partial sum
    Plain,
}

/// Global settings. Everything except the cache location feeds the cache key.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Config {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision_bits: u32,
    /// Cutoff c_max of the weight-3/2 Kloosterman–Bessel sums.
    #[arg(long = "cmax", global = true, default_value_t = 40000)]
    pub c_max: u64,
    /// Cutoff of the weight-0 coefficient sums c_m(n, s).
    #[arg(long = "coeff-cmax", global = true, default_value_t = 4000)]
    pub coeff_c_max: u64,
    /// Window W of the Cesàro mean.
    #[arg(long, global = true, default_value_t = 64)]
    pub window: usize,
    /// Fourier/q-series terms.
    #[arg(long = "nterms", global = true, default_value_t = 64)]
    pub n_terms: i64,
    /// Tolerance: a result fails when its error estimate exceeds tol·max(1, |value|).
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    /// Step in s of the Richardson derivatives.
    #[arg(long = "ds-step", global = true, default_value_t = 1e-3)]
    pub h: f64,
    /// Acceleration of the c-sums.
    #[arg(long, global = true, value_enum, default_value_t = Accel::Smooth)]
    pub acceleration: Accel,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Cache directory (the CYCLOTRACE_CACHE environment variable takes precedence).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_cache: bool,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            bail!("--precision-bits must be at least 64, got {}", self.precision_bits);
        }
        if self.c_max == 0 || self.coeff_c_max == 0 || self.window == 0 || self.n_terms <= 0 {
            bail!("--cmax, --coeff-cmax, --window and --nterms must be positive");
        }
        if !(self.h > 0.0 && self.h <= 0.1) {
            bail!("--ds-step must lie in (0, 0.1], got {}", self.h);
        }
        let floor = 2f64.powf(-(self.precision_bits as f64) / 2.0);
        if !(self.tol.is_finite() && self.tol >= floor) {
            bail!("--tol must be at least 2^(-precision_bits/2) = {floor:e}, got {}", self.tol);
        }
        Ok(())
    }

    pub fn acceleration(&self) -> Acceleration {
        match self.acceleration {
            Accel::Smooth => Acceleration::Smooth,
            Accel::Cesaro => Acceleration::Cesaro { window: self.window },
            Accel::Plain => Acceleration::Plain,
        }
    }

    pub fn sums(&self) -> SumOptions {
        SumOptions { c_max: self.c_max, acceleration: self.acceleration(), tol: None }
    }

    pub fn eval(&self) -> EvalOptions {
        EvalOptions { n_max: self.n_terms, c_max: self.coeff_c_max, prec: self.precision_bits, acceleration: self.acceleration() }
    }

    /// Environment first, then the flag, then the platform cache directory.
    pub fn cache_dir(&self) -> PathBuf {
        if let Some(p) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        if let Some(p) = &self.cache_dir {
            return p.clone();
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
            .unwrap_or_else(|| PathBuf::from("."));
        base.join("cyclotrace")
    }

    /// Decimal digits worth printing at the working precision.
    pub fn digits(&self) -> usize {
        (self.precision_bits as f64 * std::f64::consts::LOG10_2).floor() as usize
    }
}

#[cfg(test)]
pub(crate) fn default_config() -> Config {
    use clap::Parser;
    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        cfg: Config,
    }
    Wrap::parse_from(["x"]).cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = default_config();
        assert_eq!((c.precision_bits, c.c_max, c.window, c.n_terms, c.tol), (256, 40000, 64, 64, 1e-3));
        assert!(c.validate().is_ok());
        let mut bad = c.clone();
        bad.tol = 1e-60;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.window = 0;
        assert!(bad.validate().is_err());
    }
}

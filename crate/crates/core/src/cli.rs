//! Command-line front end.
//!
//! Three subcommands share one flag set: `rmatrix` writes the R-operator,
//! `verify` runs the verification suite and `roots` lists the normally
//! ordered positive roots. Exit codes: 0 success, 1 verification failure,
//! 2 configuration or evaluation error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::export::{write_matrix_csv, write_report_csv, Format, MatrixFile, RootListing};
use crate::r_factors::{r_operator, RMode};
use crate::representations::GradingVector;
use crate::root_data::{RootSystem, SuperRank};
use crate::scalars::QContext;
use crate::verify::{run_suite, CheckKind, ParameterPoint, SuiteConfig};
use crate::C64;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "UQSLMN_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "uqslmn", version, about = "R-operators of Uq(L(sl(M|N))) evaluation modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the R-operator and write it as a matrix file.
    Rmatrix(CommonArgs),
    /// Run the verification suite; exit code 0 iff every check passes.
    Verify(CommonArgs),
    /// List the normally ordered positive roots with closed-form root-vector data.
    Roots(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long = "m", default_value_t = 2)]
    pub m: usize,
    #[arg(long = "n", default_value_t = 1)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub q_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q_mod: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q_arg: Option<f64>,
    /// Spectral parameter as "re,im".
    #[arg(long, default_value = "0.5,0.2", allow_hyphen_values = true)]
    pub zeta1: String,
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub zeta2: String,
    #[arg(long, default_value = "1.4,-0.6", allow_hyphen_values = true)]
    pub zeta3: String,
    /// Grading s_0..s_L as a comma list; defaults to all ones.
    #[arg(long, allow_hyphen_values = true)]
    pub grading: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    #[arg(long, default_value_t = crate::scalars::DEFAULT_SERIES_ORDER)]
    pub order: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random parameter points per suite check.
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    /// closed or pipeline.
    #[arg(long, default_value = "closed")]
    pub mode: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// json or csv.
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Comma list of suite checks to run.
    #[arg(long)]
    pub checks: Option<String>,
}

pub const DEFAULT_Q: C64 = C64::new(0.95, 0.3);

/// Validated configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rank: SuperRank,
    pub q: C64,
    pub zeta1: C64,
    pub zeta2: C64,
    pub zeta3: C64,
    pub grading: GradingVector,
    pub n_max: usize,
    pub series_order: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub points: usize,
    pub mode: RMode,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub checks: Option<Vec<CheckKind>>,
}

fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Config(format!("cannot parse '{t}' in complex value '{s}'")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::Config(format!("complex values are written 're,im', got '{s}'"))),
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        let rank = SuperRank::new(a.m, a.n)?;
        let cartesian = a.q_re.is_some() || a.q_im.is_some();
        let polar = a.q_mod.is_some() || a.q_arg.is_some();
        let q = match (cartesian, polar) {
            (true, true) => return Err(Error::Config("give q either as --q-re/--q-im or as --q-mod/--q-arg".into())),
            (false, true) => C64::from_polar(a.q_mod.unwrap_or(1.0), a.q_arg.unwrap_or(0.0)),
            (true, false) => C64::new(a.q_re.unwrap_or(0.0), a.q_im.unwrap_or(0.0)),
            (false, false) => DEFAULT_Q,
        };
        QContext::with_options(q, crate::scalars::DEFAULT_TOLERANCE, a.order)
            .and_then(|ctx| ctx.bracket(1).map(|_| ()))
            .map_err(config_err)?;
        let grading = match &a.grading {
            None => GradingVector::standard(&rank),
            Some(g) => {
                let s: std::result::Result<Vec<i64>, _> = g.split(',').map(|t| t.trim().parse::<i64>()).collect();
                let s = s.map_err(|_| Error::Config(format!("grading must be a comma list of integers, got '{g}'")))?;
                GradingVector::new(s, &rank).map_err(config_err)?
            }
        };
        if !(a.tol >= 0.0) || !a.tol.is_finite() {
            return Err(Error::Config(format!("tolerance must be finite and nonnegative, got {}", a.tol)));
        }
        let checks = match &a.checks {
            None => None,
            Some(list) => Some(list.split(',').map(|c| c.parse::<CheckKind>()).collect::<Result<Vec<_>>>()?),
        };
        let zeta = |s: &str| -> Result<C64> {
            let z = parse_complex(s)?;
            if z.norm() == 0.0 || !z.is_finite() {
                return Err(Error::Config(format!("spectral parameters must be finite and nonzero, got '{s}'")));
            }
            Ok(z)
        };
        Ok(Self {
            rank,
            q,
            zeta1: zeta(&a.zeta1)?,
            zeta2: zeta(&a.zeta2)?,
            zeta3: zeta(&a.zeta3)?,
            grading,
            n_max: a.nmax,
            series_order: a.order,
            tolerance: a.tol,
            seed: a.seed,
            points: a.points,
            mode: a.mode.parse()?,
            output: a.output.clone(),
            format: a.format.parse()?,
            checks,
        })
    }

    pub fn ctx(&self) -> Result<QContext> {
        QContext::with_options(self.q, crate::scalars::DEFAULT_TOLERANCE, self.series_order)
    }

    /// Explicit `--output`, else `$UQSLMN_OUTPUT_DIR/default_name`, else stdout.
    pub fn destination(&self, default_name: &str) -> Option<PathBuf> {
        if let Some(p) = &self.output {
            return Some(p.clone());
        }
        std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()).map(|d| PathBuf::from(d).join(default_name))
    }

    fn extension(&self) -> &'static str {
        match self.format {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn suite_config(&self) -> SuiteConfig {
        let mut s = SuiteConfig::new(self.rank);
        s.grading = self.grading.as_slice().to_vec();
        s.tolerance = self.tolerance;
        s.seed = self.seed;
        s.points = self.points;
        s.n_max = self.n_max;
        s.series_order = self.series_order.max(s.orders.sim);
        s.checks = self.checks.clone();
        s.base_point = Some(ParameterPoint { q: self.q, zeta: [self.zeta1, self.zeta2, self.zeta3] });
        s
    }
}

fn emit(config: &RunConfig, default_stem: &str, bytes: Vec<u8>) -> Result<()> {
    match config.destination(&format!("{default_stem}.{}", config.extension())) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, bytes)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)?;
            if !bytes.ends_with(b"\n") {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Evaluates the R-operator in the configured mode and, where possible, the
/// other mode for comparison; returns the file contents.
pub fn cmd_rmatrix(config: &RunConfig) -> Result<MatrixFile> {
    let ctx = config.ctx()?;
    let r = r_operator(&config.rank, &ctx, config.zeta1, config.zeta2, &config.grading, config.mode)?;
    let other = match config.mode {
        RMode::Closed => RMode::Pipeline,
        RMode::Pipeline => RMode::Closed,
    };
    let mut file = MatrixFile::new(config.rank.m(), config.rank.n(), config.q, config.zeta1, config.zeta2, &config.grading, &config.mode.to_string(), r.data());
    file.metadata.insert("other_mode".into(), json!(other.to_string()));
    match r_operator(&config.rank, &ctx, config.zeta1, config.zeta2, &config.grading, other) {
        Ok(o) => {
            file.metadata.insert("residual_vs_other_mode".into(), json!(r.max_abs_diff(&o)));
        }
        Err(e) => {
            file.metadata.insert("other_mode_error".into(), json!(e.to_string()));
        }
    }
    let ratio = config.zeta1 / config.zeta2;
    file.metadata.insert("zeta12".into(), json!([ratio.re, ratio.im]));
    Ok(file)
}

pub fn cmd_roots(config: &RunConfig) -> Result<RootListing> {
    RootListing::new(&RootSystem::new(config.rank), &config.grading, config.n_max)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Rmatrix(a) => {
            let config = RunConfig::from_args(&a)?;
            let file = cmd_rmatrix(&config)?;
            let bytes = match config.format {
                Format::Json => file.to_json()?.into_bytes(),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_matrix_csv(&file.matrix()?, &mut buf)?;
                    buf
                }
            };
            emit(&config, "rmatrix", bytes)?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let config = RunConfig::from_args(&a)?;
            let report = run_suite(&config.suite_config())?;
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{status} {:<20} residual {:.3e} threshold {:.1e}", c.name, c.residual, c.threshold);
                if let Some(e) = &c.error {
                    eprintln!("     {e}");
                }
            }
            let bytes = match config.format {
                Format::Json => serde_json::to_string_pretty(&report)?.into_bytes(),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_report_csv(&report, &mut buf)?;
                    buf
                }
            };
            emit(&config, "report", bytes)?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Roots(a) => {
            let config = RunConfig::from_args(&a)?;
            let listing = cmd_roots(&config)?;
            let bytes = match config.format {
                Format::Json => listing.to_json()?.into_bytes(),
                Format::Csv => {
                    let mut buf = Vec::new();
                    listing.write_csv(&mut buf)?;
                    buf
                }
            };
            emit(&config, "roots", bytes)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> CommonArgs {
        let mut v = vec!["uqslmn", "roots"];
        v.extend_from_slice(extra);
        match Cli::try_parse_from(v).unwrap().command {
            Command::Roots(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults() {
        let c = RunConfig::from_args(&args(&[])).unwrap();
        assert_eq!((c.rank.m(), c.rank.n()), (2, 1));
        assert_eq!(c.grading.as_slice(), &[1, 1, 1]);
        assert_eq!((c.n_max, c.series_order, c.tolerance), (4, 40, 1e-9));
        assert_eq!(c.mode, RMode::Closed);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn polar_q_and_negative_values() {
        let c = RunConfig::from_args(&args(&["--q-mod", "1.1", "--q-arg", "-0.4", "--zeta1", "-0.3,-0.2"])).unwrap();
        assert!((c.q - C64::from_polar(1.1, -0.4)).norm() < 1e-15);
        assert_eq!(c.zeta1, C64::new(-0.3, -0.2));
        assert!(RunConfig::from_args(&args(&["--q-re", "1.1", "--q-mod", "1.0"])).is_err());
    }

    #[test]
    fn invalid_inputs() {
        let e = RunConfig::from_args(&args(&["--m", "2", "--n", "2"])).unwrap_err();
        assert_eq!(e.to_string(), "M and N must differ");
        assert!(RunConfig::from_args(&args(&["--grading", "1,1"])).is_err());
        assert!(RunConfig::from_args(&args(&["--checks", "ybe,bogus"])).is_err());
        assert!(RunConfig::from_args(&args(&["--zeta2", "0,0"])).is_err());
        assert!(RunConfig::from_args(&args(&["--mode", "fast"])).is_err());
        assert!(RunConfig::from_args(&args(&["--q-re", "1", "--q-im", "0"])).is_err());
    }

    #[test]
    fn exit_code_for_equal_ranks() {
        assert_eq!(main_with_args(["uqslmn", "rmatrix", "--m", "1", "--n", "1"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["uqslmn", "rmatrix", "--bogus"]), EXIT_CONFIG);
    }
}

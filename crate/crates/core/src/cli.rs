//! The `pdo` command line. [`run`] does all the work and returns what
//! should be printed so it can be driven from tests.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::congruence::{self, CongruenceReport, CongruenceSpec, ScanResult, Window};
use crate::error::{Error, Result};
use crate::etaq::{self, EtaQuotientSpec};
use crate::padic::{self, ProfileReport, TableRow, Valuation};
use crate::xipoly::{self, XiPoly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Clone, PartialEq, Eq)]
#[command(
    name = "pdo",
    version,
    about = "PDO(n) expansions, xi-polynomial towers and 2-adic congruence checks"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Truncation order (number of coefficients). Defaults to the least order the command needs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub order: Option<u64>,

    #[arg(long = "format", global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// PDO(0), ..., PDO(max)
    Pdo {
        #[arg(long)]
        max: u64,
    },
    /// q-expansion of an eta quotient such as "4^1;6^2;1^-1;3^-1;12^-1" or a name (delta, gamma, xi, kappa)
    Expand {
        #[arg(long)]
        spec: String,
    },
    /// The polynomial zeta(i, j)
    Zeta {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
    },
    /// The polynomial Lambda_k
    Lambda {
        #[arg(long)]
        k: u32,
    },
    /// The polynomial Phi_k
    Phi {
        #[arg(long)]
        k: u32,
        /// Build from Lambda_(k+2) - gamma^6 power * Lambda_k instead of the recurrence
        #[arg(long)]
        direct: bool,
    },
    /// 2-adic valuation table of Phi_k, or a zeta profile check with --i/--j
    Valuations(ValuationArgs),
    /// Check a congruence family over a window
    Verify(VerifyArgs),
    /// Largest 2-power modulus each stride pair survives
    Scan {
        /// Comma-separated pairs a:b
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<StridePair>,
        #[arg(long, default_value_t = 16)]
        max_e: u32,
        /// Window is 0 <= n <= nmax
        #[arg(long)]
        nmax: u64,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct ValuationArgs {
    /// Odd indices k; pass the flag with no value for an empty table
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub k: Option<Vec<u32>>,
    #[arg(long, default_value_t = padic::DEFAULT_MAX_PHI_INDEX)]
    pub max_k: u32,
    #[arg(long, requires = "j", conflicts_with = "k")]
    pub i: Option<u32>,
    #[arg(long, requires = "i")]
    pub j: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Main,
    Corollary,
    Strengthened,
    Ramanujan,
    Custom,
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Family index for main and corollary
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Upper end of the window; inclusive except for ramanujan, where n < nmax
    #[arg(long)]
    pub nmax: u64,
    #[arg(long, default_value_t = 3)]
    pub alpha_max: u32,
    /// custom: left stride a in PDO(a n + offset)
    #[arg(long)]
    pub lhs: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub offset: u64,
    /// custom: right stride b in PDO(b n); omit to compare with 0
    #[arg(long)]
    pub rhs: Option<u64>,
    /// custom: modulus
    #[arg(long)]
    pub modulus: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StridePair(pub u64, pub u64);

impl std::str::FromStr for StridePair {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(StridePair(parse(a)?, parse(b)?))
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(err: impl std::fmt::Display) -> Self {
        Outcome {
            exit: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

struct Emitted {
    body: String,
    failed: bool,
    notes: Vec<String>,
}

/// Runs a parsed configuration. A requested `--out` file is written here.
pub fn run(config: &RunConfig) -> Outcome {
    let emitted = match execute(config) {
        Ok(e) => e,
        Err(err) => return Outcome::usage(err),
    };
    let mut stderr: String = emitted.notes.iter().map(|n| format!("{n}\n")).collect();
    let stdout = match &config.out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, &emitted.body) {
                return Outcome::usage(format!("cannot write {}: {err}", path.display()));
            }
            let _ = writeln!(stderr, "wrote {}", path.display());
            String::new()
        }
        None => emitted.body,
    };
    Outcome {
        exit: if emitted.failed { EXIT_FAIL } else { EXIT_OK },
        stdout,
        stderr,
    }
}

/// Parses `args` (program name first) and runs. Usage errors exit 2.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(err) => {
            let exit = if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
            let text = err.render().to_string();
            let (stdout, stderr) = if err.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            Outcome {
                exit,
                stdout,
                stderr,
            }
        }
    }
}

fn resolve_order(
    requested: Option<u64>,
    required: usize,
    notes: &mut Vec<String>,
) -> Result<usize> {
    match requested {
        None => {
            notes.push(format!("order: {required} (minimum for this window)"));
            Ok(required)
        }
        Some(o) if (o as usize) < required => Err(Error::InvalidArgument(format!(
            "--order {o} is below the {required} coefficients this window needs"
        ))),
        Some(o) => {
            notes.push(format!("order: {o}"));
            Ok(o as usize)
        }
    }
}

fn execute(config: &RunConfig) -> Result<Emitted> {
    let fmt = config.format;
    let mut notes = Vec::new();
    let mut failed = false;
    let body = match &config.command {
        Command::Pdo { max } => {
            let needed = usize::try_from(*max)
                .ok()
                .and_then(|m| m.checked_add(1))
                .ok_or_else(|| Error::InvalidArgument("--max too large".into()))?;
            let order = resolve_order(config.order, needed, &mut notes)?;
            let table = etaq::pdo_series(order);
            let values: Vec<String> = table.values()[..needed]
                .iter()
                .map(|v| v.to_string())
                .collect();
            emit_sequence(fmt, "n", "pdo", &values)?
        }
        Command::Expand { spec } => {
            let parsed = match EtaQuotientSpec::named(spec) {
                Some(named) => named,
                None => spec.parse()?,
            };
            let order = config.order.map_or(20, |o| o as usize);
            notes.push(format!("order: {order}"));
            let series = etaq::expand(&parsed, order);
            match fmt {
                Format::Plain => format!("{series}\n"),
                _ => {
                    let values: Vec<String> =
                        series.coeffs().iter().map(|c| c.to_string()).collect();
                    emit_sequence(fmt, "n", "coeff", &values)?
                }
            }
        }
        Command::Zeta { i, j } => emit_poly(fmt, &xipoly::zeta(*i, *j))?,
        Command::Lambda { k } => emit_poly(fmt, &xipoly::lambda_poly(*k)?)?,
        Command::Phi { k, direct } => {
            let p = if *direct {
                xipoly::phi_direct(*k)?
            } else {
                xipoly::phi_poly(*k)?
            };
            emit_poly(fmt, &p)?
        }
        Command::Valuations(args) => match (args.i, args.j) {
            (Some(i), Some(j)) => {
                let report = padic::check_z_profile(i, j)?;
                failed = !report.verdict.passed();
                emit_profile(fmt, &report)?
            }
            _ => {
                let ks = args.k.clone().unwrap_or_else(|| vec![3, 5]);
                emit_table(fmt, &padic::valuation_table(&ks, args.max_k)?)?
            }
        },
        Command::Verify(args) => {
            let specs = family_specs(args)?;
            let required = specs
                .iter()
                .map(CongruenceSpec::required_order)
                .try_fold(1usize, |acc, r| r.map(|r| acc.max(r)))?;
            let order = resolve_order(config.order, required, &mut notes)?;
            let table = etaq::pdo_series(order);
            let reports = specs
                .iter()
                .map(|s| congruence::verify(s, &table))
                .collect::<Result<Vec<_>>>()?;
            failed = reports.iter().any(|r| !r.passed());
            emit_reports(fmt, &reports)?
        }
        Command::Scan { pairs, max_e, nmax } => {
            let window = Window::through(*nmax);
            let stride_pairs: Vec<(u64, u64)> = pairs.iter().map(|p| (p.0, p.1)).collect();
            let mut required = 1;
            for &(a, b) in &stride_pairs {
                required =
                    required.max(CongruenceSpec::internal(a, b, 2, window)?.required_order()?);
            }
            let order = resolve_order(config.order, required, &mut notes)?;
            let table = etaq::pdo_series(order);
            emit_scan(
                fmt,
                &congruence::scan(&table, &stride_pairs, *max_e, window)?,
            )?
        }
    };
    Ok(Emitted {
        body,
        failed,
        notes,
    })
}

fn family_specs(args: &VerifyArgs) -> Result<Vec<CongruenceSpec>> {
    let through = Window::through(args.nmax);
    let k = args.k;
    if matches!(args.family, Family::Main | Family::Corollary) && k > 29 {
        return Err(Error::IndexOutOfRange {
            k,
            reason: "strides overflow 64 bits".into(),
        });
    }
    Ok(match args.family {
        Family::Main => vec![CongruenceSpec::internal(
            1 << (2 * k + 3),
            1 << (2 * k + 1),
            1u64 << (2 * k + 3),
            through,
        )?],
        Family::Corollary => vec![CongruenceSpec::internal(
            1 << (2 * k + 4),
            1 << (2 * k + 2),
            1u64 << (2 * k + 3),
            through,
        )?],
        Family::Strengthened => vec![
            CongruenceSpec::internal(32, 8, 64, through)?,
            CongruenceSpec::internal(128, 32, 128, through)?,
        ],
        Family::Ramanujan => {
            if args.alpha_max > 40 {
                return Err(Error::InvalidArgument("--alpha-max above 40".into()));
            }
            let window = Window::new(0, args.nmax);
            let mut specs = Vec::new();
            for alpha in 0..=args.alpha_max {
                let s = 1u64 << alpha;
                specs.push(CongruenceSpec::vanishing(4 * s, 3 * s, 4, window)?);
                specs.push(CongruenceSpec::vanishing(8 * s, 7 * s, 8, window)?);
            }
            specs
        }
        Family::Custom => {
            let lhs = args
                .lhs
                .ok_or_else(|| Error::InvalidArgument("custom family needs --lhs".into()))?;
            let modulus = args
                .modulus
                .ok_or_else(|| Error::InvalidArgument("custom family needs --modulus".into()))?;
            let mut spec = match args.rhs {
                Some(rhs) => CongruenceSpec::internal(lhs, rhs, modulus, through)?,
                None => CongruenceSpec::vanishing(lhs, args.offset, modulus, through)?,
            };
            spec.lhs_offset = args.offset;
            vec![spec]
        }
    })
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn emit_sequence(fmt: Format, index: &str, name: &str, values: &[String]) -> Result<String> {
    Ok(match fmt {
        Format::Plain => values.join(", ") + "\n",
        Format::Json => json(values)?,
        Format::Csv => {
            let mut out = format!("{index},{name}\n");
            for (n, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{n},{v}");
            }
            out
        }
    })
}

fn emit_poly(fmt: Format, p: &XiPoly) -> Result<String> {
    Ok(match fmt {
        Format::Plain => format!("{p}\n"),
        Format::Json => json(p)?,
        Format::Csv => {
            let mut out = String::from("deg,coeff\n");
            for (d, c) in p.terms() {
                let _ = writeln!(out, "{d},{c}");
            }
            out
        }
    })
}

fn join_vals(vals: &[Valuation]) -> String {
    vals.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn emit_profile(fmt: Format, r: &ProfileReport) -> Result<String> {
    Ok(match fmt {
        Format::Plain => {
            let mut out = format!(
                "zeta({},{}) from xi^{}: {} -> {}\n",
                r.i.unwrap_or_default(),
                r.j.unwrap_or_default(),
                r.base_degree,
                join_vals(&r.vals),
                r.verdict
            );
            for f in &r.failures {
                let _ = writeln!(out, "  {f}");
            }
            out
        }
        Format::Json => json(r)?,
        Format::Csv => {
            let mut out = String::from("offset,degree,valuation\n");
            for (m, v) in r.vals.iter().enumerate() {
                let _ = writeln!(out, "{m},{},{v}", r.base_degree as usize + m);
            }
            out
        }
    })
}

fn tail_text(t: Option<i64>) -> String {
    match t {
        Some(c) if c >= 0 => format!(">= M+{c}"),
        Some(c) => format!(">= M{c}"),
        None => "-".into(),
    }
}

fn emit_table(fmt: Format, rows: &[TableRow]) -> Result<String> {
    Ok(match fmt {
        Format::Plain => {
            let mut out = String::new();
            for r in rows {
                let _ = writeln!(
                    out,
                    "k={} tau={}: {}, then {}",
                    r.k,
                    r.tau,
                    join_vals(&r.head),
                    tail_text(r.tail_offset)
                );
            }
            out
        }
        Format::Json => json(rows)?,
        Format::Csv => {
            let mut out = String::from("k,tau,m0,m1,m2,tail_offset\n");
            for r in rows {
                let head: Vec<String> = r.head.iter().map(|v| v.to_string()).collect();
                let tail = r.tail_offset.map(|t| t.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{tail}", r.k, r.tau, head.join(","));
            }
            out
        }
    })
}

fn describe(spec: &CongruenceSpec) -> String {
    let lhs = if spec.lhs_offset == 0 {
        format!("PDO({}n)", spec.lhs_stride)
    } else {
        format!("PDO({}n+{})", spec.lhs_stride, spec.lhs_offset)
    };
    let rhs = spec
        .rhs_stride
        .map_or_else(|| "0".to_string(), |b| format!("PDO({b}n)"));
    format!(
        "{lhs} == {rhs} mod {} for {} <= n < {}",
        spec.modulus, spec.n_range.start, spec.n_range.end
    )
}

fn emit_reports(fmt: Format, reports: &[CongruenceReport]) -> Result<String> {
    Ok(match fmt {
        Format::Plain => {
            let mut out = String::new();
            for r in reports {
                let _ = write!(
                    out,
                    "{}: {} ({} checked, order {})",
                    describe(&r.spec),
                    r.verdict,
                    r.checked_count,
                    r.truncation_order
                );
                if let Some(c) = &r.counterexample {
                    let _ = write!(out, "; n={} gives {} vs {}", c.n, c.lhs, c.rhs);
                }
                out.push('\n');
            }
            out
        }
        Format::Json => json(reports)?,
        Format::Csv => {
            let mut out = String::from("lhs_stride,lhs_offset,rhs_stride,modulus,start,end,verdict,checked,order,n,lhs,rhs\n");
            for r in reports {
                let s = &r.spec;
                let rhs = s.rhs_stride.map(|b| b.to_string()).unwrap_or_default();
                let (n, l, rv) = r
                    .counterexample
                    .as_ref()
                    .map(|c| (c.n.to_string(), c.lhs.to_string(), c.rhs.to_string()))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{rhs},{},{},{},{},{},{},{n},{l},{rv}",
                    s.lhs_stride,
                    s.lhs_offset,
                    s.modulus,
                    s.n_range.start,
                    s.n_range.end,
                    r.verdict,
                    r.checked_count,
                    r.truncation_order
                );
            }
            out
        }
    })
}

fn emit_scan(fmt: Format, results: &[ScanResult]) -> Result<String> {
    Ok(match fmt {
        Format::Plain => results
            .iter()
            .map(|r| {
                format!(
                    "PDO({}n) == PDO({}n) mod 2^{} for {} <= n < {}\n",
                    r.lhs_stride, r.rhs_stride, r.exponent, r.window.start, r.window.end
                )
            })
            .collect(),
        Format::Json => json(results)?,
        Format::Csv => {
            let mut out = String::from("lhs_stride,rhs_stride,exponent,start,end,order\n");
            for r in results {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.lhs_stride,
                    r.rhs_stride,
                    r.exponent,
                    r.window.start,
                    r.window.end,
                    r.truncation_order
                );
            }
            out
        }
    })
}

//! Command-line front end: sweep orchestration, CSV/JSON emission, and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 argument error,
//! 3 resource-guard refusal.

use crate::arith::{ArithmeticMode, DEFAULT_PRECISION_BITS};
use crate::combinatorics::{
    self, motzkin_asymptotic_ln, motzkin_count, MotzkinParams, EXACT_DP_CAP,
};
use crate::correlations::{
    self, bruteforce_correlator, sxsx_colorful, sxsx_colorless, sz_expectation_exact, szsz_exact,
    SpinOperator, SpinOperatorKind,
};
use crate::hamiltonian::{self, default_field_grid, ssb_sweep, verify_symmetries};
use crate::spectrum::{
    self, block_spectrum, cut_entropy_asymptotic, cut_spectra_sweep, cut_spectrum, entropies,
    expand_block, expand_classes, rdm_oracle, ChainGeometry,
};
use crate::walks;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write as _;
use std::path::PathBuf;

pub const PRECISION_ENV_VAR: &str = "MOTZKIN_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(
    name = "motzkin",
    version,
    about = "Exact and asymptotic computations for s-colored Motzkin spin chains"
)]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Mantissa bits for extended-precision paths.
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// key=value config file; flags take precedence over the file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Walk counts: exact, asymptotic, and their relative error.
    Count {
        /// Lengths: comma list and/or a:b:step ranges.
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "1")]
        s: String,
        /// Final heights m.
        #[arg(long, default_value = "0")]
        m: String,
    },
    /// Schmidt spectra and entanglement entropies.
    Spectrum {
        #[command(subcommand)]
        which: SpectrumCmd,
    },
    /// Spin correlators.
    Corr {
        #[command(subcommand)]
        which: CorrCmd,
    },
    /// Verification suites; exit code 1 on failure.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpectrumCmd {
    /// Cut entropies S_kappa vs their closed forms over a sweep of cuts.
    Cut {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2")]
        s: String,
        #[arg(long, default_value = "2")]
        kappa: String,
        /// Cut positions; defaults to n/10 : n/2 : n/10.
        #[arg(long)]
        b: Option<String>,
        /// Compare the analytic spectrum to the reduced-density-matrix oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Block spectrum of a centered segment.
    Block {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value = "1")]
        s: u32,
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorrCmd {
    /// <Sz_b Sz_{b+L}> centered, exact vs asymptotic, with a slope fit.
    Zz {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2")]
        s: u32,
        #[arg(long = "L", default_value = "20:200:20")]
        l: String,
    },
    /// <Sx_b Sx_{b+L}>: colorless table form (s=1) or colorful dominant term.
    Xx {
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "1")]
        s: u32,
        #[arg(long = "L", default_value = "10")]
        l: usize,
    },
    /// Cross-basis two-point functions (symmetry-forced zeros), brute force.
    Cross {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2")]
        s: u32,
    },
    /// Single-site <Sz_b> profile, exact vs closed form.
    Z {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2")]
        s: u32,
        #[arg(long)]
        b: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// All small-n oracle suites up to --max-n.
    All {
        #[arg(long, default_value = "8")]
        max_n: usize,
    },
    /// Symmetry-breaking field sweep diagnostics.
    Ssb {
        #[arg(long, default_value = "4,6,8")]
        n: String,
    },
    /// Symmetry-group identities.
    Symmetries {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2")]
        s: u32,
    },
    /// Frustration-freeness per projector term.
    #[command(name = "ff")]
    FrustrationFree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        s: u32,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Guard(String),
    Verification,
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

fn guard_or_usage<E: std::fmt::Display>(err: E, is_guard: bool) -> CliError {
    if is_guard {
        CliError::Guard(err.to_string())
    } else {
        CliError::Usage(err.to_string())
    }
}

fn map_comb(e: combinatorics::CombinatoricsError) -> CliError {
    use combinatorics::CombinatoricsError::*;
    guard_or_usage(&e, matches!(e, ExactCapExceeded(_)))
}

fn map_walks(e: walks::WalksError) -> CliError {
    guard_or_usage(&e, matches!(e, walks::WalksError::GuardExceeded(_)))
}

fn map_spec(e: spectrum::SpectrumError) -> CliError {
    use spectrum::SpectrumError::*;
    guard_or_usage(&e, matches!(e, OracleGuard(_)))
}

fn map_corr(e: correlations::CorrelationsError) -> CliError {
    use correlations::CorrelationsError::*;
    match e {
        TooManyEntries(_) => CliError::Guard(e.to_string()),
        Walks(w) => map_walks(w),
        Counting(c) => map_comb(c),
        _ => CliError::Usage(e.to_string()),
    }
}

fn map_ham(e: hamiltonian::HamiltonianError) -> CliError {
    use hamiltonian::HamiltonianError::*;
    match e {
        DimensionGuard(_) => CliError::Guard(e.to_string()),
        Walks(w) => map_walks(w),
        _ => CliError::Usage(e.to_string()),
    }
}

/// Expand "a:b:step" ranges and comma lists into a sorted unique list.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if token.contains(':') {
            let parts: Vec<&str> = token.split(':').collect();
            if parts.len() != 2 && parts.len() != 3 {
                return Err(CliError::Usage(format!(
                    "range `{token}` must be start:end or start:end:step"
                )));
            }
            let (a, b) = (parse_usize(parts[0])?, parse_usize(parts[1])?);
            let step = if parts.len() == 3 { parse_usize(parts[2])? } else { 1 };
            if step == 0 || b < a {
                return Err(CliError::Usage(format!("bad range `{token}`")));
            }
            let mut v = a;
            while v <= b {
                out.push(v);
                v += step;
            }
        } else {
            out.push(parse_usize(token)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty list `{text}`")));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_usize(t: &str) -> Result<usize, CliError> {
    t.parse()
        .map_err(|_| CliError::Usage(format!("`{t}` is not a nonnegative integer")))
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{t}` is not a number")))
        })
        .collect()
}

/// Resolved global settings: flag > config file > environment > default.
pub struct Settings {
    pub precision_bits: u32,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

fn resolve_settings(cli: &Cli) -> Result<Settings, CliError> {
    let mut file_prec: Option<u32> = None;
    let mut file_format: Option<OutputFormat> = None;
    let mut file_output: Option<PathBuf> = None;
    let mut file_threads: Option<usize> = None;
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {} is not key=value", lineno + 1))
            })?;
            match key.trim() {
                "precision_bits" => {
                    file_prec = Some(value.trim().parse().map_err(|_| {
                        CliError::Usage("config precision_bits must be an integer".into())
                    })?)
                }
                "format" => {
                    file_format = Some(match value.trim() {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        other => {
                            return Err(CliError::Usage(format!("unknown format `{other}`")))
                        }
                    })
                }
                "output" => file_output = Some(PathBuf::from(value.trim())),
                "threads" => {
                    file_threads = Some(value.trim().parse().map_err(|_| {
                        CliError::Usage("config threads must be an integer".into())
                    })?)
                }
                other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
            }
        }
    }
    let env_prec = std::env::var(PRECISION_ENV_VAR)
        .ok()
        .map(|v| {
            v.parse::<u32>().map_err(|_| {
                CliError::Usage(format!("{PRECISION_ENV_VAR} must be an integer, got `{v}`"))
            })
        })
        .transpose()?;
    let precision_bits = cli
        .precision_bits
        .or(file_prec)
        .or(env_prec)
        .unwrap_or(DEFAULT_PRECISION_BITS);
    if let Some(t) = cli.threads.or(file_threads) {
        // a second init in the same process is harmless; ignore the error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let format = if cli.format == OutputFormat::Csv {
        file_format.unwrap_or(cli.format)
    } else {
        cli.format
    };
    Ok(Settings {
        precision_bits,
        format,
        output: cli.output.clone().or(file_output),
    })
}

fn emit(settings: &Settings, text: &str) -> Result<(), CliError> {
    match &settings.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Least-squares slope of ln|y| against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.abs().ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let settings = resolve_settings(&cli)?;
    match cli.command {
        Command::Count { n, s, m } => cmd_count(&settings, &n, &s, &m),
        Command::Spectrum { which } => match which {
            SpectrumCmd::Cut {
                n,
                s,
                kappa,
                b,
                oracle,
            } => cmd_spectrum_cut(&settings, n, &s, &kappa, b.as_deref(), oracle),
            SpectrumCmd::Block { n, l, s, oracle } => cmd_spectrum_block(&settings, n, l, s, oracle),
        },
        Command::Corr { which } => match which {
            CorrCmd::Zz { n, s, l } => cmd_corr_zz(&settings, n, s, &l),
            CorrCmd::Xx { n, s, l } => cmd_corr_xx(&settings, &n, s, l),
            CorrCmd::Cross { n, s } => cmd_corr_cross(&settings, n, s),
            CorrCmd::Z { n, s, b } => cmd_corr_z(&settings, n, s, &b),
        },
        Command::Verify { which } => match which {
            VerifyCmd::All { max_n } => cmd_verify_all(&settings, max_n),
            VerifyCmd::Ssb { n } => cmd_verify_ssb(&settings, &n),
            VerifyCmd::Symmetries { n, s } => cmd_verify_symmetries(&settings, n, s),
            VerifyCmd::FrustrationFree { n, s } => cmd_verify_ff(&settings, n, s),
        },
    }
}

fn cmd_count(settings: &Settings, n: &str, s: &str, m: &str) -> Result<(), CliError> {
    let ns = parse_usize_list(n)?;
    let ss = parse_usize_list(s)?;
    let ms = parse_usize_list(m)?;
    let mut rows = Vec::new();
    for &n in &ns {
        for &s in &ss {
            let s = s as u32;
            let mode = if n <= EXACT_DP_CAP {
                ArithmeticMode::Exact
            } else {
                ArithmeticMode::log_float(settings.precision_bits)
                    .map_err(|e| CliError::Usage(e.to_string()))?
            };
            for &m in &ms {
                let params = MotzkinParams::new(s, n, m).map_err(map_comb)?;
                let exact = motzkin_count(params, mode).map_err(map_comb)?;
                let (asym_ln, rel_err) = match motzkin_asymptotic_ln(params) {
                    Ok(a) => {
                        let rel = exact
                            .ln()
                            .map(|le| ((a - le).exp() - 1.0).abs());
                        (Some(a), rel)
                    }
                    Err(_) => (None, None),
                };
                rows.push(json!({
                    "n": n, "m": m, "s": s,
                    "exact": exact.to_string(),
                    "ln_exact": exact.ln(),
                    "ln_asymptotic": asym_ln,
                    "rel_err": rel_err,
                }));
            }
        }
    }
    render_rows(
        settings,
        "n,m,s,exact,ln_exact,ln_asymptotic,rel_err",
        &rows,
        &["n", "m", "s", "exact", "ln_exact", "ln_asymptotic", "rel_err"],
    )
}

fn cmd_spectrum_cut(
    settings: &Settings,
    n: usize,
    s: &str,
    kappa: &str,
    b: Option<&str>,
    oracle: bool,
) -> Result<(), CliError> {
    let ss = parse_usize_list(s)?;
    let kappas = parse_f64_list(kappa)?;
    let bs = match b {
        Some(text) => parse_usize_list(text)?,
        None => {
            let step = (n / 10).max(1);
            (1..=5).map(|i| i * step).collect()
        }
    };
    let mut rows = Vec::new();
    for &s in &ss {
        let s = s as u32;
        let spectra =
            cut_spectra_sweep(n, s, &bs, settings.precision_bits).map_err(map_spec)?;
        for sp in &spectra {
            let classes = sp.spectrum_classes();
            let rep = entropies(&classes, &kappas).map_err(map_spec)?;
            let geometry = sp.geometry;
            let mut oracle_dev: Option<f64> = None;
            if oracle {
                let side: Vec<usize> = (0..geometry.b).collect();
                let vals = rdm_oracle(n, s, &side).map_err(map_spec)?;
                let analytic = expand_classes(&classes);
                let mut worst = 0.0f64;
                for (i, a) in analytic.iter().enumerate() {
                    worst = worst.max((a - vals[i]).abs());
                }
                oracle_dev = Some(worst);
            }
            for &(k, exact_bits) in &rep.s_kappa {
                let asym = cut_entropy_asymptotic(geometry, k).ok();
                rows.push(json!({
                    "n": n, "s": s, "b": geometry.b, "kappa": k,
                    "exact_bits": exact_bits,
                    "asymptotic_bits": asym,
                    "abs_diff": asym.map(|a| (exact_bits - a).abs()),
                    "oracle_max_dev": oracle_dev,
                }));
            }
        }
    }
    render_rows(
        settings,
        "n,s,b,kappa,exact_bits,asymptotic_bits,abs_diff,oracle_max_dev",
        &rows,
        &[
            "n",
            "s",
            "b",
            "kappa",
            "exact_bits",
            "asymptotic_bits",
            "abs_diff",
            "oracle_max_dev",
        ],
    )
}

fn cmd_spectrum_block(
    settings: &Settings,
    n: usize,
    l: usize,
    s: u32,
    oracle: bool,
) -> Result<(), CliError> {
    let geometry = ChainGeometry::centered_block(n, s, l).map_err(map_spec)?;
    let sp = block_spectrum(geometry).map_err(map_spec)?;
    let class_vals = expand_block(&sp);
    let oracle_vals = if oracle {
        let sites: Vec<usize> = (geometry.b..geometry.b + l).collect();
        Some(rdm_oracle(n, s, &sites).map_err(map_spec)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for (i, v) in class_vals.iter().enumerate() {
        let o = oracle_vals.as_ref().and_then(|vals| vals.get(i)).copied();
        rows.push(json!({
            "n": n, "s": s, "b": geometry.b, "L": l, "index": i,
            "class_eigenvalue": v,
            "rdm_eigenvalue": o,
            "abs_diff": o.map(|x| (x - v).abs()),
        }));
    }
    render_rows(
        settings,
        "n,s,b,L,index,class_eigenvalue,rdm_eigenvalue,abs_diff",
        &rows,
        &[
            "n",
            "s",
            "b",
            "L",
            "index",
            "class_eigenvalue",
            "rdm_eigenvalue",
            "abs_diff",
        ],
    )
}

fn cmd_corr_zz(settings: &Settings, n: usize, s: u32, l: &str) -> Result<(), CliError> {
    let ls = parse_usize_list(l)?;
    let pairs: Vec<(usize, usize)> = ls
        .iter()
        .map(|&l| {
            let i = (n - l) / 2;
            (i, i + l)
        })
        .collect();
    let reports = correlations::szsz_sweep(n, s, &pairs, Some(settings.precision_bits.max(256)))
        .map_err(map_corr)?;
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    for (&l, rep) in ls.iter().zip(&reports) {
        fitted.push((l as f64, rep.value));
        rows.push(json!({
            "n": n, "s": s, "L": l,
            "exact": rep.value,
            "asymptotic": rep.asymptotic,
            "err_bound": rep.error_bound,
            "unreliable": rep.unreliable,
        }));
    }
    let slope = loglog_slope(&fitted);
    eprintln!("log-log slope over L in {:?}: {slope:.4}", (ls[0], ls[ls.len() - 1]));
    render_rows(
        settings,
        "n,s,L,exact,asymptotic,err_bound,unreliable",
        &rows,
        &["n", "s", "L", "exact", "asymptotic", "err_bound", "unreliable"],
    )
}

fn cmd_corr_xx(settings: &Settings, n: &str, s: u32, l: usize) -> Result<(), CliError> {
    let ns = parse_usize_list(n)?;
    let mut rows = Vec::new();
    for &n in &ns {
        let rep = if s == 1 {
            sxsx_colorless(n, (n - l) / 2, l, false).map_err(map_corr)?
        } else {
            sxsx_colorful(n, l, s).map_err(map_corr)?
        };
        let mut row = json!({
            "n": n, "s": s, "L": l,
            "value": rep.value,
            "asymptotic": rep.asymptotic,
            "err_bound": rep.error_bound,
        });
        for (name, v) in &rep.finite_size_terms {
            row[name] = json!(v);
        }
        rows.push(row);
    }
    let header = if s == 1 {
        "n,s,L,value,asymptotic,err_bound,event_e_bound"
    } else {
        "n,s,L,value,asymptotic,err_bound,cascade_fraction"
    };
    let cols: Vec<&str> = header.split(',').collect();
    render_rows(settings, header, &rows, &cols)
}

fn cmd_corr_z(settings: &Settings, n: usize, s: u32, b: &str) -> Result<(), CliError> {
    let bs = parse_usize_list(b)?;
    let mode = if n <= EXACT_DP_CAP {
        ArithmeticMode::Exact
    } else {
        ArithmeticMode::log_float(settings.precision_bits)
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let mut rows = Vec::new();
    for &b in &bs {
        let rep = sz_expectation_exact(n, b, s, mode).map_err(map_corr)?;
        rows.push(json!({
            "n": n, "s": s, "b": b,
            "exact": rep.value,
            "asymptotic": rep.asymptotic,
            "err_bound": rep.error_bound,
        }));
    }
    render_rows(
        settings,
        "n,s,b,exact,asymptotic,err_bound",
        &rows,
        &["n", "s", "b", "exact", "asymptotic", "err_bound"],
    )
}

fn cmd_corr_cross(settings: &Settings, n: usize, s: u32) -> Result<(), CliError> {
    let kinds = [
        (SpinOperatorKind::Sx, SpinOperatorKind::Sy),
        (SpinOperatorKind::Sz, SpinOperatorKind::Sy),
        (SpinOperatorKind::Sz, SpinOperatorKind::Sx),
    ];
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (a, b) in kinds {
        for i in 1..n {
            let j = n.min(i + (n / 2).max(1));
            if j <= i {
                continue;
            }
            let v = bruteforce_correlator(
                n,
                s,
                &[(i, SpinOperator::new(a, s)), (j, SpinOperator::new(b, s))],
            )
            .map_err(map_corr)?;
            worst = worst.max(v.norm());
            rows.push(json!({
                "n": n, "s": s, "i": i, "j": j,
                "op_a": format!("{a:?}"), "op_b": format!("{b:?}"),
                "value_re": v.re, "value_im": v.im, "norm": v.norm(),
            }));
        }
    }
    render_rows(
        settings,
        "n,s,i,j,op_a,op_b,value_re,value_im,norm",
        &rows,
        &["n", "s", "i", "j", "op_a", "op_b", "value_re", "value_im", "norm"],
    )?;
    if worst > 1e-12 {
        return Err(CliError::Verification);
    }
    Ok(())
}

fn cmd_verify_all(settings: &Settings, max_n: usize) -> Result<(), CliError> {
    let mut checks = Vec::new();
    let mut all_ok = true;
    // counting: DP vs enumeration
    let mut counting_ok = true;
    for s in 1..=2u32 {
        for n in 1..=max_n.min(8) {
            let enumerated = walks::enumerate_walks(n, s).map_err(map_walks)?.len() as u64;
            let total = combinatorics::total_motzkin(n, s, ArithmeticMode::Exact)
                .map_err(map_comb)?;
            counting_ok &= *total.as_integer().unwrap() == enumerated;
        }
    }
    checks.push(("counting_enumeration", counting_ok));
    // cut spectra vs RDM
    let mut spectra_ok = true;
    for s in 1..=2u32 {
        for n in 2..=max_n.min(8) {
            for b in 1..n {
                let sp = cut_spectrum(ChainGeometry::cut(n, s, b).map_err(map_spec)?)
                    .map_err(map_spec)?;
                let analytic = expand_classes(&sp.spectrum_classes());
                let side: Vec<usize> = if b <= n - b {
                    (0..b).collect()
                } else {
                    (b..n).collect()
                };
                let vals = rdm_oracle(n, s, &side).map_err(map_spec)?;
                spectra_ok &= analytic
                    .iter()
                    .enumerate()
                    .all(|(i, a)| (a - vals[i]).abs() < 1e-12);
            }
        }
    }
    checks.push(("cut_spectrum_rdm", spectra_ok));
    // correlator oracles
    let mut corr_ok = true;
    for s in 1..=2u32 {
        for n in 3..=max_n.min(6) {
            for i in 1..n {
                let rep = szsz_exact(n, i, i + 1, s, Some(128)).map_err(map_corr)?;
                let oracle = bruteforce_correlator(
                    n,
                    s,
                    &[
                        (i, SpinOperator::new(SpinOperatorKind::Sz, s)),
                        (i + 1, SpinOperator::new(SpinOperatorKind::Sz, s)),
                    ],
                )
                .map_err(map_corr)?;
                corr_ok &= (rep.value - oracle.re).abs() < 1e-12;
            }
        }
    }
    checks.push(("szsz_bruteforce", corr_ok));
    // frustration-freeness + symmetries
    let mut ham_ok = true;
    for (n, s) in [(max_n.min(6), 1u32), (4, 2)] {
        ham_ok &= hamiltonian::verify_frustration_free(n, s)
            .map_err(map_ham)?
            .pass;
        ham_ok &= verify_symmetries(n, s).map_err(map_ham)?.pass;
    }
    checks.push(("hamiltonian_checks", ham_ok));
    for (_, ok) in &checks {
        all_ok &= ok;
    }
    let report = json!({
        "max_n": max_n,
        "checks": checks
            .iter()
            .map(|(name, ok)| json!({"name": name, "pass": ok}))
            .collect::<Vec<_>>(),
        "pass": all_ok,
    });
    emit(settings, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn cmd_verify_ssb(settings: &Settings, n: &str) -> Result<(), CliError> {
    let ns = parse_usize_list(n)?;
    let grid = default_field_grid(4);
    let mut entries = Vec::new();
    let mut slopes = Vec::new();
    let mut ok = true;
    for &n in &ns {
        let curve = ssb_sweep(n, &grid, 1).map_err(map_ham)?;
        let lookup: std::collections::HashMap<u64, f64> =
            curve.iter().map(|(h, m)| (h.to_bits(), *m)).collect();
        let mut odd = true;
        for (h, m) in &curve {
            if *h > 0.0 {
                odd &= (m + lookup[&(-h).to_bits()]).abs() < 1e-8;
            }
        }
        let h_min = grid.iter().cloned().filter(|h| *h > 0.0).fold(f64::INFINITY, f64::min);
        let slope = (lookup[&h_min.to_bits()] / h_min).abs();
        slopes.push(slope);
        ok &= odd;
        entries.push(json!({
            "n": n,
            "odd": odd,
            "slope_at_zero": slope,
            "curve": curve.iter().map(|(h, m)| json!([h, m])).collect::<Vec<_>>(),
        }));
    }
    let monotone = slopes.windows(2).all(|w| w[1] > w[0]);
    ok &= monotone;
    let report = json!({
        "sizes": entries,
        "slope_monotone_in_n": monotone,
        "pass": ok,
    });
    emit(settings, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn cmd_verify_symmetries(settings: &Settings, n: usize, s: u32) -> Result<(), CliError> {
    let rep = verify_symmetries(n, s).map_err(map_ham)?;
    let report = json!({
        "n": n, "s": s,
        "max_charge_commutator": rep.max_charge_commutator,
        "max_rf_deviation": rep.max_rf_deviation,
        "max_color_perm_deviation": rep.max_color_perm_deviation,
        "max_semidirect_deviation": rep.max_semidirect_deviation,
        "reality_ok": rep.reality_ok,
        "pass": rep.pass,
    });
    emit(settings, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    if rep.pass {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn cmd_verify_ff(settings: &Settings, n: usize, s: u32) -> Result<(), CliError> {
    let rep = hamiltonian::verify_frustration_free(n, s).map_err(map_ham)?;
    let report = json!({
        "n": n, "s": s,
        "max_residual": rep.max_residual,
        "terms": rep
            .residuals
            .iter()
            .map(|(kind, r)| json!({"term": format!("{kind:?}"), "residual": r}))
            .collect::<Vec<_>>(),
        "pass": rep.pass,
    });
    emit(settings, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    if rep.pass {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn json_field_to_csv(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_rows(
    settings: &Settings,
    csv_header: &str,
    rows: &[serde_json::Value],
    columns: &[&str],
) -> Result<(), CliError> {
    match settings.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(csv_header);
            out.push('\n');
            for row in rows {
                let line: Vec<String> = columns
                    .iter()
                    .map(|c| json_field_to_csv(&row[*c]))
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            emit(settings, &out)
        }
        OutputFormat::Json => emit(
            settings,
            &format!("{}\n", serde_json::to_string_pretty(&json!(rows)).unwrap()),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_usize_list("10:50:10").unwrap(), vec![10, 20, 30, 40, 50]);
        assert_eq!(parse_usize_list("5,1,5").unwrap(), vec![1, 5]);
        assert_eq!(
            parse_usize_list("2,10:12:1").unwrap(),
            vec![2, 10, 11, 12]
        );
        assert!(parse_usize_list("3:1:1").is_err());
        assert!(parse_usize_list("a").is_err());
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, (i as f64).powf(-1.5))).collect();
        assert!((loglog_slope(&pts) + 1.5).abs() < 1e-12);
    }
}

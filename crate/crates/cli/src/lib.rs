//! Command-line front end for `stepwave`.
//!
//! Exit codes: 0 success, 1 a verification criterion failed, 2 the scaling
//! mask cannot be completed (zero row, dependent rows, bad normalization),
//! 3 usage, parse or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use stepwave::formats::{fmt_f64, KeyValueReport};
use stepwave::galois_field::{is_prime, GaloisField};
use stepwave::mra_masks::{
    check_mask_family_orthogonality, check_scaling_orthonormality, coefficients_from_mask, random_admissible_mask,
    synthesize_refinable, uses_fallback_pivot, RowStyle,
};
use stepwave::wavelet_builder::{
    masks_from_matrices, seed_matrix, synthesize_wavelets, unitarize_with, vandermonde_kron_check,
    verify_wavelet_system, DEFAULT_KRON_CAP,
};
use stepwave::{Error, Mask, WaveletSystem, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID_MASK: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Complete a scaling mask, synthesize the wavelets and write them out.
    Gen,
    /// Check both mask criteria and the shifted inner products.
    Verify,
    /// Write the refinement coefficients of a scaling mask.
    Coeffs,
    /// Run `gen` on a random admissible mask drawn from `--seed`.
    Demo,
    /// Check the DFT/Kronecker structure of the criterion's linear system.
    Vandermonde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Haar,
}

#[derive(Debug, Parser)]
#[command(name = "stepwave", version, about = "Orthogonal step wavelets on local fields of positive characteristic")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Characteristic (prime). Defaults to 2, or to the mask file header.
    #[arg(long = "p")]
    pub p: Option<u32>,
    /// Extension degree. Defaults to 1, or to the mask file header.
    #[arg(long = "s")]
    pub s: Option<usize>,
    /// Mask depth N. Defaults to 1, or to the mask file header.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Frequency level M of the scaling function (default N + 1).
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Mask file; repeat with all p^s masks to verify a complete family.
    #[arg(long = "mask")]
    pub mask: Vec<PathBuf>,
    #[arg(long = "builtin", value_enum)]
    pub builtin: Option<Builtin>,
    /// Depth of the shift set H_0^(k) used for verification (default N + 2).
    #[arg(long = "shift-depth")]
    pub shift_depth: Option<usize>,
    #[arg(long = "tolerance", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long = "out", default_value = "out")]
    pub out: PathBuf,
    /// Seed for `demo`.
    #[arg(long = "seed")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaskSource {
    Builtin(Builtin),
    Files(Vec<PathBuf>),
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub p: u32,
    pub s: usize,
    pub n: usize,
    pub m: Option<usize>,
    pub source: Option<MaskSource>,
    pub shift_depth: Option<usize>,
    pub tolerance: f64,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidMask { .. }
            | Error::DependentRows { .. }
            | Error::Precondition(_)
            | Error::Normalization { .. } => EXIT_INVALID_MASK,
            _ => EXIT_IO,
        };
        Self { code, message: e.to_string() }
    }
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let p = args.p.unwrap_or(2);
        let s = args.s.unwrap_or(1);
        let n = args.n.unwrap_or(1);
        if !is_prime(p) {
            return Err(CliError::usage(format!("--p {p} is not prime")));
        }
        if s == 0 {
            return Err(CliError::usage("--s must be at least 1"));
        }
        if args.tolerance.is_nan() || args.tolerance <= 0.0 {
            return Err(CliError::usage("--tolerance must be positive"));
        }
        let source = match (args.builtin, args.mask.is_empty()) {
            (Some(b), true) => Some(MaskSource::Builtin(b)),
            (None, false) => Some(MaskSource::Files(args.mask)),
            (Some(_), false) => return Err(CliError::usage("give either --mask or --builtin, not both")),
            (None, true) => None,
        };
        let needs_mask = matches!(args.command, Command::Gen | Command::Verify | Command::Coeffs);
        if needs_mask && source.is_none() {
            return Err(CliError::usage("this command needs --mask or --builtin"));
        }
        if args.command == Command::Demo && args.seed.is_none() {
            return Err(CliError::usage("demo needs an explicit --seed"));
        }
        Ok(Self {
            command: args.command,
            p,
            s,
            n,
            m: args.m,
            source,
            shift_depth: args.shift_depth,
            tolerance: args.tolerance,
            out_dir: args.out,
            seed: args.seed,
        })
    }

    fn explicit_shape_matches(&self, mask: &Mask, explicit: (bool, bool, bool)) -> Result<(), CliError> {
        let gf = mask.gf();
        let clash =
            (explicit.0 && gf.p() != self.p) || (explicit.1 && gf.s() != self.s) || (explicit.2 && mask.n() != self.n);
        if clash {
            return Err(CliError {
                code: EXIT_IO,
                message: format!(
                    "mask file is for p={} s={} N={}, flags say p={} s={} N={}",
                    gf.p(),
                    gf.s(),
                    mask.n(),
                    self.p,
                    self.s,
                    self.n
                ),
            });
        }
        Ok(())
    }
}

/// Result of one command: the exit code, the report and the files written.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: KeyValueReport,
    pub files: Vec<PathBuf>,
}

/// Parses arguments, runs the command, prints the report and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let explicit = (args.p.is_some(), args.s.is_some(), args.n.is_some());
    let outcome = RunConfig::from_args(args).and_then(|c| execute_with(&c, explicit));
    match outcome {
        Ok(o) => {
            print!("{}", o.report.to_text());
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    execute_with(config, (false, false, false))
}

fn execute_with(config: &RunConfig, explicit: (bool, bool, bool)) -> Result<Outcome, CliError> {
    match config.command {
        Command::Gen => cmd_gen_with(config, explicit),
        Command::Verify => cmd_verify_with(config, explicit),
        Command::Coeffs => cmd_coeffs_with(config, explicit),
        Command::Demo => cmd_demo(config),
        Command::Vandermonde => cmd_vandermonde(config),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

fn parse_mask_file(path: &Path, gf: Option<Arc<GaloisField>>) -> Result<Mask, CliError> {
    let text = read_file(path)?;
    Mask::parse(&text, gf).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Loads the scaling mask and, when a whole family was given, the other masks.
fn load_masks(config: &RunConfig, explicit: (bool, bool, bool)) -> Result<Vec<Mask>, CliError> {
    match config.source.as_ref().expect("validated") {
        MaskSource::Builtin(Builtin::Haar) => {
            let gf = Arc::new(GaloisField::with_default_poly(config.p, config.s)?);
            Ok(vec![Mask::haar(gf, config.n)])
        }
        MaskSource::Files(paths) => {
            let first = parse_mask_file(&paths[0], None)?;
            config.explicit_shape_matches(&first, explicit)?;
            let mut masks = vec![first];
            for path in &paths[1..] {
                let m = parse_mask_file(path, Some(masks[0].gf().clone()))?;
                if m.n() != masks[0].n() {
                    return Err(CliError::usage(format!("{}: depth N differs from the first mask", path.display())));
                }
                masks.push(m);
            }
            let q = masks[0].gf().order();
            if masks.len() != 1 && masks.len() != q {
                return Err(CliError::usage(format!("give 1 mask or all {q} masks of a family, got {}", masks.len())));
            }
            Ok(masks)
        }
    }
}

struct Pipeline {
    system: WaveletSystem,
    report: KeyValueReport,
    passed: bool,
}

/// Completes (if needed), synthesizes and verifies. `row0_tolerance` bounds
/// how far row 0 of a completion matrix may be from unit norm.
fn run_pipeline(config: &RunConfig, masks: Vec<Mask>, row0_tolerance: f64) -> Result<Pipeline, CliError> {
    let m0 = masks[0].clone();
    let n = m0.n();
    let m_level = config.m.unwrap_or(n + 1);
    let depth = config.shift_depth.unwrap_or(n + 2);
    let tol = config.tolerance;

    let phi_hat = synthesize_refinable(&m0, m_level)?;
    let scaling = check_scaling_orthonormality(&phi_hat)?;

    let mut report = KeyValueReport::default();
    report.push("p", m0.gf().p());
    report.push("s", m0.gf().s());
    report.push("N", n);
    report.push("M", m_level);

    let family = if masks.len() == 1 {
        let matrices = (0..m0.prefix_count())
            .map(|prefix| unitarize_with(&seed_matrix(&m0, prefix)?, row0_tolerance))
            .collect::<Result<Vec<_>, _>>()?;
        let worst = matrices.iter().map(|m| m.unitarity_deviation()).fold(0.0, f64::max);
        report.push("matrix_unitarity_max", fmt_f64(worst));
        report.push(
            "fallback_prefixes",
            (0..m0.prefix_count()).filter(|&p| m0.row(p)[0].norm() <= stepwave::wavelet_builder::ZERO_EPS).count(),
        );
        masks_from_matrices(&m0, &matrices)?
    } else {
        masks
    };
    let family_report = check_mask_family_orthogonality(&family)?;
    let system = synthesize_wavelets(&family, &phi_hat)?;
    let verify = verify_wavelet_system(&system, depth)?;

    report.push("scaling_max_deviation", fmt_f64(scaling.max_deviation));
    report.push("family_max_deviation", fmt_f64(family_report.max_deviation));
    for (k, v) in verify.to_kv(tol).entries {
        if k != "passed" && k != "tolerance" {
            report.entries.push((k, v));
        }
    }
    let passed = scaling.passed(tol) && family_report.passed(tol) && verify.passed(tol);
    report.push("tolerance", fmt_f64(tol));
    report.push("passed", passed);
    Ok(Pipeline { system, report, passed })
}

fn write_system(dir: &Path, ws: &WaveletSystem, report: &KeyValueReport) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for (l, mask) in ws.masks.iter().enumerate() {
        write_file(dir, &format!("m{l}.mask"), &mask.to_text(), &mut files)?;
    }
    write_file(dir, "phi.csv", &ws.phi.to_csv(), &mut files)?;
    write_file(dir, "phi_hat.csv", &ws.phi_hat.to_csv(), &mut files)?;
    for (i, psi) in ws.wavelets.iter().enumerate() {
        write_file(dir, &format!("psi{}.csv", i + 1), &psi.to_csv(), &mut files)?;
    }
    write_file(dir, "report.txt", &report.to_text(), &mut files)?;
    Ok(files)
}

pub fn cmd_gen(config: &RunConfig) -> Result<Outcome, CliError> {
    cmd_gen_with(config, (false, false, false))
}

fn cmd_gen_with(config: &RunConfig, explicit: (bool, bool, bool)) -> Result<Outcome, CliError> {
    let masks = load_masks(config, explicit)?;
    let pipeline = run_pipeline(config, masks, config.tolerance.min(DEFAULT_TOLERANCE))?;
    let files = write_system(&config.out_dir, &pipeline.system, &pipeline.report)?;
    Ok(Outcome { exit_code: EXIT_OK, report: pipeline.report, files })
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    cmd_verify_with(config, (false, false, false))
}

fn cmd_verify_with(config: &RunConfig, explicit: (bool, bool, bool)) -> Result<Outcome, CliError> {
    let masks = load_masks(config, explicit)?;
    // a mask that is not normalized row by row is reported, not rejected
    let pipeline = run_pipeline(config, masks, f64::INFINITY)?;
    let mut files = Vec::new();
    write_file(&config.out_dir, "report.txt", &pipeline.report.to_text(), &mut files)?;
    let exit_code = if pipeline.passed { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { exit_code, report: pipeline.report, files })
}

pub fn cmd_coeffs(config: &RunConfig) -> Result<Outcome, CliError> {
    cmd_coeffs_with(config, (false, false, false))
}

fn cmd_coeffs_with(config: &RunConfig, explicit: (bool, bool, bool)) -> Result<Outcome, CliError> {
    let masks = load_masks(config, explicit)?;
    let beta = coefficients_from_mask(&masks[0])?;
    let mut files = Vec::new();
    write_file(&config.out_dir, "beta.csv", &beta.to_csv(), &mut files)?;
    let mut report = KeyValueReport::default();
    report.push("p", beta.gf().p());
    report.push("s", beta.gf().s());
    report.push("N", beta.n());
    report.push("coefficient_count", beta.values().len());
    report.push("file", files[0].display());
    Ok(Outcome { exit_code: EXIT_OK, report, files })
}

/// Candidates drawn before `demo` gives up looking for one whose scaling
/// function has orthonormal shifts.
const DEMO_ATTEMPTS: usize = 200;

pub fn cmd_demo(config: &RunConfig) -> Result<Outcome, CliError> {
    let seed = config.seed.ok_or_else(|| CliError::usage("demo needs an explicit --seed"))?;
    let gf = Arc::new(GaloisField::with_default_poly(config.p, config.s)?);
    let m_level = config.m.unwrap_or(config.n + 1);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut chosen = None;
    let mut attempts = 0;
    while attempts < DEMO_ATTEMPTS {
        attempts += 1;
        let style = if attempts % 2 == 0 { RowStyle::Dense } else { RowStyle::Sparse };
        let mask = random_admissible_mask(gf.clone(), config.n, style, &mut rng);
        let phi_hat = synthesize_refinable(&mask, m_level)?;
        let ok = check_scaling_orthonormality(&phi_hat)?.passed(config.tolerance);
        chosen = Some(mask);
        if ok {
            break;
        }
    }
    let mask = chosen.expect("at least one attempt");
    let mut files = Vec::new();
    write_file(&config.out_dir, "demo.mask", &mask.to_text(), &mut files)?;
    let fallback = uses_fallback_pivot(&mask);
    let pipeline = run_pipeline(config, vec![mask], config.tolerance.min(DEFAULT_TOLERANCE))?;
    let mut report = pipeline.report;
    report.push("seed", seed);
    report.push("attempts", attempts);
    report.push("uses_fallback_pivot", fallback);
    files.extend(write_system(&config.out_dir, &pipeline.system, &report)?);
    let exit_code = if pipeline.passed { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { exit_code, report, files })
}

pub fn cmd_vandermonde(config: &RunConfig) -> Result<Outcome, CliError> {
    let r = vandermonde_kron_check(config.p, config.s, config.n, DEFAULT_KRON_CAP)?;
    let passed = r.nonsingular()
        && r.dft_unitary_deviation <= 1e-12
        && r.kron_unitary_deviation <= 1e-12
        && r.relative_det_error <= 1e-9;
    let mut report = r.to_kv();
    report.push("passed", passed);
    let mut files = Vec::new();
    write_file(&config.out_dir, "vandermonde.txt", &report.to_text(), &mut files)?;
    Ok(Outcome { exit_code: if passed { EXIT_OK } else { EXIT_FAILED }, report, files })
}

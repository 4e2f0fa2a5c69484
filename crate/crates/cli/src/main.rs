use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eulerforge_core::catalog::{export_latex, Catalog};
use eulerforge_core::corpus::{
    apply_combination, parse_combination_specs, regression_check, Allowlist, Corpus,
};
use eulerforge_core::engine::{extract_identities, Identity};
use eulerforge_core::harmonic::hpoly_pretty;
use eulerforge_core::theorem::{TheoremDescriptor, TheoremName};
use eulerforge_core::verify::{verify_catalog, ReportRecord, Verdict, VerifyConfig};
use eulerforge_core::zeta::render;

#[derive(Parser)]
#[command(
    name = "eulerforge",
    version,
    about = "Generate, verify and export Euler-sum identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Gauss,
    Watson,
    Bailey,
    Wang,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Latex,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Extract every coefficient identity of one or all theorems
    Generate {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        degree: u32,
        /// Catalog file to write; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a catalog numerically
    Verify {
        catalog: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_terms: Option<u64>,
        #[arg(long, env = "EULERFORGE_PRECISION_BITS", default_value_t = 192)]
        prec_bits: u32,
        /// Asymptotic tail order for central-binomial sums
        #[arg(long, default_value_t = 2)]
        tail_order: u32,
        /// Report file (JSON array)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write verification statuses back into the catalog
        #[arg(long)]
        update: bool,
        /// Do not cross-check against the shipped discrepancy allowlist
        #[arg(long)]
        no_allowlist: bool,
    },
    /// Append linear combinations of catalog identities
    Combine {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// Output catalog; overwrites the input if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a catalog as LaTeX or JSON
    Export {
        catalog: PathBuf,
        #[arg(long, value_enum, default_value = "latex")]
        format: Format,
        /// Write even zeta values as powers of pi
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        pi_form: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Work with the built-in corpus of printed identities
    Corpus {
        /// Write the printed identities as a catalog
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare the printed identities with a fresh extraction
        #[arg(long)]
        check: bool,
    },
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<eulerforge_core::Error> for Failure {
    fn from(e: eulerforge_core::Error) -> Failure {
        Failure::usage(e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate {
            theorem,
            degree,
            out,
        } => generate(theorem, degree, out.as_deref()),
        Command::Verify {
            catalog,
            tol,
            max_terms,
            prec_bits,
            tail_order,
            out,
            update,
            no_allowlist,
        } => {
            let cfg = VerifyConfig {
                precision_bits: prec_bits,
                max_terms,
                tolerance: tol,
                tail_order,
            };
            verify(&catalog, &cfg, out.as_deref(), update, !no_allowlist)
        }
        Command::Combine { spec, catalog, out } => combine(&spec, &catalog, out.as_deref()),
        Command::Export {
            catalog,
            format,
            pi_form,
            out,
        } => export(&catalog, format, pi_form, out.as_deref()),
        Command::Corpus { out, check } => corpus(out.as_deref(), check),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_catalog(path: &Path) -> Result<Catalog, Failure> {
    Ok(Catalog::from_json(&read(path)?)?)
}

/// Summary goes to stdout unless stdout carries the catalog itself.
fn say(to_stderr: bool, line: &str) {
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn summary_table(ids: &[Identity], to_stderr: bool) {
    let width = ids.iter().map(|i| i.id.len()).max().unwrap_or(2).max(2);
    say(
        to_stderr,
        &format!("{:<width$}  weight  i  lhs  =  rhs", "id"),
    );
    for id in ids {
        say(
            to_stderr,
            &format!(
                "{:<width$}  {:<6}  {}  {}  =  {}",
                id.id,
                format!("{:?}", id.lhs.weight),
                id.lhs.denom_exponent,
                hpoly_pretty(&id.lhs.poly),
                render(&id.rhs, true)
            ),
        );
    }
}

fn generate(theorem: TheoremArg, degree: u32, out: Option<&Path>) -> CmdResult {
    let names: Vec<TheoremName> = match theorem {
        TheoremArg::Gauss => vec![TheoremName::Gauss],
        TheoremArg::Watson => vec![TheoremName::Watson],
        TheoremArg::Bailey => vec![TheoremName::Bailey],
        TheoremArg::Wang => vec![TheoremName::Wang],
        TheoremArg::All => TheoremName::ALL.to_vec(),
    };
    let mut ids = Vec::new();
    for name in names {
        ids.extend(extract_identities(&TheoremDescriptor::get(name), degree)?);
    }
    let catalog = Catalog::new(ids)?;
    write(out, &catalog.to_json())?;
    summary_table(&catalog.identities, out.is_none());
    say(
        out.is_none(),
        &format!("{} identities", catalog.identities.len()),
    );
    Ok(0)
}

fn verify(
    path: &Path,
    cfg: &VerifyConfig,
    out: Option<&Path>,
    update: bool,
    use_allowlist: bool,
) -> CmdResult {
    let mut catalog = load_catalog(path)?;
    let known = if use_allowlist {
        Allowlist::builtin().discrepancies(&Corpus::builtin())?
    } else {
        Vec::new()
    };
    let result = verify_catalog(&catalog.identities, cfg, &known);
    for r in &result.reports {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.id);
        } else if r.verdict != Verdict::Pass {
            let diff = r
                .abs_diff
                .as_ref()
                .map_or("n/a".into(), |d| d.to_decimal(12));
            println!("{:?} {} diff {diff}", r.verdict, r.id);
        }
    }
    println!(
        "pass {} fail {} indeterminate {}",
        result.count(Verdict::Pass),
        result.count(Verdict::Fail),
        result.count(Verdict::Indeterminate)
    );
    for d in &result.discrepancies {
        println!("discrepancy {}", d.message());
    }

    let mut records: Vec<ReportRecord> = result.reports.iter().map(|r| r.record()).collect();
    for d in &result.discrepancies {
        records.push(d.printed.record());
        records.push(d.derived.record());
    }
    if let Some(p) = out {
        let text = serde_json::to_string_pretty(&records).expect("reports serialize") + "\n";
        write(Some(p), &text)?;
    }
    if update {
        for (id, r) in catalog.identities.iter_mut().zip(&result.reports) {
            id.status = r.status(cfg.precision_bits);
        }
        catalog.reports = Some(result.reports.iter().map(|r| r.record()).collect());
        write(Some(path), &catalog.to_json())?;
    }
    Ok(if result.unexpected_failures > 0 { 1 } else { 0 })
}

fn combine(spec: &Path, path: &Path, out: Option<&Path>) -> CmdResult {
    let specs = parse_combination_specs(&read(spec)?)?;
    let mut catalog = load_catalog(path)?;
    for s in &specs {
        let id = apply_combination(s, &catalog.identities)?;
        println!("{}  =  {}", id.id, render(&id.rhs, true));
        catalog.push(id)?;
    }
    write(Some(out.unwrap_or(path)), &catalog.to_json())?;
    Ok(0)
}

fn export(path: &Path, format: Format, pi_form: bool, out: Option<&Path>) -> CmdResult {
    let catalog = load_catalog(path)?;
    let text = match format {
        Format::Latex => export_latex(&catalog.identities, pi_form),
        Format::Json => catalog.to_json(),
    };
    write(out, &text)?;
    Ok(0)
}

fn corpus(out: Option<&Path>, check: bool) -> CmdResult {
    if out.is_none() && !check {
        return Err(Failure::usage("corpus needs --out and/or --check"));
    }
    let corpus = Corpus::builtin();
    if let Some(p) = out {
        let catalog = Catalog::new(corpus.identities()?)?;
        write(Some(p), &catalog.to_json())?;
        println!("{} printed identities written", catalog.identities.len());
    }
    if !check {
        return Ok(0);
    }
    let report = regression_check(&corpus, &Allowlist::builtin())?;
    for (key, why) in report.mismatches() {
        println!("mismatch {key}: {why}");
    }
    println!(
        "{} entries: {} match, {} allowlisted, {} mismatched",
        report.outcomes.len(),
        report.count(&eulerforge_core::corpus::RegressionOutcome::Match),
        report.count(&eulerforge_core::corpus::RegressionOutcome::Allowlisted),
        report.mismatches().len()
    );
    Ok(if report.is_clean() { 0 } else { 1 })
}

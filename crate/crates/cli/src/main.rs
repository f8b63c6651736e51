//! Command-line surface over the theta-orbits library.
//!
//! Exit codes: 0 success, 1 verification failure or computation error,
//! 2 usage error (bad flags, unknown names, unparsable input).

mod cache;
mod names;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use theta_orbits::applications::{
    verify_class_number_identities, verify_derivative_formulas, verify_special_values,
    verify_wp_products, SectionReport,
};
use theta_orbits::expr::{evaluate_str, infer_meta, parse};
use theta_orbits::rational::{int, parse_rat};
use theta_orbits::relations::registry::{find, registry, verify_record, VerificationReport};
use theta_orbits::relations::search::{search_relations, SearchBounds};
use theta_orbits::spaces::{decompose, holomorphic_basis, weak_basis, weak_monomials, SpaceBasis};
use theta_orbits::{Error, FormMeta, Rat};

use cache::{Cache, CacheKey};

#[derive(Parser)]
#[command(
    name = "theta-orbits",
    version,
    about = "Exact Fourier-Jacobi expansions and theta relations"
)]
struct Cli {
    /// q-precision ("p/q" allowed); each command has its own default.
    #[arg(long, global = true, value_parser = parse_rational)]
    prec: Option<Rat>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel verification.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the expansion of a named function or expression.
    Expand {
        name: String,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        /// Bypass the expansion cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Verify registered identities and the application checks.
    Verify {
        /// Identity id or alias; repeatable.
        #[arg(long = "id")]
        ids: Vec<String>,
        /// Every registered identity and every application check.
        #[arg(long)]
        all: bool,
        /// 4: the identity registry; 5: the application checks.
        #[arg(long, value_parser = clap::value_parser!(u8).range(4..=5))]
        section: Option<u8>,
        /// Torsion order of the ℘-product check (odd, at least 3).
        #[arg(long = "wp-N", alias = "wp-n", default_value_t = 3)]
        wp_n: u32,
        /// Largest n for the class-number identities.
        #[arg(long, default_value_t = 50)]
        nmax: u64,
    },
    /// Expand a form in the basis of its space.
    Decompose {
        /// Identity id, trN_a_b_c_d, or expression with a known meta.
        #[arg(long)]
        target: String,
        /// Use the holomorphic subspace instead of the weak space.
        #[arg(long)]
        holomorphic: bool,
    },
    /// Scan Tr parameters for relations.
    Search {
        #[arg(long = "N", alias = "n")]
        n: u32,
        #[arg(long, value_parser = parse_rational)]
        max_weight: Rat,
        #[arg(long, value_parser = parse_rational, default_value = "4")]
        max_index: Rat,
        #[arg(long)]
        near_admissible: bool,
    },
    /// Dimension and basis of a space of Jacobi forms.
    Spaces {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        weight: Rat,
        #[arg(long, value_parser = parse_rational)]
        index: Rat,
        /// Power D of the eta multiplier.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        eta: i64,
        /// Heisenberg parity; defaults to 2·index mod 2.
        #[arg(long)]
        parity: Option<i64>,
        #[arg(long)]
        holomorphic: bool,
    },
    /// Manage the expansion cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    Clear,
    Stats,
}

fn parse_rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

/// Failures with their exit code.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownIdentity(_) | Error::Parse(_) | Error::BadParameter(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("JSON values serialize")
            );
        } else {
            print!("{}", text());
        }
    }
}

fn meta_json(m: &FormMeta) -> Value {
    json!({
        "weight": m.weight.to_string(),
        "index": m.index.to_string(),
        "eta_power": m.eta_power,
        "heis_parity": m.heis_parity,
        "quasi": m.quasi,
    })
}

fn cmd_expand(
    out: &Output,
    name: &str,
    prec: Option<Rat>,
    format: Format,
    no_cache: bool,
) -> Outcome {
    let expr = names::resolve(name)?;
    let prec = prec.unwrap_or(int(2));
    let meta = infer_meta(&parse(&expr)?)?;
    let cache = Cache::from_env();
    let key = CacheKey::new(&expr, "", prec);
    let cached = if no_cache { None } else { cache.get(&key) };
    let series = match cached {
        Some(s) => s,
        None => {
            let (s, _) = evaluate_str(&expr, prec)?;
            if !no_cache {
                // A cache that cannot be written is not an error.
                let _ = cache.put(&key, &s);
            }
            s
        }
    };
    let json_out = Output {
        json: out.json || format == Format::Json,
    };
    json_out.emit(
        json!({
            "name": name,
            "expression": expr,
            "prec": prec.to_string(),
            "meta": meta.known().as_ref().map(meta_json),
            "series": series.to_json(),
        }),
        || format!("{}\n", series.pretty()),
    );
    Ok(true)
}

fn section_json(s: &SectionReport) -> Value {
    json!({
        "title": s.title,
        "status": if s.passed() { "PASS" } else { "FAIL" },
        "checks": s.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    })
}

fn report_text(r: &VerificationReport) -> String {
    let mut line = r.to_string();
    if let (Some(reading), true) = (r.reading, r.passed()) {
        if !line.contains(&format!("[{reading}]")) {
            line.push_str(&format!("  [{reading}]"));
        }
    }
    if let Some(note) = r.note {
        line.push_str(&format!("\n      note: {note}"));
    }
    line
}

fn application_reports(
    prec: Option<Rat>,
    wp_n: u32,
    nmax: u64,
) -> Result<Vec<SectionReport>, Failure> {
    if wp_n < 3 || wp_n.is_multiple_of(2) {
        return Err(Failure::Usage(format!(
            "--wp-N must be odd and at least 3, got {wp_n}"
        )));
    }
    let at = |default: i64| prec.unwrap_or(int(default));
    Ok(vec![
        verify_wp_products(wp_n, at(3))?,
        verify_derivative_formulas(at(10)),
        verify_special_values(at(8)),
        verify_class_number_identities(at(8), nmax),
    ])
}

fn cmd_verify(
    out: &Output,
    prec: Option<Rat>,
    ids: &[String],
    all: bool,
    section: Option<u8>,
    wp_n: u32,
    nmax: u64,
) -> Outcome {
    if ids.is_empty() && !all && section.is_none() {
        return Err(Failure::Usage(
            "verify needs --id, --all or --section".into(),
        ));
    }
    let mut records = Vec::new();
    for id in ids {
        records.push(find(id)?);
    }
    if all || section == Some(4) {
        records.extend(registry());
    }
    let identities: Vec<VerificationReport> =
        records.par_iter().map(|r| verify_record(r, prec)).collect();
    let sections = if all || section == Some(5) {
        application_reports(prec, wp_n, nmax)?
    } else {
        Vec::new()
    };
    let passed = identities.iter().all(VerificationReport::passed)
        && sections.iter().all(SectionReport::passed);
    out.emit(
        json!({
            "status": if passed { "PASS" } else { "FAIL" },
            "identities": identities.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "applications": sections.iter().map(section_json).collect::<Vec<_>>(),
        }),
        || {
            let mut text = String::new();
            for r in &identities {
                text.push_str(&report_text(r));
                text.push('\n');
            }
            for s in &sections {
                text.push_str(&s.to_string());
            }
            let failed = identities.iter().filter(|r| !r.passed()).count()
                + sections
                    .iter()
                    .flat_map(|s| &s.checks)
                    .filter(|c| !c.passed())
                    .count();
            let total = identities.len() + sections.iter().map(|s| s.checks.len()).sum::<usize>();
            text.push_str(&format!("{} of {total} passed\n", total - failed));
            text
        },
    );
    Ok(passed)
}

/// The expression named by a decomposition target.
fn target_expression(target: &str) -> Result<String, Failure> {
    if let Some(expr) = names::trace_id(target) {
        return Ok(expr);
    }
    match find(target) {
        Ok(record) => Ok(record.readings[0].sides[0].to_string()),
        Err(_) => names::resolve(target).map_err(Failure::from),
    }
}

fn basis_json(basis: &SpaceBasis) -> Vec<Value> {
    basis
        .elements
        .iter()
        .map(|e| {
            json!({
                "label": e.label(),
                "combination": e.combination.iter().map(|(c, m)| json!({"coefficient": c.to_string(), "monomial": m.to_string()})).collect::<Vec<_>>(),
                "series": e.series.to_json(),
            })
        })
        .collect()
}

fn cmd_decompose(out: &Output, prec: Option<Rat>, target: &str, holomorphic: bool) -> Outcome {
    let expr = target_expression(target)?;
    let meta = infer_meta(&parse(&expr)?)?
        .known()
        .ok_or_else(|| Failure::Usage(format!("'{expr}' has no known transformation law")))?;
    let prec = prec.unwrap_or(meta.index + int(4));
    let basis = if holomorphic {
        holomorphic_basis(&meta, prec)?
    } else {
        weak_basis(&meta, prec)?
    };
    let (value, _) = evaluate_str(&expr, prec)?;
    let coeffs = decompose(&value, &basis)?;
    let terms: Vec<(String, String)> = basis
        .elements
        .iter()
        .zip(&coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e.label(), c.to_string()))
        .collect();
    out.emit(
        json!({
            "target": target,
            "expression": expr,
            "meta": meta_json(&meta),
            "prec": prec.to_string(),
            "dimension": basis.dimension(),
            "coefficients": terms.iter().map(|(l, c)| json!({"basis": l, "coefficient": c})).collect::<Vec<_>>(),
        }),
        || {
            let mut text = format!("{expr}  [{meta}]\n");
            if terms.is_empty() {
                text.push_str("= 0\n");
            }
            for (label, c) in &terms {
                text.push_str(&format!("  ({c}) · {label}\n"));
            }
            text
        },
    );
    Ok(true)
}

fn cmd_search(out: &Output, prec: Option<Rat>, bounds: SearchBounds) -> Outcome {
    if bounds.n < 2 {
        return Err(Failure::Usage("--N must be at least 2".into()));
    }
    let findings = search_relations(&bounds, prec.unwrap_or(int(3)));
    out.emit(
        json!({
            "N": bounds.n,
            "max_weight": bounds.max_weight.to_string(),
            "max_index": bounds.max_index.to_string(),
            "findings": findings.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        }),
        || {
            let mut text = String::new();
            for f in &findings {
                text.push_str(&format!("{f}\n"));
            }
            let zeros = findings.iter().filter(|f| f.is_zero()).count();
            text.push_str(&format!("{zeros} zero of {} scanned\n", findings.len()));
            text
        },
    );
    Ok(true)
}

fn cmd_spaces(out: &Output, prec: Option<Rat>, meta: FormMeta, holomorphic: bool) -> Outcome {
    if !meta.is_consistent() {
        return Err(Failure::Usage(format!("inconsistent space: {meta}")));
    }
    let prec = prec.unwrap_or(meta.index + int(4));
    let monomials = weak_monomials(&meta)?;
    let basis = if holomorphic {
        holomorphic_basis(&meta, prec)?
    } else {
        weak_basis(&meta, prec)?
    };
    out.emit(
        json!({
            "meta": meta_json(&meta),
            "kind": if holomorphic { "holomorphic" } else { "weak" },
            "prec": prec.to_string(),
            "dimension": basis.dimension(),
            "monomials": monomials.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "basis": basis_json(&basis),
        }),
        || {
            let mut text = format!(
                "{meta}  {}  dimension {}\n",
                if holomorphic { "holomorphic" } else { "weak" },
                basis.dimension()
            );
            for e in &basis.elements {
                text.push_str(&format!("  {}\n", e.label()));
            }
            text
        },
    );
    Ok(true)
}

fn cmd_cache(out: &Output, action: &CacheAction) -> Outcome {
    let cache = Cache::from_env();
    let dir = cache.dir().display().to_string();
    match action {
        CacheAction::Clear => {
            let removed = cache.clear().map_err(|e| Failure::Compute(e.to_string()))?;
            out.emit(json!({"dir": dir, "removed": removed}), || {
                format!("removed {removed} entries from {dir}\n")
            });
        }
        CacheAction::Stats => {
            let s = cache.stats().map_err(|e| Failure::Compute(e.to_string()))?;
            out.emit(
                json!({"dir": dir, "entries": s.entries, "bytes": s.bytes}),
                || format!("{dir}: {} entries, {} bytes\n", s.entries, s.bytes),
            );
        }
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    let out = Output { json: cli.json };
    let prec = cli.prec;
    match &cli.command {
        Command::Expand {
            name,
            format,
            no_cache,
        } => cmd_expand(&out, name, prec, *format, *no_cache),
        Command::Verify {
            ids,
            all,
            section,
            wp_n,
            nmax,
        } => cmd_verify(&out, prec, ids, *all, *section, *wp_n, *nmax),
        Command::Decompose {
            target,
            holomorphic,
        } => cmd_decompose(&out, prec, target, *holomorphic),
        Command::Search {
            n,
            max_weight,
            max_index,
            near_admissible,
        } => cmd_search(
            &out,
            prec,
            SearchBounds {
                n: *n,
                max_weight: *max_weight,
                max_index: *max_index,
                near_admissible: *near_admissible,
            },
        ),
        Command::Spaces {
            weight,
            index,
            eta,
            parity,
            holomorphic,
        } => {
            let parity = parity.unwrap_or_else(|| (*index * int(2)).to_integer().rem_euclid(2));
            cmd_spaces(
                &out,
                prec,
                FormMeta::new(*weight, *index, *eta, parity),
                *holomorphic,
            )
        }
        Command::Cache { action } => cmd_cache(&out, action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

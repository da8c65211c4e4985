//! Command implementations for the `bott` binary.
//!
//! Every command returns an [`Outcome`] instead of printing, so the same code
//! path is exercised by the binary and by tests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bott_core::census::{run_census, EnumerationConfig, Filter};
use bott_core::cohomring::build_ring;
use bott_core::isosearch::{relation_residues, search_iso, SearchMode};
use bott_core::triviality::{decompose, full_report};
use bott_core::{Polynomial, TowerSpec};
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bott",
    version,
    about = "Cohomology of generalized Bott towers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ring presentation, Chern classes and triviality diagnostics.
    Report {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// Emit the triviality report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Chern classes of the bundle at every stage.
    Chern {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Generators, relations and Poincaré ranks.
    Ring {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Search for a graded ring isomorphism from the first tower's ring to the second's.
    Iso {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = Coeff::Q)]
        coeff: Coeff,
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long)]
        sequential: bool,
    },
    /// Reorder a Q-trivial tower so its CP^1 stages come first.
    Decompose { file: PathBuf },
    /// Classify every tower with bounded data.
    Enumerate {
        #[arg(long)]
        height: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        bound: u32,
        #[arg(long = "filter", value_delimiter = ',')]
        filters: Vec<String>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    Q,
    Z,
}

/// What a command printed and how it should exit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn negative(stdout: String) -> Self {
        Outcome {
            code: EXIT_NEGATIVE,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(message: impl Into<String>) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: message.into() + "\n",
        }
    }
}

type CmdResult = std::result::Result<Outcome, Outcome>;

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Report { file, vars, json } => cmd_report(&file, vars, json),
        Command::Chern { file, vars } => cmd_chern(&file, vars),
        Command::Ring { file, vars } => cmd_ring(&file, vars),
        Command::Iso {
            source,
            target,
            coeff,
            bound,
            sequential,
        } => cmd_iso(&source, &target, coeff, bound, mode(sequential)),
        Command::Decompose { file } => cmd_decompose(&file),
        Command::Enumerate {
            height,
            dims,
            bound,
            filters,
            sequential,
        } => cmd_enumerate(height, dims, bound, &filters, mode(sequential)),
    };
    result.unwrap_or_else(|e| e)
}

fn mode(sequential: bool) -> SearchMode {
    if sequential {
        SearchMode::Sequential
    } else {
        SearchMode::Parallel
    }
}

pub fn load_tower(path: &Path) -> std::result::Result<TowerSpec, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::input_error(format!("{}: {e}", path.display())))?;
    TowerSpec::parse(&text).map_err(|e| Outcome::input_error(format!("{}: {e}", path.display())))
}

fn names_for(
    t: &TowerSpec,
    vars: Option<Vec<String>>,
) -> std::result::Result<Vec<String>, Outcome> {
    let h = t.height();
    match vars {
        None => Ok(Polynomial::default_names(h)),
        Some(v) if v.len() == h => {
            if v.iter()
                .any(|n| n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_'))
            {
                return Err(Outcome::input_error("variable names must be alphanumeric"));
            }
            Ok(v)
        }
        Some(v) => Err(Outcome::input_error(format!(
            "expected {h} variable names, got {}",
            v.len()
        ))),
    }
}

pub fn cmd_ring(file: &Path, vars: Option<Vec<String>>) -> CmdResult {
    let t = load_tower(file)?;
    let names = names_for(&t, vars)?;
    Ok(Outcome::ok(build_ring(&t).report(&names)))
}

fn chern_text(t: &TowerSpec, names: &[String]) -> String {
    let ring = build_ring(t);
    let mut out = String::new();
    for data in ring.chern_all() {
        let classes: Vec<String> = (1..=data.rank())
            .map(|k| format!("c{k} = {}", data.class(k).to_string_with(names)))
            .collect();
        if classes.is_empty() {
            let _ = writeln!(out, "stage {}: trivial bundle", data.stage);
        } else {
            let _ = writeln!(out, "stage {}: {}", data.stage, classes.join(", "));
        }
    }
    out
}

pub fn cmd_chern(file: &Path, vars: Option<Vec<String>>) -> CmdResult {
    let t = load_tower(file)?;
    let names = names_for(&t, vars)?;
    Ok(Outcome::ok(chern_text(&t, &names)))
}

pub fn cmd_report(file: &Path, vars: Option<Vec<String>>, json: bool) -> CmdResult {
    let t = load_tower(file)?;
    let names = names_for(&t, vars)?;
    let report = full_report(&t).map_err(|e| Outcome::input_error(e.to_string()))?;
    if json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        return Ok(Outcome::ok(text));
    }
    let mut out = build_ring(&t).report(&names);
    out.push_str(&chern_text(&t, &names));
    out.push_str(&report.to_text());
    Ok(Outcome::ok(out))
}

pub fn cmd_iso(
    source: &Path,
    target: &Path,
    coeff: Coeff,
    bound: u32,
    mode: SearchMode,
) -> CmdResult {
    let a = load_tower(source)?;
    let b = load_tower(target)?;
    let src = build_ring(&a);
    let tgt = build_ring(&b);
    let over_integers = coeff == Coeff::Z;
    let Some(m) = search_iso(&src, &tgt, over_integers, bound, mode) else {
        return Ok(Outcome::negative(format!("none within bound {bound}\n")));
    };
    let src_names = Polynomial::default_names(src.generator_count());
    let tgt_names: Vec<String> = src_names.iter().map(|n| n.to_uppercase()).collect();
    let mut out = format!(
        "witness over {}:\n{m}",
        if over_integers { "Z" } else { "Q" }
    );
    for (name, image) in src_names.iter().zip(m.images()) {
        let _ = writeln!(out, "{name} -> {}", image.to_string_with(&tgt_names));
    }
    let residues =
        relation_residues(&m, &src, &tgt).map_err(|e| Outcome::input_error(e.to_string()))?;
    let shown: Vec<String> = residues
        .iter()
        .map(|r| r.to_string_with(&tgt_names))
        .collect();
    let _ = writeln!(out, "residues: {}", shown.join(", "));
    let _ = writeln!(out, "determinant: {}", m.determinant());
    Ok(Outcome::ok(out))
}

pub fn cmd_decompose(file: &Path) -> CmdResult {
    let t = load_tower(file)?;
    match decompose(&t) {
        Ok(d) => Ok(Outcome::ok(format!(
            "{}\n{}",
            d.summary(),
            d.reordered.to_text()
        ))),
        Err(_) => {
            let report = full_report(&t).map_err(|e| Outcome::input_error(e.to_string()))?;
            let (stage, k) = report.first_violation().expect("not Q-trivial");
            Ok(Outcome::negative(format!(
                "not Q-trivial: relation k={k} fails at stage {stage}\n"
            )))
        }
    }
}

pub fn cmd_enumerate(
    height: usize,
    dims: Vec<usize>,
    bound: u32,
    filters: &[String],
    mode: SearchMode,
) -> CmdResult {
    let mut config = EnumerationConfig::new(height, dims, bound);
    config.filters = filters
        .iter()
        .map(|f| f.parse::<Filter>())
        .collect::<bott_core::Result<_>>()
        .map_err(|e| Outcome::input_error(e.to_string()))?;
    let census = run_census(&config, mode).map_err(|e| Outcome::input_error(e.to_string()))?;
    let mut out = String::new();
    for r in &census.records {
        let _ = writeln!(out, "{r}");
    }
    out.push_str(&census.summary_table());
    Ok(Outcome::ok(out))
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filtersort::bench::{self, BenchConfig};
use filtersort::dsl::{
    parse_atom, parse_preference_spec, parse_procedure, print_preference_spec, print_procedure,
};
use filtersort::engine::Plan;
use filtersort::general::{derive_general_spec, normalize_general, synthesize_general_procedure};
use filtersort::heuristics::satisfice_after_procedure;
use filtersort::model::{Catalog, PreferenceSpec, Procedure, RankedList, SpecMode};
use filtersort::normalizer::{check_equivalence, normalize, render, AttrFilter, Equivalence};
use filtersort::preference::{pref_compare, synthesize_procedure, PrefOutcome};
use filtersort::testkit::{ListGuard, DEFAULT_MAX_LEN};
use filtersort::Error;

#[derive(Parser)]
#[command(
    name = "filtersort",
    version,
    about = "Filter/sort decision procedures and the preferences they encode"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a procedure and print it in canonical form.
    Parse {
        file: PathBuf,
        /// Print the canonical text and the syntax tree as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the normal form of a procedure and its length.
    Normalize {
        file: PathBuf,
        /// Catalog whose schema orders label bounds.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Run a procedure on a list of catalog items.
    Eval {
        file: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// Comma-separated item ids; defaults to catalog order.
        #[arg(long)]
        list: Option<String>,
    },
    /// Compare two items under a preference spec.
    Prefer {
        spec: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Derive the preference spec a procedure decides by.
    Derive {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Build a procedure from a preference spec.
    Synth { spec: PathBuf },
    /// Check two procedures for equivalence on every small list.
    Check {
        p1: PathBuf,
        p2: PathBuf,
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
        max_len: usize,
        /// Comma-separated attributes compared; defaults to all.
        #[arg(long)]
        attrs: Option<String>,
        /// Largest number of lists to enumerate.
        #[arg(long, default_value_t = ListGuard::DEFAULT_MAX_LISTS)]
        max_lists: u128,
    },
    /// Run a procedure, then pick the first item satisfying an extra condition.
    Satisfice {
        file: PathBuf,
        #[arg(long)]
        missing: String,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        list: Option<String>,
    },
    /// Seeded cost comparison against element-by-element maximization.
    Bench {
        #[arg(long)]
        attrs: usize,
        #[arg(long)]
        items: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Non-error outcome carrying a non-zero exit status.
enum Outcome {
    Success,
    Negative,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptyChoice | Error::NoSatisfactoryElement => 3,
        Error::ResourceLimit { .. } => 4,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn load_procedure(path: &Path) -> Result<Procedure, Error> {
    Ok(parse_procedure(&read(path)?)?)
}

fn load_catalog(path: &Path) -> Result<Catalog, Error> {
    Catalog::from_json(&read(path)?)
}

fn load_spec(path: &Path) -> Result<PreferenceSpec, Error> {
    parse_preference_spec(&read(path)?)
}

fn input_list(catalog: &Catalog, list: Option<&str>) -> Result<RankedList, Error> {
    match list {
        None => Ok(catalog.full_list()),
        Some(text) => {
            let ids: Vec<&str> = text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            Ok(RankedList::from_ids(catalog, &ids)?)
        }
    }
}

fn procedure_text(p: &Procedure) -> String {
    if p.is_identity() && !p.take_first {
        "<identity>".to_string()
    } else {
        print_procedure(p)
    }
}

fn run(cmd: Command, out: &mut impl Write) -> Result<Outcome, Error> {
    let io = |e: io::Error| Error::Format(e.to_string());
    match cmd {
        Command::Parse { file, json } => {
            let p = load_procedure(&file)?;
            if json {
                let doc = serde_json::json!({ "canonical": print_procedure(&p), "ast": p });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?).map_err(io)?;
            } else {
                writeln!(out, "{}", print_procedure(&p)).map_err(io)?;
            }
        }
        Command::Normalize { file, catalog } => {
            let p = load_procedure(&file)?;
            let catalog = catalog.as_deref().map(load_catalog).transpose()?;
            let schema = catalog.as_ref().map(Catalog::schema);
            if p.is_simple() {
                let nf = normalize(&p, schema)?;
                writeln!(out, "{}", render(&nf)).map_err(io)?;
                writeln!(out, "length={}", nf.length()).map_err(io)?;
                for (attr, f) in nf.filters() {
                    if let AttrFilter::EmptyInterval { lower, upper } = f {
                        writeln!(out, "empty-interval: {attr} >= {lower} and {attr} <= {upper} admits no value")
                            .map_err(io)?;
                    }
                }
            } else {
                if let Some(schema) = schema {
                    filtersort::model::validate_procedure(&p, schema)
                        .map_err(filtersort::error::SchemaErrors)?;
                }
                let nf = normalize_general(&p, None)?;
                writeln!(out, "{}", procedure_text(&nf.to_procedure())).map_err(io)?;
                writeln!(out, "length={}", nf.length()).map_err(io)?;
                writeln!(
                    out,
                    "note: general procedure; length counts CNF clauses plus sorts"
                )
                .map_err(io)?;
            }
        }
        Command::Eval {
            file,
            catalog,
            list,
        } => {
            let p = load_procedure(&file)?;
            let catalog = load_catalog(&catalog)?;
            let l = input_list(&catalog, list.as_deref())?;
            let result = Plan::compile(&p, catalog.schema())?.run(&l, &catalog)?;
            for id in result.ids(&catalog) {
                writeln!(out, "{id}").map_err(io)?;
            }
        }
        Command::Prefer {
            spec,
            catalog,
            x,
            y,
        } => {
            let spec = load_spec(&spec)?;
            let catalog = load_catalog(&catalog)?;
            let (x, y) = (catalog.resolve(&x)?, catalog.resolve(&y)?);
            let outcome = pref_compare(&spec, x, y, &catalog)?;
            writeln!(out, "{}", outcome.symbol()).map_err(io)?;
            if outcome == PrefOutcome::StrictlyDisprefer {
                return Ok(Outcome::Negative);
            }
        }
        Command::Derive { file, catalog } => {
            let p = load_procedure(&file)?;
            let catalog = catalog.as_deref().map(load_catalog).transpose()?;
            let spec = derive_general_spec(&p, catalog.as_ref().map(Catalog::schema), None)?;
            write!(out, "{}", print_preference_spec(&spec)).map_err(io)?;
        }
        Command::Synth { spec } => {
            let spec = load_spec(&spec)?;
            let p = match spec.mode() {
                SpecMode::Simple => synthesize_procedure(&spec)?,
                SpecMode::General => synthesize_general_procedure(&spec, None)?,
            };
            writeln!(out, "{}", procedure_text(&p)).map_err(io)?;
        }
        Command::Check {
            p1,
            p2,
            universe,
            max_len,
            attrs,
            max_lists,
        } => {
            let (p1, p2) = (load_procedure(&p1)?, load_procedure(&p2)?);
            let universe = load_catalog(&universe)?;
            let attrs: Vec<&str> = match &attrs {
                Some(text) => text
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect(),
                None => universe.schema().names().collect(),
            };
            match check_equivalence(
                &p1,
                &p2,
                &attrs,
                &universe,
                max_len,
                ListGuard::new(max_lists),
            )? {
                Equivalence::Equivalent => writeln!(out, "equivalent").map_err(io)?,
                Equivalence::Counterexample(l) => {
                    writeln!(out, "counterexample: [{}]", l.ids(&universe).join(","))
                        .map_err(io)?;
                    for (name, p) in [("p1", &p1), ("p2", &p2)] {
                        let shown = match Plan::compile(p, universe.schema())?.run(&l, &universe) {
                            Ok(r) => format!("[{}]", r.ids(&universe).join(",")),
                            Err(e) => format!("error: {e}"),
                        };
                        writeln!(out, "{name}: {shown}").map_err(io)?;
                    }
                    return Ok(Outcome::Negative);
                }
            }
        }
        Command::Satisfice {
            file,
            missing,
            catalog,
            list,
        } => {
            let p = load_procedure(&file)?;
            let missing = parse_atom(&missing)?;
            let catalog = load_catalog(&catalog)?;
            let l = input_list(&catalog, list.as_deref())?;
            let chosen = satisfice_after_procedure(&p, &missing, &l, &catalog)?;
            writeln!(out, "{}", catalog.id(chosen)).map_err(io)?;
        }
        Command::Bench {
            attrs,
            items,
            trials,
            seed,
            out: dest,
        } => {
            let rows = bench::run(&BenchConfig {
                attrs,
                items,
                trials,
                seed,
            })?;
            match dest {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|e| {
                        Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
                    })?;
                    bench::write_csv(&rows, io::BufWriter::new(file))?;
                }
                None => bench::write_csv(&rows, &mut *out)?,
            }
        }
    }
    Ok(Outcome::Success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

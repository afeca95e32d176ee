use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use strata::complex::PerversitySpec;
use strata::corpus;
use strata::harness::{self, CheckKind, CheckOptions, ComputeRequest, Theory};
use strata::linalg::CoefficientRing;

/// Intersection homology, Borel–Moore intersection homology and blown-up
/// intersection cohomology of filtered simplicial spaces.
#[derive(Parser)]
#[command(name = "strata", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Groups of one theory on one space.
    Compute {
        /// Corpus id or recipe such as `suspension(rp3)`.
        #[arg(long)]
        space: String,
        /// ih, bm, blowup or dual-complex.
        #[arg(long)]
        theory: String,
        /// 0, t, an integer, const:c, gm:a,b,.., explicit:key=v,.. or D(spec).
        #[arg(long, default_value = "0")]
        perversity: String,
        /// Z, Q or Z/m.
        #[arg(long, default_value = "Z")]
        ring: String,
        /// Extra vertices to remove, by id, comma separated.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<String>,
    },
    /// Runs a formula check and prints one report per case.
    Check {
        /// cone, products, mv, duality, example38, r-invariance or subdivision.
        check: String,
        /// Rings to use, repeated or comma separated.
        #[arg(long, value_delimiter = ',')]
        ring: Vec<String>,
        /// Inclusive range `a..b` of apex perversity values.
        #[arg(long)]
        scan_perversity: Option<String>,
        /// Spaces (or links) to use instead of the defaults.
        #[arg(long)]
        space: Vec<String>,
        /// Perversities to use instead of the defaults.
        #[arg(long)]
        perversity: Vec<String>,
    },
    /// Lists or describes the built-in spaces.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    Describe { id: String },
}

fn rings(names: &[String]) -> Result<Vec<CoefficientRing>> {
    names.iter().map(|r| r.parse::<CoefficientRing>().with_context(|| format!("bad ring `{r}`"))).collect()
}

fn perversity(s: &str) -> Result<PerversitySpec> {
    s.parse().with_context(|| format!("bad perversity `{s}`"))
}

// A closed pipe (as in `strata corpus list | head`) is not an error.
fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Compute { space, theory, perversity: p, ring, remove } => {
            let req = ComputeRequest {
                space,
                theory: theory.parse::<Theory>()?,
                perversity: perversity(&p)?,
                ring: ring.parse().with_context(|| format!("bad ring `{ring}`"))?,
                remove,
            };
            let report = harness::compute(&req)?;
            print_json(&report)?;
            Ok(report.pass)
        }
        Command::Check { check, ring, scan_perversity, space, perversity: ps } => {
            let kind: CheckKind = check.parse()?;
            let opts = CheckOptions {
                rings: rings(&ring)?,
                spaces: space,
                perversities: ps.iter().map(|s| perversity(s)).collect::<Result<_>>()?,
                scan: scan_perversity.as_deref().map(harness::parse_scan).transpose()?,
            };
            let reports = harness::run_check(kind, &opts)?;
            print_json(&reports)?;
            Ok(harness::all_pass(&reports))
        }
        Command::Corpus { action: CorpusAction::List } => {
            let list: Vec<_> =
                corpus::entries().iter().map(|e| json!({"id": e.id, "recipe": e.recipe, "description": e.description})).collect();
            print_json(&list)?;
            Ok(true)
        }
        Command::Corpus { action: CorpusAction::Describe { id } } => {
            let e = corpus::entry(&id)?;
            let s = e.build()?;
            let fc = &s.complex;
            let strata: Vec<_> = fc.strata().iter().map(|x| json!({"id": x.id, "codim": x.codim, "vertices": x.vertices.len()})).collect();
            let removed: Vec<&str> = s.removed.iter().map(|&v| fc.vertex_id(v)).collect();
            let out = json!({
                "id": e.id,
                "recipe": e.recipe,
                "description": e.description,
                "dim": fc.dim(),
                "f_vector": fc.f_vector(),
                "removed": removed,
                "strata": strata,
                "expected": e.expected,
            });
            print_json(&out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

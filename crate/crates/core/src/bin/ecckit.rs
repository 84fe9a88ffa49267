//! Command-line front end: batch featurization, model-comparison statistics,
//! and single-molecule inspection.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecckit::ecc::{self, ECCConfig};
use ecckit::lifting::{self, LiftConfig};
use ecckit::molio::{self, MolecularGraph};
use ecckit::spectral;
use ecckit::statlab::{self, FoldLossTable};
use rayon::prelude::*;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_INPUT: u8 = 2;
const EXIT_OUTPUT: u8 = 3;
const EXIT_CONTROL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ecckit",
    about = "Topological molecular featurization and comparison statistics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    /// Text files with one SMILES string per line.
    SmilesList,
    /// One JSON graph document per input file.
    GraphFiles,
}

#[derive(Args)]
struct FeatureFlags {
    /// Eigenvalues kept per Laplacian and per chain spectrum.
    #[arg(long, default_value_t = 8)]
    top_k: usize,
    /// Random-walk chains sampled per dimension.
    #[arg(long, default_value_t = 64)]
    chain_samples: usize,
    /// Steps per sampled chain.
    #[arg(long, default_value_t = 8)]
    chain_walk_len: usize,
    /// Seed for all stochastic segments.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Total vector length; the tail beyond the feature segments is zero.
    #[arg(long, default_value_t = 96)]
    pad_to: usize,
    /// Graph distance for k-hop 3-cells; 0 disables them.
    #[arg(long, default_value_t = 0)]
    khop: usize,
    /// Largest ring size lifted to a 3-cell.
    #[arg(long, default_value_t = 8)]
    ring_max: usize,
    /// Degree-histogram cap; larger degrees fall into the last bin.
    #[arg(long, default_value_t = 6)]
    max_degree: usize,
}

impl FeatureFlags {
    fn config(&self) -> ECCConfig {
        ECCConfig {
            top_k: self.top_k,
            chain_samples: self.chain_samples,
            chain_walk_len: self.chain_walk_len,
            seed: self.seed,
            pad_to: self.pad_to,
            lift: LiftConfig {
                include_rings: true,
                khop: self.khop,
                ring_size_max: self.ring_max,
            },
            max_degree: self.max_degree,
            canonicalize: true,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Featurize a batch of molecules into a binary feature file.
    Featurize {
        /// Input path; repeat for multiple files.
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "smiles-list")]
        kind: InputKind,
        /// Output feature file; a sibling `.report.txt` records run counts.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for per-molecule fan-out.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        features: FeatureFlags,
    },
    /// Nadeau-Bengio comparison tables from a fold-loss table.
    Stats {
        /// Fold-loss file with header `model,fold,mae,rmse`.
        #[arg(long)]
        input: PathBuf,
        /// Control model name; every other model is compared against it.
        #[arg(long)]
        control: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Output directory for `mae.csv` and `rmse.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the lifted complex summary for one molecule.
    Inspect {
        /// SMILES string.
        molecule: String,
        #[command(flatten)]
        features: FeatureFlags,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Featurize {
            input,
            kind,
            out,
            jobs,
            features,
        } => cmd_featurize(&input, kind, &out, jobs, &features.config()),
        Command::Stats {
            input,
            control,
            alpha,
            out,
        } => cmd_stats(&input, &control, alpha, &out),
        Command::Inspect { molecule, features } => cmd_inspect(&molecule, &features.config()),
    }
}

/// One parse attempt per input molecule, tagged with its origin for the report.
struct Item {
    id: String,
    origin: String,
    parsed: Result<MolecularGraph, molio::MolError>,
}

fn collect_items(inputs: &[PathBuf], kind: InputKind) -> Result<Vec<Item>, String> {
    let mut items = Vec::new();
    for path in inputs {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        match kind {
            InputKind::SmilesList => {
                for (lineno, line) in text.lines().enumerate() {
                    let smiles = line.trim();
                    if smiles.is_empty() {
                        continue;
                    }
                    items.push(Item {
                        id: smiles.to_string(),
                        origin: format!("{}:{}", path.display(), lineno + 1),
                        parsed: molio::parse_smiles(smiles),
                    });
                }
            }
            InputKind::GraphFiles => {
                items.push(Item {
                    id: path.display().to_string(),
                    origin: path.display().to_string(),
                    parsed: molio::parse_graph_file(&text),
                });
            }
        }
    }
    Ok(items)
}

fn cmd_featurize(
    inputs: &[PathBuf],
    kind: InputKind,
    out: &Path,
    jobs: usize,
    cfg: &ECCConfig,
) -> ExitCode {
    let start = Instant::now();
    let items = match collect_items(inputs, kind) {
        Ok(items) => items,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    // Fan out per molecule; indexed map keeps the output in input order.
    let results: Vec<Result<ecc::ECCVector, String>> = pool.install(|| {
        items
            .par_iter()
            .map(|item| match &item.parsed {
                Ok(graph) => {
                    ecc::ecc_features(graph, cfg).map_err(|e| format!("{}: {e}", item.origin))
                }
                Err(e) => Err(format!("{}: {e}", item.origin)),
            })
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (item, result) in items.iter().zip(results) {
        match result {
            Ok(vector) => records.push((item.id.clone(), vector)),
            Err(message) => failures.push(message),
        }
    }
    let mut payload = Vec::new();
    if let Err(e) = ecc::write_features(&mut payload, cfg.pad_to, &records) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_OUTPUT);
    }
    if let Err(e) = fs::write(out, &payload) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(EXIT_OUTPUT);
    }
    let mut report = format!(
        "parsed: {}\nfailed: {}\nwritten: {}\nwall_time_s: {:.3}\n",
        items.len() - failures.len(),
        failures.len(),
        records.len(),
        start.elapsed().as_secs_f64()
    );
    for failure in &failures {
        report.push_str(&format!("skipped: {failure}\n"));
    }
    let report_path = out.with_extension(match out.extension() {
        Some(ext) => format!("{}.report.txt", ext.to_string_lossy()),
        None => "report.txt".to_string(),
    });
    if let Err(e) = fs::write(&report_path, report) {
        eprintln!("error: cannot write {}: {e}", report_path.display());
        return ExitCode::from(EXIT_OUTPUT);
    }
    println!(
        "wrote {} records to {} ({} skipped)",
        records.len(),
        out.display(),
        failures.len()
    );
    ExitCode::SUCCESS
}

fn cmd_stats(input: &Path, control: &str, alpha: f64, out_dir: &Path) -> ExitCode {
    let text = match fs::read_to_string(input) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let table = match FoldLossTable::from_csv(&text) {
        Ok(table) => table,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let families = match statlab::compare_to_control(&table, control, alpha) {
        Ok(families) => families,
        Err(statlab::StatError::UnknownControl(name)) => {
            eprintln!("error: unknown control model '{name}'");
            return ExitCode::from(EXIT_CONTROL);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::from(EXIT_OUTPUT);
    }
    for family in &families {
        let path = out_dir.join(format!("{}.csv", family.kind.name()));
        let mut body = String::from("comparison,delta,t_nb,ci_low,ci_high,p,p_holm\n");
        for cmp in &family.comparisons {
            body.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                cmp.competitor, cmp.delta, cmp.t_nb, cmp.ci_low, cmp.ci_high, cmp.p, cmp.p_holm
            ));
        }
        if let Err(e) = fs::write(&path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_OUTPUT);
        }
    }
    println!(
        "wrote {} comparison rows per family to {}",
        families[0].comparisons.len(),
        out_dir.display()
    );
    ExitCode::SUCCESS
}

fn cmd_inspect(molecule: &str, cfg: &ECCConfig) -> ExitCode {
    let graph = match molio::parse_smiles(molecule) {
        Ok(graph) => graph,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let complex = match lifting::lift(&graph, &cfg.lift) {
        Ok(complex) => complex,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let out = std::io::stdout();
    let mut out = out.lock();
    let counts = complex.counts();
    let _ = writeln!(out, "atoms: {}", graph.n_atoms());
    let _ = writeln!(out, "bonds: {}", graph.n_bonds());
    let _ = writeln!(
        out,
        "cells: ({}, {}, {}, {})",
        counts[0], counts[1], counts[2], counts[3]
    );
    match lifting::validate(&complex) {
        Ok(()) => {
            let _ = writeln!(out, "complex: valid");
        }
        Err(v) => {
            let _ = writeln!(out, "complex: INVALID ({})", v.message);
        }
    }
    match spectral::betti_numbers(&complex) {
        Ok(betti) => {
            let _ = writeln!(
                out,
                "betti: ({}, {}, {}, {})",
                betti[0], betti[1], betti[2], betti[3]
            );
        }
        Err(e) => {
            let _ = writeln!(out, "betti: unavailable ({e})");
        }
    }
    for k in 0..4 {
        if complex.cells[k].is_empty() {
            continue;
        }
        match spectral::hodge_laplacian(&complex, k)
            .and_then(|l| spectral::top_k_eigs(&l, cfg.top_k))
        {
            Ok(spectrum) => {
                let rendered: Vec<String> = spectrum
                    .eigenvalues
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .collect();
                let _ = writeln!(out, "laplacian_top_{k}: [{}]", rendered.join(", "));
            }
            Err(e) => {
                let _ = writeln!(out, "laplacian_top_{k}: unavailable ({e})");
            }
        }
    }
    match ecc::ecc_features(&graph, cfg) {
        Ok(vector) => {
            let _ = writeln!(out, "layout ({} values):", vector.values.len());
            for segment in &vector.layout {
                let _ = writeln!(
                    out,
                    "  {} @ {}..{}",
                    segment.name,
                    segment.offset,
                    segment.offset + segment.len
                );
            }
        }
        Err(e) => {
            let _ = writeln!(out, "features: unavailable ({e})");
        }
    }
    ExitCode::SUCCESS
}

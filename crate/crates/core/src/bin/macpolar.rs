use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use macpolar::compat::{self, alternating_cross_check};
use macpolar::io::{self, Metadata};
use macpolar::oracle::{self, corpus};
use macpolar::report::{self, CheckSummary, OracleSummary, PolarizeSummary, RegionSummary};
use macpolar::{Mac, Result, SignSequence, SynthesisOptions, Tolerances, TwoUserView, UserSet};

/// Polarization of multiple access channels over finite Abelian groups.
///
/// Tolerances (zero, ratio, oracle) can be overridden with
/// MACPOLAR_TOLERANCES="1e-9,1e-7,1e-6".
#[derive(Parser)]
#[command(name = "macpolar", version)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value = "both")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Print I_S for every nonempty user set.
    Region { file: PathBuf },
    /// Synthesize W^s and print its rates.
    Polarize {
        file: PathBuf,
        /// Sign sequence over '-' and '+', e.g. "-+".
        #[arg(long, default_value = "")]
        seq: String,
        /// Keep every synthesized output instead of merging equivalent ones.
        #[arg(long)]
        no_merge: bool,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
    },
    /// Decide whether polarization preserves the capacity region.
    /// Exit status: 0 preserved, 2 not preserved, 1 error.
    Check {
        file: PathBuf,
        /// Check one user set, given as a bitmask (bit 0 = user 1).
        #[arg(long, value_parser = parse_mask)]
        subset: Option<u32>,
        /// Also compare the witness with fingerprints of W, W^- and W^(-,+).
        #[arg(long)]
        cross_validate: bool,
    },
    /// Average I_S over all sign sequences up to a depth and compare with
    /// the checker. Exit status 3 flags a disagreement.
    Oracle {
        file: PathBuf,
        #[arg(long, value_parser = parse_mask)]
        subset: Option<u32>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Write the seeded random corpus as channel files.
    Corpus {
        out: PathBuf,
        #[arg(long, default_value_t = corpus::CORPUS_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn parse_mask(s: &str) -> std::result::Result<u32, String> {
    let s = s.trim();
    let parsed = if let Some(b) = s.strip_prefix("0b") {
        u32::from_str_radix(b, 2)
    } else if let Some(h) = s.strip_prefix("0x") {
        u32::from_str_radix(h, 16)
    } else {
        s.parse()
    };
    match parsed {
        Ok(0) => Err("the user set must be nonempty".into()),
        Ok(m) => Ok(m),
        Err(e) => Err(format!("{s:?} is not a bitmask: {e}")),
    }
}

fn emit<T: Serialize>(format: Format, text: &str, value: &T) {
    if format != Format::Json {
        print!("{text}");
    }
    if format == Format::Both {
        println!("--- machine-readable ---");
    }
    if format != Format::Text {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    }
}

fn subset_for(mac: &Mac, mask: u32) -> Result<UserSet> {
    let set = UserSet::from_mask(mask);
    if !set.is_subset_of(UserSet::full(mac.users())) {
        return Err(macpolar::Error::InvalidSubset(format!(
            "mask {mask:#b} names users beyond the {} of this channel",
            mac.users()
        )));
    }
    Ok(set)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tol = Tolerances::from_env()?;
    match cli.command {
        Command::Region { file } => {
            let mac = io::load(&file)?;
            let summary = RegionSummary::new(&mac);
            emit(cli.format, &summary.render(), &summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Polarize { file, seq, no_merge, max_depth } => {
            let mac = io::load(&file)?;
            let seq: SignSequence = seq.parse()?;
            let opts = if no_merge {
                SynthesisOptions { max_depth, ..SynthesisOptions::unmerged() }
            } else {
                SynthesisOptions { max_depth, merge_tolerance: tol.zero, ..Default::default() }
            };
            let w = macpolar::polarize::synthesize(&mac, &seq, &opts)?;
            let summary = PolarizeSummary {
                sequence: seq.to_string(),
                merged: !no_merge,
                region: RegionSummary::new(&w),
            };
            emit(cli.format, &summary.render(), &summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, subset, cross_validate } => {
            let mac = io::load(&file)?;
            let set = subset.map(|m| subset_for(&mac, m)).transpose()?;
            if set == Some(UserSet::full(mac.users())) {
                return Err(macpolar::Error::InvalidSubset(
                    "the full user set is always preserved; pick a proper subset".into(),
                ));
            }
            let summary = report::check(&mac, set, &tol)?;
            let mut text = summary.render();
            if cross_validate {
                text.push_str(&cross_validation(&mac, &summary, &tol)?);
            }
            emit(cli.format, &text, &summary);
            Ok(if summary.preserved { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Oracle { file, subset, depth } => {
            let mac = io::load(&file)?;
            let sets: Vec<UserSet> = match subset {
                Some(m) => vec![subset_for(&mac, m)?],
                None => UserSet::all_nonempty(mac.users()).collect(),
            };
            let mut verdicts = Vec::new();
            let mut checker = Vec::new();
            for s in sets {
                verdicts.push(oracle::oracle_verdict(&mac, s, depth, &tol)?);
                checker.push(report::checker_verdict(&mac, s, &tol)?);
            }
            let summary = OracleSummary::new(verdicts, checker);
            emit(cli.format, &summary.render(), &summary);
            Ok(if summary.disagreements.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Corpus { out, seed, count } => {
            write_corpus(&out, seed, count)?;
            println!("wrote {count} channels to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cross_validation(mac: &Mac, summary: &CheckSummary, tol: &Tolerances) -> Result<String> {
    let mut out = String::from("cross-validation along W, W^-, W^(-,+):\n");
    for s in &summary.subsets {
        let set = UserSet::from_mask(s.mask);
        let reduced = mac.two_user_reduction(set)?;
        let view = TwoUserView::new(reduced.clone(), tol.zero)?;
        let report = compat::check_compatibility(&view, tol);
        let Some(witness) = report.witness() else {
            out.push_str(&format!("  S = {}: skipped, no witness\n", s.set));
            continue;
        };
        for level in alternating_cross_check(&reduced, witness, 2, tol)? {
            let state = match &level.fingerprint {
                Err(e) => format!("fingerprint ill-defined ({e})"),
                Ok(_) if level.disagreements.is_empty() && level.outside_witness.is_empty() => {
                    "agrees with witness".into()
                }
                Ok(_) => format!(
                    "{} disagreements, {} entries outside the witness",
                    level.disagreements.len(),
                    level.outside_witness.len()
                ),
            };
            out.push_str(&format!(
                "  S = {}: depth {} ({} outputs): {state}\n",
                s.set, level.depth, level.output_size
            ));
        }
    }
    Ok(out)
}

fn write_corpus(dir: &Path, seed: u64, count: usize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, e) in corpus::random(seed, count).into_iter().enumerate() {
        let meta = Metadata {
            name: Some(e.name.clone()),
            seed: Some(e.seed),
            notes: Some(format!("random corpus entry {i}, base seed {seed}")),
        };
        io::save(&e.mac, meta, dir.join(format!("random_{i:03}.json")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which is reserved for "not preserved"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

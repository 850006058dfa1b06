//! Command-line front end: verify partition files, run the multiplicity
//! analyzers, compute metric distances and orbits, act on partitions,
//! generate seeded corpora and export Schreier graphs.
//!
//! Exit codes: 0 success; 1 verification found a non-partition (witness on
//! stderr); 2 parse or resource errors (diagnostic on stderr).

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cosets::{
    analyze, AnalyzeOptions, CosetPartition, CoverDefect, GenConfig, IvReading, Rank, ReducedWord,
};

#[derive(Parser)]
#[command(name = "cosets", version, about = "Coset partitions of free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a partition file is an exact cover; exit 1 with a witness
    /// on stderr if not.
    Verify { file: String },
    /// Run the full multiplicity analysis; key = value lines on stdout.
    Analyze {
        file: String,
        /// Element cap for group enumerations and witness searches.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// The r parameter of condition (iv), 2 <= r <= s-1.
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Scoping of condition (iv): iv-a (conjunctive) or iv-b.
        #[arg(long, default_value = "iv-a")]
        reading: String,
    },
    /// Distance between two partition files, as 0 or 2^-m.
    Metric { file_a: String, file_b: String },
    /// Orbit sizes of a partition under a word and under the whole group.
    Orbit { file: String, word: String },
    /// Act on every representative by a word; prints the new partition.
    Act { file: String, word: String },
    /// Generate a seeded random partition.
    Gen {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long = "max-index", default_value_t = 12)]
        max_index: usize,
        #[arg(long = "max-parts", default_value_t = 8)]
        max_parts: usize,
    },
    /// DOT rendering of one part's Schreier graph (1-based place).
    ExportDot { file: String, part_index: usize },
}

fn load(path: &str) -> Result<CosetPartition, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    CosetPartition::from_text(&text).map_err(|e| format!("{path}: {e}"))
}

fn parse_word(text: &str, rank: Rank) -> Result<ReducedWord, String> {
    ReducedWord::parse(text, rank).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Verify { file } => {
            let partition = load(&file)?;
            let result = partition.verify().map_err(|e| e.to_string())?;
            println!("is_partition = {}", result.is_partition);
            println!("product_states = {}", result.reachable_product_states);
            if result.is_partition {
                Ok(0)
            } else {
                match result.defect {
                    Some(CoverDefect::Uncovered { word }) => {
                        eprintln!("witness {word} covered 0 times");
                    }
                    Some(CoverDefect::MultiplyCovered { word, count }) => {
                        eprintln!("witness {word} covered {count} times");
                    }
                    Some(CoverDefect::Density { sum }) => {
                        eprintln!("index reciprocals sum to {sum}, not 1");
                    }
                    None => eprintln!("not a partition"),
                }
                Ok(1)
            }
        }
        Command::Analyze {
            file,
            cap,
            r,
            reading,
        } => {
            let partition = load(&file)?;
            let opts = AnalyzeOptions {
                cap,
                r,
                reading: IvReading::parse(&reading).map_err(|e| e.to_string())?,
            };
            let report = analyze(&partition, &opts).map_err(|e| e.to_string())?;
            print!("{}", report.to_kv());
            Ok(0)
        }
        Command::Metric { file_a, file_b } => {
            let a = load(&file_a)?;
            let b = load(&file_b)?;
            println!("{}", a.distance(&b));
            Ok(0)
        }
        Command::Orbit { file, word } => {
            let partition = load(&file)?;
            let word = parse_word(&word, partition.rank())?;
            let orbit_word = partition.orbit_size_word(&word);
            let orbit_full = partition.orbit_size_full().map_err(|e| e.to_string())?;
            println!("orbit_word={orbit_word} orbit_full={orbit_full}");
            Ok(0)
        }
        Command::Act { file, word } => {
            let partition = load(&file)?;
            let word = parse_word(&word, partition.rank())?;
            print!("{}", partition.act(&word).to_text());
            Ok(0)
        }
        Command::Gen {
            rank,
            seed,
            depth,
            max_index,
            max_parts,
        } => {
            let rank = Rank::new(rank).map_err(|e| e.to_string())?;
            let cfg = GenConfig {
                rank,
                max_parts,
                max_index,
                refinement_depth: depth,
                seed,
            };
            let partition = cosets::random_partition(&cfg).map_err(|e| e.to_string())?;
            print!("{}", partition.to_text());
            Ok(0)
        }
        Command::ExportDot { file, part_index } => {
            let partition = load(&file)?;
            let count = partition.part_count();
            if part_index == 0 || part_index > count {
                return Err(format!("part index {part_index} out of range 1..={count}"));
            }
            print!("{}", partition.pairs()[part_index - 1].subgroup().to_dot());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

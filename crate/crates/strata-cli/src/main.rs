//! Command-line front end for the strata library. Every subcommand prints
//! deterministic output: identical invocations produce identical bytes.

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Read;
use strata::counts::{asym_multinomial, multinomial};
use strata::geometry_oracle::{iterated_limit, oracle_slide};
use strata::kappa::{generalized_kappa, kappa_expansion};
use strata::patterns::{all_avoiders, bell, leaf_labeling, reading_word, Permutation};
use strata::slide_engine::{slide_i, slide_set, SlideFlavor};
use strata::tournament::{lazy_tournament, tour_set};
use strata::tree_core::{
    configured_max_n, enumerate_stable, Composition, Leaf, StableTree, StrataSum, TreeError,
};

const EXIT_PROPERTY: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_BOUND: i32 = 3;

/// Boundary-strata expansions of psi, omega, and kappa class products.
#[derive(Parser)]
#[command(name = "strata", version, max_term_width = 100)]
struct Cli {
    /// Override the enumeration bound on n (also env STRATA_MAX_N).
    #[arg(long, global = true)]
    max_n: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Flavor {
    Psi,
    Omega,
}

impl From<Flavor> for SlideFlavor {
    fn from(f: Flavor) -> Self {
        match f {
            Flavor::Psi => SlideFlavor::Psi,
            Flavor::Omega => SlideFlavor::Omega,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    /// Compare hyperplane-degeneration slides with combinatorial slides.
    Slides,
    /// Compare a full iterated limit with the slide set it must reproduce.
    Main,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a product of psi or omega classes into boundary strata.
    Slide {
        /// Composition as a comma list, e.g. 1,0,2.
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = Flavor::Psi)]
        flavor: Flavor,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Play lazy tournaments on trivalent trees and report the winners.
    Tour {
        /// Composition as a comma list; must sum to its length.
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// With --format json, emit full tournament records with match logs.
        #[arg(long)]
        log: bool,
    },
    /// Expand a kappa class (single index --i or multi-index --r).
    Kappa {
        /// Number of marked points.
        #[arg(long)]
        n: u32,
        /// Single kappa index.
        #[arg(long, conflicts_with = "r")]
        i: Option<u32>,
        /// Multi-index as a comma list, e.g. 2,2.
        #[arg(long)]
        r: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-check slide rules against the symbolic geometry oracle.
    Oracle {
        #[arg(long, value_enum)]
        check: CheckKind,
        /// Ambient n for --check slides.
        #[arg(long)]
        n: Option<u32>,
        /// Composition for --check main.
        #[arg(long)]
        k: Option<String>,
        #[arg(long, value_enum, default_value_t = Flavor::Psi)]
        flavor: Flavor,
        /// Sample this many random cases instead of sweeping exhaustively.
        #[arg(long)]
        samples: Option<u32>,
        /// Seed for the sampled sweep.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// 23-1 avoiding permutations and their caterpillar trees.
    Patterns {
        #[command(subcommand)]
        what: PatternsCommand,
    },
    /// Table of psi and omega multidegrees over all compositions of n.
    Counts {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Re-emit a strata sum read as JSON from stdin.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum PatternsCommand {
    /// List all 23-1-avoiding permutations of length n.
    Avoiders {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build the caterpillar tree of a 23-1-avoiding word.
    Tree {
        /// Permutation as digits, e.g. 2143.
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Read the slide word of a caterpillar tree (JSON on stdin).
    Word,
    /// The nth Bell number.
    Bell {
        #[arg(long)]
        n: u32,
    },
}

fn main() {
    // Die quietly when a downstream pipe closes instead of panicking.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(m) = cli.max_n {
        std::env::set_var("STRATA_MAX_N", m.to_string());
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                TreeError::BoundExceeded(_) => EXIT_BOUND,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn check_bound(n: u32) -> Result<(), TreeError> {
    if n > configured_max_n() {
        Err(TreeError::BoundExceeded(n))
    } else {
        Ok(())
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>, TreeError> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| TreeError::BadComposition))
        .collect()
}

fn parse_composition(s: &str) -> Result<Composition, TreeError> {
    let k = Composition::new(parse_list(s)?)?;
    check_bound(k.n())?;
    Ok(k)
}

fn splits_field(t: &StableTree) -> String {
    let parts: Vec<String> = t
        .splits()
        .iter()
        .map(|s| s.iter().map(|l| l.to_string()).collect::<String>())
        .collect();
    parts.join("|")
}

fn emit_sum(sum: &StrataSum, format: Format) -> Result<(), TreeError> {
    match format {
        Format::Text => {
            for (t, m) in sum.iter() {
                println!("{m} * {}", t.render_text());
            }
            println!("# {} strata, total multiplicity {}", sum.len(), sum.total_multiplicity());
        }
        Format::Json => {
            println!("{}", serde_json::to_string(sum).expect("sums serialize"));
        }
        Format::Dot => {
            for (t, m) in sum.iter() {
                println!("// mult {m}");
                print!("{}", t.to_dot());
            }
        }
        Format::Csv => {
            println!("splits,mult");
            for (t, m) in sum.iter() {
                println!("{},{m}", splits_field(t));
            }
        }
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<i32, TreeError> {
    match cmd {
        Command::Slide { k, flavor, format } => {
            let k = parse_composition(&k)?;
            let sum = slide_set(&k, flavor.into())?;
            emit_sum(&sum, format)?;
            Ok(0)
        }
        Command::Tour { k, format, log } => {
            let k = parse_composition(&k)?;
            let sum = tour_set(&k)?;
            if log && format == Format::Json {
                let results: Vec<_> = sum
                    .iter()
                    .map(|(t, _)| lazy_tournament(t))
                    .collect::<Result<_, _>>()?;
                println!("{}", serde_json::to_string(&results).expect("results serialize"));
            } else {
                emit_sum(&sum, format)?;
            }
            Ok(0)
        }
        Command::Kappa { n, i, r, format } => {
            check_bound(n)?;
            let sum = match (i, r) {
                (Some(i), None) => kappa_expansion(n, i)?,
                (None, Some(r)) => generalized_kappa(n, &parse_list(&r)?)?,
                _ => {
                    eprintln!("error: pass exactly one of --i and --r");
                    return Ok(EXIT_USAGE);
                }
            };
            emit_sum(&sum, format)?;
            Ok(0)
        }
        Command::Oracle { check, n, k, flavor, samples, seed } => {
            oracle_command(check, n, k, flavor, samples, seed)
        }
        Command::Patterns { what } => patterns_command(what),
        Command::Counts { n, format } => {
            check_bound(n)?;
            counts_command(n, format)
        }
        Command::Export { format } => {
            let mut input = String::new();
            std::io::stdin()
                .read_to_string(&mut input)
                .map_err(|_| TreeError::BadLabel)?;
            let sum: StrataSum = match serde_json::from_str(&input) {
                Ok(sum) => sum,
                Err(e) => {
                    eprintln!("error: invalid strata sum JSON: {e}");
                    return Ok(EXIT_USAGE);
                }
            };
            emit_sum(&sum, format)?;
            Ok(0)
        }
    }
}

/// A random trivalent tree built by inserting leaves on random edges, with a
/// random subset of its splits contracted.
fn random_stable(n: u32, rng: &mut ChaCha8Rng) -> Result<StableTree, TreeError> {
    let mut t = StableTree::interior(0);
    for x in 1..=n {
        let edges = t.edges();
        let edge = edges.choose(rng).expect("trees have edges");
        t = t.insert_on_edge(edge, Leaf::Num(x));
    }
    for side in t.splits().clone() {
        if rng.gen_bool(0.5) {
            t = t.contract_split(&side)?;
        }
    }
    Ok(t)
}

fn oracle_command(
    check: CheckKind,
    n: Option<u32>,
    k: Option<String>,
    flavor: Flavor,
    samples: Option<u32>,
    seed: u64,
) -> Result<i32, TreeError> {
    match check {
        CheckKind::Slides => {
            let n = n.ok_or(TreeError::BadComposition)?;
            check_bound(n)?;
            let mut cases = 0u64;
            let mut mismatches = 0u64;
            let mut compare = |t: &StableTree, i: u32| -> Result<(), TreeError> {
                cases += 1;
                let fan: std::collections::BTreeSet<StableTree> =
                    slide_i(t, i)?.into_iter().collect();
                if oracle_slide(t, i)? != fan {
                    mismatches += 1;
                    println!("mismatch at i={i} on {t}");
                }
                Ok(())
            };
            if let Some(samples) = samples {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..samples {
                    let t = random_stable(n, &mut rng)?;
                    let i = rng.gen_range(1..=n);
                    compare(&t, i)?;
                }
            } else {
                for t in enumerate_stable(n)? {
                    for i in 1..=n {
                        compare(&t, i)?;
                    }
                }
            }
            println!("checked {cases} slides, {mismatches} mismatches");
            Ok(if mismatches == 0 { 0 } else { EXIT_PROPERTY })
        }
        CheckKind::Main => {
            let k = parse_composition(&k.ok_or(TreeError::BadComposition)?)?;
            let expected = slide_set(&k, flavor.into())?;
            let got = iterated_limit(&k, flavor.into())?;
            if got == expected {
                println!("match: {} strata", expected.len());
                Ok(0)
            } else {
                println!("MISMATCH: limit gave {} strata, slides gave {}", got.len(), expected.len());
                Ok(EXIT_PROPERTY)
            }
        }
    }
}

fn word_string(word: &[u32]) -> String {
    if word.iter().all(|&x| x <= 9) {
        word.iter().map(|x| x.to_string()).collect()
    } else {
        let parts: Vec<String> = word.iter().map(|x| x.to_string()).collect();
        parts.join(" ")
    }
}

fn patterns_command(what: PatternsCommand) -> Result<i32, TreeError> {
    match what {
        PatternsCommand::Avoiders { n, format } => {
            check_bound(n)?;
            let avoiders = all_avoiders(n);
            match format {
                Format::Json => {
                    let words: Vec<&[u32]> = avoiders.iter().map(|p| p.word()).collect();
                    println!("{}", serde_json::to_string(&words).expect("words serialize"));
                }
                Format::Csv => {
                    println!("word");
                    for p in &avoiders {
                        println!("{}", word_string(p.word()));
                    }
                }
                _ => {
                    for p in &avoiders {
                        println!("{}", word_string(p.word()));
                    }
                    println!("# {} avoiders", avoiders.len());
                }
            }
            Ok(0)
        }
        PatternsCommand::Tree { word, format } => {
            let digits: Option<Vec<u32>> = word.chars().map(|c| c.to_digit(10)).collect();
            let perm = Permutation::new(digits.ok_or(TreeError::BadLabel)?)?;
            check_bound(perm.len() as u32)?;
            let t = match leaf_labeling(&perm) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_USAGE);
                }
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string(&t).expect("trees serialize")),
                Format::Dot => print!("{}", t.to_dot()),
                _ => println!("{}", t.render_text()),
            }
            Ok(0)
        }
        PatternsCommand::Word => {
            let mut input = String::new();
            std::io::stdin()
                .read_to_string(&mut input)
                .map_err(|_| TreeError::BadLabel)?;
            let t: StableTree = match serde_json::from_str(&input) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: invalid tree JSON: {e}");
                    return Ok(EXIT_USAGE);
                }
            };
            match reading_word(&t) {
                Ok(w) => {
                    println!("{}", word_string(w.word()));
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_USAGE)
                }
            }
        }
        PatternsCommand::Bell { n } => {
            println!("{}", bell(n));
            Ok(0)
        }
    }
}

fn counts_command(n: u32, format: Format) -> Result<i32, TreeError> {
    let rows: Vec<(Composition, String, String)> = Composition::all_full(n)
        .into_iter()
        .map(|k| {
            let psi = multinomial(&k)?.to_string();
            let omega = asym_multinomial(&k)?.to_string();
            Ok((k, psi, omega))
        })
        .collect::<Result<_, TreeError>>()?;
    match format {
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|(k, psi, omega)| {
                    serde_json::json!({"k": k.parts(), "psi": psi, "omega": omega})
                })
                .collect();
            println!("{}", serde_json::to_string(&objs).expect("rows serialize"));
        }
        Format::Csv => {
            println!("k,psi,omega");
            for (k, psi, omega) in &rows {
                let ks: Vec<String> = k.parts().iter().map(|x| x.to_string()).collect();
                println!("\"{}\",{psi},{omega}", ks.join(","));
            }
        }
        _ => {
            for (k, psi, omega) in &rows {
                let ks: Vec<String> = k.parts().iter().map(|x| x.to_string()).collect();
                println!("k={} psi={psi} omega={omega}", ks.join(","));
            }
        }
    }
    Ok(0)
}

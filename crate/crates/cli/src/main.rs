use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arboreq::game::MatrixGame;
use arboreq::rational;
use arboreq::strategy::enumerate::{
    enumerate_depth_first, enumerate_directional, enumerate_general, Limits,
};
use arboreq::strategy::randomized::Class;
use arboreq::suite::{
    analyze, chimera_suite, is_weakly_balanced, mixture_suite, product_bound_suite, random_tree,
    replacement_suite, verify_collapse, verify_corpus, verify_weakly_balanced_collapse, verify_yao,
    CorpusSpec,
};
use arboreq::{Error, Filter, Tree, Verdict};

#[derive(Parser)]
#[command(
    name = "arboreq",
    version,
    about = "Exact equilibria of AND-OR tree evaluation games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Collapse,
    Yao,
    WeakBalance,
    Chimera,
    Replacement,
    Mixture,
    Product,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every requested class and filter and check the relations between them
    Analyze {
        /// Tree file, or - for stdin
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "general,df,dir")]
        classes: Vec<Class>,
        #[arg(long, value_delimiter = ',', default_value = "all,0,1")]
        filters: Vec<Filter>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run one verification on a tree
    Verify {
        #[arg(value_enum)]
        check: Check,
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify every tree of the exhaustive small corpus
    Corpus {
        #[arg(long, default_value_t = 6)]
        max_leaves: usize,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List every pure algorithm of a class
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        class: Class,
    },
    /// Write the cost matrix of a class against a filter as CSV
    Matrix {
        file: PathBuf,
        #[arg(long, default_value = "dir")]
        class: Class,
        #[arg(long, default_value = "all")]
        filter: Filter,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a seeded random tree
    RandomTree {
        #[arg(long)]
        leaves: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_tree(path: &Path) -> Result<Tree, Error> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    };
    Tree::parse(&text)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn print_verdicts(verdicts: &[Verdict], format: Format) -> bool {
    match format {
        Format::Text => {
            for v in verdicts {
                println!("{v}");
            }
        }
        Format::Json => println!("{}", to_json(&verdicts)),
    }
    verdicts.iter().all(|v| v.passed)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Analyze {
            file,
            classes,
            filters,
            format,
        } => {
            let tree = read_tree(&file)?;
            let report = analyze(&tree, &classes, &filters)?;
            match format {
                Format::Text => print!("{report}"),
                Format::Json => println!("{}", to_json(&report)),
            }
            Ok(report.passed)
        }
        Command::Verify {
            check,
            file,
            seed,
            samples,
            format,
        } => {
            let tree = read_tree(&file)?;
            let pool = [tree.clone()];
            let verdicts = match check {
                Check::Collapse => vec![verify_collapse(&tree)?],
                Check::Yao => {
                    let mut out = Vec::new();
                    for class in Class::ALL {
                        for filter in Filter::ALL {
                            out.push(verify_yao(&tree, class, filter)?);
                        }
                    }
                    out
                }
                Check::WeakBalance => {
                    let wb = is_weakly_balanced(&tree)?;
                    let mut v = Verdict::new("weakly balanced");
                    for c in &wb.checks {
                        v.require(c.holds, || {
                            format!(
                                "at {} ({}), child {} against child {}: {} > {}",
                                c.node,
                                c.gate,
                                c.j,
                                c.k,
                                rational::fmt(&c.lhs),
                                rational::fmt(&c.rhs)
                            )
                        });
                    }
                    let mut out = vec![v];
                    if wb.balanced {
                        out.push(verify_weakly_balanced_collapse(&tree)?);
                    }
                    out
                }
                Check::Chimera => vec![chimera_suite(&pool, seed, samples)?.verdict],
                Check::Replacement => vec![replacement_suite(&pool, seed, samples)?.verdict],
                Check::Mixture => vec![mixture_suite(&pool, seed, samples)?.verdict],
                Check::Product => vec![product_bound_suite(&pool, seed, samples)?.verdict],
            };
            Ok(print_verdicts(&verdicts, format))
        }
        Command::Corpus {
            max_leaves,
            jobs,
            format,
        } => {
            let report = verify_corpus(&CorpusSpec::with_max_leaves(max_leaves), jobs)?;
            match format {
                Format::Text => {
                    println!(
                        "{} trees, {} weakly balanced",
                        report.trees, report.weakly_balanced
                    );
                    let mut names: Vec<String> = Vec::new();
                    for e in &report.entries {
                        for v in &e.verdicts {
                            if !names.contains(&v.name) {
                                names.push(v.name.clone());
                            }
                        }
                    }
                    for name in names {
                        println!("{}", report.combined(&name));
                    }
                }
                Format::Json => println!("{}", to_json(&report)),
            }
            Ok(report.passed)
        }
        Command::Enumerate { file, class } => {
            let tree = read_tree(&file)?;
            let limits = Limits::default();
            let encoded: Vec<String> = match class {
                Class::Directional => enumerate_directional(&tree, &limits)?
                    .iter()
                    .map(|a| a.encode())
                    .collect(),
                Class::DepthFirst => enumerate_depth_first(&tree, &limits)?
                    .iter()
                    .map(|a| a.encode())
                    .collect(),
                Class::General => enumerate_general(&tree, &limits)?
                    .iter()
                    .map(|a| a.encode())
                    .collect(),
            };
            println!("{} {class} algorithms", encoded.len());
            for a in encoded {
                println!("{a}");
            }
            Ok(true)
        }
        Command::Matrix {
            file,
            class,
            filter,
            out,
        } => {
            let tree = read_tree(&file)?;
            let limits = Limits::default();
            let io = |e: io::Error| Error::Parse(format!("{}: {e}", out.display()));
            let sink = fs::File::create(&out).map_err(io)?;
            let (rows, cols) = match class {
                Class::Directional => {
                    let g = MatrixGame::new(&tree, enumerate_directional(&tree, &limits)?, filter)?;
                    g.write_csv(sink)?;
                    (g.rows.len(), g.columns.len())
                }
                Class::DepthFirst => {
                    let g = MatrixGame::new(&tree, enumerate_depth_first(&tree, &limits)?, filter)?;
                    g.write_csv(sink)?;
                    (g.rows.len(), g.columns.len())
                }
                Class::General => {
                    let g = MatrixGame::new(&tree, enumerate_general(&tree, &limits)?, filter)?;
                    g.write_csv(sink)?;
                    (g.rows.len(), g.columns.len())
                }
            };
            println!("wrote {rows} x {cols} matrix to {}", out.display());
            Ok(true)
        }
        Command::RandomTree {
            leaves,
            max_arity,
            seed,
        } => {
            println!("{}", random_tree(leaves, max_arity, seed)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ntree::analysis::{
    build_colored_tree, discriminant_exponent, qo_oracle, qo_verdict, resultant_exponent, resultant_oracle, QoOracle,
    QoVerdict,
};
use ntree::pgood::to_pgood;
use ntree::sections::{curve_sections, reconstruct, section_forest, SectionForest};
use ntree::tree::{build_tree, BuildOptions, NewtonTree};
use ntree::{Error, SparsePoly};

mod bench;

#[derive(Parser)]
#[command(name = "ntree", version, about = "Newton trees of polynomials f(x1..xd, z) over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Dot,
    Json,
}

#[derive(clap::Args)]
struct PolyInput {
    /// Number of x variables.
    #[arg(short = 'd', long = "dim")]
    dim: usize,
    /// Polynomial in x1..xd and z, e.g. "z^2 - x1^3".
    poly: String,
}

#[derive(clap::Args)]
struct TreeInput {
    /// Number of x variables (with a polynomial argument).
    #[arg(short = 'd', long = "dim")]
    dim: Option<usize>,
    /// Read the tree from a JSON file written by `tree --format json`.
    #[arg(long = "tree", conflicts_with = "poly")]
    tree: Option<PathBuf>,
    poly: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Newton tree and render it.
    Tree {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
    },
    /// Build the tree and normalise it to P-good form.
    Pgood {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
    },
    /// Decide quasi-ordinarity from the tree.
    Qo {
        #[command(flatten)]
        input: PolyInput,
        /// Also decide with the discriminant determinant.
        #[arg(long)]
        oracle: bool,
    },
    /// Exponent of the discriminant from the tree.
    Disc {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        oracle: bool,
    },
    /// Exponent of res_z(f, g) from the coloured tree of f g.
    Res {
        #[arg(short = 'd', long = "dim")]
        dim: usize,
        f: String,
        g: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Section forest with x_I treated as a generic constant.
    Sections {
        #[command(flatten)]
        input: TreeInput,
        #[arg(short = 'i', long = "index")]
        index: usize,
    },
    /// The curve sections, one forest per variable.
    CurveSections {
        #[command(flatten)]
        input: TreeInput,
        /// Write section-<j>.json files here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Rebuild a one-arrow tree from curve-section forests.
    Reconstruct {
        #[arg(required = true)]
        forests: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Time the discriminant formula against the determinant over a family.
    Bench {
        /// Largest number of factors; the z-degree is twice this.
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out = Result<(), Failure>;

fn parse(dim: usize, text: &str) -> Result<SparsePoly, Failure> {
    SparsePoly::parse(text, dim).map_err(|e| Failure::Domain(e.into()))
}

fn render(t: &NewtonTree, format: Format) -> String {
    match format {
        Format::Ascii => t.render_ascii(),
        Format::Dot => t.render_dot(),
        Format::Json => format!("{}\n", t.to_json()),
    }
}

pub(crate) fn vec_text(v: &[u64]) -> String {
    if v.len() == 1 {
        return v[0].to_string();
    }
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "match"
    } else {
        "MISMATCH"
    }
}

fn load_tree(input: &TreeInput) -> Result<NewtonTree, Failure> {
    match (&input.tree, &input.poly, input.dim) {
        (Some(path), None, _) => {
            let text =
                fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(NewtonTree::from_json(&text)?)
        }
        (None, Some(poly), Some(d)) => Ok(build_tree(&parse(d, poly)?, BuildOptions::from_env())?),
        (None, Some(_), None) => Err(Failure::Usage("a polynomial needs -d".into())),
        _ => Err(Failure::Usage("give a polynomial or --tree FILE".into())),
    }
}

fn run(cmd: Command) -> Out {
    let opts = BuildOptions::from_env();
    match cmd {
        Command::Tree { input, format } => {
            let t = build_tree(&parse(input.dim, &input.poly)?, opts)?;
            print!("{}", render(&t, format));
        }
        Command::Pgood { input, format } => {
            let t = build_tree(&parse(input.dim, &input.poly)?, opts)?;
            print!("{}", render(&to_pgood(&t)?, format));
        }
        Command::Qo { input, oracle } => {
            let f = parse(input.dim, &input.poly)?;
            let v = qo_verdict(&build_tree(&f, opts)?)?;
            println!("{v}");
            if oracle {
                match qo_oracle(&f)? {
                    QoOracle::QuasiOrdinary(e) => {
                        println!("oracle: quasi-ordinary, exponent {}, {}", vec_text(&e), verdict(v.is_qo()))
                    }
                    QoOracle::NotQuasiOrdinary => {
                        println!("oracle: not quasi-ordinary, {}", verdict(!v.is_qo()))
                    }
                    QoOracle::NonReduced => println!("oracle: non-reduced, no verdict"),
                }
            }
        }
        Command::Disc { input, oracle } => {
            let f = parse(input.dim, &input.poly)?;
            let t = build_tree(&f, opts)?;
            match qo_verdict(&t)? {
                QoVerdict::QuasiOrdinary => {}
                v => return Err(Error::Precondition(v.to_string()).into()),
            }
            let d = discriminant_exponent(&to_pgood(&t)?)?;
            if oracle {
                match qo_oracle(&f)? {
                    QoOracle::QuasiOrdinary(e) => {
                        println!("formula: {}, oracle: {}, {}", vec_text(&d), vec_text(&e), verdict(d == e))
                    }
                    other => println!("formula: {}, oracle: {other:?}, MISMATCH", vec_text(&d)),
                }
            } else {
                println!("formula: {}", vec_text(&d));
            }
        }
        Command::Res { dim, f, g, oracle } => {
            let (f, g) = (parse(dim, &f)?, parse(dim, &g)?);
            let e = resultant_exponent(&build_colored_tree(&f, &g)?)?;
            if oracle {
                match resultant_oracle(&f, &g)? {
                    Some(o) => println!("exponent: {}, oracle: {}, {}", vec_text(&e), vec_text(&o), verdict(e == o)),
                    None => println!("exponent: {}, oracle: not a monomial times a unit, MISMATCH", vec_text(&e)),
                }
            } else {
                println!("exponent: {}", vec_text(&e));
            }
        }
        Command::Sections { input, index } => {
            let t = load_tree(&input)?;
            println!("{}", section_forest(&t, index)?.to_json());
        }
        Command::CurveSections { input, out_dir } => {
            let t = load_tree(&input)?;
            let forests = curve_sections(&t)?;
            match out_dir {
                None => {
                    for f in &forests {
                        println!("{}", f.to_json());
                    }
                }
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
                    for f in &forests {
                        let path = dir.join(format!("section-{}.json", f.variable));
                        fs::write(&path, f.to_json() + "\n")
                            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                        println!("{}", path.display());
                    }
                }
            }
        }
        Command::Reconstruct { forests, format } => {
            let mut loaded: Vec<SectionForest> = Vec::new();
            for path in &forests {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    loaded.push(SectionForest::from_json(line)?);
                }
            }
            loaded.sort_by_key(|f| f.variable);
            print!("{}", render(&reconstruct(&loaded)?, format));
        }
        Command::Bench { max_k, out } => bench::run(max_k, out.as_deref())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error [{}]: {e}", e.name());
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}

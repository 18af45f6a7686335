use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use openbook_core::pushoff::{apply_schedule, build_schedule, classify, StepKind};
use openbook_core::{CurveKind, CurveRef, MonodromyWord, OpenBook, Sign, Surface, Twist};

use openbook_cli::check::{builtin_suites, check_document, CheckOptions};
use openbook_cli::render::render;
use openbook_cli::{emit, parse, Document};

#[derive(Parser)]
#[command(name = "openbook-kit", version, about = "Open book and transverse link toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create an open book document.
    New {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        boundary: usize,
        /// Monodromy word, e.g. `+a1,-b1,+d1`.
        #[arg(long)]
        word: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sub-binding realization algorithm on a placement document.
    Pushoff {
        /// Placement document; outputs go to `<stem>.cert.obk` and
        /// `<stem>.book.obk` next to it.
        input: PathBuf,
    },
    /// Draw a document as SVG.
    Render {
        input: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check documents and built-in invariant suites; exit 0 iff all pass.
    Check {
        inputs: Vec<PathBuf>,
        /// `all`: exhaustively permute certificate schedules with <= 4 steps.
        #[arg(long)]
        permutations: Option<String>,
    },
}

/// Usage errors exit 2, domain violations exit 1.
enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
            CliError::Domain(message) => {
                eprintln!("error: {message}");
                ExitCode::from(1)
            }
        }
    }
}

fn parse_word_spec(spec: &str, page: &Surface) -> Result<MonodromyWord, CliError> {
    let mut twists = Vec::new();
    let mut column = 1usize;
    for (i, token) in spec.split(',').enumerate() {
        let err = |message: String| {
            CliError::Usage(format!("word spec line 1 column {column}: {message}"))
        };
        let mut chars = token.chars();
        let sign = match chars.next() {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return Err(err(format!("twist `{token}` must start with + or -"))),
        };
        let label: openbook_core::BasisLabel =
            chars.as_str().parse().map_err(|e: String| err(e))?;
        let homology = page
            .unit_class(label)
            .ok_or_else(|| err(format!("label `{label}` is not in the page basis")))?;
        twists.push(Twist {
            curve: CurveRef {
                id: format!("w{}", i + 1),
                homology,
                kind: CurveKind::StabilizationCurve,
                orientation: Sign::Plus,
            },
            sign,
        });
        column += token.len() + 1;
    }
    Ok(MonodromyWord { twists })
}

fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_new(
    genus: usize,
    boundary: usize,
    word: Option<&str>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let page = Surface::new(genus, boundary).map_err(|e| CliError::Usage(e.to_string()))?;
    let word = match word {
        Some(spec) => parse_word_spec(spec, &page)?,
        None => MonodromyWord::empty(),
    };
    let ob = OpenBook::with_default_bindings(page)
        .set_word(word)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let text = emit(&Document::OpenBook(ob)).map_err(|e| CliError::Domain(e.to_string()))?;
    write_output(out, &text)
}

fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    input.with_file_name(format!("{stem}.{suffix}.obk"))
}

fn cmd_pushoff(input: &Path) -> Result<(), CliError> {
    let placement = match read_document(input)? {
        Document::Placement(p) => p,
        other => {
            return Err(CliError::Domain(format!(
                "{}: expected a placement document, found {}",
                input.display(),
                other.kind()
            )))
        }
    };
    let violations = placement.validate();
    if !violations.is_empty() {
        let mut message = format!("{}: invalid placement", input.display());
        for violation in violations {
            message.push_str(&format!("\n  {violation}"));
        }
        return Err(CliError::Domain(message));
    }
    let case = classify(&placement).map_err(|e| CliError::Domain(e.to_string()))?;
    let cert = build_schedule(&placement).map_err(|e| CliError::Domain(e.to_string()))?;
    let (realized, cert) =
        apply_schedule(&placement, &cert).map_err(|e| CliError::Domain(e.to_string()))?;

    let aux = cert
        .steps
        .iter()
        .filter(|s| s.kind == StepKind::AuxBoundaryParallel)
        .count();
    let cert_text =
        emit(&Document::Certificate(cert.clone())).map_err(|e| CliError::Domain(e.to_string()))?;
    let book_text =
        emit(&Document::OpenBook(realized)).map_err(|e| CliError::Domain(e.to_string()))?;
    write_output(Some(&sibling(input, "cert")), &cert_text)?;
    write_output(Some(&sibling(input, "book")), &book_text)?;
    println!(
        "case={case} steps={} aux={aux} order_free={}",
        cert.steps.len(),
        cert.order_free
    );
    Ok(())
}

fn cmd_render(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let doc = read_document(input)?;
    let svg = render(&doc).map_err(|e| CliError::Domain(e.to_string()))?;
    write_output(out, &svg)
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("OPENBOOK_KIT_SEED") {
        Ok(value) => value
            .parse()
            .map_err(|_| CliError::Usage(format!("OPENBOOK_KIT_SEED `{value}` is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn cmd_check(inputs: &[PathBuf], permutations: Option<&str>) -> Result<bool, CliError> {
    let permutations_all = match permutations {
        None => false,
        Some("all") => true,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--permutations accepts `all`, not `{other}`"
            )))
        }
    };
    let options = CheckOptions {
        seed: seed_from_env()?,
        permutations_all,
    };
    let mut entries = builtin_suites(&options);
    for input in inputs {
        let text = std::fs::read_to_string(input)
            .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
        let name = input.display().to_string();
        entries.extend(check_document(&name, &text, &options));
    }
    let mut all_pass = true;
    for entry in &entries {
        if entry.pass {
            println!("PASS {}", entry.name);
        } else {
            all_pass = false;
            println!("FAIL {}: {}", entry.name, entry.detail);
        }
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::New {
            genus,
            boundary,
            word,
            out,
        } => cmd_new(*genus, *boundary, word.as_deref(), out.as_deref()),
        Command::Pushoff { input } => cmd_pushoff(input),
        Command::Render { input, out } => cmd_render(input, out.as_deref()),
        Command::Check {
            inputs,
            permutations,
        } => match cmd_check(inputs, permutations.as_deref()) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

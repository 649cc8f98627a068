use clap::{Parser, Subcommand};
use interlam_cli::{repl, run_command, Cmd, SessionConfig, EXIT_ERROR};
use interlam_core::ty::TheoryId;
use interlam_core::typing::SystemId;
use interlam_core::Rel;

/// Typechecker and reducer for an intersection-typed lambda calculus with
/// strong pairs, projections and explicit coercions.
#[derive(Parser)]
#[command(name = "interlam", version, about)]
struct Args {
    /// Type theory: CD, CDS, CDV or BCD
    #[arg(long, global = true)]
    theory: Option<String>,

    /// Strong-pair relation: syn, beta or betaeta
    #[arg(long, global = true)]
    relation: Option<String>,

    /// Step budget for normalization and conversion checks
    #[arg(long, global = true)]
    fuel: Option<u64>,

    /// Ambient bindings, e.g. "x:a, f:a -> b"
    #[arg(long, global = true)]
    basis: Option<String>,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Print one (position, kind, term) record per reduction step
    #[arg(long, global = true)]
    trace: bool,

    /// key=value configuration file, overridden by the flags above
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct the type of a term
    Type {
        term: String,
        /// with --json, emit the erased assignment derivation instead of
        /// the typed one
        #[arg(long)]
        curry: bool,
    },
    /// Check a term against a type (structural comparison)
    Check { term: String, r#type: String },
    /// Erase a term to its pure skeleton
    Essence { term: String },
    /// Contract the leftmost-outermost redex once
    Reduce {
        term: String,
        /// also contract eta redexes
        #[arg(long)]
        eta: bool,
    },
    /// Reduce to normal form
    Normalize {
        term: String,
        /// step strong-pair components together
        #[arg(long)]
        sync: bool,
        /// also contract eta redexes
        #[arg(long)]
        eta: bool,
    },
    /// Eliminate coercions and report the coherence check
    Translate { term: String },
    /// Decide the subtype relation between two types
    Subtype { lhs: String, rhs: String },
    /// Run a golden corpus file
    Corpus { path: String },
    /// Interactive loop
    Repl,
}

fn build_config(args: &Args) -> Result<SessionConfig, String> {
    let mut cfg = SessionConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        cfg.apply_config_text(&text)?;
    }
    let mut theory = cfg.system.theory_id();
    let mut relation = cfg.system.relation();
    if let Some(t) = &args.theory {
        theory = TheoryId::parse(t).ok_or_else(|| format!("unknown theory `{t}`"))?;
    }
    if let Some(r) = &args.relation {
        relation = Rel::parse(r).ok_or_else(|| format!("unknown relation `{r}`"))?;
    }
    cfg.system = SystemId::new(theory, relation)
        .ok_or_else(|| format!("`{theory}` does not admit the `{relation}` relation"))?;
    if let Some(f) = args.fuel {
        cfg.fuel = f;
    }
    if let Some(b) = &args.basis {
        cfg.basis_src = b.clone();
    }
    cfg.json |= args.json;
    cfg.trace |= args.trace;
    Ok(cfg)
}

fn main() {
    let args = Args::parse();
    let mut cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(EXIT_ERROR);
        }
    };
    let cmd = match args.command {
        Command::Type { term, curry } => Cmd::Type { term, curry },
        Command::Check { term, r#type } => Cmd::Check { term, ty: r#type },
        Command::Essence { term } => Cmd::Essence { term },
        Command::Reduce { term, eta } => Cmd::Reduce { term, eta },
        Command::Normalize { term, sync, eta } => Cmd::Normalize { term, sync, eta },
        Command::Translate { term } => Cmd::Translate { term },
        Command::Subtype { lhs, rhs } => Cmd::Subtype { lhs, rhs },
        Command::Corpus { path } => Cmd::Corpus { path },
        Command::Repl => {
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            let mut output = std::io::stdout();
            if let Err(e) = repl(&mut cfg, &mut input, &mut output) {
                eprintln!("error: {e}");
                std::process::exit(EXIT_ERROR);
            }
            return;
        }
    };
    let out = run_command(&cfg, &cmd);
    print!("{}", out.text);
    std::process::exit(out.code);
}

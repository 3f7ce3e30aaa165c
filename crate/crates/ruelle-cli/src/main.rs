//! ruelle0: lead terms of twisted Ruelle zeta functions at s = 0.
//!
//! Exit codes: 0 success, 1 input error, 2 computation error, 3 failed check.

mod commands;
mod config;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Args, Parser, Subcommand};

use commands::{CharacterChoice, FriedInstance, Globals};
use render::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "ruelle0", version, about = "Order and lead coefficient of twisted Ruelle zeta functions at s = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Comparison tolerance, within [1e-14, 1e-6].
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lead term for a signature and multiplier document (.toml or .json).
    Orbifold { document: PathBuf },
    /// Torsion against |R(0)| for Seifert fibered spaces.
    Fried {
        #[command(subcommand)]
        family: FriedFamily,
    },
    /// Γ₀(N) with a Dirichlet character.
    Congruence(CongruenceArgs),
    /// Seeded identity suites.
    Identities {
        /// sine-products, factor-duality, h-symmetry or partition; all when omitted.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum FriedFamily {
    /// Irreducible SL(m) representations; defaults to g=1, ν=2, m=2, a=1, α={0,1}.
    Kitano {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        /// Exceptional fiber ν:β, repeatable.
        #[arg(long = "fiber")]
        fibers: Vec<String>,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        a: i64,
        /// Residues per fiber, e.g. "0,1;2,0".
        #[arg(long)]
        residues: Option<String>,
        /// Random draws instead of one instance.
        #[arg(long, num_args = 0..=1, default_missing_value = "200")]
        fuzz: Option<usize>,
    },
    /// ρ_{2N} representations; defaults to g=1, ν=2, η=1, N=1.
    Yamaguchi {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        /// Fiber orders, e.g. "2,3".
        #[arg(long, default_value = "2")]
        orders: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Odd η_j coprime to ν_j, e.g. "1,5".
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long, num_args = 0..=1, default_missing_value = "200")]
        fuzz: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct CongruenceArgs {
    #[arg(long)]
    level: u64,
    /// Exponents on the canonical generators, e.g. "1,2".
    #[arg(long, conflicts_with_all = ["trivial", "sweep"])]
    character: Option<String>,
    #[arg(long, conflicts_with = "sweep")]
    trivial: bool,
    /// Every character mod N in canonical order.
    #[arg(long)]
    sweep: bool,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| anyhow!("{what}: '{x}' is not valid"))).collect()
}

fn fried_instance(family: FriedFamily) -> anyhow::Result<(FriedInstance, Option<usize>)> {
    Ok(match family {
        FriedFamily::Kitano { genus, fibers, m, a, residues, fuzz } => {
            let fibers: Vec<(u32, i64)> = if fibers.is_empty() {
                vec![(2, 1)]
            } else {
                fibers
                    .iter()
                    .map(|f| {
                        let (nu, beta) = f.split_once(':').ok_or_else(|| anyhow!("--fiber: expected ν:β, got '{f}'"))?;
                        Ok((nu.trim().parse()?, beta.trim().parse()?))
                    })
                    .collect::<anyhow::Result<_>>()?
            };
            let residues = match residues {
                Some(r) => r.split(';').map(|row| list(row, "--residues")).collect::<anyhow::Result<_>>()?,
                None if fibers == [(2, 1)] && m == 2 => vec![vec![0, 1]],
                None => bail!("--residues is required with custom fibers or m"),
            };
            (FriedInstance::Kitano { genus, fibers, m, a, residues }, fuzz)
        }
        FriedFamily::Yamaguchi { genus, orders, n, eta, fuzz } => {
            (FriedInstance::Yamaguchi { genus, orders: list(&orders, "--orders")?, n, eta: list(&eta, "--eta")? }, fuzz)
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    if !(1e-14..=1e-6).contains(&cli.tolerance) {
        bail!("--tolerance {} outside [1e-14, 1e-6]", cli.tolerance);
    }
    let g = Globals { tolerance: cli.tolerance, seed: cli.seed };
    match cli.command {
        Command::Orbifold { document } => commands::orbifold(&document),
        Command::Fried { family } => {
            let (inst, fuzz) = fried_instance(family)?;
            commands::fried(inst, fuzz, &g)
        }
        Command::Congruence(a) => {
            let choice = if a.sweep {
                CharacterChoice::Sweep
            } else if let Some(c) = a.character {
                CharacterChoice::Exponents(list(&c, "--character")?)
            } else {
                CharacterChoice::Trivial
            };
            commands::congruence(a.level, choice, &g)
        }
        Command::Identities { family, samples } => commands::identities(family, samples, &g),
    }
}

/// 2 when the chain holds a library error raised by a singularity, else 1.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ruelle_zero::Error>() {
            return if e.is_input_error() { 1 } else { 2 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    let out = cli.out.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let text = report.render(format);
    let written = match &out {
        Some(p) => std::fs::write(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    match report.pass {
        Some(false) => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    }
}

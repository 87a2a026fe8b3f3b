use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convprod::approx::Method;
use convprod::gallery::KernelId;
use convprod_bench::{
    compare, compare_csv, rate, spectrum, timing, timing_csv, write_output, Config, MList, Result,
};

#[derive(Parser)]
#[command(name = "convprod", version, about = "Benchmarks for convolution-product expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operator spectrum as `index,sigma`.
    Spectrum(Flags),
    /// Error, cost and fitted slope over a list of orders.
    Rate(Flags),
    /// Dense versus fast apply wall time over a list of grid sizes.
    Timing(Flags),
    /// Every method side by side over a list of orders.
    Compare(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// Grid size; a comma list for `timing`.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated orders.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    alpha: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random timing inputs.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn resolve(self) -> Result<Config> {
        let base = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        Ok(base.overridden_by(Config {
            kernel: self.kernel,
            method: self.method,
            n: self.n.map(MList::Text),
            m: self.m.map(MList::Text),
            alpha: self.alpha,
            out: self.out,
            seed: self.seed,
        }))
    }
}

fn kernel(c: &Config) -> Result<KernelId> {
    Ok(c.kernel.as_deref().unwrap_or("gaussian").parse()?)
}

fn method(c: &Config) -> Result<Method> {
    Ok(c.method.as_deref().unwrap_or("spline").parse()?)
}

fn list(v: &Option<MList>, default: &[usize]) -> Result<Vec<usize>> {
    v.as_ref().map_or_else(|| Ok(default.to_vec()), MList::values)
}

fn single(v: &Option<MList>, flag: &str, default: usize) -> Result<usize> {
    v.as_ref().map_or(Ok(default), |l| l.single(flag))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(flags) => {
            let c = flags.resolve()?;
            let csv = spectrum(kernel(&c)?, single(&c.n, "n", 256)?)?;
            write_output(&csv, c.out.as_deref())
        }
        Command::Rate(flags) => {
            let c = flags.resolve()?;
            let report = rate(
                kernel(&c)?,
                method(&c)?,
                &list(&c.m, &[8, 16, 32, 64])?,
                single(&c.n, "n", 1024)?,
                c.alpha,
            )?;
            write_output(&report.to_csv()?, c.out.as_deref())?;
            let slope = match report.slope {
                Some(s) => format!("slope {s:.6}"),
                None => "slope undefined: fewer than two errors above 1e-12".into(),
            };
            eprintln!("{} {} alpha={}: {slope}", report.kernel, report.method, report.alpha);
            Ok(())
        }
        Command::Timing(flags) => {
            let c = flags.resolve()?;
            let rows = timing(
                kernel(&c)?,
                method(&c)?,
                single(&c.m, "m", 16)?,
                &list(&c.n, &[1024, 2048, 4096])?,
                c.alpha,
                c.seed.unwrap_or(0),
            )?;
            write_output(&timing_csv(&rows)?, c.out.as_deref())
        }
        Command::Compare(flags) => {
            let c = flags.resolve()?;
            let rows = compare(kernel(&c)?, &list(&c.m, &[4, 8, 16, 32])?, single(&c.n, "n", 256)?)?;
            write_output(&compare_csv(&rows)?, c.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

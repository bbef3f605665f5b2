use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixsym::eisenstein::{DEFAULT_MAX_TERMS, DEFAULT_TOLERANCE};
use mixsym::sl2::GroupSpec;
use mixsym_cli::{
    export_space, import_space, parse_family, parse_list, run_suite, write_output, CliError, Format, Suite, SuiteConfig,
};

#[derive(Parser)]
#[command(
    name = "mixsym",
    version,
    about = "Mixed modular symbols: build spaces and run verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a report.
    Verify {
        /// rank, manin, hecke, pairing, eis or all.
        #[arg(long)]
        suite: String,
        /// gamma0 or gamma1.
        #[arg(long, default_value = "gamma0")]
        family: String,
        /// Comma-separated levels.
        #[arg(long, default_value = "")]
        levels: String,
        /// Comma-separated primes for Hecke operators.
        #[arg(long, default_value = "2,3,5,7")]
        primes: String,
        /// Comma-separated odd prime powers for the eis suite.
        #[arg(long, default_value = "5,7,9,11,13,25")]
        pn: String,
        /// Relative tolerance for numeric identities.
        #[arg(long, env = "MMS_TOL")]
        tol: Option<f64>,
        /// Term bound for Dirichlet series.
        #[arg(long, env = "MMS_TERMS", hide = true)]
        terms: Option<usize>,
        /// Treat conjectural checks as assertions.
        #[arg(long)]
        strict: bool,
        /// Report path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// json or markdown.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Write the JSON document of a space.
    Export {
        #[arg(long, default_value = "gamma0")]
        family: String,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a space document and check it against a fresh build.
    Import {
        #[arg(long)]
        path: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Verify {
            suite,
            family,
            levels,
            primes,
            pn,
            tol,
            terms,
            strict,
            out,
            format,
        } => {
            let mut config = SuiteConfig::new(suite.parse::<Suite>()?, parse_family(&family)?, parse_list(&levels)?);
            config.primes = parse_list(&primes)?;
            config.pn = parse_list(&pn)?;
            config.tolerance = tol.unwrap_or(DEFAULT_TOLERANCE);
            config.max_terms = terms.unwrap_or(DEFAULT_MAX_TERMS);
            config.strict = strict;
            config.out = out;
            config.format = format.parse::<Format>()?;
            let report = run_suite(&config)?;
            let text = report.render(config.format);
            match &config.out {
                Some(path) => write_output(path, &text)?,
                None => print!("{text}"),
            }
            if report.passed() {
                Ok(0)
            } else {
                eprintln!("failing items:");
                for item in report.failures() {
                    eprintln!("  {}: {}", item.id, item.detail);
                }
                Ok(1)
            }
        }
        Command::Export { family, level, out } => {
            let spec = GroupSpec::new(parse_family(&family)?, level).map_err(|e| CliError::Usage(e.to_string()))?;
            let doc = export_space(spec, &out)?;
            println!(
                "wrote {spec}: rank {}, {} cusps, to {}",
                doc.basis_rank,
                doc.cusps.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Import { path } => {
            let space = import_space(&path)?;
            println!("{}: rank {}, document matches", space.spec, space.rank());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

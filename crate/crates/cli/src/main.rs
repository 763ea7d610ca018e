use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use overlaynet_cli::output::{write_effective_config, write_results, Header};
use overlaynet_cli::{exit, parse_config, parse_override, Command};

/// Overlaid primary/secondary ad-hoc network simulator.
#[derive(Debug, Parser)]
#[command(name = "overlaynet", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "overlaynet-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seed: u64,
    /// Worker threads for trial evaluation.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
}

fn init_log(path: &std::path::Path, header: &str) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(header.as_bytes())?;
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .parse_default_env()
        .target(env_logger::Target::Pipe(Box::new(file)))
        .init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match parse_config(&cli.config, &cli.overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(exit::CONFIG_ERROR);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.workers as usize).build_global() {
        eprintln!("cannot start {} workers: {e}", cli.workers);
        return ExitCode::from(exit::RUN_ERROR);
    }

    let body = settings.render();
    let header = Header { command: cli.command.as_str(), seed: cli.seed, effective_config: &body };
    let setup = write_effective_config(&cli.out, &header).and_then(|_| init_log(&cli.out.join("run.log"), &header.provenance()));
    if let Err(e) = setup {
        eprintln!("cannot write to {}: {e}", cli.out.display());
        return ExitCode::from(exit::RUN_ERROR);
    }
    log::info!("{} with {} workers", header.command, cli.workers);

    let report = match overlaynet_cli::execute(cli.command, &settings, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                overlaynet::Error::Config(_) | overlaynet::Error::IncompatibleConfigs(_) => exit::CONFIG_ERROR,
                _ => exit::RUN_ERROR,
            });
        }
    };
    if let Err(e) = write_results(&cli.out, &header, &report.table, report.summary.clone()) {
        eprintln!("cannot write results to {}: {e}", cli.out.display());
        return ExitCode::from(exit::RUN_ERROR);
    }
    for line in &report.lines {
        println!("{line}");
    }
    log::info!("wrote {} rows to {}", report.table.rows.len(), cli.out.display());
    if report.pass {
        ExitCode::from(exit::OK)
    } else {
        ExitCode::from(exit::ACCEPTANCE_FAILURE)
    }
}

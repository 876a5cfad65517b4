//! `qrelax`: thermal Lindblad relaxation toolkit.
//!
//! Subcommands: `spectrum`, `evolve`, `asymmetry`, `tkur`, `oracle-check`.
//! Global flags: `--config <path>`, `--output <path>`,
//! `--sigma-form definitional|paper|both`, `--seed <u64>`, plus
//! `--plot-data` (asymmetry) and `--inject-fault` (oracle-check).
//!
//! Exit codes: 0 success, 1 config error, 2 numerical failure,
//! 3 oracle mismatch.

mod commands;
mod config;
mod fmt;

use config::{RunConfig, SigmaFormChoice};
use qrelax::error::Error;
use std::process::ExitCode;

const USAGE: &str = "usage: qrelax <spectrum|evolve|asymmetry|tkur|oracle-check> \
[--config <path>] [--output <path>] [--sigma-form definitional|paper|both] \
[--seed <u64>] [--plot-data] [--inject-fault]";

struct Cli {
    command: String,
    config_path: Option<String>,
    output: Option<String>,
    sigma_form: Option<SigmaFormChoice>,
    seed: Option<u64>,
    plot_data: bool,
    inject_fault: bool,
}

fn parse_args(mut args: impl Iterator<Item = String>) -> Result<Cli, Error> {
    let command = args.next().ok_or_else(|| Error::Config(USAGE.into()))?;
    let mut cli = Cli {
        command,
        config_path: None,
        output: None,
        sigma_form: None,
        seed: None,
        plot_data: false,
        inject_fault: false,
    };
    while let Some(flag) = args.next() {
        let mut value = |name: &str| {
            args.next().ok_or_else(|| Error::Config(format!("flag {name} needs a value")))
        };
        match flag.as_str() {
            "--config" => cli.config_path = Some(value("--config")?),
            "--output" => cli.output = Some(value("--output")?),
            "--sigma-form" => cli.sigma_form = Some(SigmaFormChoice::parse(&value("--sigma-form")?)?),
            "--seed" => {
                let v = value("--seed")?;
                cli.seed = Some(
                    v.parse().map_err(|_| Error::Config(format!("--seed: `{v}` is not a u64")))?,
                )
            }
            "--plot-data" => cli.plot_data = true,
            "--inject-fault" => cli.inject_fault = true,
            other => return Err(Error::Config(format!("unknown flag `{other}`\n{USAGE}"))),
        }
    }
    Ok(cli)
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config `{path}`: {e}")))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.sigma_form {
        cfg.sigma_form = s;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.output {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Error> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write `{path}`: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Domain(_)
        | Error::DimensionCap { .. }
        | Error::Protocol(_)
        | Error::NotLowering(_)
        | Error::NotHermitian(_) => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let cfg = load_config(cli)?;
    match cli.command.as_str() {
        "spectrum" => {
            emit(&cfg, &commands::cmd_spectrum(&cfg)?)?;
            Ok(0)
        }
        "evolve" => {
            emit(&cfg, &commands::cmd_evolve(&cfg)?)?;
            Ok(0)
        }
        "asymmetry" => {
            let (main_csv, plot_csv) = commands::cmd_asymmetry(&cfg)?;
            emit(&cfg, &main_csv)?;
            if cli.plot_data {
                if let Some(plot) = plot_csv {
                    match &cfg.output {
                        Some(path) => {
                            let plot_path = format!("{path}.plot.csv");
                            std::fs::write(&plot_path, plot).map_err(|e| {
                                Error::Config(format!("cannot write `{plot_path}`: {e}"))
                            })?;
                        }
                        None => print!("\n{plot}"),
                    }
                }
            }
            Ok(0)
        }
        "tkur" => {
            emit(&cfg, &commands::cmd_tkur(&cfg)?)?;
            Ok(0)
        }
        "oracle-check" => {
            let (report, failure) = commands::cmd_oracle_check(&cfg, cli.inject_fault)?;
            emit(&cfg, &report)?;
            match failure {
                None => Ok(0),
                Some(m) => {
                    eprintln!(
                        "oracle mismatch: {} deviates by {:.3e} (tolerance {:.1e})",
                        m.quantity, m.deviation, m.tolerance
                    );
                    Ok(3)
                }
            }
        }
        other => Err(Error::Config(format!("unknown command `{other}`\n{USAGE}"))),
    }
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args().skip(1)) {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

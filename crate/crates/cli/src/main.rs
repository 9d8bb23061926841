mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use gwforge::lab::LabError;
use gwforge::oracle::OracleError;
use gwforge::sampler::SampleError;

use args::Cli;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gwforge: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let output = commands::run(&cli.command, cli.format)?;
    let config = serde_json::to_value(&cli.command)?;
    let text = output.render(cli.format, &config);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn budget_exhausted(e: &anyhow::Error) -> bool {
    let sample = |s: &SampleError| matches!(s, SampleError::Exhausted(_) | SampleError::Truncated(_));
    let oracle = |o: &OracleError| matches!(o, OracleError::SupportTooLarge(_));
    if let Some(s) = e.downcast_ref::<SampleError>() {
        return sample(s);
    }
    if let Some(o) = e.downcast_ref::<OracleError>() {
        return oracle(o);
    }
    match e.downcast_ref::<LabError>() {
        Some(LabError::Sample(s)) => sample(s),
        Some(LabError::Oracle(o)) => oracle(o),
        _ => false,
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if budget_exhausted(e) {
        EXIT_BUDGET
    } else {
        EXIT_VALIDATION
    }
}

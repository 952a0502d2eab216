use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use qsdpi_cli::{run, CliError, RunConfig};

fn emit(cfg: &RunConfig) -> Result<bool, CliError> {
    let report = run(cfg)?;
    let text = report.render(cfg.output_format())?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(report.assertion_failed)
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = emit(&cfg);
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("assertion failed: the order was falsified");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use degjc_cli::scenarios::plot_script;
use degjc_cli::{resolve, run, write_file, Args, CliError};

fn execute(args: &Args) -> Result<Option<String>, CliError> {
    let cfg = resolve(args)?;
    for (k, v) in cfg.echo() {
        eprintln!("{k} = {v}");
    }
    let out = run(&cfg)?;
    let csv = out.table.to_csv();
    match &cfg.out {
        Some(path) => {
            write_file(path, &csv)?;
            if let Some(script) = &cfg.plot_script {
                write_file(
                    script,
                    &plot_script(&out.table, &path.display().to_string()),
                )?;
            }
        }
        None => {
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Output {
                    path: "stdout".into(),
                    reason: e.to_string(),
                })?;
            if let Some(script) = &cfg.plot_script {
                write_file(script, &plot_script(&out.table, "-"))?;
            }
        }
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(why)) => {
            eprintln!("error: validation failed: {why}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

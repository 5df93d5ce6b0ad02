use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use iss_certify_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout().lock(), "{err}");
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Usage(err.to_string().trim_end().to_string()));
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("json value serializes");
            // a closed pipe downstream is not a failure of the command
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(outcome.code as u8)
        }
        Err(err) => fail(&err),
    }
}

fn fail(err: &CliError) -> ExitCode {
    let _ = writeln!(std::io::stderr().lock(), "{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

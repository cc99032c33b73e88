use std::io::Write;
use std::process::ExitCode;

use iascan::cli;
use iascan::Error;

fn main() -> ExitCode {
    let spec = match cli::parse_args(std::env::args()) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli::execute(&spec, &mut out) {
        Ok(()) => {
            out.flush().ok();
            ExitCode::SUCCESS
        }
        Err(err @ Error::Usage(_)) => {
            eprintln!("{err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

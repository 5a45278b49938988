use std::io::Write;
use std::process::ExitCode;

use cantorspeed_cli::{run, RunConfig, EXIT_INPUT};
use clap::Parser;

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let outcome = run(&config);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(outcome.render(config.format).as_bytes());
    ExitCode::from(outcome.status as u8)
}

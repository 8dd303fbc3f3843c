use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SSF_LOG", "warn")).init();
    match ssf_cli::Cli::try_parse() {
        Ok(cli) => ssf_cli::run(cli),
        // usage errors share the input-error code; help and version succeed
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(ssf_cli::EXIT_INPUT)
            } else {
                ExitCode::from(ssf_cli::EXIT_OK)
            }
        }
    }
}

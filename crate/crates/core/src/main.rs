use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nlsa::cli::run(std::env::args_os()))
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tt_completion::cli::run(std::env::args_os()) as u8)
}

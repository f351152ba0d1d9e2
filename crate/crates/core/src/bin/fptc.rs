use std::process::ExitCode;

fn main() -> ExitCode {
    fptc::cli::run(std::env::args_os())
}

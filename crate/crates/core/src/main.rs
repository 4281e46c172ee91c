use std::process::ExitCode;

fn main() -> ExitCode {
    deanon::cli::main_with_args(std::env::args_os())
}

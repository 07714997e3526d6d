use std::process::ExitCode;

fn main() -> ExitCode {
    termdisc::cli::main_with_args(std::env::args_os())
}

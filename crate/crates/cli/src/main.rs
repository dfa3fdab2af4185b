use std::process::ExitCode;

fn main() -> ExitCode {
    x1jacobi_cli::run(std::env::args_os())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dualprox_cli::main_with(std::env::args_os()) as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    infokahler_verifier::cli::run(std::env::args_os())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ecolens::cli::main_entry()
}

use std::process::ExitCode;

fn main() -> ExitCode {
    roleplay_bench::cli::main()
}

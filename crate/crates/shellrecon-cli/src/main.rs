use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = shellrecon_cli::args::Cli::parse();
    ExitCode::from(shellrecon_cli::run(&cli))
}

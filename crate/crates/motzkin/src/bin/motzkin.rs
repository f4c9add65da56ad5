use clap::Parser;
use motzkin::cli::{run, Cli, CliError};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        match &e {
            CliError::Usage(msg) => eprintln!("error: {msg}"),
            CliError::Guard(msg) => eprintln!("refused: {msg}"),
            CliError::Verification => eprintln!("verification failed"),
            CliError::Io(err) => eprintln!("io error: {err}"),
        }
        std::process::exit(e.exit_code());
    }
}

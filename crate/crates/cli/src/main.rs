use std::process::ExitCode;

use clap::Parser;
use wardsim_cli::cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (String::new(), String::new());
    let code = dispatch(cli, &mut out, &mut err);
    print!("{out}");
    eprint!("{err}");
    ExitCode::from(code)
}

use std::io;
use std::process::ExitCode;

use clap::Parser;
use reebforge_cli::{run, threads_from_env, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let mut stdout = io::stdout().lock();
    ExitCode::from(run(&cli, &mut stdout) as u8)
}

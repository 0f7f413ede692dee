use clap::Parser;

use fasdnet::cli::{exit_code, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let command_line: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, &command_line) {
        Ok(text) => print!("{text}"),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}

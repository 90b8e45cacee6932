use clap::Parser;
use readgauge_cli::app::{error_line, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("{}", error_line(&e));
        std::process::exit(1);
    }
}

use clap::Parser;

use betadct::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let filter = cli.effective_log_level();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&filter)).init();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(err.exit_code());
    }
}

use clap::Parser;

use bgm_cli::{cmd_augment, cmd_preview, cmd_verify, Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Augment(args) => cmd_augment(args),
        Command::Preview(args) => cmd_preview(args),
        Command::Verify(args) => cmd_verify(args),
    };
    std::process::exit(code);
}

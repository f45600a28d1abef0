use std::io::Write;

use clap::Parser;
use opencore::cli::{run, Command, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "opencore",
    version,
    about = "Definability queries for the rationals with order, zero and a coding relation"
)]
struct Args {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Certificate depth
    #[arg(long, global = true, default_value_t = 10)]
    depth: u32,
    /// Anchor limit of the weak monadic oracle
    #[arg(long, global = true, default_value_t = 16)]
    anchors: usize,
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let args = Args::parse();
    let cfg = RunConfig {
        anchors: args.anchors,
        seed: args.seed,
        depth: args.depth,
        format: args.format,
    };
    match run(&args.command, &cfg) {
        Ok(rec) => {
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{}", rec.render(cfg.format));
            std::process::exit(rec.status);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.status());
        }
    }
}

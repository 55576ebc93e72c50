use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use abtheme::parser::parse;
use abtheme::runner::{run, Format, Options, RunError};
use abtheme::suite;

#[derive(Parser)]
#[command(name = "abtheme", version, about = "Analyzer for (a,b)-module themes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Input document.
    file: String,
    /// Truncation order for all series arithmetic.
    #[arg(long, default_value_t = 24)]
    order: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Re-run at order + margin and require agreement.
    #[arg(long, default_value_t = 6)]
    check_order_margin: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze the generators named by `analyze` commands in the document.
    Analyze(Common),
    /// Compute pushforwards named by `pushforward` commands.
    Pushforward(Common),
    /// Compute annihilators named by `annihilator` commands.
    Annihilator(Common),
    /// Run the built-in verification suite.
    VerifySuite,
}

fn execute(common: &Common, keep: fn(&abtheme::ast::Command) -> bool) -> ExitCode {
    let text = match fs::read_to_string(&common.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("input error: {}: {}", common.file, e);
            return ExitCode::from(2);
        }
    };
    let mut doc = match parse(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("input error: {}: {}", common.file, e);
            return ExitCode::from(2);
        }
    };
    doc.commands.retain(keep);
    if doc.commands.is_empty() {
        eprintln!("input error: no matching command in {}", common.file);
        return ExitCode::from(2);
    }
    let opts = Options {
        order: common.order,
        margin: common.check_order_margin,
        format: match common.format {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
        },
    };
    match run(&doc, &opts) {
        Ok(blocks) => {
            for b in blocks {
                println!("{}", b.trim_end());
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Input(m)) => {
            eprintln!("input error: {}", m);
            ExitCode::from(2)
        }
        Err(RunError::Math(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Cmd::Analyze(c) => execute(c, |cmd| matches!(cmd, abtheme::ast::Command::Analyze(_))),
        Cmd::Annihilator(c) => {
            execute(c, |cmd| matches!(cmd, abtheme::ast::Command::Annihilator(_)))
        }
        Cmd::Pushforward(c) => execute(c, |cmd| {
            matches!(cmd, abtheme::ast::Command::Pushforward { .. })
        }),
        Cmd::VerifySuite => {
            let results = suite::run_all();
            let mut failed = 0;
            for (name, res) in &results {
                match res {
                    Ok(()) => println!("{}: PASS", name),
                    Err(m) => {
                        println!("{}: FAIL ({})", name, m);
                        failed += 1;
                    }
                }
            }
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

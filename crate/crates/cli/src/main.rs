mod args;
mod commands;
mod failure;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    let jobs = cli.jobs;
    if jobs == Some(0) {
        return Err(Failure::input("invalid_argument", "--jobs must be at least 1"));
    }
    ontosub::par::with_jobs(jobs, || match &cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::BuildCorpus(a) => commands::build_corpus_cmd(a, jobs),
        Command::BuildEval(a) => commands::build_eval_cmd(a, jobs),
        Command::BuildEvalInter(a) => commands::build_eval_inter_cmd(a, jobs),
        Command::Evaluate(a) => commands::evaluate_cmd(a, jobs),
        Command::Verbalize(a) => commands::verbalize_cmd(a),
        Command::ServeLexical(a) => commands::serve_lexical(a),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let rendered = err.render().to_string();
            let message: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let message = message.join(" ");
            eprintln!("{}", Failure::input("invalid_argument", message.trim_start_matches("error: ")).to_line());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_line());
            ExitCode::from(failure.exit_code())
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use fockops_cli::report::{write_csv, write_ndjson};
use fockops_cli::{run_suite, Format, Options};

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let flags = Options::parse();
    let opts = match &flags.config {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| Options::from_json(&t).map_err(|e| e.to_string()))
        {
            Ok(cfg) => flags.or(cfg),
            Err(e) => return usage(format!("config {}: {e}", path.display())),
        },
        None => flags,
    };
    let Some(suite) = opts.suite else {
        return usage("no suite given (use --suite or the config key \"suite\")");
    };
    let reports = run_suite(suite, &opts);
    let sink: Box<dyn Write> = match &opts.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => return usage(format!("{}: {e}", path.display())),
        },
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let written = match opts.format.unwrap_or_default() {
        Format::Json => write_ndjson(&mut sink, &reports).map_err(|e| e.to_string()),
        Format::Csv => write_csv(&mut sink, &reports).map_err(|e| e.to_string()),
    };
    if let Err(e) = written.and_then(|_| sink.flush().map_err(|e| e.to_string())) {
        eprintln!("error: writing reports: {e}");
        return ExitCode::from(1);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

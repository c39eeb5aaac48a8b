use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use larmour_cli::{execute, Args};
use serde_json::json;

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args, std::io::stdin().lock()) {
        Ok(out) => {
            emit(&serde_json::to_string_pretty(&out.json).expect("output serializes"));
            eprintln!("{}", out.summary);
            let failed = out.json.get("failed").and_then(|f| f.as_u64()).unwrap_or(0);
            if failed > 0 {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let doc = json!({ "error": { "kind": e.kind_name(), "message": e.to_string(), "exit_code": e.exit_code() } });
            emit(&serde_json::to_string_pretty(&doc).expect("error serializes"));
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Write to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

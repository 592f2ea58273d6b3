//! Runs every acceptance suite and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use mirrorflow::acceptance::{AcceptanceOptions, SUITES};

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let opts = AcceptanceOptions::default();
    let mut failed = Vec::new();
    let mut known = Vec::new();
    for (i, suite) in SUITES.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| suite.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match (suite.run)(&opts) {
            Ok(rows) => {
                let pass = rows.iter().all(|r| r.pass);
                let detail = rows
                    .iter()
                    .map(|r| {
                        format!(
                            "{}={:.6} [{}]{}",
                            r.check,
                            r.measured,
                            r.target,
                            if r.pass { "" } else { " ✗" }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("; ");
                (pass, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let status = match (pass, suite.known_deviation) {
            (true, _) => "PASS".to_string(),
            (false, None) => "FAIL".to_string(),
            (false, Some(why)) => format!("FAIL (known deviation: {why})"),
        };
        println!(
            "criterion {:>2} {:<20} {} ({:.1}s) {}",
            i + 1,
            suite.name,
            status,
            start.elapsed().as_secs_f64(),
            detail
        );
        if !pass {
            match suite.known_deviation {
                Some(_) => known.push(suite.name),
                None => failed.push(suite.name),
            }
        }
    }
    if !known.is_empty() {
        println!("known deviations: {}", known.join(", "));
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

//! Drives the `modgsp` command line in-process: writes the toy fixture, then
//! runs each study subcommand on it and lists the files produced.
//!
//! ```bash
//! cargo run --example cli_pipeline -- /tmp/modgsp-out
//! ```

use modgsp::app::main_with_args;
use std::path::PathBuf;

fn main() {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("modgsp-example"));
    let o = out.to_str().expect("utf-8 output path");
    let runs: [&[&str]; 6] = [
        &["fixture", "toy10"],
        &["spectrum", "--fixture", "toy10", "--operator", "q+", "--operator", "q-"],
        &["filter", "--fixture", "toy10", "--filter", "modular", "--filter", "band:1:3:flat"],
        &["sample", "--fixture", "toy10", "--bandwidth", "3", "--m", "4", "--compare"],
        &["surrogate", "--fixture", "toy10", "--count", "500", "--mode", "modular-only"],
        &["denoise", "--fixture", "toy10", "--sigma2", "0.01,0.25"],
    ];
    for args in runs {
        let mut full = vec!["modgsp", "--seed", "1", "--out-dir", o];
        full.extend_from_slice(args);
        let code = main_with_args(full);
        println!("modgsp {:<60} exit {code}", args.join(" "));
    }
    let mut files: Vec<_> = std::fs::read_dir(&out)
        .map(|d| d.filter_map(|e| e.ok()).map(|e| e.file_name()).collect())
        .unwrap_or_default();
    files.sort();
    for f in files {
        println!("  {}", f.to_string_lossy());
    }
}

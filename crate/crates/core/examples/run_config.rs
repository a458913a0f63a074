//! Drives the experiment runner from code: parse a config, run it, read back
//! the checks. Pass a config path, or run the built-in swap-decay config.

use gpeps::experiments::{parse_config, run_experiment};

const DEFAULT: &str = r#"
experiment = "swap-decay"
[parameters]
r_i = 1.0
k_max = 40
"#;

fn main() -> gpeps::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| gpeps::Error::Parse(format!("{path}: {e}")))?,
        None => DEFAULT.to_string(),
    };
    let parsed = parse_config(&text)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let dir = std::env::temp_dir().join("gpeps-run-config");
    let outcome = run_experiment(&parsed.config, &dir, false)?;
    for c in &outcome.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

// gen → check → report through the library entry points used by the binary.

use chen_bounds::cli::{run, Cli};
use clap::Parser;

pub fn run_example() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join(format!("chen-bounds-example-{}", std::process::id()));
    let gen = dir.join("instances");
    let report = dir.join("report.json");
    let (gen_s, report_s) = (gen.display().to_string(), report.display().to_string());
    for args in [
        vec!["chen-bounds", "gen", "--n", "3", "--m", "4", "--count", "4", "--seed", "1", "--out", &gen_s],
        vec!["chen-bounds", "check", &gen_s, "--samples", "512", "--out", &report_s],
        vec!["chen-bounds", "report", &report_s],
    ] {
        run(&Cli::try_parse_from(args)?)?;
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

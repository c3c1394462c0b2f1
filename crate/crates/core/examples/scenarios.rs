//! Running a registered scenario from code, with an override, and reading
//! the verdict back from the artifacts.

use nonneg_cocycle::scenario::{find, registry, run_scenario, verdict_from_dir};

fn main() -> nonneg_cocycle::Result<()> {
    for s in registry() {
        println!("{:20} {:15} {}", s.name, s.expected.tag(), s.plan.kind());
    }
    let s = find("nolimit-geometric")?.with_overrides(&["plan.horizon=200000"])?;
    let dir = std::env::temp_dir().join("cocycle-example-nolimit");
    let report = run_scenario(&s, &dir)?;
    println!("{}", report.verdict.line());
    for a in &report.artifacts {
        println!("  wrote {}", a.display());
    }
    assert_eq!(verdict_from_dir(&dir)?, report.verdict);
    Ok(())
}

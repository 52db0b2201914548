//! Running registered experiments from code instead of the command line.

use harmomap::experiments::{list_experiments, registry, run_experiment};

fn main() -> harmomap::Result<()> {
    let out = std::env::temp_dir().join("harmomap-example");
    for name in ["hybrid-symbolic", "boundary-phase", "quantum-map"] {
        let cfg = registry::default_config(name);
        let report = run_experiment(&cfg, Some(&out))?;
        print!("{}", report.summary());
    }
    println!("reports under {}", out.display());
    println!("registered: {}", list_experiments().join(", "));
    Ok(())
}

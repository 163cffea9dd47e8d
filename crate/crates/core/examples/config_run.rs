//! Loads a configuration file (default `configs/reference.cfg`), runs it and
//! writes the series and the final snapshot to a temporary directory.

use std::path::PathBuf;

use euler_align::dynamics::run;
use euler_align::io::{load_config, read_series, write_series, write_snapshot};
use euler_align::kernel::Kernel;

fn main() -> euler_align::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/reference.cfg")));
    let cfg = load_config(&path)?;
    let kernel = Kernel::build(cfg.kernel, cfg.grid)?;
    let out = run(&cfg.initial_state()?, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics)?;

    let dir = std::env::temp_dir().join("euler-align-config-run");
    std::fs::create_dir_all(&dir).map_err(|e| euler_align::Error::Io { path: dir.clone(), source: e })?;
    let series = dir.join(&cfg.output.series);
    write_series(&series, &out.records)?;
    write_snapshot(&dir.join("final.bin"), out.trajectory.last().expect("nonempty"))?;

    let back = read_series(&series)?;
    let (first, last) = (back[0], back[back.len() - 1]);
    println!("{}: {} steps, {}", path.display(), out.steps, out.status.describe());
    println!("e_l2 {:.4e} -> {:.4e}, mass {:.12} -> {:.12}", first.e_l2, last.e_l2, first.mass, last.mass);
    println!("series written to {}", series.display());
    Ok(())
}

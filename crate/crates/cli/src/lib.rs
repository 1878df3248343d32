//! Experiment runner behind the `spinmz` binary.

pub mod config;
pub mod diff;
pub mod experiments;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::json;

pub use config::{Experiment, ExperimentConfig, Format, Scheme};
pub use table::ResultTable;

pub const FLOAT_FORMAT: &str = "{:.11e}";

/// Pool size: explicit setting, else scan points capped at hardware concurrency.
pub fn thread_count(cfg: &ExperimentConfig) -> Result<usize> {
    if let Some(k) = cfg.threads {
        return Ok(k);
    }
    let hw = thread::available_parallelism().map_or(1, |n| n.get());
    Ok(experiments::job_count(cfg)?.clamp(1, hw))
}

/// Run the configured experiment and attach the metadata block.
pub fn execute(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let experiment = cfg.experiment()?;
    let threads = thread_count(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let start = Instant::now();
    let mut table = pool.install(|| experiments::run(cfg))?;
    table.meta = json!({
        "experiment": experiment.name(),
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": threads,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "float_format": FLOAT_FORMAT,
    });
    Ok(table)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Write the table to `cfg.output_path`, or to stdout when unset. CSV output
/// gets a `<out>.meta.json` sidecar. Returns the files written.
pub fn write_outputs(table: &ResultTable, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let body = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()?,
    };
    let Some(out) = &cfg.output_path else {
        std::io::stdout().write_all(body.as_bytes())?;
        return Ok(Vec::new());
    };
    let mut files = vec![(out.clone(), body)];
    if cfg.format == Format::Csv {
        let meta = serde_json::to_string_pretty(&table.meta)? + "\n";
        files.push((sidecar_path(out), meta));
    }
    // stage everything first so a failure leaves no partial output behind
    let mut staged = Vec::new();
    for (path, text) in &files {
        match stage(path, text) {
            Ok(tmp) => staged.push((tmp, path.clone())),
            Err(e) => {
                staged.iter().for_each(|(tmp, _)| drop(fs::remove_file(tmp)));
                return Err(e);
            }
        }
    }
    for (tmp, path) in &staged {
        fs::rename(tmp, path).with_context(|| format!("moving output into {}", path.display()))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

fn stage(path: &Path, text: &str) -> Result<PathBuf> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .with_context(|| format!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        Ok(())
    })();
    if let Err(e) = result {
        drop(fs::remove_file(&tmp));
        return Err(e.context(format!("writing {}", tmp.display())));
    }
    Ok(tmp)
}

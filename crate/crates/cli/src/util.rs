use crate::{Failure, FormatArg, ProtocolArg};
use anyhow::Context;
use mopbd::simulator::{self, PlannerSpec, SimConfig, TaskRecord};
use mopbd::GridMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "MOPBD_OUT_DIR";

pub fn load_map(path: &Path) -> Result<GridMap, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)?;
    GridMap::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_planners(names: &[String], eps: f64) -> Result<Vec<PlannerSpec>, Failure> {
    if names.is_empty() {
        return Err(Failure::Usage("no planner given".into()));
    }
    names
        .iter()
        .map(|n| {
            PlannerSpec::parse(n, eps).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown planner {n:?} (expected mopbd, mopbd-i, mopbd-eps, namoa, namoa-eps or mod)"
                ))
            })
        })
        .collect()
}

pub fn sim_config(
    m: usize,
    seed: u64,
    k: usize,
    protocol: ProtocolArg,
    time_limit: Option<u64>,
) -> Result<SimConfig, Failure> {
    if m < 2 {
        return Err(Failure::Usage("--objectives must be at least 2".into()));
    }
    if k < 1 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let mut config = match protocol {
        ProtocolArg::Ahead => SimConfig::ahead(m, seed),
        ProtocolArg::Multi => SimConfig::multi(m, seed),
    };
    config.moves_per_event = k;
    if let Some(secs) = time_limit {
        config.task_time_limit = Some(Duration::from_secs(secs));
    }
    Ok(config)
}

/// `--out` wins; otherwise `$MOPBD_OUT_DIR/<default_name>` when the variable
/// is set; otherwise no file output.
pub fn resolve_out(out: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(default_name)))
}

pub fn write_records(
    path: &Path,
    format: FormatArg,
    records: &[TaskRecord],
) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(Failure::io)?;
        }
    }
    let file = File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Io)?;
    let w = BufWriter::new(file);
    match format {
        FormatArg::Csv => simulator::write_summary_csv(records, w)
            .map_err(|e| Failure::Io(anyhow::anyhow!("{e}")))?,
        FormatArg::Json => simulator::write_trace_json(records, w).map_err(Failure::io)?,
    }
    Ok(())
}

pub fn format_ext(format: FormatArg) -> &'static str {
    match format {
        FormatArg::Csv => "csv",
        FormatArg::Json => "jsonl",
    }
}

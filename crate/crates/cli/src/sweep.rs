//! Cross-product parameter sweeps. Points run concurrently and the output
//! is sorted by parameter tuple, so the schedule never shows in the data.

use rayon::prelude::*;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::experiments::compute;
use crate::output::{Artifacts, Cell, Format, Table};

pub const DEFAULT_MAX_POINTS: usize = 10_000;

/// Every combination of range values, in range-name order.
fn grid(cfg: &ExperimentConfig) -> CliResult<Vec<Vec<(String, Value)>>> {
    if cfg.ranges.is_empty() {
        return Err(CliError::Config("sweep needs at least one range".into()));
    }
    let cap = cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS);
    let axes = cfg
        .ranges
        .iter()
        .map(|(name, spec)| Ok((name.clone(), spec.values(name)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let total = axes
        .iter()
        .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
        .filter(|&n| n <= cap)
        .ok_or_else(|| CliError::Config(format!("sweep exceeds the cap of {cap} points")))?;

    let mut points = Vec::with_capacity(total);
    for mut index in 0..total {
        let mut point = Vec::with_capacity(axes.len());
        for (name, values) in axes.iter().rev() {
            point.push((name.clone(), values[index % values.len()].clone()));
            index /= values.len();
        }
        point.reverse();
        points.push(point);
    }
    Ok(points)
}

/// Runs every point on a pool of `jobs` threads and concatenates the tables
/// with the swept parameters as leading columns.
pub fn sweep_table(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Table> {
    let points = grid(cfg)?;
    let configs = points
        .iter()
        .map(|point| {
            let mut c = cfg.clone();
            c.ranges.clear();
            for (name, value) in point {
                c.set_parameter(name, value.clone())?;
            }
            c.validate()?;
            Ok(c)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    let results: Vec<CliResult<Table>> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| compute(c).map(|o| o.table))
            .collect()
    });

    let mut keyed = Vec::with_capacity(points.len());
    for (point, result) in points.iter().zip(results) {
        let cells: Vec<Cell> = point
            .iter()
            .map(|(_, v)| Cell::from_json(v).expect("validated range value"))
            .collect();
        keyed.push((cells, result?));
    }
    keyed.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.sort_key().total_cmp(&y.sort_key()))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let names: Vec<&str> = cfg.ranges.keys().map(String::as_str).collect();
    let inner_columns = keyed
        .first()
        .map(|(_, t)| t.columns.clone())
        .unwrap_or_default();
    let mut columns: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    for c in inner_columns {
        // A swept parameter may also appear as a data column; keep one.
        if !columns.contains(&c) {
            columns.push(c);
        }
    }
    let mut table = Table {
        columns: columns.clone(),
        rows: Vec::new(),
    };
    for (cells, inner) in keyed {
        for row in inner.rows {
            let mut full = cells.clone();
            for (col, cell) in inner.columns.iter().zip(row) {
                if !names.contains(&col.as_str()) {
                    full.push(cell);
                }
            }
            table.rows.push(full);
        }
    }
    Ok(table)
}

pub fn sweep(cfg: &ExperimentConfig, format: Format, jobs: usize) -> CliResult<Artifacts> {
    let table = sweep_table(cfg, jobs)?;
    let mut artifacts = Artifacts::new();
    artifacts.add_table(&format!("{}_sweep", cfg.experiment.name()), &table, format);
    Ok(artifacts)
}

use std::path::Path;

use shockdual::fvm::{self, Reconstruction, RunStats};
use shockdual::shock::{DetectedFront, FrontKind};
use shockdual::SpacetimeField;

use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::io::{self, EosInfo, FrontEntry, Manifest, RunInfo};
use crate::preset;

use super::check::all_fronts;
use super::Outcome;

pub fn simulate(cfg: &ScenarioConfig) -> CliResult<(SpacetimeField, RunStats)> {
    let eos = cfg.polytrope()?;
    let grid = cfg.grid()?;
    let init = preset::initial_snapshot(cfg, &grid)?;
    Ok(fvm::run(&grid, &init, &eos, &cfg.solver(), cfg.run.t_end, &cfg.output_times())?)
}

/// `(t, xs)` of the leading shock of each snapshot; `rightmost` picks the
/// largest position, otherwise the smallest.
pub fn trajectory(fronts: &[DetectedFront], rightmost: bool) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for f in fronts.iter().filter(|f| f.kind == FrontKind::Shock) {
        let point = [f.front.t, f.front.xs];
        match out.last_mut() {
            Some(last) if last[0] == point[0] => {
                if (point[1] > last[1]) == rightmost {
                    *last = point;
                }
            }
            _ => out.push(point),
        }
    }
    out
}

/// Manifest describing `field`, whose snapshot tables are written alongside.
pub fn write_manifest(dir: &Path, kind: &str, cfg: &ScenarioConfig, field: &SpacetimeField) -> CliResult<Manifest> {
    let snapshots = io::write_field(dir, field)?;
    let fronts = all_fronts(cfg, field);
    Ok(Manifest {
        schema: io::SCHEMA.into(),
        kind: kind.into(),
        name: cfg.name.clone(),
        eos: EosInfo::of(&field.eos),
        grid: field.grid,
        boundary: field.boundary,
        snapshots,
        trajectory: trajectory(&fronts, true),
        fronts: fronts.iter().map(FrontEntry::of).collect(),
        run: None,
        transform: None,
        warnings: Vec::new(),
    })
}

pub fn run_info(cfg: &ScenarioConfig, stats: &RunStats) -> RunInfo {
    RunInfo {
        t_start: cfg.run.t_start,
        t_end: cfg.run.t_end,
        cfl: cfg.run.cfl,
        reconstruction: match cfg.run.reconstruction {
            Reconstruction::Godunov => "godunov".into(),
            Reconstruction::Muscl => "muscl".into(),
        },
        steps: stats.steps,
        clamps: stats.clamps,
        max_signal_speed: stats.max_signal_speed,
    }
}

pub fn run(cfg: &ScenarioConfig, out: &Path) -> CliResult<Outcome> {
    let (field, stats) = simulate(cfg)?;
    let mut manifest = write_manifest(out, "simulation", cfg, &field)?;
    manifest.run = Some(run_info(cfg, &stats));
    if stats.clamps > 0 {
        manifest.warnings.push(format!("{} density or pressure values were raised to the floor {}", stats.clamps, cfg.run.floor));
    }
    io::write_json(&io::manifest_path(out), &manifest)?;
    let lines = vec![
        format!("{} steps to t = {}, {} snapshots written to {}", stats.steps, cfg.run.t_end, field.snapshots.len(), out.display()),
        format!("{} fronts detected; leading shock positions: {}", manifest.fronts.len(), manifest.trajectory.len()),
    ];
    Ok(Outcome::passed(lines, manifest.warnings.clone()))
}

use std::path::Path;

use shockdual::group::{mapped_times, transform_snapshot, Interpolation, Pullback, PullbackOptions};
use shockdual::SpacetimeField;

use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::io::{self, Manifest, TransformInfo};

use super::simulate::write_manifest;
use super::Outcome;

/// Applies the configured element to `field`, producing one target snapshot
/// at the image of every source time.
pub fn transform(cfg: &ScenarioConfig, field: &SpacetimeField) -> CliResult<Pullback> {
    let g = cfg.group_element()?;
    let opts = PullbackOptions {
        interpolation: cfg.group.interpolation,
        zones: cfg.zones(),
        check_exponent: cfg.group.enforce_exponent,
        ..PullbackOptions::default()
    };
    let (first, last) = match (field.snapshots.first(), field.snapshots.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Ok(transform_snapshot(&g, field, &[], &opts)?),
    };
    let oriented = g.oriented_on(first, last)?;
    let times = mapped_times(&oriented, field)?;
    Ok(transform_snapshot(&g, field, &times, &opts)?)
}

pub fn write(cfg: &ScenarioConfig, source: &str, pull: &Pullback, out: &Path) -> CliResult<Manifest> {
    let mut manifest = write_manifest(out, "transform", cfg, &pull.field)?;
    let zone_samples = pull.in_zone.iter().map(|row| row.iter().filter(|z| **z).count()).sum();
    manifest.transform = Some(TransformInfo {
        source: source.to_string(),
        sigma: cfg.group.sigma,
        sigma_applied: pull.element.sl2.entries(),
        reflect: cfg.group.reflect,
        boost: cfg.group.boost,
        shift: cfg.group.shift,
        interpolation: match cfg.group.interpolation {
            Interpolation::Linear => "linear".into(),
            Interpolation::Cubic => "cubic".into(),
        },
        singular_time: pull.singular_time,
        source_window: [pull.source_window.0, pull.source_window.1],
        target_window: [pull.target_window.0, pull.target_window.1],
        zone_samples,
        exponent_checked: cfg.group.enforce_exponent,
    });
    if !cfg.group.enforce_exponent && !pull.field.eos.is_symmetric() {
        manifest.warnings.push(format!(
            "gamma0 = {} is not 1 + 2/n; the image is not expected to solve the Euler equations",
            pull.field.eos.gamma0()
        ));
    }
    io::write_json(&io::manifest_path(out), &manifest)?;
    Ok(manifest)
}

pub fn run(cfg: &ScenarioConfig, input: &Path, out: &Path) -> CliResult<Outcome> {
    let (_, field) = io::load_field(input)?;
    let pull = transform(cfg, &field)?;
    let manifest = write(cfg, &input.display().to_string(), &pull, out)?;
    let singular = match pull.singular_time {
        Some(t) => format!("singular time t = {t}"),
        None => "no singular time".into(),
    };
    let lines = vec![
        format!(
            "window [{}, {}] mapped to [{}, {}]; {singular}",
            pull.source_window.0, pull.source_window.1, pull.target_window.0, pull.target_window.1
        ),
        format!("{} snapshots on {} cells written to {}", pull.field.snapshots.len(), pull.field.grid.cells, out.display()),
    ];
    Ok(Outcome::passed(lines, manifest.warnings))
}

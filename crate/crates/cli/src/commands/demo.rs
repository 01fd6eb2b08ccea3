//! Explosion → checks → transform → checks on the image → paired comparison.

use std::path::Path;

use serde::Serialize;

use shockdual::shock::{admissibility_with, FrontKind};
use shockdual::{Vec3, Verdict};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::io::{self, EosInfo};

use super::check::{all_fronts, check_field, summarize, write_report, CheckReport, DualElement};
use super::simulate::{run_info, simulate, trajectory, write_manifest};
use super::{transform, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub manifest: String,
    pub report: String,
    /// Charge balances and Euler residuals of the whole field.
    pub field_pass: bool,
    pub field_failures: Vec<String>,
    /// Fronts outside the leading trajectory that miss a tolerance. They are
    /// listed in the check report and do not decide the verdict.
    pub unpaired_failing: usize,
    pub summary: Vec<String>,
}

impl Stage {
    fn of(dir: &str, report: &CheckReport, paired: &[usize]) -> Self {
        let front_failures: Vec<&String> = report.fronts.iter().flat_map(|f| &f.failures).collect();
        Self {
            manifest: format!("{dir}/manifest.json"),
            report: format!("{dir}/check.json"),
            field_pass: report.field_pass,
            field_failures: report.failures.iter().filter(|f| !front_failures.contains(f)).cloned().collect(),
            unpaired_failing: report.fronts.iter().enumerate().filter(|(k, f)| !f.pass() && !paired.contains(k)).count(),
            summary: summarize(report),
        }
    }
}

/// The leading explosion shock at one time next to its image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontPair {
    pub t: f64,
    pub xs: f64,
    pub t_mapped: f64,
    /// Image of `(xs, t)` under the coordinate map.
    pub x_mapped: f64,
    /// Nearest shock detected in the transformed field.
    pub x_detected: Option<f64>,
    pub distance: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub verdict_image: Option<Verdict>,
    /// Jump and admissibility failures of the two fronts.
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub name: String,
    pub eos: EosInfo,
    pub symmetric_exponent: bool,
    /// Set when `gamma0 != 1 + 2/n`: the dual checks are expected to fail.
    pub negative_control: bool,
    pub sigma: [f64; 4],
    pub sigma_applied: [f64; 4],
    pub explosion: Stage,
    pub implosion: Stage,
    /// Leading shock moves monotonically away from the origin.
    pub trajectory_monotone: bool,
    pub pairs: Vec<FrontPair>,
    pub pass: bool,
    pub note: String,
}

pub fn run(cfg: &ScenarioConfig, out: &Path, seed: u64) -> CliResult<Outcome> {
    let eos = cfg.polytrope()?;
    let symmetric = eos.is_symmetric();
    if !symmetric && cfg.group.enforce_exponent {
        return Err(CliError::config(
            None,
            format!(
                "gamma0 = {} is not 1 + 2/n for n = {}; set [group] enforce_exponent = false to run it as a negative control",
                eos.gamma0(),
                eos.dim()
            ),
        ));
    }

    let (field, stats) = simulate(cfg)?;
    let exp_dir = out.join("explosion");
    let mut manifest = write_manifest(&exp_dir, "simulation", cfg, &field)?;
    manifest.run = Some(run_info(cfg, &stats));
    io::write_json(&io::manifest_path(&exp_dir), &manifest)?;
    let sigma = cfg.sl2()?;
    let (exp_report, points) = check_field(cfg, &field, &[DualElement { label: "sigma".into(), sigma }], seed, "explosion/manifest.json")?;
    write_report(&exp_dir, &exp_report, &points)?;

    let pull = transform::transform(cfg, &field)?;
    let imp_dir = out.join("implosion");
    let imp_manifest = transform::write(cfg, "explosion/manifest.json", &pull, &imp_dir)?;
    let inverse = DualElement { label: "sigma_inverse".into(), sigma: pull.element.sl2.inverse() };
    let (imp_report, points) = check_field(cfg, &pull.field, &[inverse], seed, "implosion/manifest.json")?;
    write_report(&imp_dir, &imp_report, &points)?;

    // Pair the leading explosion shock with the nearest image shock at the mapped time.
    // `all_fronts` yields the fronts in the order of the check reports.
    let floor = cfg.tolerances.mass_flux_floor;
    let exp_fronts = all_fronts(cfg, &field);
    let imp_fronts = all_fronts(cfg, &pull.field);
    let tolerance = cfg.tolerances.trajectory_cells * pull.field.grid.dx();
    let leading = trajectory(&exp_fronts, true);
    let mut pairs = Vec::with_capacity(leading.len());
    let (mut exp_paired, mut imp_paired) = (Vec::new(), Vec::new());
    for &[t, xs] in &leading {
        let k = exp_fronts
            .iter()
            .position(|f| f.kind == FrontKind::Shock && f.front.t == t && f.front.xs == xs)
            .expect("trajectory points are detected shocks");
        let src = &exp_fronts[k];
        let (xm, tm) = pull.element.act_coords(&Vec3::new(xs, 0.0, 0.0), t)?;
        let tol_t = 1e-9 * tm.abs().max(1.0);
        let image = imp_fronts
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kind == FrontKind::Shock && (f.front.t - tm).abs() <= tol_t)
            .min_by(|a, b| (a.1.front.xs - xm[0]).abs().total_cmp(&(b.1.front.xs - xm[0]).abs()));
        let verdict = admissibility_with(&src.front, &eos, floor).verdict;
        let verdict_image = image.map(|(_, f)| admissibility_with(&f.front, &pull.field.eos, floor).verdict);
        let distance = image.map(|(_, f)| (f.front.xs - xm[0]).abs());
        let mut failures: Vec<String> = exp_report.fronts[k].failures.iter().map(|f| format!("explosion {f}")).collect();
        exp_paired.push(k);
        if let Some((j, _)) = image {
            failures.extend(imp_report.fronts[j].failures.iter().map(|f| format!("implosion {f}")));
            imp_paired.push(j);
        }
        let pass = distance.is_some_and(|d| d <= tolerance) && verdict_image == Some(verdict) && failures.is_empty();
        pairs.push(FrontPair {
            t,
            xs,
            t_mapped: tm,
            x_mapped: xm[0],
            x_detected: image.map(|(_, f)| f.front.xs),
            distance,
            tolerance,
            verdict,
            verdict_image,
            failures,
            pass,
        });
    }
    let trajectory_monotone = leading.windows(2).all(|w| w[1][1].abs() > w[0][1].abs());
    let explosion = Stage::of("explosion", &exp_report, &exp_paired);
    let implosion = Stage::of("implosion", &imp_report, &imp_paired);

    let pairs_pass = !pairs.is_empty() && pairs.iter().all(|p| p.pass);
    let pass = explosion.field_pass && implosion.field_pass && pairs_pass && trajectory_monotone;
    let note = if symmetric {
        "gamma0 = 1 + 2/n: the image of the explosion is again a weak solution and its fronts obey the dual conditions".to_string()
    } else {
        format!(
            "negative control: gamma0 = {} differs from 1 + 2/n = {}, so the time maps are not symmetries and the dual checks are expected to fail",
            eos.gamma0(),
            eos.symmetric_exponent()
        )
    };
    let report = DemoReport {
        schema: io::SCHEMA,
        kind: "demo-duality",
        name: cfg.name.clone(),
        eos: EosInfo::of(&eos),
        symmetric_exponent: symmetric,
        negative_control: !symmetric,
        sigma: cfg.group.sigma,
        sigma_applied: pull.element.sl2.entries(),
        explosion,
        implosion,
        trajectory_monotone,
        pairs,
        pass,
        note: note.clone(),
    };
    io::write_json(&out.join("demo.json"), &report)?;

    let matched = report.pairs.iter().filter(|p| p.pass).count();
    let worst = report.pairs.iter().filter_map(|p| p.distance).fold(0.0_f64, f64::max);
    let mut lines = Vec::new();
    for (label, stage) in [("explosion", &report.explosion), ("implosion", &report.implosion)] {
        lines.push(format!("{label} checks: field {}", if stage.field_pass { "pass" } else { "fail" }));
        lines.extend(stage.summary.iter().filter(|l| !l.starts_with("verdict")).map(|l| format!("  {l}")));
        lines.push(format!("  fronts off the leading trajectory outside tolerance: {} (see {})", stage.unpaired_failing, stage.report));
    }
    lines.push(format!(
        "front pairs: {matched}/{} pass; positions within {tolerance:.3e} (worst {worst:.3e}), verdicts equal: {}",
        report.pairs.len(),
        report.pairs.iter().all(|p| p.verdict_image == Some(p.verdict))
    ));
    if !trajectory_monotone {
        lines.push("leading shock does not move monotonically outwards".into());
    }
    lines.push(note);
    lines.push(format!("verdict: {}", if pass { "pass" } else { "fail" }));
    let stage_failures = report.explosion.field_failures.iter().map(|f| format!("FAIL explosion {f}"));
    lines.extend(stage_failures.chain(report.implosion.field_failures.iter().map(|f| format!("FAIL implosion {f}"))));
    for p in report.pairs.iter().filter(|p| !p.pass) {
        if p.distance.is_none_or(|d| d > tolerance) {
            lines.push(format!("FAIL pair at t = {}: image front {:?} off the mapped position {:.6}", p.t, p.x_detected, p.x_mapped));
        }
        if p.verdict_image != Some(p.verdict) {
            lines.push(format!("FAIL pair at t = {}: verdict {:?} against image {:?}", p.t, p.verdict, p.verdict_image));
        }
        lines.extend(p.failures.iter().map(|f| format!("FAIL {f}")));
    }
    let mut warnings = manifest.warnings;
    warnings.extend(imp_manifest.warnings);
    warnings.extend(exp_report.warnings);
    warnings.extend(imp_report.warnings);
    Ok(Outcome { pass, warnings, lines })
}

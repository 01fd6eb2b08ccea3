//! Verification of a stored field: jump conditions at detected fronts, dual
//! conditions, admissibility, charge balances and smooth-region residuals.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use shockdual::noether::{charge_balance, euler_residual, ChargeBalance, CurrentFamily};
use shockdual::shock::{
    admissibility_with, detect_fronts, dual_rh_residual, rh_residual_normalized, Admissibility, DetectedFront, FrontKind,
    Residual, DUAL_ROW_NAMES,
};
use shockdual::{Error, Polytrope, Sl2Element, SpacetimeField, Verdict};

use crate::config::{EulerMode, ScenarioConfig};
use crate::error::CliResult;
use crate::io::{self, fmt, EosInfo};

use super::Outcome;

/// An element whose dual conditions are checked at every front.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement {
    pub label: String,
    pub sigma: Sl2Element,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualCheck {
    pub name: String,
    pub value: f64,
    pub normalized: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub enforced: bool,
}

impl ResidualCheck {
    fn new(name: String, r: &Residual, tolerance: f64, enforced: bool) -> Self {
        Self { name, value: r.value, normalized: r.normalized, tolerance, pass: r.normalized.abs() <= tolerance, enforced }
    }

    fn failed(&self) -> bool {
        self.enforced && !self.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCheck {
    pub label: String,
    pub sigma: [f64; 4],
    pub rows: Vec<ResidualCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontCheck {
    pub t: f64,
    pub xs: f64,
    pub s: f64,
    pub kind: String,
    pub tracked: bool,
    /// `|s_tracked - s_mass|` over the fastest characteristic speed relative to the front.
    pub speed_mismatch: Option<f64>,
    pub enforced: bool,
    pub standard: Vec<ResidualCheck>,
    pub dual: Vec<DualCheck>,
    pub admissibility: Admissibility,
    pub admissibility_pass: bool,
    pub failures: Vec<String>,
}

impl FrontCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeCheck {
    #[serde(flatten)]
    pub balance: ChargeBalance,
    pub tolerance: f64,
    pub pass: bool,
    pub enforced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerSummary {
    pub mode: EulerMode,
    pub points: usize,
    /// Points rejected because they lie in a discontinuity zone.
    pub skipped: usize,
    /// Largest `|residual|` of the mass, momentum and energy equations.
    pub max: [f64; 3],
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub name: String,
    pub source: String,
    pub eos: EosInfo,
    pub symmetric_exponent: bool,
    /// Jump tolerance `max(rh_exact, rh_detected * dx)`.
    pub jump_tolerance: f64,
    pub pass: bool,
    /// Charge balances and Euler residuals, leaving out the fronts.
    pub field_pass: bool,
    pub fronts: Vec<FrontCheck>,
    pub charge_balance: Vec<ChargeCheck>,
    pub euler: EulerSummary,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

/// One evaluated Euler residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerPoint {
    pub t: f64,
    pub x: f64,
    pub residual: [f64; 3],
}

pub fn jump_tolerance(cfg: &ScenarioConfig, dx: f64) -> f64 {
    cfg.tolerances.rh_exact.max(cfg.tolerances.rh_detected * dx)
}

/// Dilatation and expansion are conservation laws only for `gamma0 = 1 + 2/n`.
fn conserved(family: CurrentFamily, symmetric: bool) -> bool {
    symmetric || !matches!(family, CurrentFamily::Dilatation | CurrentFamily::Expansion)
}

fn random_element(rng: &mut ChaCha8Rng, t: f64) -> Sl2Element {
    loop {
        let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if e[0] * e[3] - e[1] * e[2] > 0.05 {
            if let Ok(s) = Sl2Element::new(e[0], e[1], e[2], e[3]) {
                if s.denominator(t).abs() > 0.2 {
                    return s;
                }
            }
        }
    }
}

/// Tracked speed against the mass jump speed, relative to `max |u - s| + c`
/// over both sides.
pub fn speed_mismatch(det: &DetectedFront, eos: &Polytrope) -> Option<f64> {
    let (s, m) = (det.s_tracked?, det.s_mass?);
    let f = &det.front;
    let scale = [&f.left, &f.right].iter().map(|w| (w.u1() - s).abs() + eos.sound_speed(w)).fold(0.0, f64::max);
    (scale > 0.0).then(|| (s - m).abs() / scale)
}

/// Detected fronts of every snapshot, speeds tracked from the previous one.
pub fn all_fronts(cfg: &ScenarioConfig, field: &SpacetimeField) -> Vec<DetectedFront> {
    let det = cfg.detect();
    let mut out = Vec::new();
    for (k, snap) in field.snapshots.iter().enumerate() {
        let prev = if k > 0 { Some(&field.snapshots[k - 1]) } else { None };
        out.extend(detect_fronts(&field.grid, snap, prev, &det).fronts);
    }
    out
}

/// Runs every enabled check on `field`.
pub fn check_field(
    cfg: &ScenarioConfig,
    field: &SpacetimeField,
    duals: &[DualElement],
    seed: u64,
    source: &str,
) -> CliResult<(CheckReport, Vec<EulerPoint>)> {
    let eos = &field.eos;
    let symmetric = eos.is_symmetric();
    let tol = jump_tolerance(cfg, field.grid.dx());
    let families: Vec<CurrentFamily> = cfg.families();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut warnings = Vec::new();

    let mut fronts = Vec::new();
    for det in all_fronts(cfg, field) {
        let f = &det.front;
        let tracked = det.s_tracked.is_some();
        let speed_mismatch = speed_mismatch(&det, eos);
        let enforced = tracked && (det.kind == FrontKind::Shock || cfg.check.contacts);
        let tag = format!("front at t = {}, x = {:.6}", f.t, f.xs);
        let mut local = Vec::new();
        let mut standard = Vec::with_capacity(families.len());
        for &fam in &families {
            let r = rh_residual_normalized(f, fam, eos)?;
            let c = ResidualCheck::new(fam.to_string(), &r, tol, enforced && conserved(fam, symmetric));
            if c.failed() {
                local.push(format!("{tag}: {} jump {:.3e} exceeds {:.3e}", c.name, c.normalized.abs(), tol));
            }
            standard.push(c);
        }
        let mut elements: Vec<DualElement> = duals.to_vec();
        for k in 0..cfg.check.random_elements {
            elements.push(DualElement { label: format!("random_{k}"), sigma: random_element(&mut rng, f.t) });
        }
        let mut dual = Vec::new();
        if cfg.check.dual {
            for el in &elements {
                let res = match dual_rh_residual(f, &el.sigma, eos) {
                    Ok(r) => r,
                    Err(e @ (Error::SingularTime { .. } | Error::Orientation { .. })) => {
                        warnings.push(format!("{tag}: dual conditions for {} skipped: {e}", el.label));
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                let rows: Vec<ResidualCheck> = res
                    .iter()
                    .zip(DUAL_ROW_NAMES)
                    .map(|(r, name)| ResidualCheck::new(name.to_string(), r, tol, enforced))
                    .collect();
                for c in rows.iter().filter(|c| c.failed()) {
                    local.push(format!("{tag}: dual {} row {} residual {:.3e} exceeds {:.3e}", el.label, c.name, c.normalized.abs(), tol));
                }
                dual.push(DualCheck { label: el.label.clone(), sigma: el.sigma.entries(), rows });
            }
        }
        let adm = admissibility_with(f, eos, cfg.tolerances.mass_flux_floor);
        let admissibility_pass = !(det.kind == FrontKind::Shock && adm.verdict == Verdict::ShockInadmissible);
        if enforced && det.kind == FrontKind::Shock && !admissibility_pass {
            local.push(format!("{tag}: inadmissible shock (entropy jump {:.3e}, lax {})", adm.delta_s, adm.lax_ok));
        }
        fronts.push(FrontCheck {
            t: f.t,
            xs: f.xs,
            s: f.s,
            kind: io::front_kind(det.kind).into(),
            tracked,
            speed_mismatch,
            enforced,
            standard,
            dual,
            admissibility: adm,
            admissibility_pass,
            failures: local.clone(),
        });
        failures.append(&mut local);
    }

    let mut charges = Vec::new();
    if cfg.check.charge_balance && field.snapshots.len() >= 2 {
        let (t1, t2) = (field.snapshots[0].t, field.snapshots[field.snapshots.len() - 1].t);
        for fam in CurrentFamily::all(eos.dim()) {
            if !conserved(fam, symmetric) {
                continue;
            }
            let balance = charge_balance(field, fam, t1, t2)?;
            let pass = balance.relative <= cfg.tolerances.charge_balance;
            if !pass {
                failures.push(format!("{fam} charge balance {:.3e} exceeds {:.3e}", balance.relative, cfg.tolerances.charge_balance));
            }
            charges.push(ChargeCheck { balance, tolerance: cfg.tolerances.charge_balance, pass, enforced: true });
        }
    }

    let (euler, points) = euler_table(cfg, field)?;
    if cfg.check.euler == EulerMode::Enforce && !euler.pass {
        failures.push(format!("Euler residual {:.3e} exceeds {:.3e}", euler.max.iter().fold(0.0_f64, |m, r| m.max(*r)), euler.tolerance));
    }

    let report = CheckReport {
        schema: io::SCHEMA,
        kind: "check",
        name: cfg.name.clone(),
        source: source.to_string(),
        eos: EosInfo::of(eos),
        symmetric_exponent: symmetric,
        jump_tolerance: tol,
        pass: failures.is_empty(),
        field_pass: fronts.iter().map(|f| f.failures.len()).sum::<usize>() == failures.len(),
        fronts,
        charge_balance: charges,
        euler,
        failures,
        warnings,
    };
    Ok((report, points))
}

fn euler_table(cfg: &ScenarioConfig, field: &SpacetimeField) -> CliResult<(EulerSummary, Vec<EulerPoint>)> {
    let mut summary = EulerSummary { mode: cfg.check.euler, points: 0, skipped: 0, max: [0.0; 3], tolerance: cfg.tolerances.euler, pass: true };
    let mut points = Vec::new();
    if cfg.check.euler == EulerMode::Off {
        return Ok((summary, points));
    }
    let zones = cfg.zones();
    let steps = field.snapshots.len();
    for step in 1..steps.saturating_sub(1) {
        for cell in 1..field.grid.cells - 1 {
            match euler_residual(field, cell, step, &zones) {
                Ok(r) => {
                    for q in 0..3 {
                        summary.max[q] = summary.max[q].max(r[q].abs());
                    }
                    summary.points += 1;
                    points.push(EulerPoint { t: field.snapshots[step].t, x: field.grid.center(cell), residual: r });
                }
                Err(Error::InsideDiscontinuity { .. }) => summary.skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    summary.pass = summary.max.iter().all(|m| *m <= summary.tolerance);
    Ok((summary, points))
}

/// Writes `check.json`, `jumps.csv`, `charges.csv` and `euler.csv` into `dir`.
pub fn write_report(dir: &Path, report: &CheckReport, points: &[EulerPoint]) -> CliResult<()> {
    io::create_dir(dir)?;
    io::write_json(&dir.join("check.json"), report)?;
    let mut rows = Vec::new();
    for f in &report.fronts {
        let mut push = |check: &str, c: &ResidualCheck| {
            rows.push(vec![
                fmt(f.t),
                fmt(f.xs),
                fmt(f.s),
                f.kind.clone(),
                check.to_string(),
                c.name.clone(),
                fmt(c.value),
                fmt(c.normalized),
                fmt(c.tolerance),
                c.pass.to_string(),
                c.enforced.to_string(),
            ])
        };
        for c in &f.standard {
            push("standard", c);
        }
        for d in &f.dual {
            for c in &d.rows {
                push(&format!("dual:{}", d.label), c);
            }
        }
    }
    io::write_table(
        &dir.join("jumps.csv"),
        &["t", "xs", "s", "kind", "check", "name", "value", "normalized", "tolerance", "pass", "enforced"],
        rows,
    )?;
    let charges = report.charge_balance.iter().map(|c| {
        let b = &c.balance;
        vec![
            b.family.to_string(),
            fmt(b.t1),
            fmt(b.t2),
            fmt(b.q1),
            fmt(b.q2),
            fmt(b.outflow_left),
            fmt(b.outflow_right),
            fmt(b.residual),
            fmt(b.relative),
            fmt(c.tolerance),
            c.pass.to_string(),
        ]
    });
    io::write_table(
        &dir.join("charges.csv"),
        &["family", "t1", "t2", "q1", "q2", "outflow_left", "outflow_right", "residual", "relative", "tolerance", "pass"],
        charges,
    )?;
    let euler = points.iter().map(|p| vec![fmt(p.t), fmt(p.x), fmt(p.residual[0]), fmt(p.residual[1]), fmt(p.residual[2])]);
    io::write_table(&dir.join("euler.csv"), &["t", "x", "mass", "momentum", "energy"], euler)
}

/// Summary lines: measured values next to their tolerances.
pub fn summarize(report: &CheckReport) -> Vec<String> {
    let enforced: Vec<&FrontCheck> = report.fronts.iter().filter(|f| f.enforced).collect();
    let worst = |pick: &dyn Fn(&FrontCheck) -> Vec<f64>| enforced.iter().flat_map(|f| pick(f)).fold(0.0_f64, f64::max);
    let std_max = worst(&|f| f.standard.iter().filter(|c| c.enforced).map(|c| c.normalized.abs()).collect());
    let dual_max = worst(&|f| f.dual.iter().flat_map(|d| d.rows.iter().map(|c| c.normalized.abs())).collect());
    let mut lines = vec![
        format!(
            "fronts: {} detected, {} enforced; inadmissible shocks: {}",
            report.fronts.len(),
            enforced.len(),
            enforced.iter().filter(|f| !f.admissibility_pass).count()
        ),
        format!("standard jumps: max {std_max:.3e} (tolerance {:.3e})", report.jump_tolerance),
        format!("dual jumps: max {dual_max:.3e} (tolerance {:.3e})", report.jump_tolerance),
    ];
    for c in &report.charge_balance {
        lines.push(format!("charge {}: relative {:.3e} (tolerance {:.3e})", c.balance.family, c.balance.relative, c.tolerance));
    }
    let e = &report.euler;
    if e.mode != EulerMode::Off {
        lines.push(format!(
            "euler residual ({:?}): max {:.3e} / {:.3e} / {:.3e} over {} points, {} in zones",
            e.mode, e.max[0], e.max[1], e.max[2], e.points, e.skipped
        ));
    }
    lines.push(format!("verdict: {}", if report.pass { "pass" } else { "fail" }));
    lines
}

pub fn outcome(report: &CheckReport) -> Outcome {
    let mut lines = summarize(report);
    lines.extend(report.failures.iter().map(|f| format!("FAIL {f}")));
    Outcome { pass: report.pass, warnings: report.warnings.clone(), lines }
}

/// The configured element, used as the default dual element.
pub fn configured_dual(cfg: &ScenarioConfig) -> CliResult<DualElement> {
    Ok(DualElement { label: "configured".into(), sigma: cfg.sl2()? })
}

pub fn run(cfg: &ScenarioConfig, input: &Path, out: &Path, seed: u64) -> CliResult<Outcome> {
    let (_, field) = crate::io::load_field(input)?;
    let (report, points) = check_field(cfg, &field, &[configured_dual(cfg)?], seed, &input.display().to_string())?;
    write_report(out, &report, &points)?;
    Ok(outcome(&report))
}

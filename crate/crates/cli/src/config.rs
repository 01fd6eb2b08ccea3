//! Line-oriented scenario configuration.
//!
//! ```text
//! # comment
//! [eos]
//! gamma0 = 3
//! n = 1
//! [state]        # repeated once per piece of a piecewise initial condition
//! x_max = 0.5
//! rho = 1
//! ```
//!
//! Missing keys take their defaults; [`emit`] writes every key, so
//! `parse(emit(c)) == c`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use shockdual::field::ZoneConfig;
use shockdual::fvm::{Reconstruction, SolverConfig};
use shockdual::group::{planar_galilei, Interpolation};
use shockdual::noether::CurrentFamily;
use shockdual::shock::DetectConfig;
use shockdual::{Boundary, Geometry, Grid, GroupElement, Polytrope, Sl2Element};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub eos: EosSection,
    pub grid: GridSection,
    pub initial: InitialSection,
    pub run: RunSection,
    pub group: GroupSection,
    pub check: CheckSection,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EosSection {
    pub gamma0: f64,
    pub n: usize,
    pub r_gas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSection {
    pub geometry: Geometry,
    pub x_left: f64,
    pub x_right: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Sod,
    TwoShock,
    BlastSphere,
    GaussianPulse,
    Piecewise,
}

impl Preset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Sod => "sod",
            Preset::TwoShock => "two-shock",
            Preset::BlastSphere => "blast-sphere",
            Preset::GaussianPulse => "gaussian-pulse",
            Preset::Piecewise => "piecewise",
        }
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "sod" => Preset::Sod,
            "two-shock" => Preset::TwoShock,
            "blast-sphere" => Preset::BlastSphere,
            "gaussian-pulse" => Preset::GaussianPulse,
            "piecewise" => Preset::Piecewise,
            other => {
                return Err(format!(
                    "unknown preset '{other}' (expected sod, two-shock, blast-sphere, gaussian-pulse or piecewise)"
                ))
            }
        })
    }
}

/// One constant piece of a piecewise initial condition, valid up to `x_max`
/// (the last piece extends to the right end).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceState {
    pub x_max: Option<f64>,
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSection {
    pub preset: Preset,
    /// Interface position of two-state presets, centre of the pulse.
    pub x0: f64,
    pub amplitude: f64,
    pub width: f64,
    pub states: Vec<PieceState>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSection {
    pub t_start: f64,
    pub t_end: f64,
    /// Output times; empty means `t_end` only.
    pub outputs: Vec<f64>,
    pub cfl: f64,
    pub reconstruction: Reconstruction,
    pub boundary: [Boundary; 2],
    pub floor: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSection {
    /// `(alpha, beta, gamma, delta)`.
    pub sigma: [f64; 4],
    /// Axis reflection `x -> -x`.
    pub reflect: bool,
    pub boost: f64,
    pub shift: f64,
    #[serde(serialize_with = "interpolation_name")]
    pub interpolation: Interpolation,
    /// Refuse non-identity time maps unless the exponent is symmetric.
    pub enforce_exponent: bool,
}

fn interpolation_name<S: serde::Serializer>(i: &Interpolation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(interpolation_str(*i))
}

fn interpolation_str(i: Interpolation) -> &'static str {
    match i {
        Interpolation::Linear => "linear",
        Interpolation::Cubic => "cubic",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EulerMode {
    Off,
    /// Residuals are tabulated but never fail the check.
    Report,
    Enforce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSection {
    /// Families checked at each front; empty means all families for `n`.
    pub families: Vec<CurrentFamily>,
    pub dual: bool,
    /// Extra random elements for the dual conditions (drawn with `seed`).
    pub random_elements: usize,
    pub seed: u64,
    pub charge_balance: bool,
    pub euler: EulerMode,
    /// Hold contacts to the jump tolerances as well as shocks.
    pub contacts: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Floor of the normalised jump tolerance.
    pub rh_exact: f64,
    /// Resolution-dependent part: the tolerance is `max(rh_exact, rh_detected * dx)`.
    pub rh_detected: f64,
    pub charge_balance: f64,
    pub euler: f64,
    /// Allowed mismatch of mapped front positions, in target cells.
    pub trajectory_cells: f64,
    pub mass_flux_floor: f64,
    pub zone_threshold: f64,
    pub zone_halo: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            eos: EosSection { gamma0: 3.0, n: 1, r_gas: 1.0 },
            grid: GridSection { geometry: Geometry::Planar, x_left: 0.0, x_right: 1.0, cells: 400 },
            initial: InitialSection { preset: Preset::Sod, x0: 0.5, amplitude: 0.5, width: 0.05, states: Vec::new() },
            run: RunSection {
                t_start: 0.0,
                t_end: 0.2,
                outputs: Vec::new(),
                cfl: 0.5,
                reconstruction: Reconstruction::Godunov,
                boundary: [Boundary::Transmissive; 2],
                floor: 1e-12,
                max_steps: 10_000_000,
            },
            group: GroupSection {
                sigma: [0.0, -1.0, 1.0, 0.0],
                reflect: false,
                boost: 0.0,
                shift: 0.0,
                interpolation: Interpolation::Linear,
                enforce_exponent: true,
            },
            check: CheckSection {
                families: Vec::new(),
                dual: true,
                random_elements: 0,
                seed: 0,
                charge_balance: true,
                euler: EulerMode::Report,
                contacts: false,
            },
            tolerances: Tolerances {
                rh_exact: 1e-8,
                rh_detected: 50.0,
                charge_balance: 1e-2,
                euler: 1e-2,
                trajectory_cells: 1.0,
                mass_flux_floor: 1e-10,
                zone_threshold: 0.05,
                zone_halo: 3,
            },
        }
    }
}

impl ScenarioConfig {
    pub fn polytrope(&self) -> CliResult<Polytrope> {
        Ok(Polytrope::new(self.eos.gamma0, self.eos.n)?.with_gas_constant(self.eos.r_gas)?)
    }

    pub fn grid(&self) -> CliResult<Grid> {
        let g = &self.grid;
        Ok(Grid::new(g.x_left, g.x_right, g.cells, g.geometry)?)
    }

    pub fn solver(&self) -> SolverConfig {
        let r = &self.run;
        SolverConfig { cfl: r.cfl, reconstruction: r.reconstruction, boundary: r.boundary, floor: r.floor, max_steps: r.max_steps }
    }

    pub fn output_times(&self) -> Vec<f64> {
        if self.run.outputs.is_empty() {
            vec![self.run.t_end]
        } else {
            self.run.outputs.clone()
        }
    }

    pub fn sl2(&self) -> CliResult<Sl2Element> {
        let [a, b, c, d] = self.group.sigma;
        Ok(Sl2Element::new(a, b, c, d)?)
    }

    pub fn group_element(&self) -> CliResult<GroupElement> {
        let gal = planar_galilei(self.group.reflect, self.group.boost, self.group.shift);
        Ok(GroupElement::new(self.sl2()?, gal))
    }

    pub fn zones(&self) -> ZoneConfig {
        ZoneConfig { threshold: self.tolerances.zone_threshold, halo: self.tolerances.zone_halo }
    }

    pub fn detect(&self) -> DetectConfig {
        DetectConfig { zones: self.zones(), ..DetectConfig::default() }
    }

    /// Families to check at fronts, in canonical order.
    pub fn families(&self) -> Vec<CurrentFamily> {
        if self.check.families.is_empty() {
            CurrentFamily::all(self.eos.n)
        } else {
            self.check.families.clone()
        }
    }

    /// Semantic checks; errors name the offending `(section, key)`.
    fn validate(&self) -> Result<(), (&'static str, &'static str, String)> {
        let e = |s, k, m: String| Err((s, k, m));
        if let Err(err) = Polytrope::new(self.eos.gamma0, self.eos.n) {
            let key = if (1..=3).contains(&self.eos.n) { "gamma0" } else { "n" };
            return e("eos", key, err.to_string());
        }
        if !(self.eos.r_gas > 0.0) {
            return e("eos", "r_gas", "r_gas must be positive".into());
        }
        if self.grid.cells < 3 {
            return e("grid", "cells", format!("at least 3 cells are required, got {}", self.grid.cells));
        }
        if let Err(err) = self.grid() {
            return e("grid", "x_right", err.to_string());
        }
        if self.grid.geometry == Geometry::Spherical && self.eos.n != 3 {
            return e("grid", "geometry", format!("spherical symmetry needs n = 3, got n = {}", self.eos.n));
        }
        let init = &self.initial;
        if init.preset == Preset::Piecewise {
            if init.states.is_empty() {
                return e("initial", "preset", "piecewise initial data needs at least one [state] section".into());
            }
            for (k, s) in init.states.iter().enumerate() {
                if !(s.rho > 0.0 && s.p > 0.0 && s.u.is_finite()) {
                    return e("state", "rho", format!("state {} must have positive rho and p", k + 1));
                }
                if k + 1 < init.states.len() && s.x_max.is_none() {
                    return e("state", "x_max", format!("state {} needs x_max (only the last may omit it)", k + 1));
                }
            }
            let bounds: Vec<f64> = init.states.iter().filter_map(|s| s.x_max).collect();
            if bounds.windows(2).any(|w| w[1] <= w[0]) {
                return e("state", "x_max", "x_max must increase from one state to the next".into());
            }
        } else if !init.states.is_empty() {
            return e("state", "x_max", "[state] sections require preset = piecewise".into());
        }
        if init.preset == Preset::GaussianPulse && !(init.width > 0.0 && init.amplitude > -1.0) {
            return e("initial", "width", "the pulse needs width > 0 and amplitude > -1".into());
        }
        let run = &self.run;
        if !(run.t_end >= run.t_start) {
            return e("run", "t_end", format!("t_end = {} precedes t_start = {}", run.t_end, run.t_start));
        }
        if run.outputs.iter().any(|&t| t < run.t_start || t > run.t_end) {
            return e("run", "outputs", format!("output times must lie in [{}, {}]", run.t_start, run.t_end));
        }
        if run.outputs.windows(2).any(|w| w[1] <= w[0]) {
            return e("run", "outputs", "output times must increase strictly".into());
        }
        if let Err(err) = self.solver().validate() {
            return e("run", "cfl", err.to_string());
        }
        if let Err(err) = self.sl2() {
            return e("group", "sigma", err.to_string());
        }
        for fam in &self.check.families {
            if let Err(err) = fam.validate(self.eos.n) {
                return e("check", "families", err.to_string());
            }
        }
        let t = &self.tolerances;
        let positive = [
            ("rh_exact", t.rh_exact),
            ("rh_detected", t.rh_detected),
            ("charge_balance", t.charge_balance),
            ("euler", t.euler),
            ("trajectory_cells", t.trajectory_cells),
            ("mass_flux_floor", t.mass_flux_floor),
            ("zone_threshold", t.zone_threshold),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return e("tolerances", key, format!("{key} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

fn num(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got '{v}'"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got '{v}'"))
    }
}

fn count(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got '{v}'"))
}

fn flag(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got '{v}'")),
    }
}

fn list(v: &str) -> Vec<&str> {
    if v.is_empty() {
        Vec::new()
    } else {
        v.split(',').map(str::trim).collect()
    }
}

fn nums(v: &str) -> Result<Vec<f64>, String> {
    list(v).into_iter().map(num).collect()
}

/// A list of numbers or one `start:stop:step` range, end points included.
fn times(v: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let [a, b, step] = parts[..] else {
        return if parts.len() == 1 { nums(v) } else { Err(format!("expected start:stop:step, got '{v}'")) };
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) || b < a {
        return Err(format!("range '{v}' needs stop >= start and a positive step"));
    }
    let n = ((b - a) / step + 1e-9).floor();
    if n > 1e6 {
        return Err(format!("range '{v}' has too many points"));
    }
    // Round to the decimals written in the range so that 1:2:0.01 gives 1.84, not 1.8399999999999999.
    let decimals = parts.iter().map(|p| p.split_once('.').map_or(0, |(_, d)| d.len())).max().unwrap_or(0);
    let round = |t: f64| if decimals <= 15 { format!("{t:.decimals$}").parse().unwrap_or(t) } else { t };
    Ok((0..=n as usize).map(|k| round(a + k as f64 * step)).collect())
}

fn core<T>(r: shockdual::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn set(cfg: &mut ScenarioConfig, section: &str, key: &str, v: &str) -> Result<(), String> {
    match (section, key) {
        ("scenario", "name") => {
            if v.is_empty() {
                return Err("name must not be empty".into());
            }
            cfg.name = v.to_string();
        }
        ("eos", "gamma0") => cfg.eos.gamma0 = num(v)?,
        ("eos", "n") => cfg.eos.n = count(v)?,
        ("eos", "r_gas") => cfg.eos.r_gas = num(v)?,
        ("grid", "geometry") => cfg.grid.geometry = core(v.parse())?,
        ("grid", "x_left") => cfg.grid.x_left = num(v)?,
        ("grid", "x_right") => cfg.grid.x_right = num(v)?,
        ("grid", "cells") => cfg.grid.cells = count(v)?,
        ("initial", "preset") => cfg.initial.preset = v.parse()?,
        ("initial", "x0") => cfg.initial.x0 = num(v)?,
        ("initial", "amplitude") => cfg.initial.amplitude = num(v)?,
        ("initial", "width") => cfg.initial.width = num(v)?,
        ("state", key) => {
            let s = cfg.initial.states.last_mut().expect("a [state] header opens a piece");
            match key {
                "x_max" => s.x_max = Some(num(v)?),
                "rho" => s.rho = num(v)?,
                "u" => s.u = num(v)?,
                "p" => s.p = num(v)?,
                _ => return Err(format!("unknown key '{key}' in [state]")),
            }
        }
        ("run", "t_start") => cfg.run.t_start = num(v)?,
        ("run", "t_end") => cfg.run.t_end = num(v)?,
        ("run", "outputs") => cfg.run.outputs = times(v)?,
        ("run", "cfl") => cfg.run.cfl = num(v)?,
        ("run", "reconstruction") => {
            cfg.run.reconstruction = match v {
                "godunov" => Reconstruction::Godunov,
                "muscl" => Reconstruction::Muscl,
                _ => return Err(format!("unknown reconstruction '{v}' (expected godunov or muscl)")),
            }
        }
        ("run", "boundary") => {
            let parts = list(v);
            if parts.len() != 2 {
                return Err("boundary takes two values: left, right".into());
            }
            cfg.run.boundary = [core(parts[0].parse())?, core(parts[1].parse())?];
        }
        ("run", "floor") => cfg.run.floor = num(v)?,
        ("run", "max_steps") => cfg.run.max_steps = count(v)?,
        ("group", "sigma") => {
            let x = nums(v)?;
            cfg.group.sigma = x.try_into().map_err(|_| "sigma takes four values: alpha, beta, gamma, delta".to_string())?;
        }
        ("group", "reflect") => cfg.group.reflect = flag(v)?,
        ("group", "boost") => cfg.group.boost = num(v)?,
        ("group", "shift") => cfg.group.shift = num(v)?,
        ("group", "interpolation") => {
            cfg.group.interpolation = match v {
                "linear" => Interpolation::Linear,
                "cubic" => Interpolation::Cubic,
                _ => return Err(format!("unknown interpolation '{v}' (expected linear or cubic)")),
            }
        }
        ("group", "enforce_exponent") => cfg.group.enforce_exponent = flag(v)?,
        ("check", "families") => {
            cfg.check.families = if v == "all" {
                Vec::new()
            } else {
                list(v).into_iter().map(|f| f.parse::<CurrentFamily>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?
            }
        }
        ("check", "dual") => cfg.check.dual = flag(v)?,
        ("check", "random_elements") => cfg.check.random_elements = count(v)?,
        ("check", "seed") => cfg.check.seed = v.parse().map_err(|_| format!("expected an unsigned integer, got '{v}'"))?,
        ("check", "charge_balance") => cfg.check.charge_balance = flag(v)?,
        ("check", "euler") => {
            cfg.check.euler = match v {
                "off" => EulerMode::Off,
                "report" => EulerMode::Report,
                "enforce" => EulerMode::Enforce,
                _ => return Err(format!("unknown euler mode '{v}' (expected off, report or enforce)")),
            }
        }
        ("check", "contacts") => cfg.check.contacts = flag(v)?,
        ("tolerances", "rh_exact") => cfg.tolerances.rh_exact = num(v)?,
        ("tolerances", "rh_detected") => cfg.tolerances.rh_detected = num(v)?,
        ("tolerances", "charge_balance") => cfg.tolerances.charge_balance = num(v)?,
        ("tolerances", "euler") => cfg.tolerances.euler = num(v)?,
        ("tolerances", "trajectory_cells") => cfg.tolerances.trajectory_cells = num(v)?,
        ("tolerances", "mass_flux_floor") => cfg.tolerances.mass_flux_floor = num(v)?,
        ("tolerances", "zone_threshold") => cfg.tolerances.zone_threshold = num(v)?,
        ("tolerances", "zone_halo") => cfg.tolerances.zone_halo = count(v)?,
        (section, key) => return Err(format!("unknown key '{key}' in [{section}]")),
    }
    Ok(())
}

const SECTIONS: [&str; 9] = ["scenario", "eos", "grid", "initial", "state", "run", "group", "check", "tolerances"];

pub fn parse(text: &str) -> CliResult<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut section: Option<&'static str> = None;
    // (section, key) -> first line; keys of [state] are tracked per piece
    let mut lines: HashMap<(String, String), usize> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::config(Some(no), format!("malformed section header '{line}'")))?
                .trim();
            let known = SECTIONS.iter().find(|s| **s == name).ok_or_else(|| {
                CliError::config(Some(no), format!("unknown section [{name}] (expected one of {})", SECTIONS.join(", ")))
            })?;
            if *known == "state" {
                cfg.initial.states.push(PieceState { x_max: None, rho: 1.0, u: 0.0, p: 1.0 });
            }
            section = Some(known);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(Some(no), format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| CliError::config(Some(no), format!("key '{key}' appears before any [section]")))?;
        let slot = if sec == "state" { format!("state{}", cfg.initial.states.len()) } else { sec.to_string() };
        if let Some(first) = lines.insert((slot, key.to_string()), no) {
            return Err(CliError::config(Some(no), format!("duplicate key '{key}' (first set on line {first})")));
        }
        lines.entry((sec.to_string(), key.to_string())).or_insert(no);
        set(&mut cfg, sec, key, value).map_err(|m| CliError::config(Some(no), m))?;
    }
    cfg.validate().map_err(|(sec, key, m)| {
        let line = lines.get(&(sec.to_string(), key.to_string())).copied();
        CliError::config(line, m)
    })?;
    Ok(cfg)
}

pub fn load(path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|e| match e {
        CliError::Config { line, message } => CliError::config(line, format!("{}: {message}", path.display())),
        other => other,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Full text form; floats use the shortest representation that reads back exactly.
pub fn emit(cfg: &ScenarioConfig) -> String {
    let mut o = String::new();
    let w = &mut o;
    let _ = writeln!(w, "[scenario]\nname = {}", cfg.name);
    let _ = writeln!(w, "\n[eos]\ngamma0 = {:?}\nn = {}\nr_gas = {:?}", cfg.eos.gamma0, cfg.eos.n, cfg.eos.r_gas);
    let g = &cfg.grid;
    let _ = writeln!(w, "\n[grid]\ngeometry = {}\nx_left = {:?}\nx_right = {:?}\ncells = {}", g.geometry.as_str(), g.x_left, g.x_right, g.cells);
    let i = &cfg.initial;
    let _ = writeln!(
        w,
        "\n[initial]\npreset = {}\nx0 = {:?}\namplitude = {:?}\nwidth = {:?}",
        i.preset.as_str(),
        i.x0,
        i.amplitude,
        i.width
    );
    for s in &i.states {
        let _ = writeln!(w, "\n[state]");
        if let Some(x) = s.x_max {
            let _ = writeln!(w, "x_max = {x:?}");
        }
        let _ = writeln!(w, "rho = {:?}\nu = {:?}\np = {:?}", s.rho, s.u, s.p);
    }
    let r = &cfg.run;
    let recon = match r.reconstruction {
        Reconstruction::Godunov => "godunov",
        Reconstruction::Muscl => "muscl",
    };
    let _ = writeln!(
        w,
        "\n[run]\nt_start = {:?}\nt_end = {:?}\noutputs = {}\ncfl = {:?}\nreconstruction = {recon}\nboundary = {}, {}\nfloor = {:?}\nmax_steps = {}",
        r.t_start,
        r.t_end,
        join(&r.outputs),
        r.cfl,
        r.boundary[0].as_str(),
        r.boundary[1].as_str(),
        r.floor,
        r.max_steps
    );
    let gr = &cfg.group;
    let _ = writeln!(
        w,
        "\n[group]\nsigma = {}\nreflect = {}\nboost = {:?}\nshift = {:?}\ninterpolation = {}\nenforce_exponent = {}",
        join(&gr.sigma),
        gr.reflect,
        gr.boost,
        gr.shift,
        interpolation_str(gr.interpolation),
        gr.enforce_exponent
    );
    let c = &cfg.check;
    let families = if c.families.is_empty() {
        "all".to_string()
    } else {
        c.families.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
    };
    let euler = match c.euler {
        EulerMode::Off => "off",
        EulerMode::Report => "report",
        EulerMode::Enforce => "enforce",
    };
    let _ = writeln!(
        w,
        "\n[check]\nfamilies = {families}\ndual = {}\nrandom_elements = {}\nseed = {}\ncharge_balance = {}\neuler = {euler}\ncontacts = {}",
        c.dual, c.random_elements, c.seed, c.charge_balance, c.contacts
    );
    let t = &cfg.tolerances;
    let _ = writeln!(
        w,
        "\n[tolerances]\nrh_exact = {:?}\nrh_detected = {:?}\ncharge_balance = {:?}\neuler = {:?}\ntrajectory_cells = {:?}\nmass_flux_floor = {:?}\nzone_threshold = {:?}\nzone_halo = {}",
        t.rh_exact, t.rh_detected, t.charge_balance, t.euler, t.trajectory_cells, t.mass_flux_floor, t.zone_threshold, t.zone_halo
    );
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_line(text: &str) -> Option<usize> {
        match parse(text) {
            Err(CliError::Config { line, .. }) => line,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_round_trip() {
        let cfg = ScenarioConfig::default();
        assert_eq!(parse(&emit(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn edited_config_round_trips() {
        let mut cfg = ScenarioConfig::default();
        cfg.name = "edge values".into();
        cfg.eos = EosSection { gamma0: 5.0 / 3.0, n: 3, r_gas: 0.287 };
        cfg.grid = GridSection { geometry: Geometry::Spherical, x_left: 0.0, x_right: 4.1, cells: 333 };
        cfg.initial.preset = Preset::Piecewise;
        cfg.initial.states = vec![
            PieceState { x_max: Some(0.1 + 0.2), rho: 1e-7, u: -0.0, p: 123456.789 },
            PieceState { x_max: None, rho: 0.125, u: 1.0 / 3.0, p: 0.1 },
        ];
        cfg.run.outputs = vec![0.05, 0.1, 0.2];
        cfg.run.reconstruction = Reconstruction::Muscl;
        cfg.run.boundary = [Boundary::Reflective, Boundary::Transmissive];
        cfg.group.sigma = [1.0, 0.3, -0.2, 0.94];
        cfg.group.interpolation = Interpolation::Cubic;
        cfg.check.families = vec![CurrentFamily::Mass, CurrentFamily::AngularMomentum(2)];
        cfg.check.euler = EulerMode::Enforce;
        cfg.tolerances.rh_exact = 3e-300;
        assert_eq!(parse(&emit(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(err_line("[eos]\ngamma0 = 3\n\n[initial]\npreset = shocktube\n"), Some(5));
        assert_eq!(err_line("[grid]\ncells = many\n"), Some(2));
        assert_eq!(err_line("[grid]\ncells = 10\ncells = 20\n"), Some(3));
        assert_eq!(err_line("cells = 10\n"), Some(1));
        assert_eq!(err_line("[nope]\n"), Some(1));
        // semantic errors point at the key that caused them
        assert_eq!(err_line("# tube\n[eos]\nn = 1\ngamma0 = 0.9\n"), Some(4));
        assert_eq!(err_line("[run]\nt_end = 1\noutputs = 0.5, 2\n"), Some(3));
        assert_eq!(err_line("[group]\nsigma = 1, 0, 0, -1\n"), Some(2));
    }

    #[test]
    fn comments_and_repeated_state_sections() {
        let text = "[initial]\npreset = piecewise # three pieces\n[state]\nx_max = 0.3\nrho = 2\n[state]\nx_max = 0.6\n[state]\np = 0.5\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.initial.states.len(), 3);
        assert_eq!(cfg.initial.states[0].rho, 2.0);
        assert_eq!(cfg.initial.states[2].x_max, None);
        assert!(parse("[state]\nrho = 1\n").is_err());
    }

    #[test]
    fn output_ranges_include_both_ends() {
        let cfg = parse("[run]\nt_start = 0.5\nt_end = 2\noutputs = 1:2:0.01\n").unwrap();
        assert_eq!(cfg.run.outputs.len(), 101);
        assert_eq!((cfg.run.outputs[0], cfg.run.outputs[100]), (1.0, 2.0));
        assert_eq!(cfg.run.outputs[84], 1.84);
        assert_eq!(parse("[run]\nt_end = 1\noutputs = 0:1:0.3\n").unwrap().run.outputs.len(), 4);
        assert!(parse("[run]\noutputs = 1:0:0.1\n").is_err());
        assert!(parse("[run]\noutputs = 0:1\n").is_err());
    }
}

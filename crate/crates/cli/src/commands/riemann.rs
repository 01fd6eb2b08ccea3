use std::path::Path;

use serde::Serialize;

use shockdual::riemann::{self, RiemannSolution};

use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::io;
use crate::preset;

use super::Outcome;

#[derive(Serialize)]
struct Summary<'a> {
    schema: &'static str,
    kind: &'static str,
    name: &'a str,
    x0: f64,
    /// Time since the interface was released.
    t: f64,
    contact_speed: f64,
    #[serde(flatten)]
    solution: &'a RiemannSolution,
}

/// Solves the configured two-state problem and samples it at the cell centres
/// at `run.t_end` (the data is released at `run.t_start`).
pub fn run(cfg: &ScenarioConfig, out: &Path) -> CliResult<Outcome> {
    let eos = cfg.polytrope()?;
    let grid = cfg.grid()?;
    let (left, right, x0) = preset::riemann_states(cfg)?;
    let sol = riemann::solve(&left, &right, &eos)?;
    let t = cfg.run.t_end - cfg.run.t_start;
    io::create_dir(out)?;
    let rows = grid.centers().map(|x| io::state_row(x, &sol.sample(x - x0, t), &eos));
    io::write_table(&out.join("riemann.csv"), &io::SNAPSHOT_HEADER, rows)?;
    let summary = Summary {
        schema: io::SCHEMA,
        kind: "riemann",
        name: &cfg.name,
        x0,
        t,
        contact_speed: sol.contact_speed(),
        solution: &sol,
    };
    io::write_json(&out.join("riemann.json"), &summary)?;
    let wave = |w: &riemann::Wave| format!("{:?} [{:.6}, {:.6}]", w.kind, w.head, w.tail);
    let lines = vec![
        format!("p* = {:.10}, u* = {:.10} after {} iterations", sol.p_star, sol.u_star, sol.iterations),
        format!("left wave {}, right wave {}", wave(&sol.left_wave), wave(&sol.right_wave)),
        format!("sampled at t = {t} on {} cells into {}", grid.cells, out.display()),
    ];
    Ok(Outcome::passed(lines, Vec::new()))
}

//! Initial conditions named in `[initial]`.

use shockdual::{Grid, Primitive, Snapshot};

use crate::config::{Preset, ScenarioConfig};
use crate::error::{CliError, CliResult};

fn sod() -> (Primitive, Primitive) {
    (Primitive::planar(1.0, 0.0, 1.0), Primitive::planar(0.125, 0.0, 0.1))
}

/// Left and right states and the interface position, for two-state data.
pub fn riemann_states(cfg: &ScenarioConfig) -> CliResult<(Primitive, Primitive, f64)> {
    let init = &cfg.initial;
    match init.preset {
        Preset::Sod => {
            let (l, r) = sod();
            Ok((l, r, init.x0))
        }
        Preset::TwoShock => Ok((Primitive::planar(1.0, 1.0, 1.0), Primitive::planar(1.0, -1.0, 1.0), init.x0)),
        // a pressure ratio of 100 keeps the leading shock strong out to t = 2
        Preset::BlastSphere => Ok((Primitive::planar(1.0, 0.0, 10.0), Primitive::planar(0.125, 0.0, 0.1), init.x0)),
        Preset::Piecewise if init.states.len() == 2 => {
            let [a, b] = [&init.states[0], &init.states[1]];
            let x0 = a.x_max.expect("validated: only the last piece lacks x_max");
            Ok((Primitive::planar(a.rho, a.u, a.p), Primitive::planar(b.rho, b.u, b.p), x0))
        }
        Preset::Piecewise => Err(CliError::config(None, format!("a Riemann problem needs exactly two [state] sections, got {}", init.states.len()))),
        Preset::GaussianPulse => Err(CliError::config(None, "gaussian-pulse is not a Riemann problem")),
    }
}

/// Point values at the cell centres at `run.t_start`.
pub fn initial_snapshot(cfg: &ScenarioConfig, grid: &Grid) -> CliResult<Snapshot> {
    let t0 = cfg.run.t_start;
    let init = &cfg.initial;
    Ok(match init.preset {
        Preset::GaussianPulse => Snapshot::from_fn(t0, grid, |x| {
            let rho = 1.0 + init.amplitude * (-0.5 * ((x - init.x0) / init.width).powi(2)).exp();
            Primitive::planar(rho, 0.0, 1.0)
        }),
        Preset::Piecewise => Snapshot::from_fn(t0, grid, |x| {
            let s = init.states.iter().find(|s| s.x_max.is_none_or(|m| x < m)).unwrap_or(&init.states[init.states.len() - 1]);
            Primitive::planar(s.rho, s.u, s.p)
        }),
        _ => {
            let (l, r, x0) = riemann_states(cfg)?;
            Snapshot::from_fn(t0, grid, |x| if x < x0 { l } else { r })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PieceState;

    #[test]
    fn piecewise_states_follow_x_max() {
        let mut cfg = ScenarioConfig::default();
        cfg.initial.preset = Preset::Piecewise;
        cfg.initial.states = vec![
            PieceState { x_max: Some(0.25), rho: 3.0, u: 0.0, p: 1.0 },
            PieceState { x_max: Some(0.5), rho: 2.0, u: 0.0, p: 1.0 },
            PieceState { x_max: None, rho: 1.0, u: 0.0, p: 1.0 },
        ];
        let grid = cfg.grid().unwrap();
        let snap = initial_snapshot(&cfg, &grid).unwrap();
        assert_eq!(snap.states[0].rho, 3.0);
        assert_eq!(snap.states[150].rho, 2.0);
        assert_eq!(snap.states[399].rho, 1.0);
        assert!(riemann_states(&cfg).is_err());
    }

    #[test]
    fn pulse_peaks_at_x0() {
        let mut cfg = ScenarioConfig::default();
        cfg.initial.preset = Preset::GaussianPulse;
        let grid = cfg.grid().unwrap();
        let snap = initial_snapshot(&cfg, &grid).unwrap();
        let peak = snap.states.iter().map(|s| s.rho).fold(0.0, f64::max);
        assert!((peak - 1.5).abs() < 1e-2);
        assert!(riemann_states(&cfg).is_err());
    }
}

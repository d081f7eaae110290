//! Grid convergence study of the smooth periodic Burgers problem.
//!
//! A table resolution `n` is the number of cells covering `(-1, 1)`: the
//! coupled runs use `n / 2` cells per edge, the uncoupled reference scheme a
//! periodic line of `n` cells.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use netflux::analysis::{
    burgers_initial, burgers_reference, gauss_average, l1_distance, linf_distance, ErrorReport,
};
use netflux::schemes::{run, step_periodic_line, RunOptions, SchemeConfig, SchemeOrder, TimeStep};
use netflux::{BoundaryCondition, CellField, FluxFunction, Grid, Network};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Central,
    CentralMuscl,
    CentralMusclTvd,
    UncoupledMuscl,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Central,
        Variant::CentralMuscl,
        Variant::CentralMusclTvd,
        Variant::UncoupledMuscl,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Central => "central",
            Variant::CentralMuscl => "central-muscl",
            Variant::CentralMusclTvd => "central-muscl-tvd",
            Variant::UncoupledMuscl => "uncoupled-muscl",
        }
    }

    fn order(self) -> SchemeOrder {
        match self {
            Variant::Central => SchemeOrder::First,
            Variant::CentralMuscl | Variant::UncoupledMuscl => SchemeOrder::MusclCentral,
            Variant::CentralMusclTvd => SchemeOrder::MusclTvd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySettings {
    pub resolutions: Vec<usize>,
    pub t_eval: f64,
    /// CFL number of the first order scheme.
    pub cfl_first: f64,
    /// Fixed time step of the MUSCL schemes.
    pub dt_muscl: f64,
}

impl StudySettings {
    pub fn standard() -> Self {
        Self {
            resolutions: vec![100, 200, 400, 800],
            t_eval: 0.5,
            cfl_first: 0.49,
            dt_muscl: 2e-6,
        }
    }

    /// Reduced study on the two coarsest resolutions.
    pub fn fast() -> Self {
        Self {
            resolutions: vec![100, 200],
            ..Self::standard()
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            resolutions: cfg.resolutions.clone(),
            t_eval: cfg.t_end,
            cfl_first: cfg.cfl.unwrap_or(0.49),
            dt_muscl: cfg.dt.unwrap_or(2e-6),
        }
    }

    fn time_step_label(&self, variant: Variant) -> String {
        match variant {
            Variant::Central => format!("CFL {}", self.cfl_first),
            _ => format!("dt {:e}", self.dt_muscl),
        }
    }
}

/// `(L1, Linf)` error of one variant at table resolution `n`.
pub fn variant_errors(
    variant: Variant,
    n: usize,
    settings: &StudySettings,
) -> netflux::Result<(f64, f64)> {
    let t = settings.t_eval;
    // rejects evaluation times past shock formation
    burgers_reference(0.0, t)?;
    let reference = |x: f64| burgers_reference(x, t).unwrap_or(f64::NAN);
    match variant {
        Variant::UncoupledMuscl => {
            let dx = 2.0 / n as f64;
            let bounds = |i: usize| (-1.0 + i as f64 * dx, -1.0 + (i + 1) as f64 * dx);
            let mut u: Vec<f64> = (0..n)
                .map(|i| {
                    let (a, b) = bounds(i);
                    gauss_average(burgers_initial, a, b)
                })
                .collect();
            let dt = settings.dt_muscl;
            let steps = (t / dt).round() as usize;
            for _ in 0..steps {
                u = step_periodic_line(
                    &u,
                    &FluxFunction::Burgers,
                    1.0,
                    dx,
                    dt,
                    SchemeOrder::MusclCentral,
                );
            }
            let exact: Vec<f64> = (0..n)
                .map(|i| {
                    let (a, b) = bounds(i);
                    gauss_average(reference, a, b)
                })
                .collect();
            Ok((l1_distance(&u, &exact, dx), linf_distance(&u, &exact)))
        }
        _ => {
            let m = n / 2;
            let net = Network::one_to_one(
                Grid::unit(m)?,
                FluxFunction::Burgers,
                1.0,
                FluxFunction::Burgers,
                1.0,
                BoundaryCondition::Periodic,
            )?;
            let time_step = match variant {
                Variant::Central => TimeStep::Cfl(settings.cfl_first),
                _ => TimeStep::Fixed(settings.dt_muscl),
            };
            let cfg = SchemeConfig::new(variant.order(), time_step);
            let initial = CellField::from_cell_averages(&net, |_, x| burgers_initial(x));
            let numeric = run(&initial, &net, &cfg, &RunOptions::new(t))?.final_field;
            let exact = CellField::from_cell_averages(&net, |_, x| reference(x));
            let dx = net.grid().dx;
            let l1 = (0..2)
                .map(|k| l1_distance(numeric.interior(k), exact.interior(k), dx))
                .sum();
            let linf = (0..2)
                .map(|k| linf_distance(numeric.interior(k), exact.interior(k)))
                .fold(0.0, f64::max);
            Ok((l1, linf))
        }
    }
}

/// Error tables of the given variants, one report per variant. Runs are
/// independent and spread over the available cores.
pub fn study(variants: &[Variant], settings: &StudySettings) -> netflux::Result<Vec<ErrorReport>> {
    let mut jobs: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..settings.resolutions.len()).map(move |r| (v, r)))
        .collect();
    // largest runs first
    jobs.sort_by_key(|&(_, r)| std::cmp::Reverse(settings.resolutions[r]));
    let results = Mutex::new(vec![vec![None; settings.resolutions.len()]; variants.len()]);
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(v, r)) = jobs.get(i) else { break };
                let n = settings.resolutions[r];
                log::info!("{} at {n}", variants[v].label());
                let res = variant_errors(variants[v], n, settings);
                results.lock().expect("no worker panicked")[v][r] = Some(res);
            });
        }
    });
    let results = results.into_inner().expect("no worker panicked");
    variants
        .iter()
        .zip(results)
        .map(|(&variant, row)| {
            let errors = settings
                .resolutions
                .iter()
                .zip(row)
                .map(|(&n, res)| res.expect("every job ran").map(|(l1, linf)| (n, l1, linf)))
                .collect::<netflux::Result<Vec<_>>>()?;
            Ok(ErrorReport::new(
                variant.label(),
                settings.time_step_label(variant),
                settings.t_eval,
                &errors,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_shrink_under_refinement() {
        let settings = StudySettings {
            resolutions: vec![20, 40],
            t_eval: 0.3,
            cfl_first: 0.49,
            dt_muscl: 2e-3,
        };
        let reports = study(&Variant::ALL, &settings).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(variant_errors(
            Variant::Central,
            20,
            &StudySettings {
                t_eval: 0.7,
                ..settings.clone()
            }
        )
        .is_err());
        for r in &reports {
            assert!(r.rows[1].l1 < r.rows[0].l1, "{}", r.scheme);
            assert!(r.rows[1].eoc_l1.unwrap() > 0.5, "{}", r.scheme);
        }
    }
}

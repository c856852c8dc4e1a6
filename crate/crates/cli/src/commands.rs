use rayon::prelude::*;
use serde_json::json;

use ringergo::dynamics::{
    chirality_drift, ergotropy_trajectory, oscillation_period, shift_times, time_grid, DriftKind,
    Propagator,
};
use ringergo::ergotropy::{optimal_transform_map, profile};
use ringergo::model::{coupling_table, current_state, per_site_energy, population, state_energy};
use ringergo::oracle::{
    brute_force_ergotropy, embed_1x, GridSpec, SpinHamiltonian, ORACLE_MAX_SITES,
};
use ringergo::verify::run_all;
use ringergo::{CouplingTable, Error, PureState1x};

use crate::config::{Grid, RunConfig};
use crate::output::{Cell, Table};
use crate::{CliError, DynamicsArgs, VerifyArgs};

/// Tolerance for tagging a rotation as optimal.
const OPTIMAL_TOL: f64 = 1e-10;
/// Largest closed-form vs brute-force gap accepted by `compare`.
const COMPARE_TOL: f64 = 1e-6;

fn check_site(config: &RunConfig, site: usize) -> Result<usize, CliError> {
    if site == 0 || site > config.sites() {
        return Err(CliError::config(format!(
            "--S {site} outside 1..={}",
            config.sites()
        )));
    }
    Ok(site)
}

fn table(config: &RunConfig) -> Result<CouplingTable, CliError> {
    Ok(coupling_table(&config.ring, config.delta)?)
}

pub fn distribution(config: &RunConfig) -> Result<(), CliError> {
    let table = table(config)?;
    let state = config.build_state()?;
    let p = profile(&state, &table)?;
    let tags = optimal_transform_map(&p, OPTIMAL_TOL);
    let pop = population(&state);
    let energy = per_site_energy(&state, &table);

    let mut out = Table::new(&[
        "S",
        "le",
        "branch",
        "gS",
        "Wx",
        "Wz",
        "deltaX",
        "deltaZ",
        "convexity",
        "population",
        "per_site_energy",
        "optimal",
    ]);
    for (i, s) in p.sites.iter().enumerate() {
        out.push(vec![
            s.site.into(),
            s.le.into(),
            s.branch.as_str().into(),
            s.g_s.into(),
            s.wx.into(),
            s.wz.into(),
            s.delta_x.into(),
            s.delta_z.into(),
            s.convexity.into(),
            pop[i].into(),
            energy[i].into(),
            tags[i].as_str().into(),
        ]);
    }
    out.report_num("max_le", p.max_le());
    out.report_num("mean_le", p.mean_le());
    out.report_num("mean_deltaX", p.mean_delta_x());
    out.report_num("mean_deltaZ", p.mean_delta_z());
    out.report_num("energy", state_energy(&state, &table).total);
    out.emit(config)
}

fn grid_points(grid: Option<Grid>, fallback: f64) -> Result<Vec<f64>, CliError> {
    match grid {
        Some(g) => g.points(),
        None => Ok(vec![fallback]),
    }
}

struct SweepRow {
    j: f64,
    delta: f64,
    max_le: f64,
    mean_le: f64,
    mean_dx: f64,
    mean_dz: f64,
    convexity: f64,
    single_sum: Option<f64>,
}

pub fn sweep(config: &RunConfig) -> Result<(), CliError> {
    let j0 = coupling_table(&config.ring, 0.0)?.reference_hop();
    let js = grid_points(config.j_grid, j0)?;
    let deltas = grid_points(config.delta_grid, config.delta)?;
    let site = check_site(config, config.site.unwrap_or(config.sites()))?;
    let state = config.build_state()?;
    let singles: Option<Vec<PureState1x>> = match config.windings() {
        Some(w) if w.len() > 1 => Some(
            w.iter()
                .map(|&ell| current_state(config.sites(), ell))
                .collect::<Result<_, _>>()?,
        ),
        _ => None,
    };

    let rings = js
        .iter()
        .map(|&j| Ok((j, config.ring_with_exchange(j)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let points: Vec<(f64, f64, ringergo::RingSpec)> = rings
        .iter()
        .flat_map(|&(j, ring)| deltas.iter().map(move |&d| (j, d, ring)))
        .collect();

    let rows = points
        .par_iter()
        .map(|&(j, delta, ring)| {
            let table = coupling_table(&ring, delta)?;
            let p = profile(&state, &table)?;
            let single_sum = match &singles {
                Some(states) => Some(
                    states
                        .iter()
                        .map(|s| profile(s, &table).map(|p| p.mean_le()))
                        .sum::<Result<f64, Error>>()?,
                ),
                None => None,
            };
            Ok(SweepRow {
                j,
                delta,
                max_le: p.max_le(),
                mean_le: p.mean_le(),
                mean_dx: p.mean_delta_x(),
                mean_dz: p.mean_delta_z(),
                convexity: p.at(site).convexity,
                single_sum,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut columns = vec![
        "J",
        "Delta",
        "max_le",
        "mean_le",
        "mean_deltaX",
        "mean_deltaZ",
        "convexity_S",
    ];
    if singles.is_some() {
        columns.push("single_sum");
    }
    let mut out = Table::new(&columns);
    for r in &rows {
        let mut row: Vec<Cell> = vec![
            r.j.into(),
            r.delta.into(),
            r.max_le.into(),
            r.mean_le.into(),
            r.mean_dx.into(),
            r.mean_dz.into(),
            r.convexity.into(),
        ];
        if let Some(s) = r.single_sum {
            row.push(s.into());
        }
        out.push(row);
    }
    out.report("S", json!(site));
    out.report("points", json!(rows.len()));
    out.emit(config)
}

pub fn dynamics(config: &RunConfig, args: &DynamicsArgs) -> Result<(), CliError> {
    let table = table(config)?;
    let scale = table.reference_hop().abs();
    if scale == 0.0 && (config.t_max.is_none() || config.dt.is_none()) {
        return Err(CliError::config("J = 0: give --t-max and --dt explicitly"));
    }
    let t_max = config.t_max.unwrap_or(10.0 / scale);
    let dt = config.dt.unwrap_or(0.05 / scale);
    let site = check_site(config, config.site.unwrap_or(1))?;
    let state = config.build_state()?;
    let prop = Propagator::new(&table);
    let content = prop.two_current_content(&state)?;

    let mut times = time_grid(t_max, dt)?;
    if args.include_shifts {
        if let Some((l1, l2, _)) = content {
            times.extend(
                shift_times(&prop.spectrum, l1, l2, t_max)
                    .into_iter()
                    .map(|s| s.0),
            );
            times.sort_by(f64::total_cmp);
            times.dedup_by(|a, b| (*a - *b).abs() <= args.window);
        }
    }

    let traj = ergotropy_trajectory(&state, &table, &times)?;
    let drift = chirality_drift(&traj, args.window)?;

    let mut out = Table::new(&["t", "S", "le", "population", "drift", "drift_kind"]);
    for (i, (p, sample)) in traj.profiles.iter().zip(&drift.samples).enumerate() {
        let (t, pop) = (traj.times[i], population(&traj.states[i]));
        let kind = match sample.kind {
            DriftKind::Shift(m) => format!("shift{m}"),
            DriftKind::Analytic => "analytic".to_string(),
            DriftKind::BestShift(m) => format!("best_shift{m}"),
        };
        for s in &p.sites {
            out.push(vec![
                t.into(),
                s.site.into(),
                s.le.into(),
                pop[s.site - 1].into(),
                sample.drift.into(),
                kind.as_str().into(),
            ]);
        }
    }
    out.report("applicable", json!(drift.applicable));
    out.report("windings", json!(drift.windings));
    out.report_num("max_drift", drift.max_drift());
    out.report("S", json!(site));
    // the crossing estimate assumes a uniform grid
    let period = if args.include_shifts {
        None
    } else {
        oscillation_period(&traj.site_series(site), dt)
    };
    out.report("period_S", json!(period));
    if let Some((l1, l2, _)) = content {
        out.report_num("beat_period", prop.spectrum.beat_period(l1, l2));
        let shifts = shift_times(&prop.spectrum, l1, l2, t_max);
        out.report(
            "shift_times",
            json!(shifts.iter().map(|s| s.0).collect::<Vec<_>>()),
        );
    }
    out.emit(config)
}

pub fn compare(config: &RunConfig) -> Result<(), CliError> {
    let l = config.sites();
    if l > ORACLE_MAX_SITES {
        return Err(Error::OracleCap {
            sites: l,
            cap: ORACLE_MAX_SITES,
        }
        .into());
    }
    let table = table(config)?;
    let state = config.build_state()?;
    let p = profile(&state, &table)?;
    let h = SpinHamiltonian::from_table(&table)?;
    let dense = embed_1x(&state)?;
    let sites: Vec<usize> = match config.site {
        Some(s) => vec![check_site(config, s)?],
        None => (1..=l).collect(),
    };
    let grid = GridSpec::default();
    let brute = sites
        .par_iter()
        .map(|&s| brute_force_ergotropy(&dense, &h, s, &grid))
        .collect::<Result<Vec<_>, Error>>()?;

    let mut out = Table::new(&["S", "le_closed", "le_brute", "diff", "grid_best"]);
    let mut worst = 0.0f64;
    for (&s, b) in sites.iter().zip(&brute) {
        let closed = p.at(s).le;
        let diff = closed - b.work;
        worst = worst.max(diff.abs());
        out.push(vec![
            s.into(),
            closed.into(),
            b.work.into(),
            diff.into(),
            b.grid_best.into(),
        ]);
    }
    out.report_num("max_abs_diff", worst);
    out.report_num("tolerance", COMPARE_TOL);
    out.report("passed", json!(worst < COMPARE_TOL));
    out.emit(config)?;
    if worst < COMPARE_TOL {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "max |closed - brute| = {worst:e}"
        )))
    }
}

pub fn verify(config: &RunConfig, args: &VerifyArgs) -> Result<(), CliError> {
    if args.max_sites > ORACLE_MAX_SITES {
        return Err(Error::OracleCap {
            sites: args.max_sites,
            cap: ORACLE_MAX_SITES,
        }
        .into());
    }
    let reports = run_all(config.seed, args.states, args.max_sites)?;
    let mut out = Table::new(&["suite", "passed", "cases", "max_deviation", "tolerance"]);
    for r in &reports {
        out.push(vec![
            r.name.as_str().into(),
            r.passed.into(),
            r.cases.into(),
            r.max_deviation.into(),
            r.tolerance.into(),
        ]);
    }
    let details: serde_json::Map<String, serde_json::Value> = reports
        .iter()
        .map(|r| (r.name.clone(), json!(r.detail)))
        .collect();
    out.report("seed", json!(config.seed));
    out.report("detail", serde_json::Value::Object(details));
    out.emit(config)?;
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

//! Continuous-time kinetic Monte Carlo (Gillespie) estimates of
//! stationary observables.
//!
//! Each replica draws from its own ChaCha stream, selected by the replica
//! index, so results depend only on `(seed, replica)` and replicas can be
//! run in any order or in parallel. [`ReplicaTally::merge`] is
//! associative.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use crate::process::Event;
use crate::process::{for_each_event, Configuration, ProcessParams};
use crate::{Error, Result};

/// Starting configuration of each replica.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Empty,
    Full,
    /// Independent sites occupied with the given probability.
    Product(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    /// `None` selects `10 L / (smallest positive rate)`.
    pub t_burn: Option<f64>,
    pub t_measure: f64,
    pub n_replicas: usize,
    pub seed: u64,
    pub initial: InitialState,
}

impl TrajectoryConfig {
    pub fn new(t_measure: f64, n_replicas: usize, seed: u64) -> Self {
        TrajectoryConfig { t_burn: None, t_measure, n_replicas, seed, initial: InitialState::Empty }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.t_burn {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!("t_burn must be >= 0, got {t}")));
            }
        }
        if !(self.t_measure > 0.0) || !self.t_measure.is_finite() {
            return Err(Error::InvalidParameter(format!("t_measure must be positive, got {}", self.t_measure)));
        }
        if self.n_replicas == 0 {
            return Err(Error::InvalidParameter("need at least one replica".into()));
        }
        if let InitialState::Product(r) = self.initial {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("product density {r} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn burn_in(&self, params: &ProcessParams) -> f64 {
        self.t_burn.unwrap_or(10.0 * params.sites as f64 / params.min_positive_rate())
    }
}

/// Events enabled in `c`, each with its rate.
pub fn enabled_events(c: &Configuration, params: &ProcessParams) -> Vec<(Event, f64)> {
    let mut out = Vec::new();
    for_each_event(c, params, |e, r| out.push((e, r)));
    out
}

/// Uniform draw in `(0, 1]`.
fn uniform(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

/// The replica generator for `(seed, replica)`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// A single Gillespie step: holding time and the chosen event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub dt: f64,
    pub event: Event,
}

/// Gillespie stepper over one trajectory.
#[derive(Debug, Clone)]
pub struct Gillespie {
    params: ProcessParams,
    state: Configuration,
    events: Vec<(Event, f64)>,
}

impl Gillespie {
    pub fn new(params: ProcessParams, state: Configuration) -> Self {
        Gillespie { params, state, events: Vec::with_capacity(params.sites + 2) }
    }

    pub fn state(&self) -> &Configuration {
        &self.state
    }

    /// Draws the holding time in the current configuration and the event
    /// that ends it, without applying the event.
    pub fn sample(&mut self, rng: &mut impl RngCore) -> Result<Step> {
        self.events.clear();
        let events = &mut self.events;
        for_each_event(&self.state, &self.params, |e, r| events.push((e, r)));
        let total: f64 = self.events.iter().map(|(_, r)| r).sum();
        if !(total > 0.0) {
            return Err(Error::Absorbing(format!("{}", self.state)));
        }
        let dt = -libm::log(uniform(rng)) / total;
        let mut target = (1.0 - uniform(rng)) * total;
        let mut event = self.events[self.events.len() - 1].0;
        for &(e, r) in &self.events {
            if target < r {
                event = e;
                break;
            }
            target -= r;
        }
        Ok(Step { dt, event })
    }

    pub fn apply(&mut self, event: Event) {
        event.apply(&mut self.state);
    }
}

/// Accumulated time-weighted occupation and net crossing counts of one or
/// more replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaTally {
    pub sites: usize,
    /// Measured time of each replica.
    pub time: Vec<f64>,
    /// Per replica, per site: time spent occupied.
    pub occupied_time: Vec<Vec<f64>>,
    /// Per replica: net counts over left boundary, the `L - 1` bonds and
    /// the right boundary.
    pub crossings: Vec<Vec<i64>>,
    pub events: u64,
}

impl ReplicaTally {
    pub fn empty(sites: usize) -> Self {
        ReplicaTally { sites, time: Vec::new(), occupied_time: Vec::new(), crossings: Vec::new(), events: 0 }
    }

    pub fn replicas(&self) -> usize {
        self.time.len()
    }

    /// Concatenates replica lists; associative, with [`ReplicaTally::empty`]
    /// as identity.
    pub fn merge(mut self, other: ReplicaTally) -> ReplicaTally {
        self.time.extend(other.time);
        self.occupied_time.extend(other.occupied_time);
        self.crossings.extend(other.crossings);
        self.events += other.events;
        self
    }
}

fn initial_state(cfg: &TrajectoryConfig, sites: usize, rng: &mut impl RngCore) -> Configuration {
    match cfg.initial {
        InitialState::Empty => Configuration::empty(sites),
        InitialState::Full => Configuration::full(sites),
        InitialState::Product(rho) => {
            let mut c = Configuration::empty(sites);
            for i in 1..=sites {
                if uniform(rng) <= rho {
                    c.set(i, true);
                }
            }
            c
        }
    }
}

/// Index into the crossing counters and the sign an event contributes.
fn crossing(event: Event, sites: usize) -> (usize, i64) {
    match event {
        Event::InjectLeft => (0, 1),
        Event::ExtractLeft => (0, -1),
        Event::HopRight(i) => (i, 1),
        Event::HopLeft(i) => (i, -1),
        Event::ExtractRight => (sites, 1),
        Event::InjectRight => (sites, -1),
    }
}

/// Simulates replica `replica` of the ensemble described by `cfg`.
pub fn run_replica(params: &ProcessParams, cfg: &TrajectoryConfig, replica: u64) -> Result<ReplicaTally> {
    params.validate()?;
    cfg.validate()?;
    let l = params.sites;
    let mut rng = replica_rng(cfg.seed, replica);
    let mut sim = Gillespie::new(*params, initial_state(cfg, l, &mut rng));
    let t_start = cfg.burn_in(params);
    let t_end = t_start + cfg.t_measure;
    let mut occ = vec![0.0; l];
    let mut counts = vec![0i64; l + 1];
    let mut events = 0u64;
    let mut t = 0.0;
    while t < t_end {
        let step = sim.sample(&mut rng)?;
        let lo = t.max(t_start);
        let hi = (t + step.dt).min(t_end);
        if hi > lo {
            for (i, o) in occ.iter_mut().enumerate() {
                if sim.state().occupied(i + 1) {
                    *o += hi - lo;
                }
            }
        }
        t += step.dt;
        if t >= t_end {
            break;
        }
        sim.apply(step.event);
        events += 1;
        if t >= t_start {
            let (k, s) = crossing(step.event, l);
            counts[k] += s;
        }
    }
    Ok(ReplicaTally {
        sites: l,
        time: vec![cfg.t_measure],
        occupied_time: vec![occ],
        crossings: vec![counts],
        events: events.max(1),
    })
}

/// Means and standard errors across replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub params: ProcessParams,
    pub densities: Vec<f64>,
    pub density_stderr: Vec<f64>,
    /// Middle-bond current (the left boundary when `L = 1`).
    pub current: f64,
    pub current_stderr: f64,
    /// Left boundary, bonds, right boundary.
    pub currents: Vec<f64>,
    pub currents_stderr: Vec<f64>,
    pub replicas: usize,
    pub events: u64,
}

/// Index of the middle bond in the crossing counters.
pub fn middle_bond(sites: usize) -> usize {
    if sites == 1 {
        0
    } else {
        sites / 2
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

impl EstimateReport {
    pub fn from_tally(params: &ProcessParams, tally: &ReplicaTally) -> Result<Self> {
        if tally.replicas() == 0 {
            return Err(Error::InvalidParameter("no replicas to summarize".into()));
        }
        let l = tally.sites;
        let mut densities = Vec::with_capacity(l);
        let mut density_stderr = Vec::with_capacity(l);
        for i in 0..l {
            let xs: Vec<f64> = tally.occupied_time.iter().zip(&tally.time).map(|(o, t)| o[i] / t).collect();
            let (m, s) = mean_stderr(&xs);
            densities.push(m);
            density_stderr.push(s);
        }
        let mut currents = Vec::with_capacity(l + 1);
        let mut currents_stderr = Vec::with_capacity(l + 1);
        for k in 0..=l {
            let xs: Vec<f64> = tally.crossings.iter().zip(&tally.time).map(|(c, t)| c[k] as f64 / t).collect();
            let (m, s) = mean_stderr(&xs);
            currents.push(m);
            currents_stderr.push(s);
        }
        let mid = middle_bond(l);
        Ok(EstimateReport {
            params: *params,
            current: currents[mid],
            current_stderr: currents_stderr[mid],
            densities,
            density_stderr,
            currents,
            currents_stderr,
            replicas: tally.replicas(),
            events: tally.events,
        })
    }
}

/// Runs all replicas in index order and summarizes them.
pub fn estimate(params: &ProcessParams, cfg: &TrajectoryConfig) -> Result<EstimateReport> {
    params.validate()?;
    cfg.validate()?;
    if !params.is_irreducible() {
        return Err(Error::NonUniqueSteadyState(crate::process::describe(params)));
    }
    let mut tally = ReplicaTally::empty(params.sites);
    for r in 0..cfg.n_replicas {
        tally = tally.merge(run_replica(params, cfg, r as u64)?);
    }
    EstimateReport::from_tally(params, &tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::build_generator;

    #[test]
    fn events_of_small_configurations() {
        let p = ProcessParams::tasep(1.0, 1.0, 2).unwrap();
        let ev = enabled_events(&Configuration::parse("10").unwrap(), &p);
        assert_eq!(ev, vec![(Event::HopRight(1), 1.0)]);
        let p = ProcessParams::new(0.5, 0.0, 1.0, 0.0, 0.7, 2).unwrap();
        let ev = enabled_events(&Configuration::parse("00").unwrap(), &p);
        assert_eq!(ev, vec![(Event::InjectRight, 0.7)]);
    }

    #[test]
    fn event_count_matches_generator() {
        let p = ProcessParams::new(0.3, 0.5, 1.0, 0.2, 0.4, 5).unwrap();
        let g = build_generator(&p).unwrap();
        let total: usize = (0..p.dim()).map(|s| enabled_events(&Configuration::from_index(s, 5), &p).len()).sum();
        assert_eq!(total, g.off_diagonal_count());
    }

    #[test]
    fn single_site_density() {
        let p = ProcessParams::tasep(1.0, 1.0, 1).unwrap();
        let r = estimate(&p, &TrajectoryConfig::new(1e4, 16, 7)).unwrap();
        assert!((r.densities[0] - 0.5).abs() < 3.0 * r.density_stderr[0]);
    }

    #[test]
    fn deterministic_and_order_free() {
        let p = ProcessParams::new(0.5, 1.0, 0.8, 0.1, 0.2, 3).unwrap();
        let cfg = TrajectoryConfig::new(50.0, 4, 99);
        let a = estimate(&p, &cfg).unwrap();
        let b = estimate(&p, &cfg).unwrap();
        assert_eq!(a, b);
        let parts: Vec<ReplicaTally> = (0..4).map(|r| run_replica(&p, &cfg, r).unwrap()).collect();
        let left = parts[0].clone().merge(parts[1].clone()).merge(parts[2].clone().merge(parts[3].clone()));
        let c = EstimateReport::from_tally(&p, &left).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn absorbing_state_is_reported() {
        let p = ProcessParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 2).unwrap();
        let mut g = Gillespie::new(p, Configuration::empty(2));
        let err = g.sample(&mut replica_rng(1, 0)).unwrap_err();
        assert_eq!(err, Error::Absorbing("00".into()));
    }
}

//! Central difference integration of `M̄ü + K̄u = f` and an empirical bracket
//! of the critical step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{CsrMatrix, LinalgError, SymMatrix};
use crate::scaling::{MassSolver, ScaledMass};

/// Steps per bracket run.
pub const BRACKET_STEPS: usize = 10_000;
/// A run is stable when the response never exceeds this multiple of the initial one.
pub const STABLE_GROWTH: f64 = 10.0;
/// A run is unstable once the response exceeds this multiple.
pub const UNSTABLE_GROWTH: f64 = 1e6;
pub const STABLE_FACTOR: f64 = 0.99;
pub const UNSTABLE_FACTOR: f64 = 1.05;
/// Smallest accepted relative component of the initial state on the top mode.
pub const MIN_TOP_COMPONENT: f64 = 1e-12;
const MAX_RESEEDS: u64 = 16;
const POWER_ITERATIONS: usize = 2000;

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("expected vectors of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("mass solve failed")]
    SolveFailure(#[from] LinalgError),
    #[error("run at dt = {dt} neither stayed below {STABLE_GROWTH}x nor passed {UNSTABLE_GROWTH}x (peak {peak})")]
    Inconclusive { dt: f64, peak: f64 },
    #[error("no seeded initial state has a top-mode component above {MIN_TOP_COMPONENT}")]
    DegenerateInitialState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransientState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub t: f64,
    pub step: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// `½ v₊ᵀM̄v₊ + ½ uₙᵀK̄uₙ₊₁` with `v₊ = (uₙ₊₁ − uₙ)/Δt`, which the scheme
    /// conserves exactly for `f = 0`.
    pub energy: f64,
    /// `½ vᵀM̄v + ½ uᵀK̄u` with the central velocity.
    pub synchronized_energy: f64,
    /// `‖uₙ‖_M̄`.
    pub response: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Constant external load; zero when absent.
    pub force: Option<Vec<f64>>,
    /// Stop once the response exceeds this value.
    pub stop_above: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub state: TransientState,
    pub trace: Vec<StepRecord>,
    /// True when `stop_above` ended the run early.
    pub stopped: bool,
}

impl Run {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("step,time,energy,synchronized_energy,response\n");
        for r in &self.trace {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.step, r.time, r.energy, r.synchronized_energy, r.response
            ));
        }
        s
    }
}

/// Products with `M̄` at the cost of its storage.
enum MassProduct<'a> {
    Stored(&'a ScaledMass),
    Sparse(CsrMatrix),
}

impl MassProduct<'_> {
    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MassProduct::Stored(m) => m.mul_vec(x),
            MassProduct::Sparse(m) => m.mul_vec(x),
        }
    }
}

/// Factored system ready for repeated runs.
pub struct CentralDifference<'a> {
    k: CsrMatrix,
    mass: MassProduct<'a>,
    solver: MassSolver,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl<'a> CentralDifference<'a> {
    pub fn new(k: &SymMatrix, mass: &'a ScaledMass) -> Result<Self, IntegratorError> {
        if k.order() != mass.order() {
            return Err(IntegratorError::DimensionMismatch {
                expected: k.order(),
                actual: mass.order(),
            });
        }
        let product = match mass {
            ScaledMass::Dense(m) => MassProduct::Sparse(CsrMatrix::from_sym(m)),
            other => MassProduct::Stored(other),
        };
        Ok(Self {
            k: CsrMatrix::from_sym(k),
            mass: product,
            solver: mass.solver()?,
        })
    }

    pub fn order(&self) -> usize {
        self.k.order()
    }

    /// `‖x‖_M̄`.
    pub fn mass_norm(&self, x: &[f64]) -> f64 {
        dot(x, &self.mass.mul_vec(x)).max(0.0).sqrt()
    }

    fn check(&self, x: &[f64]) -> Result<(), IntegratorError> {
        if x.len() != self.order() {
            return Err(IntegratorError::DimensionMismatch {
                expected: self.order(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `a = M̄⁻¹(f − K̄u)`.
    fn acceleration(&self, u: &[f64], f: Option<&[f64]>, out: &mut [f64], scratch: &mut [f64]) {
        self.k.mul_vec_into(u, out);
        match f {
            Some(f) => out.iter_mut().zip(f).for_each(|(x, fi)| *x = fi - *x),
            None => out.iter_mut().for_each(|x| *x = -*x),
        }
        self.solver.solve_in_place(out, scratch);
    }

    pub fn run(
        &self,
        u0: &[f64],
        v0: &[f64],
        dt: f64,
        steps: usize,
        options: &RunOptions,
    ) -> Result<Run, IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::InvalidStep(dt));
        }
        self.check(u0)?;
        self.check(v0)?;
        if let Some(f) = &options.force {
            self.check(f)?;
        }
        let n = self.order();
        let f = options.force.as_deref();
        let mut scratch = vec![0.0; n];
        let mut a = vec![0.0; n];
        self.acceleration(u0, f, &mut a, &mut scratch);
        let mut prev: Vec<f64> = (0..n)
            .map(|i| u0[i] - dt * v0[i] + 0.5 * dt * dt * a[i])
            .collect();
        let mut cur = u0.to_vec();
        let mut next = vec![0.0; n];
        let mut ku = vec![0.0; n];
        let mut trace = Vec::with_capacity(steps + 1);
        let mut stopped = false;
        let mut done = 0;
        for step in 0..=steps {
            for i in 0..n {
                next[i] = 2.0 * cur[i] - prev[i] + dt * dt * a[i];
            }
            let v_half: Vec<f64> = (0..n).map(|i| (next[i] - cur[i]) / dt).collect();
            let v: Vec<f64> = (0..n).map(|i| (next[i] - prev[i]) / (2.0 * dt)).collect();
            self.k.mul_vec_into(&cur, &mut ku);
            let kinetic_half = 0.5 * dot(&v_half, &self.mass.mul_vec(&v_half));
            let response = dot(&cur, &self.mass.mul_vec(&cur)).max(0.0).sqrt();
            trace.push(StepRecord {
                step,
                time: step as f64 * dt,
                energy: kinetic_half + 0.5 * dot(&next, &ku),
                synchronized_energy: 0.5 * dot(&v, &self.mass.mul_vec(&v)) + 0.5 * dot(&cur, &ku),
                response,
            });
            done = step;
            if options.stop_above.is_some_and(|limit| !(response <= limit)) {
                stopped = true;
                break;
            }
            if step == steps {
                break;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
            self.acceleration(&cur, f, &mut a, &mut scratch);
        }
        let v = (0..n).map(|i| (next[i] - prev[i]) / (2.0 * dt)).collect();
        Ok(Run {
            state: TransientState {
                u: cur,
                v,
                a,
                t: done as f64 * dt,
                step: done,
            },
            trace,
            stopped,
        })
    }

    /// Top eigenvector of `(K̄, M̄)` by power iteration, `M̄`-normalized.
    pub fn top_mode(&self, seed: u64) -> Vec<f64> {
        let n = self.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x746f70);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut scratch = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut last = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let norm = self.mass_norm(&x);
            x.iter_mut().for_each(|v| *v /= norm);
            self.k.mul_vec_into(&x, &mut y);
            let rq = dot(&x, &y);
            self.solver.solve_in_place(&mut y, &mut scratch);
            std::mem::swap(&mut x, &mut y);
            if (rq - last).abs() <= 1e-14 * rq.abs() {
                break;
            }
            last = rq;
        }
        let norm = self.mass_norm(&x);
        x.iter_mut().for_each(|v| *v /= norm);
        x
    }

    /// Seeded unit-norm displacement whose relative `M̄`-component on the
    /// top mode is at least `MIN_TOP_COMPONENT`; re-seeds otherwise.
    pub fn initial_displacement(&self, seed: u64) -> Result<(Vec<f64>, u64), IntegratorError> {
        let top = self.top_mode(seed);
        let mtop = self.mass.mul_vec(&top);
        for s in seed..seed + MAX_RESEEDS {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut u: Vec<f64> = (0..self.order())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let norm = dot(&u, &u).sqrt();
            u.iter_mut().for_each(|x| *x /= norm);
            if dot(&mtop, &u).abs() >= MIN_TOP_COMPONENT * self.mass_norm(&u) {
                return Ok((u, s));
            }
        }
        Err(IntegratorError::DegenerateInitialState)
    }

    /// Classifies a zero-load run from rest at `u0`. Same recurrence as
    /// [`CentralDifference::run`], tracking only the response.
    pub fn verdict(
        &self,
        u0: &[f64],
        dt: f64,
        steps: usize,
    ) -> Result<StabilityVerdict, IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::InvalidStep(dt));
        }
        self.check(u0)?;
        let n = self.order();
        let initial = self.mass_norm(u0);
        let limit = UNSTABLE_GROWTH * initial;
        let mut scratch = vec![0.0; n];
        let mut a = vec![0.0; n];
        self.acceleration(u0, None, &mut a, &mut scratch);
        let mut prev: Vec<f64> = (0..n).map(|i| u0[i] + 0.5 * dt * dt * a[i]).collect();
        let mut cur = u0.to_vec();
        let (mut peak, mut last, mut done, mut stopped) = (0.0f64, initial, 0, false);
        for step in 0..=steps {
            let response = self.mass_norm(&cur);
            peak = peak.max(response);
            last = response;
            done = step;
            if !(response <= limit) {
                stopped = true;
                break;
            }
            if step == steps {
                break;
            }
            // prev becomes the next displacement
            for i in 0..n {
                prev[i] = 2.0 * cur[i] - prev[i] + dt * dt * a[i];
            }
            std::mem::swap(&mut prev, &mut cur);
            self.acceleration(&cur, None, &mut a, &mut scratch);
        }
        let (peak, growth) = (peak / initial, last / initial);
        let classification = if stopped {
            Stability::Unstable
        } else if peak <= STABLE_GROWTH {
            Stability::Stable
        } else {
            return Err(IntegratorError::Inconclusive { dt, peak });
        };
        Ok(StabilityVerdict {
            classification,
            dt,
            growth,
            peak,
            steps_run: done,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub classification: Stability,
    pub dt: f64,
    /// Final over initial response.
    pub growth: f64,
    /// Largest over initial response.
    pub peak: f64,
    pub steps_run: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub dt_estimate: f64,
    pub seed: u64,
    pub below: StabilityVerdict,
    pub above: StabilityVerdict,
}

impl Bracket {
    /// Stable below the estimate and unstable above it.
    pub fn confirms(&self) -> bool {
        self.below.classification == Stability::Stable
            && self.above.classification == Stability::Unstable
    }
}

/// Runs `BRACKET_STEPS` steps at `0.99·dt_estimate` and `1.05·dt_estimate`,
/// in parallel, from the same seeded unit displacement.
pub fn stability_bracket(
    k: &SymMatrix,
    mass: &ScaledMass,
    dt_estimate: f64,
    seed: u64,
) -> Result<Bracket, IntegratorError> {
    bracket_with_steps(k, mass, dt_estimate, seed, BRACKET_STEPS)
}

pub fn bracket_with_steps(
    k: &SymMatrix,
    mass: &ScaledMass,
    dt_estimate: f64,
    seed: u64,
    steps: usize,
) -> Result<Bracket, IntegratorError> {
    if !(dt_estimate > 0.0 && dt_estimate.is_finite()) {
        return Err(IntegratorError::InvalidStep(dt_estimate));
    }
    let cd = CentralDifference::new(k, mass)?;
    let (u0, used) = cd.initial_displacement(seed)?;
    let (below, above) = std::thread::scope(|s| {
        let low = s.spawn(|| cd.verdict(&u0, STABLE_FACTOR * dt_estimate, steps));
        let high = cd.verdict(&u0, UNSTABLE_FACTOR * dt_estimate, steps);
        (low.join().expect("bracket thread panicked"), high)
    });
    Ok(Bracket {
        dt_estimate,
        seed: used,
        below: below?,
        above: above?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sdof(k: f64, m: f64) -> (SymMatrix, ScaledMass) {
        (
            SymMatrix::from_diagonal(&[k]),
            ScaledMass::Diagonal(vec![m]),
        )
    }

    #[test]
    fn free_flight_is_exact() {
        let k = SymMatrix::zeros(3);
        let m = ScaledMass::Diagonal(vec![1.0, 2.0, 3.0]);
        let cd = CentralDifference::new(&k, &m).unwrap();
        let (u0, v0) = ([1.0, -2.0, 0.5], [0.25, 0.5, -1.0]);
        let run = cd.run(&u0, &v0, 0.125, 64, &RunOptions::default()).unwrap();
        for i in 0..3 {
            assert!((run.state.u[i] - (u0[i] + v0[i] * 8.0)).abs() < 1e-12);
            assert!((run.state.v[i] - v0[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sdof_tracks_the_discrete_cosine() {
        // u_n = cos(nθ) with cos θ = 1 − Δt²/2 for ω = 1, u₀ = 1, v₀ = 0
        let (k, m) = sdof(1.0, 1.0);
        let cd = CentralDifference::new(&k, &m).unwrap();
        let dt = 0.1;
        let run = cd
            .run(&[1.0], &[0.0], dt, 1000, &RunOptions::default())
            .unwrap();
        let theta = (1.0 - dt * dt / 2.0_f64).acos();
        assert_eq!(run.trace.len(), 1001);
        assert!((run.state.u[0] - (1000.0 * theta).cos()).abs() < 1e-9);
        // period error against the exact cosine is O(Δt²)
        let rel = theta / dt - 1.0;
        assert!((rel - dt * dt / 24.0).abs() < dt.powi(4));
        let e0 = run.trace[0].energy;
        assert!(run.trace.iter().all(|r| (r.energy - e0).abs() < 1e-12 * e0));
    }

    #[test]
    fn sdof_diverges_beyond_the_critical_step() {
        let (k, m) = sdof(1.0, 1.0);
        let cd = CentralDifference::new(&k, &m).unwrap();
        let v = cd.verdict(&[1.0], 2.05, 200).unwrap();
        assert_eq!(v.classification, Stability::Unstable);
        assert!(v.steps_run < 200);
    }

    #[test]
    fn verdict_follows_the_full_run() {
        let k = SymMatrix::from_lower_fn(3, |i, j| {
            if i == j {
                2.0
            } else if i == j + 1 {
                -1.0
            } else {
                0.0
            }
        });
        let m = ScaledMass::Dense(SymMatrix::from_lower_fn(
            3,
            |i, j| if i == j { 1.0 } else { 0.1 },
        ));
        let cd = CentralDifference::new(&k, &m).unwrap();
        let u0 = [0.3, -0.5, 0.8];
        for dt in [0.5, 1.6] {
            let v = cd.verdict(&u0, dt, 300).unwrap_or_else(|e| panic!("{e}"));
            let initial = cd.mass_norm(&u0);
            let options = RunOptions {
                force: None,
                stop_above: Some(UNSTABLE_GROWTH * initial),
            };
            let run = cd.run(&u0, &[0.0; 3], dt, 300, &options).unwrap();
            let peak = run.trace.iter().map(|r| r.response).fold(0.0, f64::max) / initial;
            assert_eq!(v.steps_run, run.state.step);
            assert!((v.peak - peak).abs() <= 1e-12 * peak);
            assert_eq!(v.classification == Stability::Unstable, run.stopped);
        }
    }

    #[test]
    fn sdof_bracket() {
        let (k, m) = sdof(1.0, 1.0);
        let b = stability_bracket(&k, &m, 2.0, 42).unwrap();
        assert!((b.below.dt - 1.98).abs() < 1e-12 && (b.above.dt - 2.1).abs() < 1e-12);
        assert!(b.confirms());
    }

    #[test]
    fn loaded_sdof_oscillates_about_the_static_solution() {
        let (k, m) = sdof(4.0, 1.0);
        let cd = CentralDifference::new(&k, &m).unwrap();
        let options = RunOptions {
            force: Some(vec![8.0]),
            stop_above: None,
        };
        let run = cd.run(&[0.0], &[0.0], 0.01, 5000, &options).unwrap();
        let (lo, hi) = run
            .trace
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
                (lo.min(r.response), hi.max(r.response))
            });
        assert!(lo < 1e-3 && (hi - 4.0).abs() < 1e-2);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let (k, m) = sdof(1.0, 1.0);
        let cd = CentralDifference::new(&k, &m).unwrap();
        assert!(matches!(
            cd.run(&[1.0], &[0.0], 0.0, 1, &RunOptions::default()),
            Err(IntegratorError::InvalidStep(_))
        ));
        assert!(matches!(
            cd.run(&[1.0, 2.0], &[0.0], 0.1, 1, &RunOptions::default()),
            Err(IntegratorError::DimensionMismatch { .. })
        ));
        let bad = ScaledMass::Diagonal(vec![0.0]);
        assert!(matches!(
            CentralDifference::new(&k, &bad),
            Err(IntegratorError::SolveFailure(_))
        ));
    }

    #[test]
    fn top_mode_of_a_diagonal_pair() {
        let k = SymMatrix::from_diagonal(&[1.0, 9.0, 4.0]);
        let m = ScaledMass::Diagonal(vec![1.0, 1.0, 1.0]);
        let cd = CentralDifference::new(&k, &m).unwrap();
        let top = cd.top_mode(7);
        assert!((top[1].abs() - 1.0).abs() < 1e-10);
        let (u, _) = cd.initial_displacement(7).unwrap();
        assert!((dot(&u, &u) - 1.0).abs() < 1e-14);
    }
}

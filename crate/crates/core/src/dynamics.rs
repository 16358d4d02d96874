//! Stratonovich equations of motion for the chain and their RK4 integration.
//!
//! Each amplitude obeys
//!
//! ```text
//! dα_j/dt = −2iχ c_j α_j + iJ (α_{j−1} + α_{j+1}) + δ_{jm} i√Γ α_m η(t)
//! ```
//!
//! with `c_j = |α_j|²` (or `|α_j|² − 1` when the Wigner correction is on),
//! open boundaries, and a single real white noise `η` acting on the middle
//! well `m`. The collisional term carries an explicit `i`: without it the
//! flow would not conserve atom number.
//!
//! One Gaussian draw is made per step and held fixed across the four RK4
//! stages. With a single commuting multiplicative noise this converges to
//! the Stratonovich solution. The frozen noise rotation itself is applied
//! exactly (interaction-picture RK4), which keeps every trajectory's norm
//! constant to roundoff-limited integrator accuracy.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{ChainConfig, TrajectoryState};
use crate::sampling::{sample_initial_chain, trajectory_rng};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// White-noise value for one step, `η = w / √dt` with `w ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDraw {
    pub eta: f64,
}

impl NoiseDraw {
    pub const ZERO: NoiseDraw = NoiseDraw { eta: 0.0 };

    pub fn sample<R: Rng + ?Sized>(rng: &mut R, dt: f64) -> Self {
        let w: f64 = rng.sample(StandardNormal);
        NoiseDraw { eta: w / dt.sqrt() }
    }
}

/// Time derivative of every amplitude for a frozen noise value.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftField {
    pub derivative: Vec<Complex64>,
}

pub fn drift(state: &TrajectoryState, config: &ChainConfig, noise: NoiseDraw) -> DriftField {
    let mut derivative = vec![Complex64::new(0.0, 0.0); state.n_wells()];
    drift_into(&state.amplitudes, config, noise, &mut derivative);
    DriftField { derivative }
}

/// Allocation-free drift used inside the integrator.
#[inline]
fn drift_into(alpha: &[Complex64], config: &ChainConfig, noise: NoiseDraw, out: &mut [Complex64]) {
    let n = alpha.len();
    let shift = if config.wigner_correction { 1.0 } else { 0.0 };
    let ij = I * config.tunnel_j;
    for j in 0..n {
        let a = alpha[j];
        let mut neighbors = Complex64::new(0.0, 0.0);
        if j > 0 {
            neighbors += alpha[j - 1];
        }
        if j + 1 < n {
            neighbors += alpha[j + 1];
        }
        let c = a.norm_sqr() - shift;
        out[j] = a * Complex64::new(0.0, -2.0 * config.chi * c) + ij * neighbors;
    }
    if config.gamma > 0.0 {
        let m = config.middle();
        out[m] += alpha[m] * Complex64::new(0.0, config.gamma.sqrt() * noise.eta);
    }
}

/// Scratch buffers for one RK4 step, reused across a whole trajectory.
#[derive(Debug, Clone)]
pub struct Rk4Workspace {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    stage: Vec<Complex64>,
}

impl Rk4Workspace {
    pub fn new(n_wells: usize) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); n_wells];
        Self {
            k1: zero.clone(),
            k2: zero.clone(),
            k3: zero.clone(),
            k4: zero.clone(),
            stage: zero,
        }
    }
}

/// Advances `state` by one step of `config.dt` with classical RK4 on the
/// drift plus a noise value frozen for the step.
///
/// Kept as a reference: RK4's amplitude error on the large per-step noise
/// rotation makes the middle-well norm decay slowly, so the production
/// stepper is [`step_rk4_with_noise`].
pub fn step_rk4_classical_with_noise(
    state: &mut TrajectoryState,
    config: &ChainConfig,
    noise: NoiseDraw,
    ws: &mut Rk4Workspace,
) {
    let h = config.dt;
    let Rk4Workspace { k1, k2, k3, k4, stage } = ws;
    let alpha = &mut state.amplitudes;

    drift_into(alpha, config, noise, k1);
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k1.iter()) {
        *s = a + k * (0.5 * h);
    }
    drift_into(stage, config, noise, k2);
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k2.iter()) {
        *s = a + k * (0.5 * h);
    }
    drift_into(stage, config, noise, k3);
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k3.iter()) {
        *s = a + k * h;
    }
    drift_into(stage, config, noise, k4);
    for j in 0..alpha.len() {
        alpha[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
    }
    state.t += h;
}

/// Advances `state` by one step of `config.dt` with fourth-order
/// Runge-Kutta in the interaction picture of the frozen noise.
///
/// The noise term `i√Γ η α_m` is a constant phase rotation of the middle
/// well during the step, so it is applied exactly as `exp(i√Γ η h/2)` on
/// either side of the RK4 stages for hopping and collisions. The scheme is
/// fourth order in `h` for the frozen field, reduces to classical RK4 when
/// `Γ = 0`, and preserves the middle-well modulus under the noise exactly.
pub fn step_rk4_with_noise(
    state: &mut TrajectoryState,
    config: &ChainConfig,
    noise: NoiseDraw,
    ws: &mut Rk4Workspace,
) {
    if config.gamma <= 0.0 || noise.eta == 0.0 {
        step_rk4_classical_with_noise(state, config, noise, ws);
        return;
    }
    let h = config.dt;
    let m = config.middle();
    let half = Complex64::from_polar(1.0, 0.5 * h * config.gamma.sqrt() * noise.eta);
    let Rk4Workspace { k1, k2, k3, k4, stage } = ws;
    let alpha = &mut state.amplitudes;

    // k1 = P·N(α), where P rotates the middle well by half a step.
    drift_into(alpha, config, NoiseDraw::ZERO, k1);
    k1[m] *= half;
    // α_I = P·α
    alpha[m] *= half;
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k1.iter()) {
        *s = a + k * (0.5 * h);
    }
    drift_into(stage, config, NoiseDraw::ZERO, k2);
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k2.iter()) {
        *s = a + k * (0.5 * h);
    }
    drift_into(stage, config, NoiseDraw::ZERO, k3);
    for ((s, a), k) in stage.iter_mut().zip(alpha.iter()).zip(k3.iter()) {
        *s = a + k * h;
    }
    stage[m] *= half;
    drift_into(stage, config, NoiseDraw::ZERO, k4);
    for j in 0..alpha.len() {
        alpha[j] += (k1[j] + (k2[j] + k3[j]) * 2.0) * (h / 6.0);
    }
    alpha[m] *= half;
    for j in 0..alpha.len() {
        alpha[j] += k4[j] * (h / 6.0);
    }
    state.t += h;
}

/// Draws the step's noise (only when dephasing is on) and advances one step.
pub fn step_rk4<R: Rng + ?Sized>(
    state: &mut TrajectoryState,
    config: &ChainConfig,
    rng: &mut R,
    ws: &mut Rk4Workspace,
) -> Result<()> {
    let noise = if config.gamma > 0.0 {
        NoiseDraw::sample(rng, config.dt)
    } else {
        NoiseDraw::ZERO
    };
    step_rk4_with_noise(state, config, noise, ws);
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericalBlowup { traj: 0, t: state.t })
    }
}

/// Samples trajectory `traj_index`, integrates it to `t_final`, and calls
/// `sink(sample, state)` at `t = 0` and after every `sample_stride` steps.
///
/// The result depends only on the config and `traj_index`.
pub fn integrate_trajectory<F>(config: &ChainConfig, traj_index: u64, mut sink: F) -> Result<TrajectoryState>
where
    F: FnMut(usize, &TrajectoryState),
{
    let mut rng = trajectory_rng(config.seed, traj_index);
    let mut state = sample_initial_chain(config, &mut rng);
    let mut ws = Rk4Workspace::new(config.n_wells);
    sink(0, &state);
    let n_steps = config.n_steps();
    for step in 1..=n_steps {
        step_rk4(&mut state, config, &mut rng, &mut ws).map_err(|e| match e {
            Error::NumericalBlowup { t, .. } => Error::NumericalBlowup { traj: traj_index, t },
            other => other,
        })?;
        // Recompute from the step count so sample times carry no accumulated rounding.
        state.t = step as f64 * config.dt;
        if step % config.sample_stride == 0 {
            sink(step / config.sample_stride, &state);
        }
    }
    Ok(state)
}

/// Classical energy of a trajectory, an exact invariant of the drift when
/// `Γ = 0`.
pub fn conserved_energy(state: &TrajectoryState, config: &ChainConfig) -> f64 {
    let alpha = &state.amplitudes;
    let collisional: f64 = alpha
        .iter()
        .map(|a| {
            let p = a.norm_sqr();
            if config.wigner_correction {
                p * p - 2.0 * p
            } else {
                p * p
            }
        })
        .sum();
    let hopping: f64 = alpha.windows(2).map(|w| 2.0 * (w[0].conj() * w[1]).re).sum();
    config.chi * collisional - config.tunnel_j * hopping
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InitialState;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn config(n: usize, j: f64, chi: f64, gamma: f64) -> ChainConfig {
        let mut cfg = ChainConfig::new(n, InitialState::Coherent, gamma);
        cfg.tunnel_j = j;
        cfg.chi = chi;
        cfg
    }

    #[test]
    fn hopping_only_drift_reads_off_the_equations() {
        let cfg = config(3, 1.0, 0.0, 0.0);
        let state = TrajectoryState::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        let f = drift(&state, &cfg, NoiseDraw::ZERO);
        assert_eq!(f.derivative, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
    }

    #[test]
    fn local_terms_are_pure_rotations() {
        let state = TrajectoryState::new(vec![c(3.0, -1.0), c(0.5, 2.0), c(-7.0, 0.25)], 0.0);
        for (cfg, eta) in [(config(3, 0.0, 0.01, 0.0), 0.0), (config(3, 0.0, 0.0, 1.5), 3.7)] {
            let f = drift(&state, &cfg, NoiseDraw { eta });
            for (a, d) in state.amplitudes.iter().zip(&f.derivative) {
                assert!((a.conj() * d).re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_wells_see_one_neighbor() {
        let cfg = config(5, 1.0, 0.0, 0.0);
        let state = TrajectoryState::new(vec![c(1.0, 0.0); 5], 0.0);
        let f = drift(&state, &cfg, NoiseDraw::ZERO);
        let counts: Vec<f64> = f.derivative.iter().map(|d| d.im).collect();
        assert_eq!(counts, vec![1.0, 2.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let mut cfg = config(3, 0.0, 0.0, 0.0);
        cfg.dt = 0.37;
        let mut state = TrajectoryState::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 4.0)], 0.0);
        let before = state.amplitudes.clone();
        let mut ws = Rk4Workspace::new(3);
        for _ in 0..10 {
            step_rk4_with_noise(&mut state, &cfg, NoiseDraw::ZERO, &mut ws);
        }
        assert_eq!(state.amplitudes, before);
    }

    #[test]
    fn linear_step_matches_matrix_exponential() {
        // K has eigenvalues {0, ±√2}; exp(iKt) in closed form for the trimer.
        let cfg = config(3, 1.0, 0.0, 0.0);
        let mut state = TrajectoryState::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        let mut ws = Rk4Workspace::new(3);
        let steps = 2000;
        for _ in 0..steps {
            step_rk4_with_noise(&mut state, &cfg, NoiseDraw::ZERO, &mut ws);
        }
        let t = steps as f64 * cfg.dt;
        let w = 2f64.sqrt() * t;
        let expected = [
            c(0.5 * (w.cos() + 1.0), 0.0),
            c(0.0, w.sin() / 2f64.sqrt()),
            c(0.5 * (w.cos() - 1.0), 0.0),
        ];
        for (a, e) in state.amplitudes.iter().zip(expected) {
            assert!((a - e).norm() < 1e-11, "{a} vs {e}");
        }
    }

    #[test]
    fn noise_rotation_is_exact_and_norm_preserving() {
        let cfg = config(3, 0.0, 0.0, 1.5);
        let mut state = TrajectoryState::new(vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0)], 0.0);
        let mut ws = Rk4Workspace::new(3);
        let eta = 40.0;
        step_rk4_with_noise(&mut state, &cfg, NoiseDraw { eta }, &mut ws);
        let expected = c(2.0, 1.0) * Complex64::from_polar(1.0, 1.5f64.sqrt() * eta * cfg.dt);
        assert!((state.amplitudes[1] - expected).norm() < 1e-14);
        assert!((state.norm_sqr() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn interaction_picture_agrees_with_classical_rk4() {
        let cfg = config(5, 1.0, 0.01, 1.5);
        let start = TrajectoryState::new(
            vec![c(14.0, 1.0), c(-3.0, 2.0), c(0.7, -0.2), c(5.0, 9.0), c(-12.0, 4.0)],
            0.0,
        );
        let mut ws = Rk4Workspace::new(5);
        for eta in [-30.0, 5.0, 60.0] {
            let mut a = start.clone();
            let mut b = start.clone();
            step_rk4_with_noise(&mut a, &cfg, NoiseDraw { eta }, &mut ws);
            step_rk4_classical_with_noise(&mut b, &cfg, NoiseDraw { eta }, &mut ws);
            for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
                assert!((x - y).norm() < 1e-7 * (1.0 + y.norm()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn energy_of_loaded_trimer() {
        let cfg = config(3, 1.0, 0.01, 0.0);
        let s = TrajectoryState::new(vec![c(200f64.sqrt(), 0.0), c(0.0, 0.0), c(200f64.sqrt(), 0.0)], 0.0);
        assert!((conserved_energy(&s, &cfg) - 800.0).abs() < 1e-9);
        let free = config(3, 0.0, 0.0, 0.0);
        assert_eq!(conserved_energy(&s, &free), 0.0);
    }

    #[test]
    fn zero_final_time_delivers_only_initial_sample() {
        let mut cfg = ChainConfig::new(3, InitialState::Fock, 1.5);
        cfg.t_final = 1e-4;
        let mut seen = Vec::new();
        let last = integrate_trajectory(&cfg, 0, |k, s| seen.push((k, s.clone()))).unwrap();
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].0, 0);
        assert_eq!(seen[0].1, last);
    }

    #[test]
    fn trajectories_are_deterministic() {
        let mut cfg = ChainConfig::new(5, InitialState::Coherent, 1.5);
        cfg.t_final = 2.0;
        let a = integrate_trajectory(&cfg, 17, |_, _| {}).unwrap();
        let b = integrate_trajectory(&cfg, 17, |_, _| {}).unwrap();
        assert_eq!(a, b);
        let other = integrate_trajectory(&cfg, 18, |_, _| {}).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn blowup_reports_trajectory_and_time() {
        let mut cfg = ChainConfig::new(3, InitialState::Coherent, 0.0);
        cfg.chi = 1e6;
        cfg.dt = 0.5;
        cfg.t_final = 50.0;
        match integrate_trajectory(&cfg, 9, |_, _| {}) {
            Err(Error::NumericalBlowup { traj, t }) => {
                assert_eq!(traj, 9);
                assert!(t > 0.0);
            }
            other => panic!("expected blowup, got {other:?}"),
        }
    }
}

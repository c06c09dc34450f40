//! Exact statevector QAOA at desk scale, plus a Bernoulli bitstring source
//! for machines too large to simulate.
//!
//! Conventions: basis index bit `k` is qubit `k`. The phase separator
//! multiplies `|z⟩` by `exp(-iγ·C(z))` using the classical cost directly,
//! and the mixer is `Π_k exp(-iβ X_k)`. A circuit of `L` layers applies
//! exactly `L` (phase, mixer) pairs to `|+⟩^N`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ising::{BitString, IsingInstance};
use crate::{Error, Result};

pub const DEFAULT_MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
    param_bits: u32,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>, param_bits: u32) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::validation(format!(
                "need matching nonempty angle lists, got {} gammas and {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        if param_bits == 0 {
            return Err(Error::validation("parameter bit width must be at least 1"));
        }
        if gammas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::validation("angles must be finite"));
        }
        Ok(QaoaParams { gammas, betas, param_bits })
    }

    /// One-layer parameters with a 32-bit encoding.
    pub fn single(gamma: f64, beta: f64) -> Self {
        QaoaParams { gammas: vec![gamma], betas: vec![beta], param_bits: 32 }
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn param_bits(&self) -> u32 {
        self.param_bits
    }

    fn flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    fn from_flat(flat: &[f64], param_bits: u32) -> Self {
        let l = flat.len() / 2;
        QaoaParams { gammas: flat[..l].to_vec(), betas: flat[l..].to_vec(), param_bits }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|+⟩^N`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Statevector { n, amplitudes: vec![a; dim] }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Statevector { n, amplitudes }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::validation(format!("amplitude count {dim} is not a power of two")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::validation("zero state"));
        }
        Ok(Statevector { n: dim.trailing_zeros() as usize, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨ψ| C |ψ⟩` for a diagonal cost.
    pub fn expectation(&self, diagonal: &[f64]) -> f64 {
        self.amplitudes.iter().zip(diagonal).map(|(a, c)| a.norm_sqr() * c).sum()
    }

    fn apply_phase(&mut self, diagonal: &[f64], gamma: f64) {
        for (a, &c) in self.amplitudes.iter_mut().zip(diagonal) {
            *a *= Complex64::from_polar(1.0, -gamma * c);
        }
    }

    fn apply_mixer(&mut self, beta: f64) {
        let (cos, sin) = (beta.cos(), beta.sin());
        let diag = Complex64::new(cos, 0.0);
        let off = Complex64::new(0.0, -sin);
        for k in 0..self.n {
            let stride = 1usize << k;
            for base in (0..self.amplitudes.len()).step_by(stride << 1) {
                for i in base..base + stride {
                    let (a0, a1) = (self.amplitudes[i], self.amplitudes[i + stride]);
                    self.amplitudes[i] = diag * a0 + off * a1;
                    self.amplitudes[i + stride] = off * a0 + diag * a1;
                }
            }
        }
    }

    /// `t` independent draws from `|a_z|²`, reproducible from `seed`.
    pub fn sample(&self, t: usize, seed: u64) -> Vec<BitString> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for a in &self.amplitudes {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let last = cdf.len() - 1;
        (0..t)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                let idx = cdf.partition_point(|&c| c <= u).min(last);
                BitString::from_index(idx, self.n)
            })
            .collect()
    }
}

/// Diagonal of `C` over all `2^N` basis states.
pub fn cost_diagonal(inst: &IsingInstance) -> Vec<f64> {
    let n = inst.n_qubits();
    (0..1usize << n).map(|idx| inst.cost_unchecked(&BitString::from_index(idx, n))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QaoaEngine {
    pub max_qubits: usize,
}

impl Default for QaoaEngine {
    fn default() -> Self {
        QaoaEngine { max_qubits: DEFAULT_MAX_QUBITS }
    }
}

impl QaoaEngine {
    pub fn with_limit(max_qubits: usize) -> Self {
        QaoaEngine { max_qubits }
    }

    fn check(&self, inst: &IsingInstance) -> Result<()> {
        if inst.n_qubits() > self.max_qubits {
            return Err(Error::Capacity { n: inst.n_qubits(), limit: self.max_qubits });
        }
        Ok(())
    }

    pub fn prepare_state(&self, inst: &IsingInstance, params: &QaoaParams) -> Result<Statevector> {
        self.check(inst)?;
        Ok(evolve(&cost_diagonal(inst), inst.n_qubits(), params))
    }

    /// Sample → estimate → update loop with a derivative-free coordinate
    /// search over `(γ, β)`.
    ///
    /// Each step probes one coordinate at `±δ`; a probe is taken when its
    /// sampled energy beats the best seen so far. After a full sweep of
    /// coordinates without improvement `δ` halves. The trace records every
    /// step's best probe and the running best.
    pub fn optimize(
        &self,
        inst: &IsingInstance,
        initial: &QaoaParams,
        trials_per_step: usize,
        steps: usize,
        seed: u64,
    ) -> Result<Optimized> {
        self.check(inst)?;
        if trials_per_step == 0 {
            return Err(Error::domain("need at least one trial per step"));
        }
        let diag = cost_diagonal(inst);
        let n = inst.n_qubits();
        let bits = initial.param_bits;
        let mut seeds = ChaCha8Rng::seed_from_u64(seed);
        let mut estimate = |x: &[f64]| -> f64 {
            let state = evolve(&diag, n, &QaoaParams::from_flat(x, bits));
            let trials = state.sample(trials_per_step, seeds.random());
            trials.iter().map(|z| diag[z.to_index()]).sum::<f64>() / trials_per_step as f64
        };

        let mut best_x = initial.flat();
        let mut trace = Vec::with_capacity(steps);
        if steps == 0 {
            return Ok(Optimized { params: initial.clone(), trace });
        }
        let mut best = estimate(&best_x);
        let dims = best_x.len();
        let mut delta = 0.25;
        let mut stale = 0;
        for step in 0..steps {
            let k = step % dims;
            let mut step_best = f64::INFINITY;
            let mut improved = false;
            for sign in [1.0, -1.0] {
                let mut probe = best_x.clone();
                probe[k] += sign * delta;
                let e = estimate(&probe);
                step_best = step_best.min(e);
                if e < best {
                    best = e;
                    best_x = probe;
                    improved = true;
                }
            }
            if improved {
                stale = 0;
            } else {
                stale += 1;
                if stale >= dims {
                    delta *= 0.5;
                    stale = 0;
                }
            }
            trace.push(TraceRow { step, energy: step_best, best });
        }
        Ok(Optimized { params: QaoaParams::from_flat(&best_x, bits), trace })
    }
}

fn evolve(diag: &[f64], n: usize, params: &QaoaParams) -> Statevector {
    let mut state = Statevector::uniform(n);
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        state.apply_phase(diag, gamma);
        state.apply_mixer(beta);
    }
    state
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    /// Lowest sampled energy among this step's probes.
    pub energy: f64,
    /// Best sampled energy so far.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub params: QaoaParams,
    pub trace: Vec<TraceRow>,
}

impl Optimized {
    pub fn best_energy(&self) -> Option<f64> {
        self.trace.last().map(|r| r.best)
    }
}

/// Independent per-qubit Bernoulli bits, for communication studies at `N`
/// far beyond statevector reach.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliModel {
    probabilities: Vec<f64>,
    seed: u64,
}

impl BernoulliModel {
    pub fn new(probabilities: Vec<f64>, seed: u64) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::validation("need at least one qubit"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::validation(format!("probability {p} outside [0, 1]")));
        }
        Ok(BernoulliModel { probabilities, seed })
    }

    pub fn uniform(n: usize, p: f64, seed: u64) -> Result<Self> {
        Self::new(vec![p; n], seed)
    }

    pub fn n_qubits(&self) -> usize {
        self.probabilities.len()
    }

    pub fn draw(&self, t: usize) -> Vec<BitString> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..t)
            .map(|_| BitString::new(self.probabilities.iter().map(|&p| rng.random::<f64>() < p).collect()))
            .collect()
    }
}

/// Where a run's bitstrings come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialSource {
    Statevector { state: Statevector, seed: u64 },
    Bernoulli(BernoulliModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStream {
    pub source: TrialSource,
    pub trial_count: usize,
}

impl TrialStream {
    pub fn new(source: TrialSource, trial_count: usize) -> Result<Self> {
        if trial_count == 0 {
            return Err(Error::domain("trial count must be at least 1"));
        }
        Ok(TrialStream { source, trial_count })
    }

    pub fn trials(&self) -> Vec<BitString> {
        match &self.source {
            TrialSource::Statevector { state, seed } => state.sample(self.trial_count, *seed),
            TrialSource::Bernoulli(model) => model.draw(self.trial_count),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;

    #[test]
    fn zero_angles_keep_uniform_state() {
        let inst = IsingInstance::ring(4).unwrap();
        let s = QaoaEngine::default().prepare_state(&inst, &QaoaParams::single(0.0, 0.0)).unwrap();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_phase_by_hand() {
        let mut inst = IsingInstance::new(1).unwrap();
        inst.set_linear(0, 1).unwrap();
        let s = QaoaEngine::default().prepare_state(&inst, &QaoaParams::single(PI, 0.0)).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        // e^{-iπ} / √2
        assert!((a[1] - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mixer_matches_rx_on_one_qubit() {
        let mut s = Statevector::basis(1, 0);
        s.apply_mixer(0.3);
        assert!((s.amplitudes()[0] - Complex64::new(0.3f64.cos(), 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -0.3f64.sin())).norm() < 1e-12);
    }

    #[test]
    fn capacity_limit() {
        let inst = IsingInstance::worst_case(5).unwrap();
        let err = QaoaEngine::with_limit(4).prepare_state(&inst, &QaoaParams::single(0.1, 0.1)).unwrap_err();
        assert_eq!(err, Error::Capacity { n: 5, limit: 4 });
    }

    #[test]
    fn basis_state_always_sampled() {
        let s = Statevector::basis(3, 5);
        assert!(s.sample(200, 9).iter().all(|z| z.to_index() == 5));
        let u = Statevector::uniform(3);
        assert_eq!(u.sample(50, 4), u.sample(50, 4));
        assert_ne!(u.sample(50, 4), u.sample(50, 5));
    }

    #[test]
    fn bernoulli_extremes() {
        assert!(BernoulliModel::uniform(6, 0.0, 1).unwrap().draw(20).iter().all(|z| z.bits().iter().all(|b| !b)));
        assert!(BernoulliModel::uniform(6, 1.0, 1).unwrap().draw(20).iter().all(|z| z.bits().iter().all(|&b| b)));
        assert!(BernoulliModel::new(vec![0.5, 1.5], 0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(QaoaParams::new(vec![], vec![], 8).is_err());
        assert!(QaoaParams::new(vec![0.1], vec![0.1, 0.2], 8).is_err());
        assert!(QaoaParams::new(vec![0.1], vec![0.2], 0).is_err());
        assert_eq!(QaoaParams::new(vec![0.1, 0.2], vec![0.3, 0.4], 16).unwrap().layers(), 2);
    }

    #[test]
    fn zero_steps_returns_initial() {
        let inst = IsingInstance::maxcut(2, &[(0, 1)]).unwrap();
        let init = QaoaParams::single(0.1, 0.2);
        let out = QaoaEngine::default().optimize(&inst, &init, 16, 0, 3).unwrap();
        assert_eq!(out.params, init);
        assert!(out.trace.is_empty());
    }
}

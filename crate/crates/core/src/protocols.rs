//! Seeded Monte Carlo engines for the guessing games.
//!
//! Every trial draws from its own ChaCha8 stream (the run seed fixes the
//! key, the trial index selects the stream), so results do not depend on
//! how trials are scheduled across threads. Aggregation uses integer
//! counters only.
//!
//! Outcome distributions are obtained from the full optical evolution of
//! each possible preparation once per run; each trial then samples one of
//! the four clicks by inverse CDF in [`Outcome::ALL`] order.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Add;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{fringe_scan, joint_distribution, GuessRule, DEFAULT_GRID};
use crate::error::{check_range, Error, Result};
use crate::interferometer::{
    evolve, evolve_arms, optimal_pointer_basis, outcome_probabilities, port_plus_probability, weighted_pointer_basis,
    Arm, DetectorModel, OpticalElement, Outcome, PointerBasis,
};
use crate::states::{check_family_params, family_distances, make_input_state, Bit, InputLabel, PathState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    PredictiveWw,
    PredictiveWp,
    Retrodictive,
    Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictiveMode {
    /// Output beam splitter removed; guess the arm from the pointer.
    Ww,
    /// Guess the exit port at the optimal phase.
    Wp,
}

/// Alice's preparation basis in the alternative game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreparationBasis {
    WhichWay,
    WhichPhase,
}

impl PreparationBasis {
    /// `(α, φ)` of the input family realising this basis: `{|A⟩, |B⟩}` or
    /// `{(|A⟩ ± i|B⟩)/√2}`.
    pub fn family_params(self) -> (f64, f64) {
        match self {
            PreparationBasis::WhichWay => (FRAC_PI_2, FRAC_PI_2),
            PreparationBasis::WhichPhase => (0.0, FRAC_PI_2),
        }
    }
}

/// What Bob is trying to infer in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hidden {
    /// Predictive phase game: nothing is hidden, the exit port is predicted.
    Nothing,
    Arm(Arm),
    Label {
        b_ww: Bit,
        b_wp: Bit,
    },
    Basis {
        basis: PreparationBasis,
        b_ww: Bit,
        b_wp: Bit,
    },
}

impl Hidden {
    pub fn bits(&self) -> (Option<Bit>, Option<Bit>) {
        match *self {
            Hidden::Nothing => (None, None),
            Hidden::Arm(arm) => (Some(arm.bit()), None),
            Hidden::Label { b_ww, b_wp } | Hidden::Basis { b_ww, b_wp, .. } => (Some(b_ww), Some(b_wp)),
        }
    }
}

/// One protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub protocol: Protocol,
    pub hidden: Hidden,
    pub port_bit: Option<Bit>,
    pub pol_bit: Option<Bit>,
    pub g_ww: Option<Bit>,
    pub g_wp: Option<Bit>,
    pub correct_ww: Option<bool>,
    pub correct_wp: Option<bool>,
}

/// A success-rate estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    /// `√(p̂(1 − p̂)/n)`.
    pub std_err: f64,
    pub n: u64,
}

impl Estimate {
    fn from_counts(successes: u64, n: u64) -> Option<Self> {
        (n > 0).then(|| {
            let p_hat = successes as f64 / n as f64;
            Estimate {
                p_hat,
                std_err: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
                n,
            }
        })
    }

    /// `|p̂ − p| < k·√(p(1−p)/n)` with the standard error taken at the
    /// target `p`.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        let sigma = (target * (1.0 - target) / self.n as f64).sqrt();
        (self.p_hat - target).abs() <= k * sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameStats {
    pub protocol: Protocol,
    pub n_trials: u64,
    pub seed: u64,
    pub ww: Option<Estimate>,
    pub wp: Option<Estimate>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    ww_hits: u64,
    ww_n: u64,
    wp_hits: u64,
    wp_n: u64,
}

impl Tally {
    fn of(r: &TrialRecord) -> Self {
        let count = |c: Option<bool>| c.map_or((0, 0), |ok| (u64::from(ok), 1));
        let (ww_hits, ww_n) = count(r.correct_ww);
        let (wp_hits, wp_n) = count(r.correct_wp);
        Tally {
            ww_hits,
            ww_n,
            wp_hits,
            wp_n,
        }
    }
}

impl Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            ww_hits: self.ww_hits + o.ww_hits,
            ww_n: self.ww_n + o.ww_n,
            wp_hits: self.wp_hits + o.wp_hits,
            wp_n: self.wp_n + o.wp_n,
        }
    }
}

/// A guessing game whose trials are independent given their RNG stream.
pub trait Game: Sync {
    fn protocol(&self) -> Protocol;
    fn trial(&self, index: u64, rng: &mut ChaCha8Rng) -> TrialRecord;
}

fn trial_rng(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng
}

/// Runs `n` trials and aggregates the guess statistics.
pub fn run_game(game: &impl Game, n: u64, seed: u64) -> Result<GameStats> {
    if n == 0 {
        return Err(Error::NoTrials);
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let tally = (0..n)
        .into_par_iter()
        .map(|i| Tally::of(&game.trial(i, &mut trial_rng(&base, i))))
        .reduce(Tally::default, Tally::add);
    Ok(GameStats {
        protocol: game.protocol(),
        n_trials: n,
        seed,
        ww: Estimate::from_counts(tally.ww_hits, tally.ww_n),
        wp: Estimate::from_counts(tally.wp_hits, tally.wp_n),
    })
}

/// The full, ordered record stream of a run.
pub fn trial_records(game: &impl Game, n: u64, seed: u64) -> Result<Vec<TrialRecord>> {
    if n == 0 {
        return Err(Error::NoTrials);
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .into_par_iter()
        .map(|i| game.trial(i, &mut trial_rng(&base, i)))
        .collect())
}

/// Inverse-CDF draw over four probabilities in fixed order.
fn sample_index(probs: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding slack above the cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(3)
}

fn random_bit(rng: &mut impl Rng) -> Bit {
    Bit::from_sign(rng.random::<bool>())
}

/// Click distribution for every input label, from the full evolution.
fn label_distributions(alpha: f64, phi: f64, det: &DetectorModel, basis: &PointerBasis) -> [[[f64; 4]; 2]; 2] {
    let mut out = [[[0.0; 4]; 2]; 2];
    for b_ww in Bit::BOTH {
        for b_wp in Bit::BOTH {
            let s = make_input_state(&InputLabel { b_ww, b_wp, alpha, phi });
            out[b_ww.index()][b_wp.index()] = outcome_probabilities(&evolve(&s, det, 0.0), basis);
        }
    }
    out
}

/// Fixed input state with the two alternative measurements.
#[derive(Debug, Clone)]
pub struct PredictiveGame {
    mode: PredictiveMode,
    /// WW: `[(A,a′), (A,b′), (B,a′), (B,b′)]`. WP: `[+, −, 0, 0]`.
    probs: [f64; 4],
}

impl PredictiveGame {
    pub fn new(s: &PathState, det: &DetectorModel, mode: PredictiveMode) -> Result<Self> {
        let probs = match mode {
            PredictiveMode::Wp => {
                let knob = fringe_scan(s, det, DEFAULT_GRID)?.max_phase;
                let p_plus = port_plus_probability(s, det, knob).clamp(0.0, 1.0);
                [p_plus, 1.0 - p_plus, 0.0, 0.0]
            }
            PredictiveMode::Ww => {
                let (w1, w2) = s.weights();
                let (rho_a, rho_b) = det.pointer_densities();
                let basis = weighted_pointer_basis(w1, &rho_a, w2, &rho_b);
                let routed = OpticalElement::PolarizingSplitter { basis }.apply(&evolve_arms(s, det, 0.0));
                std::array::from_fn(|i| routed[i].norm_sqr())
            }
        };
        Ok(Self { mode, probs })
    }

    /// Exact success probability of the simulated strategy.
    pub fn success_probability(&self) -> f64 {
        match self.mode {
            PredictiveMode::Wp => self.probs[0],
            PredictiveMode::Ww => self.probs[0] + self.probs[3],
        }
    }
}

impl Game for PredictiveGame {
    fn protocol(&self) -> Protocol {
        match self.mode {
            PredictiveMode::Ww => Protocol::PredictiveWw,
            PredictiveMode::Wp => Protocol::PredictiveWp,
        }
    }

    fn trial(&self, index: u64, rng: &mut ChaCha8Rng) -> TrialRecord {
        let k = sample_index(&self.probs, rng.random());
        match self.mode {
            PredictiveMode::Wp => {
                let port = if k == 0 { Bit::Plus } else { Bit::Minus };
                TrialRecord {
                    trial: index,
                    protocol: Protocol::PredictiveWp,
                    hidden: Hidden::Nothing,
                    port_bit: Some(port),
                    pol_bit: None,
                    g_ww: None,
                    g_wp: Some(Bit::Plus),
                    correct_ww: None,
                    correct_wp: Some(port == Bit::Plus),
                }
            }
            PredictiveMode::Ww => {
                let arm = if k < 2 { Arm::A } else { Arm::B };
                // pointer outcome 0 indicates arm A
                let guess = if k.is_multiple_of(2) { Arm::A } else { Arm::B };
                TrialRecord {
                    trial: index,
                    protocol: Protocol::PredictiveWw,
                    hidden: Hidden::Arm(arm),
                    port_bit: None,
                    pol_bit: Some(guess.bit()),
                    g_ww: Some(guess.bit()),
                    g_wp: None,
                    correct_ww: Some(guess == arm),
                    correct_wp: None,
                }
            }
        }
    }
}

/// Simulates the predictive game of `mode` on a fixed input state.
pub fn run_predictive(
    s: &PathState,
    det: &DetectorModel,
    mode: PredictiveMode,
    n: u64,
    seed: u64,
) -> Result<GameStats> {
    run_game(&PredictiveGame::new(s, det, mode)?, n, seed)
}

/// Four-state discrimination: Bob guesses both bits every run.
#[derive(Debug, Clone)]
pub struct RetrodictiveGame {
    label_probs: [[[f64; 4]; 2]; 2],
    rule: GuessRule,
}

impl RetrodictiveGame {
    pub fn new(alpha: f64, phi: f64, efficiency: f64) -> Result<Self> {
        check_family_params(alpha, phi)?;
        let det = DetectorModel::from_efficiency(efficiency)?;
        let basis = optimal_pointer_basis(&det);
        Ok(Self {
            label_probs: label_distributions(alpha, phi, &det, &basis),
            rule: joint_distribution(alpha, phi, efficiency)?.guess_rule(),
        })
    }
}

impl Game for RetrodictiveGame {
    fn protocol(&self) -> Protocol {
        Protocol::Retrodictive
    }

    fn trial(&self, index: u64, rng: &mut ChaCha8Rng) -> TrialRecord {
        let b_ww = random_bit(rng);
        let b_wp = random_bit(rng);
        let probs = &self.label_probs[b_ww.index()][b_wp.index()];
        let outcome = Outcome::ALL[sample_index(probs, rng.random())];
        let (g_ww, g_wp) = self.rule.guess(outcome.ww_bit(), outcome.wp_bit());
        TrialRecord {
            trial: index,
            protocol: Protocol::Retrodictive,
            hidden: Hidden::Label { b_ww, b_wp },
            port_bit: Some(outcome.wp_bit()),
            pol_bit: Some(outcome.ww_bit()),
            g_ww: Some(g_ww),
            g_wp: Some(g_wp),
            correct_ww: Some(g_ww == b_ww),
            correct_wp: Some(g_wp == b_wp),
        }
    }
}

pub fn run_retrodictive(alpha: f64, phi: f64, efficiency: f64, n: u64, seed: u64) -> Result<GameStats> {
    run_game(&RetrodictiveGame::new(alpha, phi, efficiency)?, n, seed)
}

/// Alice prepares in a randomly chosen basis and discloses it after
/// Bob's measurement.
#[derive(Debug, Clone)]
pub struct AlternativeGame {
    averaged: bool,
    /// Indexed by basis (WW = 0, WP = 1).
    label_probs: [[[[f64; 4]; 2]; 2]; 2],
    rules: [GuessRule; 2],
}

impl AlternativeGame {
    const BASES: [PreparationBasis; 2] = [PreparationBasis::WhichWay, PreparationBasis::WhichPhase];

    pub fn new(efficiency: f64, averaged: bool) -> Result<Self> {
        let det = DetectorModel::from_efficiency(efficiency)?;
        let basis = optimal_pointer_basis(&det);
        let mut label_probs = [[[[0.0; 4]; 2]; 2]; 2];
        let mut rules = Vec::with_capacity(2);
        for (i, b) in Self::BASES.iter().enumerate() {
            let (alpha, phi) = b.family_params();
            label_probs[i] = label_distributions(alpha, phi, &det, &basis);
            rules.push(joint_distribution(alpha, phi, efficiency)?.guess_rule());
        }
        Ok(Self {
            averaged,
            label_probs,
            rules: [rules[0], rules[1]],
        })
    }
}

impl Game for AlternativeGame {
    fn protocol(&self) -> Protocol {
        Protocol::Alternative
    }

    fn trial(&self, index: u64, rng: &mut ChaCha8Rng) -> TrialRecord {
        let which = usize::from(rng.random::<bool>());
        let basis = Self::BASES[which];
        let b_ww = random_bit(rng);
        let b_wp = random_bit(rng);
        let probs = &self.label_probs[which][b_ww.index()][b_wp.index()];
        let outcome = Outcome::ALL[sample_index(probs, rng.random())];
        let (g_ww, g_wp) = self.rules[which].guess(outcome.ww_bit(), outcome.wp_bit());
        let (g_ww, g_wp) = match (self.averaged, basis) {
            (true, _) => (Some(g_ww), Some(g_wp)),
            (false, PreparationBasis::WhichWay) => (Some(g_ww), None),
            (false, PreparationBasis::WhichPhase) => (None, Some(g_wp)),
        };
        TrialRecord {
            trial: index,
            protocol: Protocol::Alternative,
            hidden: Hidden::Basis { basis, b_ww, b_wp },
            port_bit: Some(outcome.wp_bit()),
            pol_bit: Some(outcome.ww_bit()),
            g_ww,
            g_wp,
            correct_ww: g_ww.map(|g| g == b_ww),
            correct_wp: g_wp.map(|g| g == b_wp),
        }
    }
}

pub fn run_alternative(efficiency: f64, n: u64, seed: u64, averaged: bool) -> Result<GameStats> {
    run_game(&AlternativeGame::new(efficiency, averaged)?, n, seed)
}

/// Closed-form `(P′_WW, P′_WP)` of the alternative game with disclosed
/// basis: `(1+E)/2` and `(1+√(1−E²))/2`.
pub fn alternative_probabilities(efficiency: f64) -> Result<(f64, f64)> {
    check_range("E", efficiency, 0.0, 1.0)?;
    Ok((
        0.5 * (1.0 + efficiency),
        0.5 * (1.0 + (1.0 - efficiency * efficiency).sqrt()),
    ))
}

/// Closed-form averaged probabilities `P̄′ = (P′ + 1/2)/2`.
pub fn alternative_averaged_probabilities(efficiency: f64) -> Result<(f64, f64)> {
    let (ww, wp) = alternative_probabilities(efficiency)?;
    Ok((0.5 * (ww + 0.5), 0.5 * (wp + 0.5)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub efficiency: f64,
    pub p_ww: f64,
    pub p_wp: f64,
}

/// `(P_WW, P_WP)` of the four-state game for each detector efficiency.
pub fn frontier_sweep(alpha: f64, phi: f64, e_grid: &[f64]) -> Result<Vec<FrontierPoint>> {
    let d = family_distances(alpha, phi)?;
    e_grid
        .iter()
        .map(|&e| {
            check_range("E", e, 0.0, 1.0)?;
            Ok(FrontierPoint {
                efficiency: e,
                p_ww: 0.5 * (1.0 + e * d.d_ww),
                p_wp: 0.5 * (1.0 + (1.0 - e * e).sqrt() * d.d_wp),
            })
        })
        .collect()
}

/// `n` equally spaced efficiencies covering `[0, 1]`.
pub fn efficiency_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

/// Frontier `P_WW` at the efficiency that yields the given `P_WP`, or `None`
/// if that `P_WP` lies beyond the frontier.
pub fn frontier_p_ww_at(d_ww: f64, d_wp: f64, p_wp: f64) -> Option<f64> {
    let ratio = (2.0 * p_wp - 1.0) / d_wp;
    if !(0.0..=1.0).contains(&ratio) {
        return None;
    }
    let e = (1.0 - ratio * ratio).sqrt();
    Some(0.5 * (1.0 + e * d_ww))
}

/// Family parameters with `d_WW = d_WP = 1/√2`.
pub const SYMMETRIC_RECTANGLE: (f64, f64) = (PI / 4.0, FRAC_PI_2);

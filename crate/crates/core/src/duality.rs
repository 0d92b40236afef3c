//! Complementarity quantities.
//!
//! Predictive side: predictability `P`, fringe visibility `V`, detector
//! efficiency `E`, path distinguishability `D`, and the guess
//! probabilities `(1+D)/2`, `(1+V)/2`.
//!
//! Retrodictive side: the joint input/output distribution of the
//! four-state game, the guess probabilities `P_WW`, `P_WP` and the ellipse
//! `((2P_WW−1)/d_WW)² + ((2P_WP−1)/d_WP)² = 1`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::interferometer::{port_plus_probability, DetectorMixture, DetectorModel};
use crate::qmath::trace_norm;
use crate::states::{family_distances, Bit, DensityMatrix, PathState};

/// Smallest admissible fringe grid.
pub const MIN_GRID: usize = 64;
/// Grid used by [`predictive_report`].
pub const DEFAULT_GRID: usize = 720;
/// Distances below this make a rectangle side degenerate.
pub const DEGENERATE_DISTANCE: f64 = 1e-9;
/// Likelihood differences at or below this count as ties.
const TIE_TOL: f64 = 1e-12;
/// Phase resolution of the golden-section refinement.
const PHASE_TOL: f64 = 1e-10;

/// `P = |w₁ − w₂|`.
pub fn predictability(s: &PathState) -> f64 {
    let (w1, w2) = s.weights();
    (w1 - w2).abs()
}

/// Located extrema of a fringe `P₊(phase)` over one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeExtrema {
    pub max_phase: f64,
    pub max: f64,
    pub min_phase: f64,
    pub min: f64,
}

impl FringeExtrema {
    /// `(max − min)/(max + min)`.
    pub fn visibility(&self) -> f64 {
        let sum = self.max + self.min;
        if sum > 0.0 {
            ((self.max - self.min) / sum).max(0.0)
        } else {
            0.0
        }
    }
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > PHASE_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Scans `f` on `grid_points` equally spaced phases in `[0, 2π)` and refines
/// the best grid points by golden-section search.
pub fn fringe_extrema(f: impl Fn(f64) -> f64, grid_points: usize) -> Result<FringeExtrema> {
    if grid_points < MIN_GRID {
        return Err(Error::GridTooSmall {
            got: grid_points,
            min: MIN_GRID,
        });
    }
    let step = TAU / grid_points as f64;
    let samples: Vec<(f64, f64)> = (0..grid_points)
        .map(|k| {
            let x = step * k as f64;
            (x, f(x))
        })
        .collect();
    let argmax = samples
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    let argmin = samples
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");

    let (max_phase, max) = golden_section_max(&f, argmax.0 - step, argmax.0 + step);
    let neg = |x: f64| -f(x);
    let (min_phase, neg_min) = golden_section_max(&neg, argmin.0 - step, argmin.0 + step);

    // refinement never does worse than the grid
    let (max_phase, max) = if max >= argmax.1 { (max_phase, max) } else { *argmax };
    let (min_phase, min) = if -neg_min <= argmin.1 {
        (min_phase, -neg_min)
    } else {
        *argmin
    };
    Ok(FringeExtrema {
        max_phase: max_phase.rem_euclid(TAU),
        max,
        min_phase: min_phase.rem_euclid(TAU),
        min,
    })
}

/// `(phase, P₊)` on `grid_points` equally spaced phases in `[0, 2π)`.
pub fn fringe_samples(s: &PathState, det: &DetectorModel, grid_points: usize) -> Result<Vec<(f64, f64)>> {
    if grid_points < MIN_GRID {
        return Err(Error::GridTooSmall {
            got: grid_points,
            min: MIN_GRID,
        });
    }
    let step = TAU / grid_points as f64;
    Ok((0..grid_points)
        .map(|k| {
            let x = step * k as f64;
            (x, port_plus_probability(s, det, x))
        })
        .collect())
}

/// Port-`+` fringe extrema as the arm-`B` phase is scanned.
pub fn fringe_scan(s: &PathState, det: &DetectorModel, grid_points: usize) -> Result<FringeExtrema> {
    fringe_extrema(|x| port_plus_probability(s, det, x), grid_points)
}

/// Fringe visibility from a numerical phase scan.
pub fn visibility_scan(s: &PathState, det: &DetectorModel, grid_points: usize) -> Result<f64> {
    Ok(fringe_scan(s, det, grid_points)?.visibility())
}

pub fn visibility_scan_mixture(s: &PathState, mix: &DetectorMixture, grid_points: usize) -> Result<f64> {
    Ok(fringe_extrema(|x| mix.port_plus_probability(s, x), grid_points)?.visibility())
}

/// `D = Tr|w₁ρᵃ − w₂ρᵇ|`.
pub fn distinguishability_rho(w1: f64, rho_a: &DensityMatrix, w2: f64, rho_b: &DensityMatrix) -> Result<f64> {
    Ok(trace_norm(&(rho_a.0.scale_real(w1) - rho_b.0.scale_real(w2)))?)
}

pub fn distinguishability(s: &PathState, det: &DetectorModel) -> Result<f64> {
    let (w1, w2) = s.weights();
    let (rho_a, rho_b) = det.pointer_densities();
    distinguishability_rho(w1, &rho_a, w2, &rho_b)
}

pub fn distinguishability_mixture(s: &PathState, mix: &DetectorMixture) -> Result<f64> {
    let (w1, w2) = s.weights();
    let (rho_a, rho_b) = mix.pointer_densities();
    distinguishability_rho(w1, &rho_a, w2, &rho_b)
}

/// `√(P² + E² − E²P²)`, valid for pure pointers.
pub fn distinguishability_closed_form(predictability: f64, efficiency: f64) -> f64 {
    let (p2, e2) = (predictability.powi(2), efficiency.powi(2));
    (p2 + e2 - e2 * p2).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictiveReport {
    pub predictability: f64,
    pub visibility: f64,
    pub efficiency: f64,
    pub distinguishability: f64,
    /// `(1 + D)/2`.
    pub p_ww: f64,
    /// `(1 + V)/2`.
    pub p_wp: f64,
    /// `D² + V²`.
    pub lhs: f64,
}

pub fn predictive_report(s: &PathState, det: &DetectorModel) -> Result<PredictiveReport> {
    let p = predictability(s);
    let v = visibility_scan(s, det, DEFAULT_GRID)?;
    let d = distinguishability(s, det)?;
    let lhs = d * d + v * v;
    debug_assert!(lhs <= 1.0 + 1e-10, "D² + V² = {lhs}");
    Ok(PredictiveReport {
        predictability: p,
        visibility: v,
        efficiency: det.efficiency(),
        distinguishability: d,
        p_ww: 0.5 * (1.0 + d),
        p_wp: 0.5 * (1.0 + v),
        lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrodictiveReport {
    pub alpha: f64,
    pub phi: f64,
    pub efficiency: f64,
    pub d_ww: f64,
    pub d_wp: f64,
    pub p_ww: f64,
    pub p_wp: f64,
    /// `(2P_WW − 1)/d_WW`, undefined for a degenerate side.
    pub ww_ratio: Option<f64>,
    /// `(2P_WP − 1)/d_WP`, undefined for a degenerate side.
    pub wp_ratio: Option<f64>,
    /// Sum of the squared ratios when both are defined.
    pub ellipse_lhs: Option<f64>,
}

/// Guess probabilities of the four-state game for a detector of
/// efficiency `E`.
pub fn retrodictive_probabilities(alpha: f64, phi: f64, efficiency: f64) -> Result<RetrodictiveReport> {
    check_range("E", efficiency, 0.0, 1.0)?;
    let d = family_distances(alpha, phi)?;
    let wp_factor = (1.0 - efficiency * efficiency).sqrt();

    let side = |dist: f64, factor: f64| {
        if dist < DEGENERATE_DISTANCE {
            (0.5, None)
        } else {
            let p = 0.5 * (1.0 + factor * dist);
            (p, Some((2.0 * p - 1.0) / dist))
        }
    };
    let (p_ww, ww_ratio) = side(d.d_ww, efficiency);
    let (p_wp, wp_ratio) = side(d.d_wp, wp_factor);
    let ellipse_lhs = ww_ratio.zip(wp_ratio).map(|(x, y)| x * x + y * y);

    Ok(RetrodictiveReport {
        alpha,
        phi,
        efficiency,
        d_ww: d.d_ww,
        d_wp: d.d_wp,
        p_ww,
        p_wp,
        ww_ratio,
        wp_ratio,
        ellipse_lhs,
    })
}

/// `P(b_ww, b_wp; o_ww, o_wp)` for uniformly chosen inputs.
///
/// `o_ww` is the pointer outcome (`b′ ↦ +1`, `a′ ↦ −1`) and `o_wp` the exit
/// port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub alpha: f64,
    pub phi: f64,
    pub efficiency: f64,
    /// Indexed `[b_ww][b_wp][o_ww][o_wp]` with `+1 → 0`, `−1 → 1`.
    pub probs: [[[[f64; 2]; 2]; 2]; 2],
}

impl JointDistribution {
    pub fn get(&self, b_ww: Bit, b_wp: Bit, o_ww: Bit, o_wp: Bit) -> f64 {
        self.probs[b_ww.index()][b_wp.index()][o_ww.index()][o_wp.index()]
    }

    /// `P(b_ww; o_ww)` summed over the phase bits.
    pub fn marginal_ww(&self, b_ww: Bit, o_ww: Bit) -> f64 {
        iproduct(|b_wp, o_wp| self.get(b_ww, b_wp, o_ww, o_wp))
    }

    /// `P(b_wp; o_wp)` summed over the which-way bits.
    pub fn marginal_wp(&self, b_wp: Bit, o_wp: Bit) -> f64 {
        iproduct(|b_ww, o_ww| self.get(b_ww, b_wp, o_ww, o_wp))
    }

    /// Outcome distribution conditioned on the input label.
    pub fn conditional(&self, b_ww: Bit, b_wp: Bit) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for o_ww in Bit::BOTH {
            for o_wp in Bit::BOTH {
                out[o_ww.index()][o_wp.index()] = 4.0 * self.get(b_ww, b_wp, o_ww, o_wp);
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().flatten().flatten().sum()
    }

    /// Maximum-likelihood guesses for every outcome.
    pub fn guess_rule(&self) -> GuessRule {
        let mut table = [[(Bit::Plus, Bit::Plus); 2]; 2];
        for o_ww in Bit::BOTH {
            for o_wp in Bit::BOTH {
                let like_ww = |b_ww| iproduct_one(|b_wp| self.get(b_ww, b_wp, o_ww, o_wp));
                let like_wp = |b_wp| iproduct_one(|b_ww| self.get(b_ww, b_wp, o_ww, o_wp));
                table[o_ww.index()][o_wp.index()] = (
                    argmax_bit(like_ww(Bit::Plus), like_ww(Bit::Minus)),
                    argmax_bit(like_wp(Bit::Plus), like_wp(Bit::Minus)),
                );
            }
        }
        GuessRule { table }
    }

    /// Success probabilities of [`Self::guess_rule`]: `(P_WW, P_WP)`.
    pub fn guess_success(&self) -> (f64, f64) {
        let rule = self.guess_rule();
        let (mut ww, mut wp) = (0.0, 0.0);
        for b_ww in Bit::BOTH {
            for b_wp in Bit::BOTH {
                for o_ww in Bit::BOTH {
                    for o_wp in Bit::BOTH {
                        let p = self.get(b_ww, b_wp, o_ww, o_wp);
                        let (g_ww, g_wp) = rule.guess(o_ww, o_wp);
                        if g_ww == b_ww {
                            ww += p;
                        }
                        if g_wp == b_wp {
                            wp += p;
                        }
                    }
                }
            }
        }
        (ww, wp)
    }
}

fn iproduct(f: impl Fn(Bit, Bit) -> f64) -> f64 {
    Bit::BOTH
        .iter()
        .flat_map(|&x| Bit::BOTH.iter().map(move |&y| (x, y)))
        .map(|(x, y)| f(x, y))
        .sum()
}

fn iproduct_one(f: impl Fn(Bit) -> f64) -> f64 {
    Bit::BOTH.iter().map(|&b| f(b)).sum()
}

/// `+1` unless `−1` is strictly more likely.
fn argmax_bit(like_plus: f64, like_minus: f64) -> Bit {
    if like_minus - like_plus > TIE_TOL {
        Bit::Minus
    } else {
        Bit::Plus
    }
}

/// Bob's guesses `(g_ww, g_wp)` for each outcome `(o_ww, o_wp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessRule {
    table: [[(Bit, Bit); 2]; 2],
}

impl GuessRule {
    pub fn guess(&self, o_ww: Bit, o_wp: Bit) -> (Bit, Bit) {
        self.table[o_ww.index()][o_wp.index()]
    }
}

/// Closed-form joint distribution
/// `(1/16)(1 + b_ww·o_ww·E·d_WW + b_wp·o_wp·√(1−E²)·d_WP)`.
pub fn joint_distribution(alpha: f64, phi: f64, efficiency: f64) -> Result<JointDistribution> {
    check_range("E", efficiency, 0.0, 1.0)?;
    let d = family_distances(alpha, phi)?;
    let ww = efficiency * d.d_ww;
    let wp = (1.0 - efficiency * efficiency).sqrt() * d.d_wp;
    let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
    for b_ww in Bit::BOTH {
        for b_wp in Bit::BOTH {
            for o_ww in Bit::BOTH {
                for o_wp in Bit::BOTH {
                    let s_ww = (b_ww.value() * o_ww.value()) as f64;
                    let s_wp = (b_wp.value() * o_wp.value()) as f64;
                    probs[b_ww.index()][b_wp.index()][o_ww.index()][o_wp.index()] =
                        (1.0 + s_ww * ww + s_wp * wp) / 16.0;
                }
            }
        }
    }
    Ok(JointDistribution {
        alpha,
        phi,
        efficiency,
        probs,
    })
}

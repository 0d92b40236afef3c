//! The optical train: variable input beam splitter, Faraday rotator and
//! phase delays, output beam splitter and polarizing beam splitters, acting
//! on the joint path ⊗ polarization state.
//!
//! Joint basis index is `2·path + pol`, path `A = 0, B = 1` before the
//! output beam splitter and port `+ = 0, − = 1` after it; polarization is
//! linear `H = 0, V = 1`.
//!
//! The output beam splitter maps `|A⟩ ↦ (|+⟩ + |−⟩)/√2` and
//! `|B⟩ ↦ (|+⟩ − |−⟩)/(√2 i)`, i.e. detecting port `±` projects the path
//! onto `(|A⟩ ± i|B⟩)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::qmath::{eig_hermitian, Matrix, Matrix2, Matrix4, Tensor, Vector, Vector2, Vector4, C64, I, ONE, ZERO};
use crate::states::{Bit, DensityMatrix, InputLabel, PathState, NORM_TOL};

/// Joint path ⊗ polarization pure state.
pub type PureState4 = Vector4;

/// Below this Frobenius norm the Helstrom operator is treated as zero.
const DEGENERATE_HELSTROM: f64 = 1e-14;

/// Linear polarization at `angle` from horizontal.
pub fn linear_polarization(angle: f64) -> Vector2 {
    let (s, c) = angle.sin_cos();
    Vector2::from_real([c, s])
}

/// Rotation of the polarization plane by `beta`.
pub fn faraday_rotation(beta: f64) -> Matrix2 {
    let (s, c) = beta.sin_cos();
    Matrix([
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
}

/// `√(1 − |⟨u|v⟩|²)` for normalized qubits, via `|u₀v₁ − u₁v₀|`.
fn pure_distance(u: &Vector2, v: &Vector2) -> f64 {
    (u[0] * v[1] - u[1] * v[0]).norm()
}

fn check_normalized(v: &Vector2) -> Result<()> {
    let norm_sqr = v.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Which-way detector realised by a Faraday rotator in arm `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub beta: f64,
    /// Phase delay in arm `A`.
    pub theta: f64,
    pub pointer_in: Vector2,
    /// Polarization after traversing arm `A`.
    pub pointer_a: Vector2,
    /// Polarization after traversing arm `B` (unchanged).
    pub pointer_b: Vector2,
}

impl DetectorModel {
    /// `E = √(1 − |⟨a|b⟩|²)`.
    pub fn efficiency(&self) -> f64 {
        pure_distance(&self.pointer_a, &self.pointer_b)
    }

    pub fn with_phase_delay(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Detector of efficiency `E` built from a horizontally polarized
    /// photon and `β = asin E`.
    pub fn from_efficiency(efficiency: f64) -> Result<Self> {
        check_range("E", efficiency, 0.0, 1.0)?;
        build_detector(efficiency.asin(), linear_polarization(0.0))
    }

    pub fn pointer_densities(&self) -> (DensityMatrix, DensityMatrix) {
        (
            DensityMatrix::pure(&self.pointer_a),
            DensityMatrix::pure(&self.pointer_b),
        )
    }
}

/// Places a Faraday rotator of angle `beta` in arm `A`.
pub fn build_detector(beta: f64, pointer_in: Vector2) -> Result<DetectorModel> {
    check_normalized(&pointer_in)?;
    Ok(DetectorModel {
        beta,
        theta: 0.0,
        pointer_in,
        pointer_a: faraday_rotation(beta) * pointer_in,
        pointer_b: pointer_in,
    })
}

/// Orthonormal polarization basis `(|a′⟩, |b′⟩)` measured behind the
/// polarizing beam splitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerBasis {
    pub a_prime: Vector2,
    pub b_prime: Vector2,
}

impl PointerBasis {
    pub fn vector(&self, p: Pointer) -> &Vector2 {
        match p {
            Pointer::APrime => &self.a_prime,
            Pointer::BPrime => &self.b_prime,
        }
    }
}

/// Rescales `v` by a unit phase so that `⟨v|reference⟩` is real and ≥ 0.
fn align_phase(v: Vector2, reference: &Vector2) -> Vector2 {
    let overlap = v.inner(reference);
    if overlap.norm() == 0.0 {
        return v;
    }
    v.scale(overlap / overlap.norm())
}

/// Eigenbasis of `Γ = pₐρₐ − p_bρ_b`: `first` spans the positive part,
/// `second` the negative part. `None` when `Γ` vanishes.
fn helstrom_eigenbasis(gamma: &Matrix2) -> Option<(Vector2, Vector2)> {
    if gamma.frobenius_norm() < DEGENERATE_HELSTROM {
        return None;
    }
    let e = eig_hermitian(&gamma.symmetrized()).expect("symmetrized input is Hermitian");
    Some((e.vectors[1], e.vectors[0]))
}

/// Minimum-error basis for telling `|a⟩` from `|b⟩` at equal priors.
///
/// For coincident pointers (`E = 0`) the basis is taken at ±45° to the
/// common state `p`: `(p ± p⊥)/√2` with `p⊥ = (−p̄₁, p̄₀)`.
pub fn optimal_pointer_basis(det: &DetectorModel) -> PointerBasis {
    let (a, b) = (det.pointer_a, det.pointer_b);
    let gamma = a.projector() - b.projector();
    let (a_prime, b_prime) = helstrom_eigenbasis(&gamma).unwrap_or_else(|| {
        let p = b;
        let perp = Vector([-p[1].conj(), p[0].conj()]);
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        ((p + perp).scale(s), (p - perp).scale(s))
    });
    PointerBasis {
        a_prime: align_phase(a_prime, &a),
        b_prime: align_phase(b_prime, &b),
    }
}

/// Minimum-error basis for guessing the arm from the pointer when the
/// arms carry weights `w₁, w₂`: eigenbasis of `w₁ρᵃ − w₂ρᵇ`. The first
/// vector indicates arm `A`.
pub fn weighted_pointer_basis(w1: f64, rho_a: &DensityMatrix, w2: f64, rho_b: &DensityMatrix) -> PointerBasis {
    let gamma = rho_a.0.scale_real(w1) - rho_b.0.scale_real(w2);
    let (a_prime, b_prime) = helstrom_eigenbasis(&gamma).unwrap_or((Vector2::basis(0), Vector2::basis(1)));
    PointerBasis { a_prime, b_prime }
}

/// Which arm of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    A,
    B,
}

impl Arm {
    /// `B ↦ +1`, `A ↦ −1`, matching the family's `b_ww = +1` bias toward `B`.
    pub fn bit(self) -> Bit {
        match self {
            Arm::A => Bit::Minus,
            Arm::B => Bit::Plus,
        }
    }
}

/// Idealized optical elements. Each acts on the joint 4-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    /// Real beam splitter sending the input port to
    /// `√t|A⟩ + √(1−t)|B⟩`.
    VariableSplitter {
        transmittance: f64,
    },
    /// Faraday rotator in arm `A`.
    Faraday {
        beta: f64,
    },
    /// Phase `e^{i arm_a}` on arm `A` and `e^{i arm_b}` on arm `B`.
    PhaseDelay {
        arm_a: f64,
        arm_b: f64,
    },
    OutputSplitter,
    /// Routes polarization component `|a′⟩` to index 0 and `|b′⟩` to 1.
    PolarizingSplitter {
        basis: PointerBasis,
    },
}

impl OpticalElement {
    pub fn unitary(&self) -> Matrix4 {
        let id = Matrix2::identity();
        match *self {
            OpticalElement::VariableSplitter { transmittance } => {
                let t = transmittance.clamp(0.0, 1.0).sqrt();
                let r = (1.0 - transmittance).clamp(0.0, 1.0).sqrt();
                let path = Matrix([
                    [C64::new(t, 0.0), C64::new(-r, 0.0)],
                    [C64::new(r, 0.0), C64::new(t, 0.0)],
                ]);
                path.tensor(&id)
            }
            OpticalElement::Faraday { beta } => {
                let on_a = Matrix([[ONE, ZERO], [ZERO, ZERO]]);
                let on_b = Matrix([[ZERO, ZERO], [ZERO, ONE]]);
                on_a.tensor(&faraday_rotation(beta)) + on_b.tensor(&id)
            }
            OpticalElement::PhaseDelay { arm_a, arm_b } => {
                let path = Matrix([[C64::from_polar(1.0, arm_a), ZERO], [ZERO, C64::from_polar(1.0, arm_b)]]);
                path.tensor(&id)
            }
            OpticalElement::OutputSplitter => {
                let s = FRAC_1_SQRT_2;
                // rows are ⟨+| and ⟨−| in the arm basis
                let path = Matrix([[C64::new(s, 0.0), -I * s], [C64::new(s, 0.0), I * s]]);
                path.tensor(&id)
            }
            OpticalElement::PolarizingSplitter { basis } => {
                let a = basis.a_prime;
                let b = basis.b_prime;
                let pol = Matrix([[a[0].conj(), a[1].conj()], [b[0].conj(), b[1].conj()]]);
                id.tensor(&pol)
            }
        }
    }

    pub fn apply(&self, state: &PureState4) -> PureState4 {
        self.unitary() * *state
    }
}

/// Realises Alice's preparation of `label` with the variable beam splitter
/// and the arm-`B` phase delay, starting from a photon in the input port.
pub fn prepare_via_optics(label: &InputLabel) -> PathState {
    let x = label.b_ww.as_f64() * label.alpha;
    let transmittance = 0.5 * (1.0 - x.sin());
    let pol = Vector2::basis(0);
    let start = Vector2::basis(0).tensor(&pol);
    let after = [
        OpticalElement::VariableSplitter { transmittance },
        OpticalElement::PhaseDelay {
            arm_a: 0.0,
            arm_b: label.b_wp.as_f64() * label.phi,
        },
    ]
    .iter()
    .fold(start, |s, el| el.apply(&s));
    PathState::new(after[0], after[2]).expect("unitary optics preserve the norm")
}

/// Joint state in the arms, after the Faraday rotator and phase delays but
/// before the output beam splitter (the which-way measurement setup).
pub fn evolve_arms(state_in: &PathState, det: &DetectorModel, phase_knob: f64) -> PureState4 {
    let joint = state_in.vector().tensor(&det.pointer_in);
    [
        OpticalElement::Faraday { beta: det.beta },
        OpticalElement::PhaseDelay {
            arm_a: det.theta,
            arm_b: phase_knob,
        },
    ]
    .iter()
    .fold(joint, |s, el| el.apply(&s))
}

/// Propagates `state_in` with the detector's polarization through the
/// Faraday rotator, phase delays (`θ` on arm `A`, `phase_knob` on arm `B`)
/// and the output beam splitter. Returns the port ⊗ polarization state.
pub fn evolve(state_in: &PathState, det: &DetectorModel, phase_knob: f64) -> PureState4 {
    OpticalElement::OutputSplitter.apply(&evolve_arms(state_in, det, phase_knob))
}

/// Probability that the photon leaves through port `+`, summed over
/// polarization.
pub fn port_plus_probability(state_in: &PathState, det: &DetectorModel, phase_knob: f64) -> f64 {
    let out = evolve(state_in, det, phase_knob);
    out[0].norm_sqr() + out[1].norm_sqr()
}

/// Pointer measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pointer {
    APrime,
    BPrime,
}

impl Pointer {
    /// Which-way outcome bit: `b′ ↦ +1`, `a′ ↦ −1`.
    pub fn ww_bit(self) -> Bit {
        match self {
            Pointer::APrime => Bit::Minus,
            Pointer::BPrime => Bit::Plus,
        }
    }

    pub fn from_ww_bit(bit: Bit) -> Self {
        match bit {
            Bit::Minus => Pointer::APrime,
            Bit::Plus => Pointer::BPrime,
        }
    }
}

/// One of the four detector clicks `Da′±`, `Db′±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub pointer: Pointer,
    pub port: Bit,
}

impl Outcome {
    /// Fixed label order: `(a′,+), (a′,−), (b′,+), (b′,−)`.
    pub const ALL: [Outcome; 4] = [
        Outcome {
            pointer: Pointer::APrime,
            port: Bit::Plus,
        },
        Outcome {
            pointer: Pointer::APrime,
            port: Bit::Minus,
        },
        Outcome {
            pointer: Pointer::BPrime,
            port: Bit::Plus,
        },
        Outcome {
            pointer: Pointer::BPrime,
            port: Bit::Minus,
        },
    ];

    pub fn index(self) -> usize {
        let p = match self.pointer {
            Pointer::APrime => 0,
            Pointer::BPrime => 1,
        };
        2 * p + self.port.index()
    }

    /// Bit carrying which-way information (from the pointer).
    pub fn ww_bit(self) -> Bit {
        self.pointer.ww_bit()
    }

    /// Bit carrying which-phase information (from the exit port).
    pub fn wp_bit(self) -> Bit {
        self.port
    }
}

/// Born probabilities of the four clicks, in [`Outcome::ALL`] order.
pub fn outcome_probabilities(out: &PureState4, basis: &PointerBasis) -> [f64; 4] {
    let routed = OpticalElement::PolarizingSplitter { basis: *basis }.apply(out);
    // routed index is 2·port + pointer
    Outcome::ALL.map(|o| {
        let p = match o.pointer {
            Pointer::APrime => 0,
            Pointer::BPrime => 1,
        };
        routed[2 * o.port.index() + p].norm_sqr()
    })
}

/// Port state `|±⟩ = (|A⟩ ± i|B⟩)/√2` in the arm basis.
pub fn port_state(port: Bit) -> Vector2 {
    Vector([C64::new(FRAC_1_SQRT_2, 0.0), I * (port.as_f64() * FRAC_1_SQRT_2)])
}

/// The four Kraus operators on the path qubit, in [`Outcome::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausSet {
    pub operators: [Matrix2; 4],
}

impl KrausSet {
    pub fn get(&self, o: Outcome) -> &Matrix2 {
        &self.operators[o.index()]
    }

    /// POVM elements `Kᵢ†Kᵢ`.
    pub fn effects(&self) -> [Matrix2; 4] {
        self.operators.map(|k| k.dagger() * k)
    }

    /// Largest elementwise deviation of `Σ Kᵢ†Kᵢ` from the identity.
    pub fn completeness_error(&self) -> f64 {
        self.effects()
            .iter()
            .fold(Matrix2::zeros(), |acc, e| acc + *e)
            .max_abs_diff(&Matrix2::identity())
    }

    /// `Tr(Kᵢ ρ Kᵢ†)` for each outcome.
    pub fn probabilities(&self, rho: &DensityMatrix) -> [f64; 4] {
        self.operators.map(|k| (k * rho.0 * k.dagger()).trace().re)
    }

    /// Post-measurement path state for outcome `o`, or `None` if `o` has
    /// zero probability.
    pub fn post_state(&self, o: Outcome, rho: &DensityMatrix) -> Option<DensityMatrix> {
        let k = self.get(o);
        let unnorm = *k * rho.0 * k.dagger();
        let p = unnorm.trace().re;
        (p > 0.0).then(|| DensityMatrix(unnorm.scale_real(1.0 / p)))
    }
}

/// Kraus operators induced on the path qubit by the full optical train
/// (`phase_knob = 0`) and the optimal pointer basis. Obtained by
/// propagating `|A⟩` and `|B⟩` and reading off the click amplitudes.
pub fn extract_kraus(det: &DetectorModel) -> KrausSet {
    let basis = optimal_pointer_basis(det);
    let routed = |arm: PathState| OpticalElement::PolarizingSplitter { basis }.apply(&evolve(&arm, det, 0.0));
    let from_a = routed(PathState::arm_a());
    let from_b = routed(PathState::arm_b());
    let operators = Outcome::ALL.map(|o| {
        let p = match o.pointer {
            Pointer::APrime => 0,
            Pointer::BPrime => 1,
        };
        let idx = 2 * o.port.index() + p;
        // Kᵢ = |port⟩⟨kᵢ| with ⟨kᵢ|x⟩ the click amplitude for input x
        let row = Vector([from_a[idx].conj(), from_b[idx].conj()]);
        port_state(o.port).outer(&row)
    });
    KrausSet { operators }
}

/// Closed-form Kraus operators for pointers in the real plane with
/// `β ∈ [0, π/2]`:
/// `K_{a′±} = ½|±⟩[√(1+E)⟨A| ∓ i√(1−E)⟨B|]`,
/// `K_{b′±} = ½|±⟩[√(1−E)⟨A| ∓ i√(1+E)⟨B|]`.
pub fn kraus_closed_form(efficiency: f64) -> Result<KrausSet> {
    check_range("E", efficiency, 0.0, 1.0)?;
    let hi = (1.0 + efficiency).sqrt();
    let lo = (1.0 - efficiency).sqrt();
    let operators = Outcome::ALL.map(|o| {
        let (ca, cb) = match o.pointer {
            Pointer::APrime => (hi, lo),
            Pointer::BPrime => (lo, hi),
        };
        let s = o.port.as_f64();
        // ⟨k| = ½[ca⟨A| − s·i·cb⟨B|]; stored as the ket |k⟩
        let ket = Vector([C64::new(0.5 * ca, 0.0), I * (0.5 * s * cb)]);
        port_state(o.port).outer(&ket)
    });
    Ok(KrausSet { operators })
}

/// Classical mixture of detector configurations (mixed pointer states).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorMixture {
    pub components: Vec<(f64, DetectorModel)>,
}

impl DetectorMixture {
    pub fn pointer_densities(&self) -> (DensityMatrix, DensityMatrix) {
        let a: Vec<_> = self
            .components
            .iter()
            .map(|(p, d)| (*p, DensityMatrix::pure(&d.pointer_a)))
            .collect();
        let b: Vec<_> = self
            .components
            .iter()
            .map(|(p, d)| (*p, DensityMatrix::pure(&d.pointer_b)))
            .collect();
        (DensityMatrix::mixture(&a), DensityMatrix::mixture(&b))
    }

    pub fn port_plus_probability(&self, state_in: &PathState, phase_knob: f64) -> f64 {
        self.components
            .iter()
            .map(|(p, d)| p * port_plus_probability(state_in, d, phase_knob))
            .sum()
    }
}

/// `β` realising efficiency `E` with a linear pointer, in `[0, π/2]`.
pub fn beta_for_efficiency(efficiency: f64) -> Result<f64> {
    check_range("E", efficiency, 0.0, 1.0)?;
    Ok(efficiency.asin().clamp(0.0, FRAC_PI_2))
}

//! Path states of the photon, the four-state input family, Bloch
//! coordinates and trace distances.
//!
//! Arm `A` is basis index 0 and arm `B` index 1, so `|A⟩` sits at the
//! north pole (`z = +1`) of the Bloch sphere.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::qmath::{trace_norm, Matrix2, Vector, Vector2, C64};

/// Tolerance on `|amp_A|² + |amp_B|² = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// A classical ±1 bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Bit {
    Plus,
    Minus,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Plus, Bit::Minus];

    pub fn from_sign(positive: bool) -> Self {
        if positive {
            Bit::Plus
        } else {
            Bit::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Bit::Plus => 1,
            Bit::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Plus => Bit::Minus,
            Bit::Minus => Bit::Plus,
        }
    }

    /// Index for table lookups: `+1 → 0`, `−1 → 1`.
    pub fn index(self) -> usize {
        match self {
            Bit::Plus => 0,
            Bit::Minus => 1,
        }
    }
}

impl TryFrom<i8> for Bit {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Bit::Plus),
            -1 => Ok(Bit::Minus),
            other => Err(Error::InvalidBit(other)),
        }
    }
}

impl From<Bit> for i8 {
    fn from(b: Bit) -> i8 {
        b.value()
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Normalized path qubit `amp_A|A⟩ + amp_B|B⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    amp_a: C64,
    amp_b: C64,
}

impl PathState {
    pub fn new(amp_a: C64, amp_b: C64) -> Result<Self> {
        let norm_sqr = amp_a.norm_sqr() + amp_b.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amp_a, amp_b })
    }

    pub fn arm_a() -> Self {
        Self {
            amp_a: C64::new(1.0, 0.0),
            amp_b: C64::new(0.0, 0.0),
        }
    }

    pub fn arm_b() -> Self {
        Self {
            amp_a: C64::new(0.0, 0.0),
            amp_b: C64::new(1.0, 0.0),
        }
    }

    /// `√w₁|A⟩ + e^{−iφ₀}√(1−w₁)|B⟩`.
    pub fn from_weights(w1: f64, phase0: f64) -> Result<Self> {
        check_range("w1", w1, 0.0, 1.0)?;
        Ok(Self {
            amp_a: C64::new(w1.sqrt(), 0.0),
            amp_b: C64::from_polar((1.0 - w1).sqrt(), -phase0),
        })
    }

    pub fn balanced() -> Self {
        Self::from_weights(0.5, 0.0).expect("w1 = 0.5 is valid")
    }

    pub fn amp_a(&self) -> C64 {
        self.amp_a
    }

    pub fn amp_b(&self) -> C64 {
        self.amp_b
    }

    /// Arm weights `(w₁, w₂) = (|amp_A|², |amp_B|²)`.
    pub fn weights(&self) -> (f64, f64) {
        (self.amp_a.norm_sqr(), self.amp_b.norm_sqr())
    }

    pub fn vector(&self) -> Vector2 {
        Vector([self.amp_a, self.amp_b])
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.vector().projector())
    }
}

/// 2×2 density operator (pointer or path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix2);

impl DensityMatrix {
    pub fn pure(v: &Vector2) -> Self {
        DensityMatrix(v.projector())
    }

    /// `Σ pᵢ ρᵢ`; the weights are taken as given.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Self {
        DensityMatrix(
            parts
                .iter()
                .fold(Matrix2::zeros(), |acc, (p, rho)| acc + rho.0.scale_real(*p)),
        )
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn bloch(&self) -> BlochVector {
        let m = &self.0 .0;
        // ρ = (I + xσx + yσy + zσz)/2, so ρ₀₁ = (x − iy)/2
        BlochVector {
            x: 2.0 * m[0][1].re,
            y: -2.0 * m[0][1].im,
            z: m[0][0].re - m[1][1].re,
        }
    }
}

/// Selects one of the four input states `|b_ww, b_wp⟩_{α,φ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputLabel {
    pub b_ww: Bit,
    pub b_wp: Bit,
    pub alpha: f64,
    pub phi: f64,
}

impl InputLabel {
    pub fn new(b_ww: Bit, b_wp: Bit, alpha: f64, phi: f64) -> Result<Self> {
        check_family_params(alpha, phi)?;
        Ok(Self { b_ww, b_wp, alpha, phi })
    }
}

/// Validates `α ∈ [0, π/2]`, `φ ∈ [0, π]`.
pub fn check_family_params(alpha: f64, phi: f64) -> Result<()> {
    check_range("alpha", alpha, 0.0, FRAC_PI_2)?;
    check_range("phi", phi, 0.0, PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

/// Input amplitude `T(x) = cos(π/4 + x/2)`.
fn input_amplitude(x: f64) -> f64 {
    (FRAC_PI_4 + 0.5 * x).cos()
}

/// `T(b_ww α)|A⟩ + e^{i b_wp φ} T(−b_ww α)|B⟩`.
pub fn make_input_state(label: &InputLabel) -> PathState {
    let x = label.b_ww.as_f64() * label.alpha;
    PathState {
        amp_a: C64::new(input_amplitude(x), 0.0),
        amp_b: C64::from_polar(input_amplitude(-x), label.b_wp.as_f64() * label.phi),
    }
}

/// Bloch vector with `|A⟩ ↦ +z`. The Bloch vector of a pure state does
/// not depend on its global phase; `x + iy = 2 ā_A a_B`.
pub fn to_bloch(s: &PathState) -> BlochVector {
    let cross = 2.0 * s.amp_a.conj() * s.amp_b;
    BlochVector {
        x: cross.re,
        y: cross.im,
        z: s.amp_a.norm_sqr() - s.amp_b.norm_sqr(),
    }
}

/// `√(1 − |⟨s₁|s₂⟩|²)` for pure states.
///
/// Evaluated as `|a_A b_B − a_B b_A|`, which equals the above for
/// normalized qubits and does not cancel when the states nearly coincide.
pub fn trace_distance_pure(s1: &PathState, s2: &PathState) -> f64 {
    (s1.amp_a * s2.amp_b - s1.amp_b * s2.amp_a).norm()
}

/// `½ Tr|ρ₁ − ρ₂|`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&(rho1.0 - rho2.0))?)
}

/// Trace distances across the rectangle of four input states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyDistances {
    /// Between states differing only in `b_ww`.
    pub d_ww: f64,
    /// Between states differing only in `b_wp`.
    pub d_wp: f64,
}

/// Computes `(d_WW, d_WP)` from the four constructed states.
pub fn family_distances(alpha: f64, phi: f64) -> Result<FamilyDistances> {
    check_family_params(alpha, phi)?;
    let rho = |b_ww, b_wp| make_input_state(&InputLabel { b_ww, b_wp, alpha, phi }).density();

    let d_ww = |b_wp| trace_distance(&rho(Bit::Plus, b_wp), &rho(Bit::Minus, b_wp));
    let d_wp = |b_ww| trace_distance(&rho(b_ww, Bit::Plus), &rho(b_ww, Bit::Minus));

    let (ww_plus, ww_minus) = (d_ww(Bit::Plus)?, d_ww(Bit::Minus)?);
    let (wp_plus, wp_minus) = (d_wp(Bit::Plus)?, d_wp(Bit::Minus)?);
    debug_assert!((ww_plus - ww_minus).abs() < 1e-12);
    debug_assert!((wp_plus - wp_minus).abs() < 1e-12);

    Ok(FamilyDistances {
        d_ww: ww_plus,
        d_wp: wp_plus,
    })
}

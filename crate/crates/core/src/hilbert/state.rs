use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Allowed deviation of `‖ψ‖₂` from one for a checked state.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Wrap `amps`, checking that the norm is one to [`NORM_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let deviation = (norm(&amps) - 1.0).abs();
        if amps.is_empty() || deviation > NORM_TOL {
            return Err(Error::Normalization { deviation });
        }
        Ok(Self { amps })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Normalization { deviation: 1.0 });
        }
        for a in &mut amps {
            *a /= n;
        }
        Self::new(amps)
    }

    /// Propagated states carry whatever norm drift the propagator produced;
    /// the drift is measured and reported instead of being checked here.
    pub(crate) fn from_propagated(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `|‖ψ‖ − 1|`
    pub fn norm_error(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `‖self − other‖₂`
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Self { amps }
    }
}

pub(crate) fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

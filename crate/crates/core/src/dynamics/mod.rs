//! Ground states, spin-spectrum scans, initial-state preparation and
//! unitary propagation `ψ(t) = exp(−iHt) ψ(0)`.

mod dense;
mod eigen;
mod krylov;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use dense::DensePropagator;
pub use eigen::EigenSystem;
pub use krylov::{KrylovPropagator, DEFAULT_KRYLOV_DIM};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, Operator, PureState, NORM_TOL};
use crate::model::{build_ion_hamiltonian, HoppingMode, ModelParams};
use crate::observables::magnetization;

/// Gap below which the ground level is reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Default per-unit-time local error tolerance of the Krylov propagator.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Largest dimension for which [`Method::Auto`] picks the dense path.
pub const DENSE_AUTO_MAX_DIM: usize = 4096;

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: PureState,
    pub degenerate: bool,
    /// `e_1 − e_0`; infinite for a one-dimensional space.
    pub gap: f64,
}

/// Lowest eigenpair of a Hermitian spin Hamiltonian.
///
/// The eigenvector is the first column of a deterministic dense solve with
/// its largest component rotated to the positive real axis. When the gap is
/// below [`DEGENERACY_TOL`] the choice within the ground manifold is
/// arbitrary but reproducible, and `degenerate` is set.
pub fn ground_state(h_spin: &Operator) -> Result<GroundState> {
    let eig = EigenSystem::compute(h_spin)?;
    Ok(eig.ground_state())
}

/// Eigenvalues and ground-state magnetization of `H_a` over a grid of
/// hopping strengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub hopping_mode: HoppingMode,
    pub j_grid: Vec<f64>,
    /// Ascending eigenvalues per grid point.
    pub eigenvalues: Vec<Vec<f64>>,
    pub m_z: Vec<f64>,
    pub o_z: Vec<f64>,
    pub degenerate: Vec<bool>,
}

pub fn spectrum_scan(template: &ModelParams, j_grid: &[f64]) -> Result<SpectrumScan> {
    if j_grid.is_empty() {
        return Err(Error::InvalidParams("spectrum scan needs a non-empty J grid".into()));
    }
    let n = template.n_ions();
    let mut scan = SpectrumScan {
        hopping_mode: template.hopping_mode,
        j_grid: j_grid.to_vec(),
        eigenvalues: Vec::with_capacity(j_grid.len()),
        m_z: Vec::with_capacity(j_grid.len()),
        o_z: Vec::with_capacity(j_grid.len()),
        degenerate: Vec::with_capacity(j_grid.len()),
    };
    for &j in j_grid {
        let params = ModelParams {
            j_hop: j,
            ..template.clone()
        };
        let h = build_ion_hamiltonian(&params)?;
        let eig = EigenSystem::compute(&h)?;
        let g = eig.ground_state();
        let (m_z, o_z) = magnetization(&g.state, n)?;
        scan.eigenvalues.push(eig.values().to_vec());
        scan.m_z.push(m_z);
        scan.o_z.push(o_z);
        scan.degenerate.push(g.degenerate);
    }
    Ok(scan)
}

/// `√0.6 |10⟩ + √0.4 |15⟩`, the default oscillator preparation (mean
/// phonon number 12).
pub fn default_boson_amplitudes() -> BTreeMap<usize, C64> {
    BTreeMap::from([(10, C64::new(0.6f64.sqrt(), 0.0)), (15, C64::new(0.4f64.sqrt(), 0.0))])
}

/// `|Φ⟩_boson ⊗ |spin_state⟩` in the fixed tensor ordering.
pub fn initial_state(
    spec: &HilbertSpec,
    boson_amps: &BTreeMap<usize, C64>,
    spin_state: &PureState,
) -> Result<PureState> {
    if spin_state.dim() != spec.spin_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.spin_dim(),
            got: spin_state.dim(),
        });
    }
    let spin_dev = spin_state.norm_error();
    if spin_dev > NORM_TOL {
        return Err(Error::Normalization { deviation: spin_dev });
    }
    if let Some(&level) = boson_amps.keys().find(|&&l| l >= spec.fock_dim()) {
        return Err(Error::FockCutoff {
            level,
            fock_dim: spec.fock_dim(),
        });
    }
    let weight: f64 = boson_amps.values().map(|a| a.norm_sqr()).sum();
    if (weight - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization {
            deviation: (weight - 1.0).abs(),
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); spec.total_dim()];
    for (&level, &a) in boson_amps {
        for (s, &b) in spin_state.amplitudes().iter().enumerate() {
            amps[spec.compose(level, s)] = a * b;
        }
    }
    PureState::new(amps)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense up to [`DENSE_AUTO_MAX_DIM`], Krylov above.
    #[default]
    Auto,
    #[serde(alias = "dense")]
    DenseEig,
    Krylov,
}

impl Method {
    pub fn resolve(self, dim: usize) -> Method {
        match self {
            Method::Auto if dim <= DENSE_AUTO_MAX_DIM => Method::DenseEig,
            Method::Auto => Method::Krylov,
            m => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub method: Method,
    /// Krylov local error bound per unit time.
    pub tol: f64,
    pub krylov_dim: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            tol: DEFAULT_TOL,
            krylov_dim: DEFAULT_KRYLOV_DIM,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub method: Option<Method>,
    pub samples: usize,
    pub max_norm_error: f64,
    /// Krylov substeps taken (zero for the dense path).
    pub substeps: usize,
    /// Krylov substeps rejected by the error estimate.
    pub rejected: usize,
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimeGrid("no sample times".into()));
    }
    if !(times[0] >= 0.0) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid(
            "times must be finite and start at t >= 0".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Uniform grid `0, dt, 2dt, ...` up to and including `t_end` (within
/// rounding). Samples are computed as `k·dt` to avoid accumulation.
pub fn uniform_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidTimeGrid(format!("t_end = {t_end}, dt = {dt}")));
    }
    let steps = (t_end / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Evolve `psi0` under `h` and hand each sampled state to `sink` in time
/// order. States are not renormalized; their norm error is tracked in the
/// returned statistics.
pub fn propagate<F>(
    h: &Operator,
    psi0: &PureState,
    times: &[f64],
    opts: &PropagationOptions,
    sink: F,
) -> Result<PropagationStats>
where
    F: FnMut(usize, f64, PureState) -> Result<()>,
{
    h.require_hermitian()?;
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    check_time_grid(times)?;
    match opts.method.resolve(h.dim()) {
        Method::Krylov => KrylovPropagator::new(h, opts.tol, opts.krylov_dim)?.propagate(psi0, times, sink),
        _ => DensePropagator::new(h)?.propagate(psi0, times, sink),
    }
}

/// Collect every sampled state; convenient for small systems and tests.
pub fn propagate_collect(
    h: &Operator,
    psi0: &PureState,
    times: &[f64],
    opts: &PropagationOptions,
) -> Result<(Vec<PureState>, PropagationStats)> {
    let mut out = Vec::with_capacity(times.len());
    let stats = propagate(h, psi0, times, opts, |_, _, psi| {
        out.push(psi);
        Ok(())
    })?;
    Ok((out, stats))
}

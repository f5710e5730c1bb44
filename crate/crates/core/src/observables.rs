//! Reduced states and the quantities used to characterise charging.
//!
//! Entropies are in bits (`log₂`); multiply by `ln 2` for nats.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{excitation_counts, HilbertSpec, Operator, PureState, NORM_TOL};
use crate::linalg::eigh_complex;

/// Trace deviation allowed for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const NEGATIVITY_TOL: f64 = 1e-10;
/// Eigenvalues below this are skipped in the entropy sum.
pub const ENTROPY_FLOOR: f64 = 1e-12;
/// Raw ergotropy down to `−ERGOTROPY_CLAMP` is clamped to zero; anything
/// lower is a consistency error.
pub const ERGOTROPY_CLAMP: f64 = 1e-9;
/// Largest imaginary part accepted from a Hermitian expectation value.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    data: Array2<C64>,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    /// Validate `data` and cache its spectrum.
    pub fn new(data: Array2<C64>) -> Result<Self> {
        let n = data.nrows();
        if n == 0 || data.ncols() != n {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {:?} is not square",
                data.shape()
            )));
        }
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((data[(i, j)] - data[(j, i)].conj()).norm());
            }
        }
        if defect > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let trace: C64 = (0..n).map(|i| data[(i, i)]).sum();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let (w, _) = eigh_complex(&data, false)?;
        if let Some(&low) = w.iter().find(|&&x| x < -NEGATIVITY_TOL) {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {low:e}")));
        }
        Ok(Self {
            data,
            eigenvalues: w.to_vec(),
        })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn pure(psi: &PureState) -> Result<Self> {
        let a = psi.amplitudes();
        let n = a.len();
        let data = Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j].conj());
        Self::new(data)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.data
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `Tr[A ρ]`
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: op.dim(),
            });
        }
        Ok(op.entries().map(|(r, c, v)| v * self.data[(c, r)]).sum())
    }
}

/// Which factor survives the partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keep {
    Ions,
    Boson,
}

/// Reduce a composite pure state to the ion chain or to the oscillator.
pub fn partial_trace(psi: &PureState, spec: &HilbertSpec, keep: Keep) -> Result<DensityMatrix> {
    if psi.dim() != spec.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.total_dim(),
            got: psi.dim(),
        });
    }
    let dev = psi.norm_error();
    if dev > NORM_TOL {
        return Err(Error::Normalization { deviation: dev });
    }
    // amplitudes as a fock_dim x spin_dim matrix M; ρ_ions = Mᵀ M*, ρ_boson = M M†
    let (f, s) = (spec.fock_dim(), spec.spin_dim());
    let m = ndarray::ArrayView2::from_shape((f, s), psi.amplitudes()).expect("dims match");
    let data = match keep {
        Keep::Ions => gram_upper(m.t()),
        Keep::Boson => gram_upper(m),
    };
    DensityMatrix::new(data)
}

/// `R = A A†` over rows of `a`, evaluated on the upper triangle and mirrored
/// so the result is exactly Hermitian.
fn gram_upper(a: ndarray::ArrayView2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        let ri = a.row(i);
        for j in i..n {
            let rj = a.row(j);
            let v: C64 = ri.iter().zip(rj.iter()).map(|(x, y)| x * y.conj()).sum();
            if i == j {
                out[(i, i)] = C64::new(v.re, 0.0);
            } else {
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
    }
    out
}

/// `E = Tr[H_a ρ_a]`.
pub fn ion_energy(rho_a: &DensityMatrix, h_a_spin: &Operator) -> Result<f64> {
    let e = rho_a.expectation(h_a_spin)?;
    if e.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::NumericalConsistency(format!(
            "energy has imaginary part {:e}",
            e.im
        )));
    }
    Ok(e.re)
}

/// `E_c(t) = E(t) − E(0)`.
pub fn charging_energy(e_t: f64, e_0: f64) -> f64 {
    e_t - e_0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ergotropy {
    /// Clamped at zero from below.
    pub value: f64,
    /// Before clamping.
    pub raw: f64,
    /// `Tr[Hρ]`
    pub energy: f64,
    /// `Σ_k r_k↓ e_k↑`
    pub passive_energy: f64,
}

/// Energy of the passive state: populations in descending order paired with
/// energies in ascending order. Both inputs may be in any order.
pub fn passive_energy(populations: &[f64], energies: &[f64]) -> f64 {
    let mut r = populations.to_vec();
    let mut e = energies.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    e.sort_by(|a, b| a.total_cmp(b));
    r.iter().zip(&e).map(|(x, y)| x * y).sum()
}

/// Ergotropy from a precomputed spectrum of `h`.
pub fn ergotropy_with_spectrum(rho: &DensityMatrix, h: &Operator, spectrum: &[f64]) -> Result<Ergotropy> {
    if spectrum.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: spectrum.len(),
        });
    }
    let energy = ion_energy(rho, h)?;
    let passive = passive_energy(rho.eigenvalues(), spectrum);
    let raw = energy - passive;
    if raw < -ERGOTROPY_CLAMP {
        return Err(Error::NumericalConsistency(format!(
            "ergotropy {raw:e} is below the clamp tolerance"
        )));
    }
    Ok(Ergotropy {
        value: raw.max(0.0),
        raw,
        energy,
        passive_energy: passive,
    })
}

/// `E_e = Tr[Hρ] − Σ_k r_k↓ e_k↑`.
pub fn ergotropy(rho: &DensityMatrix, h: &Operator) -> Result<Ergotropy> {
    h.require_hermitian()?;
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: h.dim(),
        });
    }
    let (spectrum, _) = eigh_complex(&h.to_dense(), false)?;
    ergotropy_with_spectrum(rho, h, spectrum.as_slice().expect("contiguous"))
}

/// `S = −Σ r log₂ r`, skipping eigenvalues below [`ENTROPY_FLOOR`].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(rho.eigenvalues())
}

pub fn entropy_of_spectrum(populations: &[f64]) -> f64 {
    let s: f64 = populations
        .iter()
        .filter(|&&r| r > ENTROPY_FLOOR)
        .map(|&r| -r * r.log2())
        .sum();
    s.max(0.0)
}

/// `σ_n = Tr[ρ_a σ⁺_n σ⁻_n]` for `n = 1..=N`.
pub fn site_populations(rho_a: &DensityMatrix, spec: &HilbertSpec) -> Result<Vec<f64>> {
    if rho_a.dim() != spec.spin_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.spin_dim(),
            got: rho_a.dim(),
        });
    }
    let m = rho_a.matrix();
    Ok((1..=spec.n_ions())
        .map(|site| {
            (0..spec.spin_dim())
                .filter(|&s| spec.is_excited(s, site))
                .map(|s| m[(s, s)].re)
                .sum()
        })
        .collect())
}

/// `σ_{m,n} = σ_m − σ_n` (1-based sites).
pub fn population_difference(populations: &[f64], m: usize, n: usize) -> Result<f64> {
    let get = |site: usize| {
        populations
            .get(site.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::IndexOutOfRange(format!("site {site} outside 1..={}", populations.len())))
    };
    Ok(get(m)? - get(n)?)
}

/// `(M_z, O_z) = (⟨S_z⟩/N, ⟨S_z²⟩/N²)` with `S_z = Σ σᶻ_n`.
pub fn magnetization(g: &PureState, n_ions: usize) -> Result<(f64, f64)> {
    if g.dim() != 1 << n_ions {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_ions,
            got: g.dim(),
        });
    }
    let n = n_ions as f64;
    let counts = excitation_counts(n_ions);
    let (mut m1, mut m2) = (0.0, 0.0);
    for (a, &k) in g.amplitudes().iter().zip(&counts) {
        // S_z eigenvalue: (#up) − (#down)
        let sz = 2.0 * k as f64 - n;
        let p = a.norm_sqr();
        m1 += p * sz;
        m2 += p * sz * sz;
    }
    Ok(((m1 / n).clamp(-1.0, 1.0), (m2 / (n * n)).clamp(0.0, 1.0)))
}

/// Probability at the highest retained Fock level.
pub fn leakage(psi: &PureState, spec: &HilbertSpec) -> Result<f64> {
    if psi.dim() != spec.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.total_dim(),
            got: psi.dim(),
        });
    }
    let top = spec.compose(spec.fock_dim() - 1, 0);
    let p: f64 = psi.amplitudes()[top..].iter().map(|a| a.norm_sqr()).sum();
    Ok(p.clamp(0.0, 1.0))
}

/// `⟨ĉ†ĉ + Σσ⁺σ⁻⟩`
pub fn mean_excitations(psi: &PureState, spec: &HilbertSpec) -> f64 {
    let counts = excitation_counts(spec.n_ions());
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (n, s) = spec.decompose(i);
            a.norm_sqr() * (n + counts[s] as usize) as f64
        })
        .sum()
}

/// `⟨exp(iπ N̂_exc)⟩`
pub fn mean_parity(psi: &PureState, spec: &HilbertSpec) -> f64 {
    let counts = excitation_counts(spec.n_ions());
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (n, s) = spec.decompose(i);
            let sign = if (n + counts[s] as usize).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * a.norm_sqr()
        })
        .sum()
}

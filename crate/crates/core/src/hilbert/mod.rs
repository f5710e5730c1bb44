//! Composite Hilbert space of one truncated bosonic mode and `N` two-level
//! ions, plus the elementary sparse operators everything else is built from.
//!
//! Tensor ordering is fixed as `boson ⊗ ion_1 ⊗ ... ⊗ ion_N`: the Fock level
//! is the slowest index and ion 1 is the most significant bit of the spin
//! index. Each ion is ordered `(ground, excited)` with
//! `σ^z |excited⟩ = +|excited⟩`, so `σ⁺σ⁻ = diag(0, 1)`.

mod operator;
mod state;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use operator::{Operator, OperatorBuilder, HERMITIAN_TOL};
pub use state::{PureState, NORM_TOL};

use crate::error::{Error, Result};

/// Default truncated boson dimension (levels `0..=100`).
pub const DEFAULT_FOCK_DIM: usize = 101;
/// Default chain length.
pub const DEFAULT_N_IONS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    n_ions: usize,
    fock_dim: usize,
}

impl Default for HilbertSpec {
    fn default() -> Self {
        Self {
            n_ions: DEFAULT_N_IONS,
            fock_dim: DEFAULT_FOCK_DIM,
        }
    }
}

impl HilbertSpec {
    pub fn new(n_ions: usize, fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "fock_dim must be >= 2, got {fock_dim}"
            )));
        }
        if n_ions < 1 {
            return Err(Error::InvalidDimension("n_ions must be >= 1".into()));
        }
        if n_ions >= usize::BITS as usize - 1 || fock_dim.checked_mul(1usize << n_ions).is_none() {
            return Err(Error::InvalidDimension(format!(
                "space of {n_ions} ions x {fock_dim} levels overflows"
            )));
        }
        Ok(Self { n_ions, fock_dim })
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    /// `2^N`
    pub fn spin_dim(&self) -> usize {
        1 << self.n_ions
    }

    /// `fock_dim · 2^N`
    pub fn total_dim(&self) -> usize {
        self.fock_dim * self.spin_dim()
    }

    /// Basis index of `|fock⟩ ⊗ |spins⟩`.
    pub fn compose(&self, fock: usize, spins: usize) -> usize {
        debug_assert!(fock < self.fock_dim && spins < self.spin_dim());
        fock * self.spin_dim() + spins
    }

    /// Inverse of [`HilbertSpec::compose`].
    pub fn decompose(&self, index: usize) -> (usize, usize) {
        (index / self.spin_dim(), index % self.spin_dim())
    }

    /// Bit mask selecting ion `site` (1-based) inside a spin index.
    pub fn site_mask(&self, site: usize) -> usize {
        site_mask(self.n_ions, site)
    }

    /// Whether ion `site` (1-based) is excited in spin basis state `spins`.
    pub fn is_excited(&self, spins: usize, site: usize) -> bool {
        spins & self.site_mask(site) != 0
    }
}

pub(crate) fn site_mask(n_ions: usize, site: usize) -> usize {
    1 << (n_ions - site)
}

/// Single-ion operator kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinKind {
    X,
    Y,
    Z,
    /// `σ⁺ = |e⟩⟨g|`
    Raise,
    /// `σ⁻ = |g⟩⟨e|`
    Lower,
    /// `σ⁺σ⁻ = |e⟩⟨e|`
    Population,
}

impl SpinKind {
    pub const ALL: [SpinKind; 6] = [
        SpinKind::X,
        SpinKind::Y,
        SpinKind::Z,
        SpinKind::Raise,
        SpinKind::Lower,
        SpinKind::Population,
    ];

    /// 2x2 matrix in the `(ground, excited)` basis, row-major.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            SpinKind::X => [[o, l], [l, o]],
            SpinKind::Y => [[o, i], [-i, o]],
            SpinKind::Z => [[-l, o], [o, l]],
            SpinKind::Raise => [[o, o], [l, o]],
            SpinKind::Lower => [[o, l], [o, o]],
            SpinKind::Population => [[o, o], [o, l]],
        }
    }

    pub fn is_hermitian(self) -> bool {
        !matches!(self, SpinKind::Raise | SpinKind::Lower)
    }
}

/// Truncated annihilation operator `ĉ` with `⟨n-1|ĉ|n⟩ = √n`.
pub fn boson_annihilator(fock_dim: usize) -> Result<Operator> {
    if fock_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "fock_dim must be >= 2, got {fock_dim}"
        )));
    }
    let mut b = OperatorBuilder::with_capacity(fock_dim, fock_dim - 1);
    for n in 1..fock_dim {
        b.push(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    b.finish()
}

/// `ĉ†ĉ = diag(0, 1, ..., fock_dim - 1)`.
pub fn boson_number(fock_dim: usize) -> Result<Operator> {
    if fock_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "fock_dim must be >= 2, got {fock_dim}"
        )));
    }
    let levels: Vec<f64> = (0..fock_dim).map(|n| n as f64).collect();
    Ok(Operator::diagonal(&levels))
}

/// Single-ion operator on the `2^N`-dimensional spin space.
pub fn site_operator(n_ions: usize, site: usize, kind: SpinKind) -> Result<Operator> {
    if n_ions == 0 || site == 0 || site > n_ions {
        return Err(Error::IndexOutOfRange(format!("site {site} outside 1..={n_ions}")));
    }
    let dim = 1usize << n_ions;
    let mask = site_mask(n_ions, site);
    let m = kind.matrix();
    let mut b = OperatorBuilder::with_capacity(dim, dim);
    for col in 0..dim {
        let col_bit = usize::from(col & mask != 0);
        for (row_bit, row) in m.iter().enumerate() {
            let v = row[col_bit];
            if v != C64::new(0.0, 0.0) {
                let r = if row_bit == 1 { col | mask } else { col & !mask };
                b.push(r, col, v);
            }
        }
    }
    let op = b.finish()?;
    if kind.is_hermitian() {
        op.into_hermitian()
    } else {
        Ok(op)
    }
}

/// Single-ion operator embedded in the full composite space as
/// `I_boson ⊗ ... ⊗ σ_site ⊗ ...`.
pub fn spin_site_operator(spec: &HilbertSpec, site: usize, kind: SpinKind) -> Result<Operator> {
    let local = site_operator(spec.n_ions, site, kind)?;
    Ok(tensor_embed(&Operator::identity(spec.fock_dim), &local))
}

/// Kronecker product `a ⊗ b`; `a` is the slow index.
pub fn tensor_embed(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

/// `Σ_n σ_n^{kind}` on the spin space.
pub fn collective_spin(n_ions: usize, kind: SpinKind) -> Result<Operator> {
    let mut total = Operator::zeros(1 << n_ions);
    for site in 1..=n_ions {
        total = total.add(&site_operator(n_ions, site, kind)?)?;
    }
    if kind.is_hermitian() {
        total.into_hermitian()
    } else {
        Ok(total)
    }
}

/// Number of excited ions in each spin basis state.
pub fn excitation_counts(n_ions: usize) -> Vec<u32> {
    (0..1usize << n_ions).map(|s| s.count_ones()).collect()
}

/// Total excitation number `ĉ†ĉ + Σ σ⁺σ⁻` on the full space (diagonal).
pub fn excitation_number(spec: &HilbertSpec) -> Operator {
    let counts = excitation_counts(spec.n_ions);
    let values: Vec<f64> = (0..spec.total_dim())
        .map(|i| {
            let (n, s) = spec.decompose(i);
            (n + counts[s] as usize) as f64
        })
        .collect();
    Operator::diagonal(&values)
}

/// Parity `exp(iπ N̂_exc)` on the full space (diagonal ±1).
pub fn excitation_parity(spec: &HilbertSpec) -> Operator {
    let counts = excitation_counts(spec.n_ions);
    let values: Vec<f64> = (0..spec.total_dim())
        .map(|i| {
            let (n, s) = spec.decompose(i);
            if (n + counts[s] as usize).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Operator::diagonal(&values)
}

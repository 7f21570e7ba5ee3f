//! Irreducible spherical tensor operators `τ^K_Q(N)` and collective spin
//! matrices in the Dicke basis.
//!
//! Basis index `i` carries `M = N/2 - i`, so row 0 is the all-up state.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::angular::{clebsch_gordan, HalfInteger, SignedSqrtRational};
use crate::cache::Memo;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Dicke basis `{|N/2, M⟩}` of the symmetric subspace of `N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DickeBasis {
    n_qubits: usize,
}

impl DickeBasis {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::domain("the Dicke basis needs at least one qubit"));
        }
        Ok(DickeBasis { n_qubits })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// Total spin `J = N/2`.
    #[inline]
    pub fn spin(&self) -> HalfInteger {
        HalfInteger::from_twice(self.n_qubits as i64)
    }

    /// Projection `M` carried by basis index `i`.
    #[inline]
    pub fn projection(&self, index: usize) -> HalfInteger {
        HalfInteger::from_twice(self.n_qubits as i64 - 2 * index as i64)
    }

    pub fn index_of(&self, m: HalfInteger) -> Result<usize> {
        crate::angular::check_projection(self.spin(), m)?;
        Ok(((self.n_qubits as i64 - m.twice()) / 2) as usize)
    }
}

/// Position of `(K, Q)` in a flat list ordered by `K`, then `Q` ascending.
#[inline]
pub fn moment_index(rank: usize, component: i64) -> usize {
    ((rank * rank + rank) as i64 + component) as usize
}

/// A single `τ^K_Q(N)`, materialized densely.
#[derive(Clone, Debug)]
pub struct TensorOperator {
    n: usize,
    rank: usize,
    component: i64,
    matrix: CMatrix,
}

impl TensorOperator {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component(&self) -> i64 {
        self.component
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Nonzero entries `(row, col, value)` of `τ^K_Q(N)`; all real.
pub(crate) type Band = Arc<[(usize, usize, f64)]>;

fn band_cache() -> &'static Memo<(usize, usize, i64), Band> {
    static CACHE: OnceLock<Memo<(usize, usize, i64), Band>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

pub(crate) fn check_rank(n: usize, rank: usize, component: i64) -> Result<()> {
    if rank > n {
        return Err(Error::domain(format!("rank K = {rank} exceeds N = {n}")));
    }
    if component.unsigned_abs() as usize > rank {
        return Err(Error::domain(format!("|Q| = {} exceeds K = {rank}", component.abs())));
    }
    Ok(())
}

/// Entries `⟨M + Q| τ^K_Q |M⟩ = sqrt(2K+1) C(J K J; M Q M+Q)`.
pub(crate) fn band(n: usize, rank: usize, component: i64) -> Band {
    band_cache().get_or_insert_with((n, rank, component), || {
        let basis = DickeBasis { n_qubits: n };
        let j = basis.spin();
        let k = HalfInteger::integer(rank as i64);
        let q = HalfInteger::integer(component);
        let weight = SignedSqrtRational::from_ratio(1, 2 * rank as i64 + 1, 1);
        let mut out = Vec::with_capacity(n + 1);
        for col in 0..=n {
            let row = col as i64 - component;
            if row < 0 || row > n as i64 {
                continue;
            }
            let m = basis.projection(col);
            let c = clebsch_gordan(j, k, j, m, q, m + q).expect("valid labels");
            if !c.is_zero() {
                out.push((row as usize, col, (&weight * &c).to_f64()));
            }
        }
        out.into()
    })
}

pub fn tensor_operator(n: usize, rank: usize, component: i64) -> Result<TensorOperator> {
    DickeBasis::new(n)?;
    check_rank(n, rank, component)?;
    let mut matrix = CMatrix::zeros(n + 1, n + 1);
    for &(r, c, v) in band(n, rank, component).iter() {
        matrix[(r, c)] = Complex64::new(v, 0.0);
    }
    Ok(TensorOperator {
        n,
        rank,
        component,
        matrix,
    })
}

/// All `(N+1)^2` operators, ordered as [`moment_index`].
pub fn tensor_basis(n: usize) -> Result<Vec<TensorOperator>> {
    DickeBasis::new(n)?;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for rank in 0..=n {
        for component in -(rank as i64)..=rank as i64 {
            out.push(tensor_operator(n, rank, component)?);
        }
    }
    Ok(out)
}

/// Collective spin components for `J = N/2`.
#[derive(Clone, Debug)]
pub struct AngularMomentum {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl AngularMomentum {
    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }
}

pub fn angular_momentum_matrices(n: usize) -> Result<AngularMomentum> {
    let basis = DickeBasis::new(n)?;
    let d = basis.dim();
    let j = basis.spin().to_f64();
    let mut raise = CMatrix::zeros(d, d);
    let mut z = CMatrix::zeros(d, d);
    for i in 0..d {
        let m = basis.projection(i).to_f64();
        z[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            raise[(i - 1, i)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower) * Complex64::new(0.5, 0.0);
    let y = (&raise - &lower) * Complex64::new(0.0, -0.5);
    Ok(AngularMomentum { x, y, z })
}

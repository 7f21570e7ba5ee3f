//! Inter-group multipole covariance matrices and the negativity witness.
//!
//! For a partition `(N1, N2)` with `A^κ_q = τ^κ_q(N1) ⊗ I` and
//! `B^κ_q = I ⊗ τ^κ_q(N2)`, the cross block is
//!
//! ```text
//! C_{qq'} = ⟨A_q B_{q'}†⟩ - ⟨A_q⟩⟨B_{q'}†⟩
//!         = (-1)^{q'} [t^{κκ}_{q,-q'} - t^{κ0}_{q0} t^{0κ}_{0,-q'}]
//! ```
//!
//! Rows and columns are indexed by `q + κ`, `q = -κ..κ`. A separable
//! symmetric state has `C ⪰ 0` for every rank and partition, and all
//! partitions of one state give positively proportional blocks, so the
//! equal split of the `2κ`-qubit marginal decides the sign.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::bipartite::{
    embed_in_product_basis, f_factor, p_factor, partial_transpose_second, product_moment, reduced_state, Partition,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{moments_of, MomentTable, SeparableMixture, SymmetricState};
use crate::tensors::{angular_momentum_matrices, band, CMatrix};

/// Relative tolerance in `min eig < -ε max(1, ‖C‖)`.
pub const WITNESS_EPS: f64 = 1e-10;

/// Largest hermiticity defect, relative to `max(1, ‖C‖)`, that is silently symmetrized.
pub const HERMITIZE_TOL: f64 = 1e-10;

#[inline]
fn sign(q: i64) -> f64 {
    if q.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn qs(rank: usize) -> impl Iterator<Item = (usize, i64)> {
    (-(rank as i64)..=rank as i64).enumerate()
}

fn check_rank(rank: usize, partition: Partition) -> Result<()> {
    if rank > partition.n1().min(partition.n2()) {
        return Err(Error::domain(format!(
            "rank κ = {rank} exceeds the smaller group of partition ({}, {})",
            partition.n1(),
            partition.n2()
        )));
    }
    Ok(())
}

/// `C^(2κ)(N1, N2)` as a `(2κ+1) x (2κ+1)` Hermitian block.
#[derive(Clone, Debug)]
pub struct CovarianceBlock {
    rank: usize,
    partition: Partition,
    matrix: CMatrix,
}

impl CovarianceBlock {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Entry `(q, q')`.
    pub fn get(&self, q: i64, qp: i64) -> Complex64 {
        let k = self.rank as i64;
        self.matrix[((q + k) as usize, (qp + k) as usize)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn spectral_norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    /// `U C U†` in the Cartesian basis; rank 1 only.
    pub fn to_cartesian(&self) -> Result<CMatrix> {
        spherical_to_cartesian(&self.matrix)
    }
}

/// Raw `(-1)^{q'} [t^{κκ}_{q,-q'} - t^{κ0}_{q0} t^{0κ}_{0,-q'}]` from collective moments.
fn cross_block_from_moments(t: &MomentTable, rank: usize, partition: Partition) -> CMatrix {
    let d = 2 * rank + 1;
    let mean_a: Vec<Complex64> = qs(rank)
        .map(|(_, q)| product_moment(t, partition, rank, 0, q, 0))
        .collect();
    let mean_b: Vec<Complex64> = qs(rank)
        .map(|(_, q)| product_moment(t, partition, 0, rank, 0, q))
        .collect();
    let mut c = CMatrix::zeros(d, d);
    for (i, q) in qs(rank) {
        for (j, qp) in qs(rank) {
            let joint = product_moment(t, partition, rank, rank, q, -qp);
            let mean = mean_a[i] * mean_b[(-qp + rank as i64) as usize];
            c[(i, j)] = (joint - mean) * sign(qp);
        }
    }
    c
}

fn hermitize(raw: CMatrix) -> Result<CMatrix> {
    let defect = linalg::hermiticity_defect(&raw);
    let scale = linalg::frobenius(&raw).max(1.0);
    if defect > HERMITIZE_TOL * scale {
        return Err(Error::validation(format!(
            "cross-correlation block is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(linalg::hermitian_part(&raw))
}

/// Cross-correlation block from a moment table already known to be physical.
pub fn cross_correlation_from_moments(t: &MomentTable, rank: usize, partition: Partition) -> Result<CovarianceBlock> {
    check_rank(rank, partition)?;
    if partition.total() != t.n_qubits() {
        return Err(Error::domain("partition does not match the moment table"));
    }
    let matrix = hermitize(cross_block_from_moments(t, rank, partition))?;
    Ok(CovarianceBlock {
        rank,
        partition,
        matrix,
    })
}

pub fn cross_correlation(state: &SymmetricState, rank: usize, partition: Partition) -> Result<CovarianceBlock> {
    if partition.total() != state.n_qubits() {
        return Err(Error::domain(format!(
            "partition ({}, {}) does not split N = {}",
            partition.n1(),
            partition.n2(),
            state.n_qubits()
        )));
    }
    cross_correlation_from_moments(&moments_of(state), rank, partition)
}

/// The full `2(2κ+1)`-dimensional covariance matrix `[[A, C], [C†, B]]`.
#[derive(Clone, Debug)]
pub struct FullCovariance {
    rank: usize,
    partition: Partition,
    matrix: CMatrix,
}

impl FullCovariance {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn block(&self, row: usize, col: usize) -> CMatrix {
        let d = 2 * self.rank + 1;
        self.matrix.view((row * d, col * d), (d, d)).into_owned()
    }

    /// Intra-group block of the first part.
    pub fn a(&self) -> CMatrix {
        self.block(0, 0)
    }

    pub fn b(&self) -> CMatrix {
        self.block(1, 1)
    }

    pub fn c(&self) -> CMatrix {
        self.block(0, 1)
    }
}

/// `½⟨{ΔX_q, ΔX_{q'}†}⟩` with `X_q = τ^κ_q(n)` on an `n`-qubit marginal.
fn intra_group_block(rho: &SymmetricState, rank: usize) -> CMatrix {
    let n = rho.n_qubits();
    let d = 2 * rank + 1;
    let ops: Vec<CMatrix> = qs(rank)
        .map(|(_, q)| {
            let mut m = CMatrix::zeros(n + 1, n + 1);
            for &(r, c, v) in band(n, rank, q).iter() {
                m[(r, c)] = Complex64::new(v, 0.0);
            }
            m
        })
        .collect();
    let r = rho.matrix();
    let means: Vec<Complex64> = ops.iter().map(|op| (r * op).trace()).collect();
    CMatrix::from_fn(d, d, |i, j| {
        let sym = &ops[i] * ops[j].adjoint() + ops[j].adjoint() * &ops[i];
        (r * sym).trace() * 0.5 - means[i] * means[j].conj()
    })
}

pub fn full_covariance(state: &SymmetricState, rank: usize, partition: Partition) -> Result<FullCovariance> {
    let cross = cross_correlation(state, rank, partition)?;
    let a = intra_group_block(&reduced_state(state, partition.n1())?, rank);
    let b = intra_group_block(&reduced_state(state, partition.n2())?, rank);
    let d = 2 * rank + 1;
    let mut v = CMatrix::zeros(2 * d, 2 * d);
    v.view_mut((0, 0), (d, d)).copy_from(&a);
    v.view_mut((d, d), (d, d)).copy_from(&b);
    v.view_mut((0, d), (d, d)).copy_from(cross.matrix());
    v.view_mut((d, 0), (d, d)).copy_from(&cross.matrix().adjoint());
    Ok(FullCovariance {
        rank,
        partition,
        matrix: v,
    })
}

/// Outcome of testing `C^(2κ)(κ, κ) < 0` on the `2κ`-qubit marginal.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessVerdict {
    pub kappa: usize,
    pub partition: (usize, usize),
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub entangled: bool,
    pub tolerance: f64,
}

impl WitnessVerdict {
    fn from_block(block: &CovarianceBlock) -> Self {
        let ev = linalg::hermitian_eigenvalues(block.matrix());
        let min = ev.first().copied().unwrap_or(0.0);
        let norm = ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        WitnessVerdict {
            kappa: block.rank,
            partition: (block.partition.n1(), block.partition.n2()),
            min_eigenvalue: min,
            spectral_norm: norm,
            entangled: is_negative(min, norm),
            tolerance: WITNESS_EPS,
        }
    }
}

/// Scale-aware negativity `min < -ε max(1, norm)`.
#[inline]
pub fn is_negative(min_eigenvalue: f64, norm: f64) -> bool {
    min_eigenvalue < -WITNESS_EPS * norm.max(1.0)
}

fn check_witness_rank(rank: usize, n: usize) -> Result<()> {
    if rank == 0 || 2 * rank > n {
        return Err(Error::domain(format!(
            "witness order κ = {rank} needs 1 <= κ and 2κ <= N = {n}"
        )));
    }
    Ok(())
}

/// `C^(2κ)(κ, κ)` on the `2κ`-qubit marginal.
pub fn equal_split_block(state: &SymmetricState, rank: usize) -> Result<CovarianceBlock> {
    check_witness_rank(rank, state.n_qubits())?;
    let reduced = reduced_state(state, 2 * rank)?;
    cross_correlation(&reduced, rank, Partition::equal(rank)?)
}

pub fn witness_verdict(state: &SymmetricState, rank: usize) -> Result<WitnessVerdict> {
    Ok(WitnessVerdict::from_block(&equal_split_block(state, rank)?))
}

fn relative_residual(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    linalg::frobenius(&(lhs - rhs)) / linalg::frobenius(rhs).max(1.0)
}

/// `‖C(N1,N2) - f(N1,κ) f(N2,κ) C(κ,κ)‖ / max(1, ‖f f C(κ,κ)‖)`.
pub fn scaling_check(state: &SymmetricState, rank: usize, partition: Partition) -> Result<f64> {
    let lhs = cross_correlation(state, rank, partition)?;
    let small = equal_split_block(state, rank)?;
    let scale = f_factor(partition.n1(), rank)? * f_factor(partition.n2(), rank)?;
    let rhs = small.matrix() * Complex64::new(scale, 0.0);
    Ok(relative_residual(lhs.matrix(), &rhs))
}

/// Residual of `C(N1, N2) = P_κ(N1, N2 - N1)^{-1} C(N1, N1)` for a separable
/// mixture. The left side comes from the mixed state through the composition
/// law; the right from the factorized component moments.
pub fn separable_scaling_check(mixture: &SeparableMixture, rank: usize, partition: Partition) -> Result<f64> {
    let (n1, n2) = (partition.n1(), partition.n2());
    if n1 > n2 {
        return Err(Error::domain(format!("need N1 <= N2, got ({n1}, {n2})")));
    }
    if partition.total() != mixture.n {
        return Err(Error::domain("partition does not split the mixture"));
    }
    let lhs = cross_correlation(&mixture.state(), rank, partition)?;

    let d = 2 * rank + 1;
    let mut second = CMatrix::zeros(d, d);
    let mut mean = vec![Complex64::new(0.0, 0.0); d];
    for (w, &p) in mixture.weights.iter().enumerate() {
        let t = mixture.component_moments(w, n1)?;
        let a: Vec<Complex64> = qs(rank).map(|(_, q)| t.get(rank, q)).collect();
        for i in 0..d {
            mean[i] += a[i] * p;
            for j in 0..d {
                second[(i, j)] += a[i] * a[j].conj() * p;
            }
        }
    }
    let cov_equal = CMatrix::from_fn(d, d, |i, j| second[(i, j)] - mean[i] * mean[j].conj());
    let p = p_factor(rank, n1, n2 - n1)?;
    let rhs = cov_equal / Complex64::new(p, 0.0);
    Ok(relative_residual(lhs.matrix(), &rhs))
}

/// `-N/4 I + V + S Sᵀ/N` with `S_α = ⟨J_α⟩`, `V_{αβ} = ½⟨{J_α, J_β}⟩ - S_α S_β`.
pub fn spin_squeezing_matrix(state: &SymmetricState) -> Result<Matrix3<f64>> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::domain("spin-squeezing matrix needs N >= 2"));
    }
    let spin = angular_momentum_matrices(n)?;
    let j = spin.components();
    let rho = state.matrix();
    let s: Vec<f64> = j.iter().map(|m| (rho * *m).trace().re).collect();
    let nf = n as f64;
    Ok(Matrix3::from_fn(|a, b| {
        let anti = (rho * (j[a] * j[b] + j[b] * j[a])).trace().re * 0.5;
        let v = anti - s[a] * s[b];
        let id = if a == b { nf / 4.0 } else { 0.0 };
        -id + v + s[a] * s[b] / nf
    }))
}

/// Prefactor `12/(N(N-1)) sqrt(N1 N2 / ((N1+2)(N2+2)))` linking the Cartesian
/// dipole block to the spin-squeezing matrix.
pub fn spin_squeezing_prefactor(partition: Partition) -> f64 {
    let (n1, n2) = (partition.n1() as f64, partition.n2() as f64);
    let n = n1 + n2;
    12.0 / (n * (n - 1.0)) * (n1 * n2 / ((n1 + 2.0) * (n2 + 2.0))).sqrt()
}

/// Spherical-to-Cartesian change of basis for a rank-1 block, `U C U†`
/// with `e_{±1} = ∓(e_x ± i e_y)/√2`, `e_0 = e_z`.
pub fn spherical_to_cartesian(c: &CMatrix) -> Result<CMatrix> {
    if c.nrows() != 3 || c.ncols() != 3 {
        return Err(Error::domain(
            "spherical-to-Cartesian transform is defined for κ = 1 blocks only",
        ));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    // row q + 1 holds the Cartesian components of e_q
    let spherical = CMatrix::from_row_slice(
        3,
        3,
        &[
            Complex64::new(r, 0.0),
            Complex64::new(0.0, -r),
            z,
            z,
            z,
            Complex64::new(1.0, 0.0),
            Complex64::new(-r, 0.0),
            Complex64::new(0.0, -r),
            z,
        ],
    );
    let u = spherical.adjoint();
    Ok(&u * c * u.adjoint())
}

/// Smallest eigenvalue of the partial transpose (second group) of the embedded state.
pub fn ppt_negativity(state: &SymmetricState, partition: Partition) -> Result<f64> {
    let embedded = embed_in_product_basis(state, partition)?;
    let pt = partial_transpose_second(&embedded, partition.n1() + 1, partition.n2() + 1);
    Ok(linalg::min_eigenvalue(&pt))
}

/// `C^(2κ)(κ, κ)` along the segment `(1 - x) ρ0 + x ρ1`.
///
/// Moments are linear in the state, so the block is `L(x) - a(x) b(x)ᵀ` with
/// `L`, `a`, `b` interpolating their endpoint values.
#[derive(Clone, Debug)]
pub struct WitnessLine {
    rank: usize,
    joint: [CMatrix; 2],
    mean_a: [Vec<Complex64>; 2],
    mean_b: [Vec<Complex64>; 2],
}

impl WitnessLine {
    pub fn new(rho0: &SymmetricState, rho1: &SymmetricState, rank: usize) -> Result<Self> {
        if rho0.n_qubits() != rho1.n_qubits() {
            return Err(Error::domain("segment endpoints have different N"));
        }
        check_witness_rank(rank, rho0.n_qubits())?;
        let partition = Partition::equal(rank)?;
        let d = 2 * rank + 1;
        let mut joint = [CMatrix::zeros(d, d), CMatrix::zeros(d, d)];
        let mut mean_a = [vec![], vec![]];
        let mut mean_b = [vec![], vec![]];
        for (e, rho) in [rho0, rho1].into_iter().enumerate() {
            let t = moments_of(&reduced_state(rho, 2 * rank)?);
            for (i, q) in qs(rank) {
                for (j, qp) in qs(rank) {
                    joint[e][(i, j)] = product_moment(&t, partition, rank, rank, q, -qp) * sign(qp);
                }
            }
            mean_a[e] = qs(rank)
                .map(|(_, q)| product_moment(&t, partition, rank, 0, q, 0))
                .collect();
            // stored as (-1)^{q'} t^{0κ}_{0,-q'} at index q' + κ
            mean_b[e] = qs(rank)
                .map(|(_, qp)| product_moment(&t, partition, 0, rank, 0, -qp) * sign(qp))
                .collect();
        }
        Ok(WitnessLine {
            rank,
            joint,
            mean_a,
            mean_b,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn block_at(&self, x: f64) -> CMatrix {
        let lerp = |a: Complex64, b: Complex64| a * (1.0 - x) + b * x;
        let d = 2 * self.rank + 1;
        let raw = CMatrix::from_fn(d, d, |i, j| {
            let l = lerp(self.joint[0][(i, j)], self.joint[1][(i, j)]);
            let a = lerp(self.mean_a[0][i], self.mean_a[1][i]);
            let b = lerp(self.mean_b[0][j], self.mean_b[1][j]);
            l - a * b
        });
        linalg::hermitian_part(&raw)
    }

    /// `(min eigenvalue, spectral norm)` at `x`.
    pub fn spectrum_at(&self, x: f64) -> (f64, f64) {
        let ev = linalg::hermitian_eigenvalues(&self.block_at(x));
        let min = ev.first().copied().unwrap_or(0.0);
        (min, ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
    }

    pub fn detects_at(&self, x: f64) -> bool {
        let (min, norm) = self.spectrum_at(x);
        is_negative(min, norm)
    }
}

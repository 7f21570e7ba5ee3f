//! Symmetric density matrices, their tensor-moment representation, and the
//! state families used by the witnesses and scans.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, HalfInteger};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensors::{band, moment_index, CMatrix, DickeBasis};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Tolerance for accepting a moment table as conjugation-symmetric.
pub const MOMENT_SYMMETRY_TOL: f64 = 1e-10;

/// Density matrix of `N` qubits restricted to the symmetric subspace.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    n: usize,
    rho: CMatrix,
}

impl SymmetricState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(n: usize, rho: CMatrix) -> Result<Self> {
        let state = Self::from_hermitian(n, rho)?;
        let lowest = linalg::min_eigenvalue(&state.rho);
        if lowest < POSITIVITY_TOL {
            return Err(Error::validation(format!("density matrix has eigenvalue {lowest:e}")));
        }
        Ok(state)
    }

    /// Validates hermiticity and unit trace only.
    pub fn from_hermitian(n: usize, rho: CMatrix) -> Result<Self> {
        let basis = DickeBasis::new(n)?;
        if rho.nrows() != basis.dim() || rho.ncols() != basis.dim() {
            return Err(Error::validation(format!(
                "expected a {0}x{0} matrix for N = {n}, got {1}x{2}",
                basis.dim(),
                rho.nrows(),
                rho.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&rho);
        if defect > HERMITIAN_TOL {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::validation(format!("trace is {tr}, expected 1")));
        }
        Ok(SymmetricState {
            n,
            rho: linalg::hermitian_part(&rho),
        })
    }

    /// Normalizes a positive operator by its trace.
    pub(crate) fn from_positive(n: usize, m: CMatrix) -> Self {
        let tr = m.trace().re;
        let rho = linalg::hermitian_part(&m) / Complex64::new(tr, 0.0);
        SymmetricState { n, rho }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn basis(&self) -> DickeBasis {
        DickeBasis::new(self.n).expect("validated at construction")
    }

    /// `(1 - x) self + x other`.
    pub fn mix(&self, other: &SymmetricState, x: f64) -> Result<SymmetricState> {
        if self.n != other.n {
            return Err(Error::domain("cannot mix states of different N"));
        }
        let rho = &self.rho * Complex64::new(1.0 - x, 0.0) + &other.rho * Complex64::new(x, 0.0);
        Ok(SymmetricState { n: self.n, rho })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let d = DickeBasis::new(n)?.dim();
        Ok(SymmetricState {
            n,
            rho: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
        })
    }

    pub fn pure(n: usize, amplitudes: &[Complex64]) -> Result<Self> {
        let d = DickeBasis::new(n)?.dim();
        if amplitudes.len() != d {
            return Err(Error::validation(format!(
                "expected {d} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::validation("zero state vector"));
        }
        let v = v / Complex64::new(norm, 0.0);
        Ok(SymmetricState {
            n,
            rho: &v * v.adjoint(),
        })
    }

    pub fn to_json(&self) -> StateJson {
        let d = self.dim();
        let re = (0..d).map(|r| (0..d).map(|c| self.rho[(r, c)].re).collect()).collect();
        let im = (0..d).map(|r| (0..d).map(|c| self.rho[(r, c)].im).collect()).collect();
        StateJson { n: self.n, re, im }
    }

    pub fn from_json(json: &StateJson) -> Result<Self> {
        let d = json.n + 1;
        let rows_ok = |m: &Vec<Vec<f64>>| m.len() == d && m.iter().all(|row| row.len() == d);
        if !rows_ok(&json.re) || !rows_ok(&json.im) {
            return Err(Error::validation(format!("\"re\" and \"im\" must both be {d}x{d}")));
        }
        let rho = CMatrix::from_fn(d, d, |r, c| Complex64::new(json.re[r][c], json.im[r][c]));
        Self::new(json.n, rho)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json: StateJson = serde_json::from_str(&text)?;
        Self::from_json(&json)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// On-disk form `{ "n": N, "re": [[...]], "im": [[...]] }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Tensor moments `t^K_Q = Tr(ρ τ^K_Q)` for `0 <= K <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    n: usize,
    entries: Vec<Complex64>,
}

impl MomentTable {
    /// Entries in [`moment_index`] order. Checks `t^0_0 = 1` and the
    /// conjugation symmetry `t^K_{-Q} = (-1)^Q conj(t^K_Q)`.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        DickeBasis::new(n)?;
        if entries.len() != (n + 1) * (n + 1) {
            return Err(Error::validation(format!(
                "a moment table for N = {n} has {} entries, got {}",
                (n + 1) * (n + 1),
                entries.len()
            )));
        }
        let table = MomentTable { n, entries };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if (self.get(0, 0) - Complex64::new(1.0, 0.0)).norm() > MOMENT_SYMMETRY_TOL {
            return Err(Error::validation(format!("t^0_0 = {}, expected 1", self.get(0, 0))));
        }
        for k in 0..=self.n {
            for q in 0..=k as i64 {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                let defect = (self.get(k, -q) - self.get(k, q).conj() * sign).norm();
                if defect > MOMENT_SYMMETRY_TOL {
                    return Err(Error::validation(format!(
                        "conjugation symmetry broken at K = {k}, Q = {q} (defect {defect:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Panics when `(K, Q)` is out of range.
    #[inline]
    pub fn get(&self, rank: usize, component: i64) -> Complex64 {
        assert!(rank <= self.n && component.unsigned_abs() as usize <= rank);
        self.entries[moment_index(rank, component)]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `(K, Q, t^K_Q)` in table order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.n).flat_map(move |k| (-(k as i64)..=k as i64).map(move |q| (k, q, self.get(k, q))))
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<Complex64>) -> Self {
        MomentTable { n, entries }
    }
}

pub fn moments_of(state: &SymmetricState) -> MomentTable {
    let n = state.n;
    let rho = &state.rho;
    let mut entries = vec![Complex64::new(0.0, 0.0); (n + 1) * (n + 1)];
    for k in 0..=n {
        for q in -(k as i64)..=k as i64 {
            let t: Complex64 = band(n, k, q).iter().map(|&(r, c, v)| rho[(c, r)] * v).sum();
            entries[moment_index(k, q)] = t;
        }
    }
    MomentTable::from_raw(n, entries)
}

/// Inverts [`moments_of`]. The result is Hermitian with unit trace but is not
/// projected onto the positive cone.
pub fn state_from_moments(table: &MomentTable) -> Result<SymmetricState> {
    table.validate()?;
    let n = table.n;
    let d = n + 1;
    let mut rho = CMatrix::zeros(d, d);
    let scale = 1.0 / d as f64;
    for (k, q, t) in table.iter() {
        for &(r, c, v) in band(n, k, q).iter() {
            // τ† has the same real entry at the transposed position
            rho[(c, r)] += t * (v * scale);
        }
    }
    SymmetricState::from_hermitian(n, rho)
}

pub fn dicke_state(n: usize, m: HalfInteger) -> Result<SymmetricState> {
    let basis = DickeBasis::new(n)?;
    let i = basis.index_of(m)?;
    let mut rho = CMatrix::zeros(basis.dim(), basis.dim());
    rho[(i, i)] = Complex64::new(1.0, 0.0);
    Ok(SymmetricState { n, rho })
}

/// Closed form `t^κ_0 = sqrt(2κ+1) C(N/2 κ N/2; M 0 M)` for a Dicke state.
pub fn dicke_moments(n: usize, m: HalfInteger, rank: usize) -> Result<Complex64> {
    let basis = DickeBasis::new(n)?;
    basis.index_of(m)?;
    if rank > n {
        return Err(Error::domain(format!("rank {rank} exceeds N = {n}")));
    }
    let j = basis.spin();
    let c = clebsch_gordan(j, HalfInteger::integer(rank as i64), j, m, HalfInteger::ZERO, m)?;
    Ok(Complex64::new(((2 * rank + 1) as f64).sqrt() * c.to_f64(), 0.0))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Dicke amplitudes of the product state with every qubit along
/// `(sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn coherent_amplitudes(n: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let (s, c) = (theta / 2.0).sin_cos();
    (0..=n)
        .map(|k| {
            let mag = binomial(n, k).sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
            Complex64::from_polar(mag, k as f64 * phi)
        })
        .collect()
}

pub fn coherent_state(n: usize, theta: f64, phi: f64) -> Result<SymmetricState> {
    SymmetricState::pure(n, &coherent_amplitudes(n, theta, phi))
}

/// The three noise-mixed families `(1 - x) I/(N+1) + x |φ_i⟩⟨φ_i|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum NoisyFamily {
    /// `|φ_1⟩ = |N/2, N/2 - 1⟩`
    SingleExcitation = 1,
    /// `|φ_2⟩ = |N/2, 0⟩`, even `N` only
    Balanced = 2,
    /// `|φ_3⟩ = (|N/2, N/2⟩ + |N/2, -N/2⟩)/√2`
    Ghz = 3,
}

impl NoisyFamily {
    pub const ALL: [NoisyFamily; 3] = [NoisyFamily::SingleExcitation, NoisyFamily::Balanced, NoisyFamily::Ghz];

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(NoisyFamily::SingleExcitation),
            2 => Ok(NoisyFamily::Balanced),
            3 => Ok(NoisyFamily::Ghz),
            _ => Err(Error::domain(format!("family must be 1, 2 or 3, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn supports(self, n: usize) -> bool {
        n >= 1 && (self != NoisyFamily::Balanced || n % 2 == 0)
    }

    /// The pure state `|φ_i⟩` mixed with noise.
    pub fn target(self, n: usize) -> Result<SymmetricState> {
        if !self.supports(n) {
            return Err(Error::domain(format!(
                "family {} is not defined for N = {n}",
                self.index()
            )));
        }
        let d = n + 1;
        let mut amp = vec![Complex64::new(0.0, 0.0); d];
        match self {
            NoisyFamily::SingleExcitation => amp[1] = Complex64::new(1.0, 0.0),
            NoisyFamily::Balanced => amp[n / 2] = Complex64::new(1.0, 0.0),
            NoisyFamily::Ghz => {
                amp[0] = Complex64::new(1.0, 0.0);
                amp[n] = Complex64::new(1.0, 0.0);
            }
        }
        SymmetricState::pure(n, &amp)
    }
}

impl From<NoisyFamily> for u8 {
    fn from(f: NoisyFamily) -> u8 {
        f.index()
    }
}

impl TryFrom<u8> for NoisyFamily {
    type Error = Error;

    fn try_from(i: u8) -> Result<Self> {
        NoisyFamily::from_index(i)
    }
}

impl fmt::Display for NoisyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

pub fn noisy_family_state(family: NoisyFamily, x: f64, n: usize) -> Result<SymmetricState> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("mixing weight x = {x} outside [0, 1]")));
    }
    let target = family.target(n)?;
    SymmetricState::maximally_mixed(n)?.mix(&target, x)
}

/// Full-rank random state `G G† / Tr(G G†)` with complex Gaussian `G`.
pub fn random_state(n: usize, seed: u64) -> Result<SymmetricState> {
    let d = DickeBasis::new(n)?.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Ok(SymmetricState::from_positive(n, &g * g.adjoint()))
}

/// Convex mixture of spin-coherent product states, `Σ_w p_w |θ_w φ_w⟩⟨θ_w φ_w|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableMixture {
    pub n: usize,
    pub weights: Vec<f64>,
    /// `(θ_w, φ_w)` per component, radians.
    pub directions: Vec<(f64, f64)>,
}

impl SeparableMixture {
    pub fn new(n: usize, weights: Vec<f64>, directions: Vec<(f64, f64)>) -> Result<Self> {
        DickeBasis::new(n)?;
        if weights.is_empty() || weights.len() != directions.len() {
            return Err(Error::validation(
                "need one direction per weight and at least one component",
            ));
        }
        if weights.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::validation("mixture weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!("mixture weights sum to {total}")));
        }
        Ok(SeparableMixture { n, weights, directions })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The mixture as an `N`-qubit density matrix.
    pub fn state(&self) -> SymmetricState {
        let d = self.n + 1;
        let mut rho = CMatrix::zeros(d, d);
        for (&p, &(theta, phi)) in self.weights.iter().zip(&self.directions) {
            let v = nalgebra::DVector::from_vec(coherent_amplitudes(self.n, theta, phi));
            rho += (&v * v.adjoint()) * Complex64::new(p, 0.0);
        }
        SymmetricState::from_positive(self.n, rho)
    }

    /// Moments of the `sub_n`-qubit marginal of component `w`. Every marginal
    /// of a coherent product is again coherent along the same axis.
    pub fn component_moments(&self, w: usize, sub_n: usize) -> Result<MomentTable> {
        let (theta, phi) = self.directions[w];
        Ok(moments_of(&coherent_state(sub_n, theta, phi)?))
    }
}

pub fn random_separable_mixture(n: usize, components: usize, seed: u64) -> Result<(SymmetricState, SeparableMixture)> {
    if components == 0 {
        return Err(Error::domain("a mixture needs at least one component"));
    }
    DickeBasis::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..components).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    let directions = (0..components)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            ((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), 2.0 * PI * v)
        })
        .collect();
    let mixture = SeparableMixture { n, weights, directions };
    Ok((mixture.state(), mixture))
}

//! Bipartite view of a symmetric state: product tensor moments
//! `t^{κκ'}_{qq'}(N1, N2)` obtained from the collective moments through the
//! 9j composition law, and an independent route through the explicit CG
//! embedding of the Dicke space into `spin(N1/2) ⊗ spin(N2/2)`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::angular::{clebsch_gordan, factorial, wigner9j, HalfInteger, SignedSqrtRational};
use crate::cache::Memo;
use crate::error::{Error, Result};
use crate::states::{moments_of, MomentTable, SymmetricState};
use crate::tensors::{band, moment_index, CMatrix};

/// Largest `N` accepted by the dense product-space routes.
pub const ORACLE_MAX_QUBITS: usize = 12;

/// Split of `N = N1 + N2` qubits into two groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n1: usize,
    n2: usize,
}

impl Partition {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::domain(format!(
                "partition ({n1}, {n2}) needs both parts nonempty"
            )));
        }
        Ok(Partition { n1, n2 })
    }

    pub fn equal(k: usize) -> Result<Self> {
        Self::new(k, k)
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn total(&self) -> usize {
        self.n1 + self.n2
    }

    /// All splits `(k, N - k)` with `1 <= k <= N - 1`.
    pub fn all(n: usize) -> Vec<Partition> {
        (1..n).map(|k| Partition { n1: k, n2: n - k }).collect()
    }

    fn check_state(&self, n: usize) -> Result<()> {
        if self.total() != n {
            return Err(Error::domain(format!(
                "partition ({}, {}) does not split N = {n}",
                self.n1, self.n2
            )));
        }
        Ok(())
    }
}

/// Which group of a [`Partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Product moments `t^{κκ'}_{qq'}(N1, N2)`.
#[derive(Clone, Debug)]
pub struct ProductMomentTable {
    partition: Partition,
    entries: Vec<Complex64>,
}

impl ProductMomentTable {
    fn stride(&self) -> usize {
        (self.partition.n2 + 1) * (self.partition.n2 + 1)
    }

    fn index(&self, k1: usize, k2: usize, q1: i64, q2: i64) -> usize {
        assert!(k1 <= self.partition.n1 && k2 <= self.partition.n2);
        assert!(q1.unsigned_abs() as usize <= k1 && q2.unsigned_abs() as usize <= k2);
        moment_index(k1, q1) * self.stride() + moment_index(k2, q2)
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    #[inline]
    pub fn get(&self, k1: usize, k2: usize, q1: i64, q2: i64) -> Complex64 {
        self.entries[self.index(k1, k2, q1, q2)]
    }

    /// `(κ, κ', q, q', t)` over all entries.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, i64, i64, Complex64)> + '_ {
        let Partition { n1, n2 } = self.partition;
        (0..=n1).flat_map(move |k1| {
            (0..=n2).flat_map(move |k2| {
                (-(k1 as i64)..=k1 as i64).flat_map(move |q1| {
                    (-(k2 as i64)..=k2 as i64).map(move |q2| (k1, k2, q1, q2, self.get(k1, k2, q1, q2)))
                })
            })
        })
    }

    fn build(partition: Partition, mut f: impl FnMut(usize, usize, i64, i64) -> Complex64) -> Self {
        let Partition { n1, n2 } = partition;
        let mut table = ProductMomentTable {
            partition,
            entries: vec![Complex64::new(0.0, 0.0); (n1 + 1) * (n1 + 1) * (n2 + 1) * (n2 + 1)],
        };
        for k1 in 0..=n1 {
            for k2 in 0..=n2 {
                for q1 in -(k1 as i64)..=k1 as i64 {
                    for q2 in -(k2 as i64)..=k2 as i64 {
                        let i = table.index(k1, k2, q1, q2);
                        table.entries[i] = f(k1, k2, q1, q2);
                    }
                }
            }
        }
        table
    }

    /// Largest entrywise difference against another table on the same partition.
    pub fn max_abs_diff(&self, other: &ProductMomentTable) -> f64 {
        assert_eq!(self.partition, other.partition);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

fn h(twice: usize) -> HalfInteger {
    HalfInteger::from_twice(twice as i64)
}

fn int(n: i64) -> HalfInteger {
    HalfInteger::integer(n)
}

/// Composition-law coefficient relating `t^{κκ'}_{qq'}(N1, N2)` to `t^K_Q(N)`:
///
/// ```text
/// F = [N1/2][N2/2][N/2][κ][κ'] C(κ κ' K; q q' Q) {N1/2 N2/2 N/2; N1/2 N2/2 N/2; κ κ' K}
/// ```
///
/// with `[a] = sqrt(2a+1)`. Equal to `Tr((τ^κ_q ⊗ τ^κ'_q') τ^K_Q†)/(N+1)` with
/// `τ^K_Q(N)` embedded in the product space; zero outside the selection rules.
#[allow(clippy::too_many_arguments)]
pub fn f_coefficient(k1: usize, k2: usize, q1: i64, q2: i64, k: usize, q: i64, partition: Partition) -> f64 {
    let Partition { n1, n2 } = partition;
    let n = n1 + n2;
    if k1 > n1 || k2 > n2 || k > n || q1.unsigned_abs() as usize > k1 || q2.unsigned_abs() as usize > k2 {
        return 0.0;
    }
    if q != q1 + q2 || q.unsigned_abs() as usize > k || k < k1.abs_diff(k2) || k > k1 + k2 {
        return 0.0;
    }
    let cg = clebsch_gordan(int(k1 as i64), int(k2 as i64), int(k as i64), int(q1), int(q2), int(q))
        .expect("selection rules checked");
    if cg.is_zero() {
        return 0.0;
    }
    let ninej = wigner9j(
        h(n1),
        h(n2),
        h(n),
        h(n1),
        h(n2),
        h(n),
        int(k1 as i64),
        int(k2 as i64),
        int(k as i64),
    );
    if ninej.is_zero() {
        return 0.0;
    }
    let brackets = ((n1 + 1) * (n2 + 1) * (n + 1) * (2 * k1 + 1) * (2 * k2 + 1)) as f64;
    brackets.sqrt() * cg.to_f64() * ninej.to_f64()
}

/// One product moment via the composition law.
pub fn product_moment(t: &MomentTable, partition: Partition, k1: usize, k2: usize, q1: i64, q2: i64) -> Complex64 {
    let q = q1 + q2;
    let lo = k1.abs_diff(k2).max(q.unsigned_abs() as usize);
    (lo..=k1 + k2)
        .map(|k| t.get(k, q) * f_coefficient(k1, k2, q1, q2, k, q, partition))
        .sum()
}

/// The full product table of a symmetric state, from its collective moments.
pub fn product_moments(t: &MomentTable, partition: Partition) -> Result<ProductMomentTable> {
    partition.check_state(t.n_qubits())?;
    Ok(ProductMomentTable::build(partition, |k1, k2, q1, q2| {
        product_moment(t, partition, k1, k2, q1, q2)
    }))
}

/// Marginal moments of one group: `t^κ_q(N1) = t^{κ0}_{q0}(N1, N2)`.
pub fn reduce_to_subsystem(pm: &ProductMomentTable, which: Side) -> MomentTable {
    let Partition { n1, n2 } = pm.partition;
    let n = match which {
        Side::First => n1,
        Side::Second => n2,
    };
    let mut entries = vec![Complex64::new(0.0, 0.0); (n + 1) * (n + 1)];
    for k in 0..=n {
        for q in -(k as i64)..=k as i64 {
            entries[moment_index(k, q)] = match which {
                Side::First => pm.get(k, 0, q, 0),
                Side::Second => pm.get(0, k, 0, q),
            };
        }
    }
    MomentTable::from_raw(n, entries)
}

fn fact_ratio(num: &[usize], den: &[usize]) -> BigRational {
    let prod = |xs: &[usize]| xs.iter().fold(BigInt::from(1), |acc, &x| acc * factorial(x));
    BigRational::new(prod(num), prod(den))
}

/// Reduction factor `P_κ(N1, N2)` with `t^{κ0}_{q0}(N1, N2) = P_κ t^κ_q(N1 + N2)`, exact.
pub fn p_factor_exact(k: usize, n1: usize, n2: usize) -> Result<SignedSqrtRational> {
    if k > n1 {
        return Err(Error::domain(format!("κ = {k} exceeds N1 = {n1}")));
    }
    let n = n1 + n2;
    let lead = fact_ratio(&[n1], &[n]);
    let radicand = BigRational::new(BigInt::from(n1 + 1), BigInt::from(n + 1))
        * fact_ratio(&[n + k + 1, n - k], &[n1 + k + 1, n1 - k]);
    Ok(SignedSqrtRational::from_coefficient(&lead, radicand))
}

pub fn p_factor(k: usize, n1: usize, n2: usize) -> Result<f64> {
    p_factor_exact(k, n1, n2).map(|p| p.to_f64())
}

/// `P_κ(N1, N2 - N1)`, the factor with `t^κ_q(N1) = factor · t^κ_q(N2)` for
/// marginals of one state.
pub fn subsystem_scaling(k: usize, n1: usize, n2: usize) -> Result<f64> {
    if n1 > n2 {
        return Err(Error::domain(format!("need N1 <= N2, got ({n1}, {n2})")));
    }
    p_factor(k, n1, n2 - n1)
}

/// Scale factor `f(Nα, κ)` in `t^{κκ'}(N1, N2) = f(N1, κ) f(N2, κ') t^{κκ'}(κ, κ')`:
///
/// ```text
/// f(Nα, κ) = (Nα!/κ!) sqrt((Nα+1)(2κ+1)! / ((κ+1)(Nα+κ+1)!(Nα-κ)!))
/// ```
///
/// which equals `1 / P_κ(κ, Nα - κ)`. The frequently quoted form without
/// the leading `Nα!/κ!` gives `f(Nα, 0) = 1/Nα!` and fails the direct-trace
/// check; see the `scale_factor_*` tests.
pub fn f_factor_exact(n_alpha: usize, k: usize) -> Result<SignedSqrtRational> {
    if k > n_alpha {
        return Err(Error::domain(format!("κ = {k} exceeds Nα = {n_alpha}")));
    }
    let lead = fact_ratio(&[n_alpha], &[k]);
    let radicand = BigRational::new(BigInt::from(n_alpha + 1), BigInt::from(k + 1))
        * fact_ratio(&[2 * k + 1], &[n_alpha + k + 1, n_alpha - k]);
    Ok(SignedSqrtRational::from_coefficient(&lead, radicand))
}

pub fn f_factor(n_alpha: usize, k: usize) -> Result<f64> {
    f_factor_exact(n_alpha, k).map(|f| f.to_f64())
}

fn isometry_cache() -> &'static Memo<Partition, Arc<CMatrix>> {
    static CACHE: OnceLock<Memo<Partition, Arc<CMatrix>>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

/// Isometry `V` with `V[(a, b), i] = C(j1 j2 J; m1 m2 M)`, mapping the Dicke
/// basis of `N` qubits into the product of the two groups' Dicke bases
/// (row `a (N2+1) + b`).
pub fn embedding_isometry(partition: Partition) -> Arc<CMatrix> {
    isometry_cache().get_or_insert_with(partition, || {
        let Partition { n1, n2 } = partition;
        let n = n1 + n2;
        let (j1, j2, j) = (h(n1), h(n2), h(n));
        let mut v = CMatrix::zeros((n1 + 1) * (n2 + 1), n + 1);
        for a in 0..=n1 {
            let m1 = HalfInteger::from_twice(n1 as i64 - 2 * a as i64);
            for b in 0..=n2 {
                let m2 = HalfInteger::from_twice(n2 as i64 - 2 * b as i64);
                let i = a + b; // M = J - i
                let c = clebsch_gordan(j1, j2, j, m1, m2, m1 + m2).expect("valid labels");
                v[(a * (n2 + 1) + b, i)] = Complex64::new(c.to_f64(), 0.0);
            }
        }
        Arc::new(v)
    })
}

/// `V ρ V†` on the `(N1+1)(N2+1)`-dimensional product space.
pub fn embed_in_product_basis(state: &SymmetricState, partition: Partition) -> Result<CMatrix> {
    partition.check_state(state.n_qubits())?;
    let v = embedding_isometry(partition);
    Ok(v.as_ref() * state.matrix() * v.adjoint())
}

/// Traces out the second factor of a `(d1 d2) x (d1 d2)` matrix.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, ap| (0..d2).map(|b| m[(a * d2 + b, ap * d2 + b)]).sum())
}

/// Traces out the first factor.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |b, bp| (0..d1).map(|a| m[(a * d2 + b, a * d2 + bp)]).sum())
}

/// Transposes the second tensor factor.
pub fn partial_transpose_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (a, b) = (r / d2, r % d2);
        let (ap, bp) = (c / d2, c % d2);
        m[(a * d2 + bp, ap * d2 + b)]
    })
}

/// Marginal of `k` qubits, again a symmetric state.
pub fn reduced_state(state: &SymmetricState, k: usize) -> Result<SymmetricState> {
    let n = state.n_qubits();
    if k == 0 || k > n {
        return Err(Error::domain(format!("cannot reduce N = {n} to {k} qubits")));
    }
    if k == n {
        return Ok(state.clone());
    }
    let partition = Partition::new(k, n - k)?;
    let embedded = embed_in_product_basis(state, partition)?;
    let rho = partial_trace_second(&embedded, k + 1, n - k + 1);
    SymmetricState::from_hermitian(k, rho)
}

/// Product moments by direct trace against `τ^κ_q(N1) ⊗ τ^κ'_q'(N2)` on the
/// embedded state.
pub fn product_moments_oracle(state: &SymmetricState, partition: Partition) -> Result<ProductMomentTable> {
    partition.check_state(state.n_qubits())?;
    if state.n_qubits() > ORACLE_MAX_QUBITS {
        return Err(Error::domain(format!(
            "dense product-space oracle limited to N <= {ORACLE_MAX_QUBITS}"
        )));
    }
    let Partition { n1, n2 } = partition;
    let d2 = n2 + 1;
    let rho = embed_in_product_basis(state, partition)?;
    Ok(ProductMomentTable::build(partition, |k1, k2, q1, q2| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(r1, c1, v1) in band(n1, k1, q1).iter() {
            for &(r2, c2, v2) in band(n2, k2, q2).iter() {
                acc += rho[(c1 * d2 + c2, r1 * d2 + r2)] * (v1 * v2);
            }
        }
        acc
    }))
}

/// Moments of a `k`-qubit marginal.
pub fn reduced_moments(state: &SymmetricState, k: usize) -> Result<MomentTable> {
    reduced_state(state, k).map(|s| moments_of(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use crate::states::{coherent_state, dicke_state, random_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn p(n1: usize, n2: usize) -> Partition {
        Partition::new(n1, n2).unwrap()
    }

    #[test]
    fn f_coefficient_normalization() {
        for n1 in 1..=4 {
            for n2 in 1..=4 {
                assert!((f_coefficient(0, 0, 0, 0, 0, 0, p(n1, n2)) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn f_coefficient_matches_p_factor() {
        for n1 in 1..=3 {
            for n2 in 1..=3 {
                for k in 1..=n1 {
                    for q in -(k as i64)..=k as i64 {
                        let f = f_coefficient(k, 0, q, 0, k, q, p(n1, n2));
                        let pk = p_factor(k, n1, n2).unwrap();
                        assert!((f - pk).abs() < 1e-13, "{n1} {n2} {k} {q}: {f} vs {pk}");
                    }
                }
            }
        }
    }

    /// F against `Tr((τ⊗τ) V τ^K_Q† V†)/(N+1)` with dense Kronecker products.
    #[test]
    fn f_coefficient_matches_direct_trace() {
        for (n1, n2) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
            let part = p(n1, n2);
            let n = n1 + n2;
            let v = embedding_isometry(part);
            for k1 in 0..=n1 {
                for k2 in 0..=n2 {
                    for q1 in -(k1 as i64)..=k1 as i64 {
                        for q2 in -(k2 as i64)..=k2 as i64 {
                            let a = crate::tensors::tensor_operator(n1, k1, q1).unwrap();
                            let b = crate::tensors::tensor_operator(n2, k2, q2).unwrap();
                            let x = a.matrix().kronecker(b.matrix());
                            for k in 0..=n {
                                for q in -(k as i64)..=k as i64 {
                                    let t = crate::tensors::tensor_operator(n, k, q).unwrap();
                                    let embedded = v.as_ref() * t.matrix().adjoint() * v.adjoint();
                                    let direct = (&x * embedded).trace() / c((n + 1) as f64);
                                    let f = f_coefficient(k1, k2, q1, q2, k, q, part);
                                    assert!((direct - c(f)).norm() < 1e-12, "{part:?} {k1}{k2}{q1}{q2} {k}{q}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_coefficient_selection_rules() {
        assert_eq!(f_coefficient(1, 1, 1, 0, 2, 0, p(1, 1)), 0.0);
        assert_eq!(f_coefficient(2, 0, 0, 0, 0, 0, p(2, 2)), 0.0);
    }

    #[test]
    fn composition_law_matches_oracle() {
        for n in 2..=6 {
            for part in Partition::all(n) {
                for seed in 0..3 {
                    let rho = random_state(n, 100 + seed).unwrap();
                    let law = product_moments(&moments_of(&rho), part).unwrap();
                    let oracle = product_moments_oracle(&rho, part).unwrap();
                    assert!(law.max_abs_diff(&oracle) < 1e-10, "{part:?}");
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_product_moments() {
        let rho = SymmetricState::maximally_mixed(4).unwrap();
        let pm = product_moments(&moments_of(&rho), p(2, 2)).unwrap();
        for (k1, k2, q1, q2, v) in pm.iter() {
            if k1 != k2 || q1 != -q2 {
                assert!(v.norm() < 1e-14);
            }
        }
        assert!((pm.get(0, 0, 0, 0) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn dicke_product_moments_conserve_q() {
        let rho = dicke_state(5, HalfInteger::from_twice(1)).unwrap();
        let pm = product_moments(&moments_of(&rho), p(2, 3)).unwrap();
        for (_, _, q1, q2, v) in pm.iter() {
            if q1 + q2 != 0 {
                assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn product_table_conjugation_symmetry() {
        let rho = random_state(5, 3).unwrap();
        let pm = product_moments(&moments_of(&rho), p(2, 3)).unwrap();
        for (k1, k2, q1, q2, v) in pm.iter() {
            let sign = if (q1 + q2) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((pm.get(k1, k2, -q1, -q2) - v.conj() * sign).norm() < 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let rho = random_state(5, 11).unwrap();
        let pm = product_moments(&moments_of(&rho), p(2, 3)).unwrap();
        assert!((reduce_to_subsystem(&pm, Side::First).get(0, 0) - c(1.0)).norm() < 1e-13);
        assert!((reduce_to_subsystem(&pm, Side::Second).get(0, 0) - c(1.0)).norm() < 1e-13);

        let up = dicke_state(5, HalfInteger::from_twice(5)).unwrap();
        let pm = product_moments(&moments_of(&up), p(2, 3)).unwrap();
        let sub = reduce_to_subsystem(&pm, Side::First);
        let expect = moments_of(&dicke_state(2, HalfInteger::from_twice(2)).unwrap());
        for (a, b) in sub.entries().iter().zip(expect.entries()) {
            assert!((a - b).norm() < 1e-13);
        }

        let (theta, phi) = (0.8, 2.1);
        let coh = coherent_state(5, theta, phi).unwrap();
        let pm = product_moments(&moments_of(&coh), p(2, 3)).unwrap();
        let sub = reduce_to_subsystem(&pm, Side::Second);
        let expect = moments_of(&coherent_state(3, theta, phi).unwrap());
        for (a, b) in sub.entries().iter().zip(expect.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn p_factor_values() {
        for (n1, n2) in [(1, 1), (2, 5), (4, 3)] {
            assert!((p_factor(0, n1, n2).unwrap() - 1.0).abs() < 1e-15);
        }
        for k in 0..=4 {
            assert!((p_factor(k, 4, 0).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((p_factor(1, 1, 1).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(p_factor(3, 2, 1).is_err());
        assert!((subsystem_scaling(1, 1, 2).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((subsystem_scaling(2, 3, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!(subsystem_scaling(1, 3, 2).is_err());
    }

    #[test]
    fn scale_factor_values() {
        for k in 0..=5 {
            assert!((f_factor(k, k).unwrap() - 1.0).abs() < 1e-15);
        }
        // the quoted closed form gives sqrt(3/8) and sqrt(1/20); the factor
        // that actually relates the tables carries Nα!/κ! on top
        assert!((f_factor(2, 1).unwrap() - 2.0 * (3.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((f_factor(3, 1).unwrap() - 6.0 * (1.0f64 / 20.0).sqrt()).abs() < 1e-15);
        for n in 0..=6 {
            assert!((f_factor(n, 0).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(f_factor(1, 2).is_err());
    }

    #[test]
    fn scale_factor_is_inverse_reduction() {
        for n in 1..=8 {
            for k in 1..=n {
                let f = f_factor(n, k).unwrap();
                let pk = p_factor(k, k, n - k).unwrap();
                assert!((f * pk - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn scale_factor_against_embedded_tables() {
        let rho = random_state(5, 21).unwrap();
        let big = product_moments_oracle(&rho, p(2, 3)).unwrap();
        let small = product_moments_oracle(&reduced_state(&rho, 2).unwrap(), p(1, 1)).unwrap();
        for q1 in -1..=1 {
            for q2 in -1..=1 {
                let scale = f_factor(2, 1).unwrap() * f_factor(3, 1).unwrap();
                assert!((big.get(1, 1, q1, q2) - small.get(1, 1, q1, q2) * scale).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let up = dicke_state(2, HalfInteger::from_twice(2)).unwrap();
        let e = embed_in_product_basis(&up, p(1, 1)).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0);
        assert!(frobenius(&(e - &expect)) < 1e-15);

        let zero = dicke_state(2, HalfInteger::ZERO).unwrap();
        let e = embed_in_product_basis(&zero, p(1, 1)).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        for (r, cc) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            expect[(r, cc)] = c(0.5);
        }
        assert!(frobenius(&(e - &expect)) < 1e-15);

        for n in 2..=7 {
            let rho = random_state(n, n as u64).unwrap();
            for part in Partition::all(n) {
                let v = embedding_isometry(part);
                let gram = v.adjoint() * v.as_ref();
                assert!(frobenius(&(gram - CMatrix::identity(n + 1, n + 1))) < 1e-13);
                let e = embed_in_product_basis(&rho, part).unwrap();
                assert!((e.trace() - c(1.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_product_factorizes() {
        let (theta, phi) = (1.3, 0.4);
        let coh = coherent_state(4, theta, phi).unwrap();
        let pm = product_moments_oracle(&coh, p(1, 3)).unwrap();
        let a = moments_of(&coherent_state(1, theta, phi).unwrap());
        let b = moments_of(&coherent_state(3, theta, phi).unwrap());
        for (k1, k2, q1, q2, v) in pm.iter() {
            assert!((v - a.get(k1, q1) * b.get(k2, q2)).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_gate_and_partition_errors() {
        let big = SymmetricState::maximally_mixed(13).unwrap();
        assert!(product_moments_oracle(&big, p(6, 7)).is_err());
        let rho = random_state(4, 1).unwrap();
        assert!(product_moments(&moments_of(&rho), p(1, 2)).is_err());
        assert!(Partition::new(0, 3).is_err());
        assert!(reduced_state(&rho, 5).is_err());
    }

    #[test]
    fn partial_transpose_is_involution() {
        let rho = random_state(4, 2).unwrap();
        let e = embed_in_product_basis(&rho, p(1, 3)).unwrap();
        let back = partial_transpose_second(&partial_transpose_second(&e, 2, 4), 2, 4);
        assert!(frobenius(&(back - &e)) < 1e-15);
        let t1 = partial_trace_first(&e, 2, 4);
        assert!((t1.trace() - c(1.0)).norm() < 1e-12);
    }
}

//! Exact angular-momentum coupling coefficients.
//!
//! Conventions: real Clebsch–Gordan coefficients with the Condon–Shortley
//! phase, `C(j1 j2 j; m1 m2 m) = ⟨j1 m1 j2 m2 | j m⟩`, and the Racah forms
//! of the 6j and 9j symbols. Every other module takes its phases from here.
//!
//! CG and 6j values are carried exactly as [`SignedSqrtRational`]. The 9j is
//! a sum of unlike radicals, so it is accumulated in 192-bit fixed point and
//! returned as a [`PreciseReal`].

mod exact;
mod half;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cache::Memo;
use crate::error::Result;

pub use exact::{factorial, PreciseReal, SignedSqrtRational};
pub use half::{check_projection, HalfInteger};

type H = HalfInteger;

/// Triangle rule: `|a - b| <= c <= a + b` with `a + b + c` an integer.
pub fn triangle_ok(a: H, b: H, c: H) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && (a - b).abs() <= c && c <= a + b
}

/// `n / 2` for an even nonnegative `n` given in doubled units.
#[inline]
fn halve(n: i64) -> usize {
    debug_assert!(n >= 0 && n % 2 == 0, "halve({n})");
    (n / 2) as usize
}

fn fact(twice: i64) -> BigInt {
    factorial(halve(twice))
}

/// Squared triangle coefficient `(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!`,
/// arguments doubled.
fn delta_squared(a: i64, b: i64, c: i64) -> BigRational {
    BigRational::new(fact(a + b - c) * fact(a - b + c) * fact(b + c - a), fact(a + b + c + 2))
}

fn cg_cache() -> &'static Memo<[i64; 6], SignedSqrtRational> {
    static CACHE: OnceLock<Memo<[i64; 6], SignedSqrtRational>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

fn sixj_cache() -> &'static Memo<[i64; 6], SignedSqrtRational> {
    static CACHE: OnceLock<Memo<[i64; 6], SignedSqrtRational>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

fn ninej_cache() -> &'static Memo<[i64; 9], PreciseReal> {
    static CACHE: OnceLock<Memo<[i64; 9], PreciseReal>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

/// Clebsch–Gordan coefficient `C(j1 j2 j; m1 m2 m)`.
///
/// Returns an exact zero when `m1 + m2 != m` or the triangle rule fails;
/// errors when some `(j, m)` pair is not a valid multiplet label.
pub fn clebsch_gordan(j1: H, j2: H, j: H, m1: H, m2: H, m: H) -> Result<SignedSqrtRational> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j, m)?;
    if m1 + m2 != m || !triangle_ok(j1, j2, j) {
        return Ok(SignedSqrtRational::zero());
    }
    let key = [j1, j2, j, m1, m2, m].map(H::twice);
    Ok(cg_cache().get_or_insert_with(key, || racah_cg(key)))
}

/// Convenience wrapper returning the CG coefficient as `f64`.
pub fn clebsch_gordan_f64(j1: H, j2: H, j: H, m1: H, m2: H, m: H) -> Result<f64> {
    clebsch_gordan(j1, j2, j, m1, m2, m).map(|c| c.to_f64())
}

fn racah_cg([j1, j2, j, m1, m2, m]: [i64; 6]) -> SignedSqrtRational {
    let prefactor = BigRational::new(
        BigInt::from(j + 1)
            * fact(j1 + j2 - j)
            * fact(j1 - j2 + j)
            * fact(j2 + j - j1)
            * fact(j1 + m1)
            * fact(j1 - m1)
            * fact(j2 + m2)
            * fact(j2 - m2)
            * fact(j + m)
            * fact(j - m),
        fact(j1 + j2 + j + 2),
    );

    // all bounds in doubled units
    let k_min = 0.max(j2 - j - m1).max(j1 + m2 - j);
    let k_max = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    let mut k = k_min;
    while k <= k_max {
        let denom = fact(k)
            * fact(j1 + j2 - j - k)
            * fact(j1 - m1 - k)
            * fact(j2 + m2 - k)
            * fact(j - j2 + m1 + k)
            * fact(j - j1 - m2 + k);
        let term = BigRational::new(BigInt::one(), denom);
        if halve(k) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 2;
    }
    SignedSqrtRational::from_coefficient(&sum, prefactor)
}

/// Wigner 6j symbol `{a b c; d e f}`.
///
/// Zero whenever one of the triads `(a b c)`, `(a e f)`, `(d b f)`,
/// `(d e c)` violates the triangle rule.
pub fn wigner6j(a: H, b: H, c: H, d: H, e: H, f: H) -> SignedSqrtRational {
    if !(triangle_ok(a, b, c) && triangle_ok(a, e, f) && triangle_ok(d, b, f) && triangle_ok(d, e, c)) {
        return SignedSqrtRational::zero();
    }
    let key = [a, b, c, d, e, f].map(H::twice);
    sixj_cache().get_or_insert_with(key, || racah_6j(key))
}

fn racah_6j([a, b, c, d, e, f]: [i64; 6]) -> SignedSqrtRational {
    let prefactor = delta_squared(a, b, c) * delta_squared(a, e, f) * delta_squared(d, b, f) * delta_squared(d, e, c);
    let lower = [a + b + c, a + e + f, d + b + f, d + e + c];
    let upper = [a + b + d + e, a + c + d + f, b + c + e + f];
    let t_min = *lower.iter().max().unwrap();
    let t_max = *upper.iter().min().unwrap();
    let mut sum = BigRational::zero();
    let mut t = t_min;
    while t <= t_max {
        let mut denom = BigInt::one();
        for l in lower {
            denom *= fact(t - l);
        }
        for u in upper {
            denom *= fact(u - t);
        }
        let term = BigRational::new(fact(t + 2), denom);
        if halve(t) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        t += 2;
    }
    SignedSqrtRational::from_coefficient(&sum, prefactor)
}

/// Wigner 9j symbol
///
/// ```text
/// ⎧ a b c ⎫
/// ⎨ d e f ⎬
/// ⎩ g h i ⎭
/// ```
///
/// evaluated as `Σ_x (-1)^{2x} (2x+1) {a d g; h i x}{b e h; d x f}{c f i; x a b}`.
#[allow(clippy::too_many_arguments)]
pub fn wigner9j(a: H, b: H, c: H, d: H, e: H, f: H, g: H, h: H, i: H) -> PreciseReal {
    let rows = [(a, b, c), (d, e, f), (g, h, i)];
    let cols = [(a, d, g), (b, e, h), (c, f, i)];
    if rows.iter().chain(cols.iter()).any(|&(x, y, z)| !triangle_ok(x, y, z)) {
        return PreciseReal::zero();
    }
    let key = [a, b, c, d, e, f, g, h, i].map(H::twice);
    ninej_cache().get_or_insert_with(key, || ninej_sum(a, b, c, d, e, f, g, h, i))
}

#[allow(clippy::too_many_arguments)]
fn ninej_sum(a: H, b: H, c: H, d: H, e: H, f: H, g: H, h: H, i: H) -> PreciseReal {
    let lo = (a - i).abs().max((h - d).abs()).max((b - f).abs());
    let hi = (a + i).min(h + d).min(b + f);
    let mut acc = PreciseReal::zero();
    let mut x = lo;
    while x <= hi {
        let w = wigner6j(a, d, g, h, i, x) * wigner6j(b, e, h, d, x, f) * wigner6j(c, f, i, x, a, b);
        if !w.is_zero() {
            // (-1)^{2x} (2x+1) as an exact multiplier
            let weight = BigInt::from(x.twice() + 1);
            let sign = if x.twice() % 2 == 0 { 1 } else { -1 };
            let term = SignedSqrtRational::new(
                sign * w.sign(),
                w.square() * BigRational::from_integer(&weight * &weight),
            );
            acc.add_assign(&PreciseReal::from_exact(&term));
        }
        x = x + H::integer(1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(-1)^n` for an integer-valued half-integer sum.
    fn parity(n: H) -> i8 {
        debug_assert!(n.is_integer());
        if (n.twice() / 2) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn h(twice: i64) -> H {
        H::from_twice(twice)
    }

    fn cg(j1: i64, j2: i64, j: i64, m1: i64, m2: i64, m: i64) -> SignedSqrtRational {
        clebsch_gordan(h(j1), h(j2), h(j), h(m1), h(m2), h(m)).unwrap()
    }

    fn six(v: [i64; 6]) -> f64 {
        wigner6j(h(v[0]), h(v[1]), h(v[2]), h(v[3]), h(v[4]), h(v[5])).to_f64()
    }

    fn nine(v: [i64; 9]) -> f64 {
        wigner9j(
            h(v[0]),
            h(v[1]),
            h(v[2]),
            h(v[3]),
            h(v[4]),
            h(v[5]),
            h(v[6]),
            h(v[7]),
            h(v[8]),
        )
        .to_f64()
    }

    #[test]
    fn triangle_examples() {
        assert!(triangle_ok(h(1), h(1), h(2)));
        assert!(!triangle_ok(h(1), h(1), h(4)));
        assert!(!triangle_ok(h(2), h(1), h(2)));
    }

    #[test]
    fn cg_examples() {
        assert_eq!(cg(1, 1, 2, 1, 1, 2), SignedSqrtRational::one());
        assert_eq!(cg(1, 1, 2, 1, -1, 0), SignedSqrtRational::from_ratio(1, 1, 2));
        assert!(cg(2, 2, 2, 2, -2, 2).is_zero());
        // singlet carries the antisymmetric sign
        assert_eq!(cg(1, 1, 0, -1, 1, 0), SignedSqrtRational::from_ratio(-1, 1, 2));
    }

    #[test]
    fn cg_rejects_bad_projection() {
        assert!(clebsch_gordan(h(1), h(1), h(2), h(2), h(0), h(2)).is_err());
        assert!(clebsch_gordan(h(2), h(1), h(3), h(3), h(0), h(3)).is_err());
    }

    /// Textbook closed form for C(j 1 j; m 0 m) = m / sqrt(j(j+1)).
    #[test]
    fn cg_vector_coupling_closed_form() {
        for tj in 1..=12 {
            for tm in (-tj..=tj).step_by(2) {
                let j = tj as f64 / 2.0;
                let m = tm as f64 / 2.0;
                let expect = m / (j * (j + 1.0)).sqrt();
                assert!((cg(tj, 2, tj, tm, 0, tm).to_f64() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cg_orthogonality_exact() {
        for tj1 in 0..=8i64 {
            for tj2 in 0..=8 {
                let mut tjs: Vec<i64> = Vec::new();
                let mut t = (tj1 - tj2).abs();
                while t <= tj1 + tj2 {
                    tjs.push(t);
                    t += 2;
                }
                for &tj in &tjs {
                    for &tjp in &tjs {
                        for tm in (-tj.min(tjp)..=tj.min(tjp)).step_by(2) {
                            let mut sum = BigRational::zero();
                            for tm1 in (-tj1..=tj1).step_by(2) {
                                let tm2 = tm - tm1;
                                if tm2.abs() > tj2 {
                                    continue;
                                }
                                let a = cg(tj1, tj2, tj, tm1, tm2, tm);
                                let b = cg(tj1, tj2, tjp, tm1, tm2, tm);
                                // product of two signed radicals; only rational when j = j'
                                if tj == tjp {
                                    sum += a.square().clone();
                                } else if !a.is_zero() && !b.is_zero() {
                                    let p = (&a * &b).to_f64();
                                    sum += BigRational::from_float(p).unwrap();
                                }
                            }
                            if tj == tjp {
                                assert!(sum.is_one(), "j1={tj1} j2={tj2} j={tj} m={tm}");
                            } else {
                                let s: f64 = num_traits::ToPrimitive::to_f64(&sum).unwrap();
                                assert!(s.abs() < 1e-14);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cg_m_reflection_symmetry() {
        for tj1 in 0..=8i64 {
            for tj2 in 0..=8 {
                let mut tj = (tj1 - tj2).abs();
                while tj <= tj1 + tj2 {
                    let phase = parity(h(tj1 + tj2 - tj));
                    for tm1 in (-tj1..=tj1).step_by(2) {
                        for tm2 in (-tj2..=tj2).step_by(2) {
                            let tm = tm1 + tm2;
                            if tm.abs() > tj {
                                continue;
                            }
                            let a = cg(tj1, tj2, tj, tm1, tm2, tm);
                            let b = cg(tj1, tj2, tj, -tm1, -tm2, -tm);
                            let b = if phase < 0 { -b } else { b };
                            assert_eq!(a, b);
                        }
                    }
                    tj += 2;
                }
            }
        }
    }

    #[test]
    fn sixj_with_zero_argument() {
        // {a b c; 0 c b} = (-1)^{a+b+c} / sqrt((2b+1)(2c+1))
        // (a, b, c) = (1, 1/2, 1/2): a + b + c = 2, so the phase is +1
        assert!((six([2, 1, 1, 0, 1, 1]) - 0.5).abs() < 1e-15);
        assert!((sixj_by_recoupling(2, 1, 1, 0, 1, 1) - 0.5).abs() < 1e-15);
        for ta in 0..=6 {
            for tb in 0..=6 {
                for tc in 0..=6 {
                    if !triangle_ok(h(ta), h(tb), h(tc)) {
                        continue;
                    }
                    let sign = f64::from(parity(h(ta + tb + tc)));
                    let expect = sign / (((tb + 1) * (tc + 1)) as f64).sqrt();
                    assert!((six([ta, tb, tc, 0, tc, tb]) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sixj_triad_violation_is_zero() {
        assert_eq!(six([1, 1, 4, 1, 1, 2]), 0.0);
        assert_eq!(six([2, 2, 2, 2, 2, 5]), 0.0);
    }

    /// 6j from CG contraction:
    /// Σ C(j1 j2 j12; m1 m2 m12) C(j12 j3 J; m12 m3 M) C(j2 j3 j23; m2 m3 m23) C(j1 j23 J; m1 m23 M)
    ///   = (-1)^{j1+j2+j3+J} sqrt((2j12+1)(2j23+1)) {j1 j2 j12; j3 J j23}
    fn sixj_by_recoupling(j1: i64, j2: i64, j12: i64, j3: i64, jj: i64, j23: i64) -> f64 {
        let c = |a, b, c_, x, y, z| cg(a, b, c_, x, y, z).to_f64();
        let tm = jj;
        let mut s = 0.0;
        for m1 in (-j1..=j1).step_by(2) {
            for m2 in (-j2..=j2).step_by(2) {
                let m3 = tm - m1 - m2;
                let m12 = m1 + m2;
                let m23 = m2 + m3;
                if m3.abs() > j3 || m12.abs() > j12 || m23.abs() > j23 {
                    continue;
                }
                s += c(j1, j2, j12, m1, m2, m12)
                    * c(j12, j3, jj, m12, m3, tm)
                    * c(j2, j3, j23, m2, m3, m23)
                    * c(j1, j23, jj, m1, m23, tm);
            }
        }
        let phase = f64::from(parity(h(j1 + j2 + j3 + jj)));
        phase * s / (((j12 + 1) * (j23 + 1)) as f64).sqrt()
    }

    #[test]
    fn sixj_matches_recoupling_oracle() {
        assert!((six([1, 1, 2, 1, 1, 2]) - sixj_by_recoupling(1, 1, 2, 1, 1, 2)).abs() < 1e-14);
        for args in [
            [1, 1, 2, 1, 1, 2],
            [2, 2, 2, 2, 2, 2],
            [3, 1, 2, 2, 3, 1],
            [4, 2, 2, 4, 4, 4],
            [3, 3, 4, 1, 2, 4],
        ] {
            let [a, b, c, d, e, f] = args;
            if !(triangle_ok(h(a), h(b), h(c))
                && triangle_ok(h(c), h(d), h(e))
                && triangle_ok(h(b), h(d), h(f))
                && triangle_ok(h(a), h(f), h(e)))
            {
                continue;
            }
            let oracle = sixj_by_recoupling(a, b, c, d, e, f);
            assert!(
                (six(args) - oracle).abs() < 1e-13,
                "{args:?}: {} vs {oracle}",
                six(args)
            );
        }
    }

    #[test]
    fn ninej_triangle_violation_is_zero() {
        assert_eq!(nine([1, 1, 4, 1, 1, 2, 2, 2, 2]), 0.0);
    }

    /// {a b e; c d e; f f 0} = (-1)^{b+c+e+f} / sqrt((2e+1)(2f+1)) {a b e; d c f}
    #[test]
    fn ninej_zero_corner_reduction() {
        for ta in 0..=4 {
            for tb in 0..=4 {
                for tc in 0..=4 {
                    for td in 0..=4 {
                        for te in 0..=6 {
                            for tf in 0..=6 {
                                let v = nine([ta, tb, te, tc, td, te, tf, tf, 0]);
                                let sign = if (tb + tc + te + tf) % 2 == 0 {
                                    f64::from(parity(h(tb + tc + te + tf)))
                                } else {
                                    0.0
                                };
                                let expect =
                                    sign / (((te + 1) * (tf + 1)) as f64).sqrt() * six([ta, tb, te, td, tc, tf]);
                                assert!((v - expect).abs() < 1e-14, "{ta} {tb} {tc} {td} {te} {tf}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ninej_symmetries() {
        let samples: [[i64; 9]; 5] = [
            [1, 1, 2, 1, 1, 2, 2, 2, 4],
            [2, 4, 2, 2, 2, 4, 4, 6, 2],
            [3, 3, 2, 1, 3, 2, 2, 2, 0],
            [4, 6, 6, 6, 2, 4, 6, 4, 2],
            [12, 8, 6, 10, 12, 6, 6, 8, 4],
        ];
        for v in samples {
            let base = nine(v);
            let [a, b, c, d, e, f, g, hh, i] = v;
            let transposed = nine([a, d, g, b, e, hh, c, f, i]);
            assert!((base - transposed).abs() < 1e-12);
            let sum: i64 = v.iter().sum();
            let sign = f64::from(parity(h(sum)));
            let row_swapped = nine([d, e, f, a, b, c, g, hh, i]);
            assert!((base - sign * row_swapped).abs() < 1e-12);
            let col_swapped = nine([b, a, c, e, d, f, hh, g, i]);
            assert!((base - sign * col_swapped).abs() < 1e-12);
        }
    }
}

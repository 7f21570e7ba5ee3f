use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::RwLock;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact value `sign * sqrt(square)` with `square` a nonnegative rational in
/// lowest terms. `sign == 0` exactly when `square == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: i8,
    square: BigRational,
}

impl SignedSqrtRational {
    pub fn zero() -> Self {
        SignedSqrtRational {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SignedSqrtRational {
            sign: 1,
            square: BigRational::one(),
        }
    }

    /// `sign * sqrt(square)`; panics on a negative `square`.
    pub fn new(sign: i8, square: BigRational) -> Self {
        assert!(!square.is_negative(), "square must be nonnegative");
        if square.is_zero() || sign == 0 {
            return Self::zero();
        }
        SignedSqrtRational {
            sign: sign.signum(),
            square,
        }
    }

    /// The value `c * sqrt(r)` for rationals `c` and nonnegative `r`.
    pub fn from_coefficient(c: &BigRational, r: BigRational) -> Self {
        let sign = match c.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        Self::new(sign, c * c * r)
    }

    pub fn from_ratio(sign: i8, numer: i64, denom: i64) -> Self {
        Self::new(sign, BigRational::new(numer.into(), denom.into()))
    }

    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    #[inline]
    pub fn square(&self) -> &BigRational {
        &self.square
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let r = ratio_to_f64(&self.square);
        f64::from(self.sign) * r.sqrt()
    }

    /// `trunc(value * 2^bits)` computed exactly.
    pub fn to_fixed(&self, bits: u32) -> BigInt {
        if self.sign == 0 {
            return BigInt::zero();
        }
        let scaled: BigInt = (self.square.numer() << (2 * bits as usize)) / self.square.denom();
        let root = scaled.sqrt();
        if self.sign < 0 {
            -root
        } else {
            root
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator and denominator both beyond f64 range
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
        let d = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Mul for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: Self) -> SignedSqrtRational {
        SignedSqrtRational::new(self.sign * rhs.sign, &self.square * &rhs.square)
    }
}

impl Mul for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: Self) -> SignedSqrtRational {
        &self * &rhs
    }
}

impl Neg for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        SignedSqrtRational {
            sign: -self.sign,
            square: self.square,
        }
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let sign = if s < 0 { "-" } else { "" };
                if self.square.is_one() {
                    write!(f, "{sign}1")
                } else {
                    write!(f, "{sign}√({})", self.square)
                }
            }
        }
    }
}

/// Fixed-point real with [`PreciseReal::FRAC_BITS`] fractional bits.
///
/// Used where sums of unlike radicals leave the exact algebraic form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreciseReal {
    mantissa: BigInt,
}

impl PreciseReal {
    pub const FRAC_BITS: u32 = 192;

    pub fn zero() -> Self {
        PreciseReal {
            mantissa: BigInt::zero(),
        }
    }

    pub fn from_exact(x: &SignedSqrtRational) -> Self {
        PreciseReal {
            mantissa: x.to_fixed(Self::FRAC_BITS),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(0.0);
        m * 2f64.powi(-(Self::FRAC_BITS as i32))
    }

    pub(crate) fn add_assign(&mut self, other: &PreciseReal) {
        self.mantissa += &other.mantissa;
    }
}

static FACTORIALS: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// `n!` as an exact integer, memoized.
pub fn factorial(n: usize) -> BigInt {
    {
        let table = FACTORIALS.read().unwrap();
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().unwrap();
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigInt::from(k);
        table.push(next);
    }
    table[n].clone()
}

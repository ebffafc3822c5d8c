//! Coefficient fields.
//!
//! Every algebraic routine in the crate is generic over [`Field`]. Three
//! backends are provided:
//!
//! * [`Gaussian`]: exact arithmetic in ℚ(i), used for every classification
//!   decision when the input is exact.
//! * [`Complex64`]: floating complex numbers for irrational inputs and
//!   cross-checks.
//! * [`Fp`]: arithmetic modulo a prime `p ≡ 1 (mod 4)`, which contains a
//!   square root of −1. It drives the covariant recipe search and gives
//!   fast nonzero certificates for exact values (`ℤ[i][1/d] → Fp` is a ring
//!   homomorphism whenever `p ∤ d`).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// Whether equality with zero is decided without rounding.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i128(v: i128) -> Self;
    /// `n / d`; `d` must be nonzero.
    fn from_ratio(n: i64, d: i64) -> Self;
    /// A square root of −1.
    fn i() -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Modulus used by float tolerance policies. Meaningless for [`Fp`].
    fn modulus(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_i128(v as i128)
    }

    fn square(&self) -> Self {
        let mut s = self.clone();
        s *= self;
        s
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc *= self;
        }
        acc
    }

    /// Complex approximation, for float diagnostics. For [`Fp`] this is the
    /// residue as a real number and carries no analytic meaning.
    fn to_c64(&self) -> Complex64;

    /// Stable textual form used in reports.
    fn render(&self) -> String;

    /// Image under a ring homomorphism into [`Fp`], where one exists.
    /// A nonzero image certifies a nonzero value.
    fn reduce(&self) -> Option<Fp> {
        None
    }

    fn scale_i128(&self, k: i128) -> Self {
        let mut s = self.clone();
        s *= &Self::from_i128(k);
        s
    }
}

// ---------------------------------------------------------------------------
// Exact Gaussian rationals
// ---------------------------------------------------------------------------

/// An element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gaussian {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gaussian { re, im }
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Gaussian {
            re: BigRational::new(re_num.into(), re_den.into()),
            im: BigRational::new(im_num.into(), im_den.into()),
        }
    }

    pub fn real(re: BigRational) -> Self {
        Gaussian { re, im: BigRational::zero() }
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    pub fn to_fp(&self) -> Fp {
        let re = Fp::from_bigint(self.re.numer()) * Fp::from_bigint(self.re.denom()).inv_unchecked();
        let im = Fp::from_bigint(self.im.numer()) * Fp::from_bigint(self.im.denom()).inv_unchecked();
        re + Fp::i() * im
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    // Split each operand into a 64-bit mantissa and a binary exponent so
    // that huge numerators and denominators do not overflow.
    fn split(v: &BigInt) -> (f64, i64) {
        let bits = v.bits() as i64;
        let shift = (bits - 64).max(0);
        let m = (v >> (shift as usize)).to_f64().unwrap_or(0.0);
        (m, shift)
    }
    let (n, en) = split(r.numer());
    let (d, ed) = split(r.denom());
    (n / d) * 2f64.powi((en - ed).clamp(-2000, 2000) as i32)
}

impl fmt::Debug for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re_zero = self.re.is_zero();
        let im_zero = self.im.is_zero();
        if im_zero {
            return write!(f, "{}", self.re);
        }
        let im_abs = self.im.abs();
        let im_txt = if im_abs.is_one() { String::new() } else { im_abs.to_string() };
        if re_zero {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{}{}i", sign, im_txt)
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}i", self.re, sign, im_txt)
        }
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(mut self, o: Gaussian) -> Gaussian {
        self += &o;
        self
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(mut self, o: Gaussian) -> Gaussian {
        self -= &o;
        self
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(mut self, o: Gaussian) -> Gaussian {
        self *= &o;
        self
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -self.re, im: -self.im }
    }
}

impl<'a> AddAssign<&'a Gaussian> for Gaussian {
    fn add_assign(&mut self, o: &'a Gaussian) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl<'a> SubAssign<&'a Gaussian> for Gaussian {
    fn sub_assign(&mut self, o: &'a Gaussian) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl<'a> MulAssign<&'a Gaussian> for Gaussian {
    fn mul_assign(&mut self, o: &'a Gaussian) {
        if o.im.is_zero() {
            self.re *= &o.re;
            self.im *= &o.re;
            return;
        }
        if self.im.is_zero() {
            self.im = &self.re * &o.im;
            self.re *= &o.re;
            return;
        }
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        self.re = re;
        self.im = im;
    }
}

impl Field for Gaussian {
    const EXACT: bool = true;

    fn zero() -> Self {
        Gaussian { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        Gaussian { re: BigRational::one(), im: BigRational::zero() }
    }
    fn from_i128(v: i128) -> Self {
        Gaussian::real(BigRational::from_integer(BigInt::from(v)))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Gaussian::real(BigRational::new(n.into(), d.into()))
    }
    fn i() -> Self {
        Gaussian { re: BigRational::zero(), im: BigRational::one() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if Field::is_zero(self) {
            return None;
        }
        let n = self.norm_sqr();
        Some(Gaussian { re: &self.re / &n, im: -(&self.im / &n) })
    }
    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn reduce(&self) -> Option<Fp> {
        let (rd, id) = (Fp::from_bigint(self.re.denom()), Fp::from_bigint(self.im.denom()));
        if rd.is_zero() || id.is_zero() {
            return None;
        }
        Some(self.to_fp())
    }
    fn scale_i128(&self, k: i128) -> Self {
        let k = BigInt::from(k);
        Gaussian { re: &self.re * &k, im: &self.im * &k }
    }
}

// ---------------------------------------------------------------------------
// Floating complex
// ---------------------------------------------------------------------------

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i128(v: i128) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if Field::is_zero(self) {
            None
        } else {
            Some(1.0 / *self)
        }
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn render(&self) -> String {
        crate::scalar::format_complex(*self)
    }
}

// ---------------------------------------------------------------------------
// Prime field
// ---------------------------------------------------------------------------

/// Integers modulo [`Fp::MODULUS`], a 62-bit prime congruent to 1 mod 4.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp(u64);

impl Fp {
    pub const MODULUS: u64 = 2_305_843_009_213_693_973;

    pub fn new(v: u64) -> Self {
        Fp(v % Self::MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(Self::MODULUS);
        let r = v.mod_floor(&m);
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }

    fn mul_raw(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % Self::MODULUS as u128) as u64
    }

    pub fn pow_u64(self, mut e: u64) -> Fp {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul_raw(acc, base);
            }
            base = Self::mul_raw(base, base);
            e >>= 1;
        }
        Fp(acc)
    }

    fn inv_unchecked(self) -> Fp {
        self.pow_u64(Self::MODULUS - 2)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= Self::MODULUS { s - Self::MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + Self::MODULUS - o.0 })
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(Self::mul_raw(self.0, o.0))
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { Self::MODULUS - self.0 })
    }
}

impl<'a> AddAssign<&'a Fp> for Fp {
    fn add_assign(&mut self, o: &'a Fp) {
        *self = *self + *o;
    }
}

impl<'a> SubAssign<&'a Fp> for Fp {
    fn sub_assign(&mut self, o: &'a Fp) {
        *self = *self - *o;
    }
}

impl<'a> MulAssign<&'a Fp> for Fp {
    fn mul_assign(&mut self, o: &'a Fp) {
        *self = *self * *o;
    }
}

impl Field for Fp {
    const EXACT: bool = true;

    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i128(v: i128) -> Self {
        let m = Self::MODULUS as i128;
        Fp(v.rem_euclid(m) as u64)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i128(n as i128) * Self::from_i128(d as i128).inv_unchecked()
    }
    fn i() -> Self {
        // 2 is a quadratic non-residue modulo this prime, so 2^((p-1)/4) squares to -1.
        Fp(2).pow_u64((Self::MODULUS - 1) / 4)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.inv_unchecked())
        }
    }
    fn modulus(&self) -> f64 {
        if self.0 == 0 {
            0.0
        } else {
            1.0
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0 as f64, 0.0)
    }
    fn render(&self) -> String {
        self.0.to_string()
    }
    fn reduce(&self) -> Option<Fp> {
        Some(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_arithmetic() {
        let a = Gaussian::from_parts(1, 2, 1, 2);
        let b = Gaussian::from_parts(3, 1, -1, 1);
        let p = a.clone() * b.clone();
        // (1/2 + i/2)(3 - i) = 3/2 + 1/2 + i(3/2 - 1/2) = 2 + i
        assert_eq!(p, Gaussian::from_parts(2, 1, 1, 1));
        let q = p * a.inv().unwrap();
        assert_eq!(q, b);
        assert_eq!(Gaussian::i() * Gaussian::i(), -Gaussian::one());
    }

    #[test]
    fn gaussian_display() {
        assert_eq!(Gaussian::from_parts(1, 2, 1, 2).to_string(), "1/2+1/2i");
        assert_eq!(Gaussian::from_parts(0, 1, -1, 1).to_string(), "-i");
        assert_eq!(Gaussian::from_parts(-3, 1, 0, 1).to_string(), "-3");
        assert_eq!(Gaussian::from_parts(2, 1, -5, 3).to_string(), "2-5/3i");
    }

    #[test]
    fn fp_has_square_root_of_minus_one() {
        let i = Fp::i();
        assert_eq!(i * i, -Fp::one());
        assert_eq!(Fp::from_ratio(1, 2) * Fp::from_i64(2), Fp::one());
    }

    #[test]
    fn fp_reduction_of_gaussian() {
        let g = Gaussian::from_parts(-7, 3, 5, 4);
        let expect = Fp::from_ratio(-7, 3) + Fp::i() * Fp::from_ratio(5, 4);
        assert_eq!(g.to_fp(), expect);
    }

    #[test]
    fn large_ratio_to_f64() {
        let big = BigInt::from(10).pow(400u32);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((ratio_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}

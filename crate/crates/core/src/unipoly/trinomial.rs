//! Trinomials `x^n + a x^k + b`: closed-form discriminant and the
//! positive-root trichotomy for the alternating form `x^n - c x^k + b`.

use num_integer::Integer;

use super::{PolyError, UniPoly};
use crate::scalar::Scalar;
use crate::Rational;

/// Exponent data shared by the discriminant formulas: `d = gcd(n, k)`,
/// `N = n / d`, `K = k / d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrinomialExponents {
    pub n: u32,
    pub k: u32,
    pub d: u32,
    pub big_n: u32,
    pub big_k: u32,
}

impl TrinomialExponents {
    pub fn new(n: u32, k: u32) -> Result<Self, PolyError> {
        if k == 0 || k >= n {
            return Err(PolyError::BadExponents { n, k });
        }
        let d = n.gcd(&k);
        Ok(Self { n, k, d, big_n: n / d, big_k: k / d })
    }
}

fn pow<T: Scalar>(base: &T, e: u32) -> T {
    num_traits::pow(base.clone(), e as usize)
}

fn int<T: Scalar>(v: u32) -> T {
    T::from_u32(v).expect("small integer")
}

/// Discriminant of `x^n + a x^k + b` by the closed trinomial formula
/// `(-1)^{n(n-1)/2} b^{k-1} [n^N b^{N-K} - (-1)^N (n-k)^{N-K} k^K a^N]^d`.
pub fn trinomial_discriminant<T: Scalar>(n: u32, k: u32, a: &T, b: &T) -> Result<T, PolyError> {
    let e = TrinomialExponents::new(n, k)?;
    let (big_n, big_k) = (e.big_n, e.big_k);
    let first = pow(&int::<T>(n), big_n) * pow(b, big_n - big_k);
    let mut second = pow(&int::<T>(n - k), big_n - big_k) * pow(&int::<T>(k), big_k) * pow(a, big_n);
    if big_n % 2 == 1 {
        second = -second;
    }
    let bracket = first - second;
    let mut disc = pow(b, k - 1) * pow(&bracket, e.d);
    if (n as u64 * (n as u64 - 1) / 2) % 2 == 1 {
        disc = -disc;
    }
    Ok(disc)
}

/// `x^n - c x^k + b` with `0 < k < n`, `b > 0`, `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrinomialForm<T: Scalar = Rational> {
    exps: TrinomialExponents,
    b: T,
    c: T,
}

impl<T: Scalar> TrinomialForm<T> {
    pub fn new(n: u32, k: u32, b: T, c: T) -> Result<Self, PolyError> {
        let exps = TrinomialExponents::new(n, k)?;
        if !b.is_positive() || !c.is_positive() {
            return Err(PolyError::NonPositiveCoefficient);
        }
        Ok(Self { exps, b, c })
    }

    /// Normalizes a polynomial with exactly three nonzero coefficients whose
    /// signs alternate into `x^n - c x^k + b` (after dividing by the lowest
    /// power of `x` and by the leading coefficient). `None` for any other
    /// shape.
    pub fn from_poly(p: &UniPoly<T>) -> Option<Self> {
        let (_, p) = p.strip_x_power();
        let support: Vec<(usize, &T)> =
            p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let [(0, c0), (k, ck), (n, cn)] = support.as_slice() else {
            return None;
        };
        let b = (*c0).clone() / (*cn).clone();
        let c = -((*ck).clone() / (*cn).clone());
        Self::new(*n as u32, *k as u32, b, c).ok()
    }

    pub fn exponents(&self) -> TrinomialExponents {
        self.exps
    }

    pub fn n(&self) -> u32 {
        self.exps.n
    }

    pub fn k(&self) -> u32 {
        self.exps.k
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn polynomial(&self) -> UniPoly<T> {
        let mut coeffs = vec![T::zero(); self.exps.n as usize + 1];
        coeffs[0] = self.b.clone();
        coeffs[self.exps.k as usize] = -self.c.clone();
        coeffs[self.exps.n as usize] = T::one();
        UniPoly::new(coeffs)
    }
}

/// `D = n^N b^{N-K} - (n-k)^{N-K} k^K c^N`.
pub fn trinomial_d<T: Scalar>(t: &TrinomialForm<T>) -> T {
    let e = t.exps;
    pow(&int::<T>(e.n), e.big_n) * pow(&t.b, e.big_n - e.big_k)
        - pow(&int::<T>(e.n - e.k), e.big_n - e.big_k) * pow(&int::<T>(e.k), e.big_k) * pow(&t.c, e.big_n)
}

/// Distinct positive roots: 2 if `D < 0`, 1 if `D = 0`, 0 if `D > 0`.
pub fn trinomial_positive_roots<T: Scalar>(t: &TrinomialForm<T>) -> u8 {
    match trinomial_d(t).sign_i8() {
        -1 => 2,
        0 => 1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn quadratic_case_is_the_usual_discriminant() {
        for (b, c) in [(q(3, 1), q(2, 1)), (q(-7, 2), q(1, 3)), (q(0, 1), q(5, 1))] {
            // x^2 + b x + c  ->  (n, k, a, b) = (2, 1, b, c)
            let disc = trinomial_discriminant(2, 1, &b, &c).unwrap();
            assert_eq!(disc, &b * &b - q(4, 1) * &c);
        }
        assert_eq!(trinomial_discriminant(2, 1, &q(-3, 1), &q(2, 1)).unwrap(), q(1, 1));
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(trinomial_discriminant(3, 3, &q(1, 1), &q(1, 1)).is_err());
        assert!(trinomial_discriminant(3, 0, &q(1, 1), &q(1, 1)).is_err());
        assert!(TrinomialForm::new(2, 1, q(-1, 1), q(1, 1)).is_err());
    }

    #[test]
    fn d_values() {
        let t = TrinomialForm::new(2, 1, q(2, 1), q(3, 1)).unwrap();
        assert_eq!(trinomial_d(&t), q(-1, 1));
        assert_eq!(trinomial_positive_roots(&t), 2);
        let t = TrinomialForm::new(2, 1, q(1, 1), q(2, 1)).unwrap();
        assert_eq!(trinomial_d(&t), q(0, 1));
        assert_eq!(trinomial_positive_roots(&t), 1);
        let t = TrinomialForm::new(2, 1, q(4, 1), q(1, 1)).unwrap();
        assert_eq!(trinomial_d(&t), q(15, 1));
        assert_eq!(trinomial_positive_roots(&t), 0);
    }

    #[test]
    fn from_poly_normalizes() {
        // 3x^5 - 6x^3 + 3x^2 = 3x^2 (x^3 - 2x + 1)
        let p = UniPoly::<Rational>::from_i64(&[0, 0, 3, -6, 0, 3]);
        let t = TrinomialForm::from_poly(&p).unwrap();
        assert_eq!((t.n(), t.k()), (3, 1));
        assert_eq!((t.b().clone(), t.c().clone()), (q(1, 1), q(2, 1)));
        // signs (+,+,+) are not alternating
        assert!(TrinomialForm::from_poly(&UniPoly::<Rational>::from_i64(&[1, 1, 1])).is_none());
        // negative leading coefficient flips to the normalized form
        let t = TrinomialForm::from_poly(&UniPoly::<Rational>::from_i64(&[-2, 3, -1])).unwrap();
        assert_eq!((t.b().clone(), t.c().clone()), (q(2, 1), q(3, 1)));
    }
}

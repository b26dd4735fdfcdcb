//! Sylvester resultants and the first subresultant.
//!
//! The matrix builders take coefficient slices with an explicit formal
//! degree, so callers can evaluate a parametric polynomial at a point where
//! its leading coefficient vanishes and still get the specialization of the
//! generic determinant.


use super::UniPoly;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Coefficient of `x^i` in an ascending slice padded with zeros.
fn at<T: Scalar>(c: &[T], i: usize) -> T {
    c.get(i).cloned().unwrap_or_else(T::zero)
}

/// Sylvester matrix of `p` (formal degree `m`) and `q` (formal degree `n`):
/// `n` shifted rows of `p` followed by `m` shifted rows of `q`, columns
/// ordered from `x^{m+n-1}` down to `x^0`.
pub fn sylvester_matrix_formal<T: Scalar>(p: &[T], m: usize, q: &[T], n: usize) -> Matrix<T> {
    let size = m + n;
    Matrix::from_fn(size, size, |i, j| {
        let power = size - 1 - j;
        if i < n {
            // row i holds x^{n-1-i} * p
            let shift = n - 1 - i;
            if power >= shift && power - shift <= m {
                at(p, power - shift)
            } else {
                T::zero()
            }
        } else {
            let shift = m - 1 - (i - n);
            if power >= shift && power - shift <= n {
                at(q, power - shift)
            } else {
                T::zero()
            }
        }
    })
}

pub fn sylvester_matrix<T: Scalar>(p: &UniPoly<T>, q: &UniPoly<T>) -> Matrix<T> {
    let m = p.degree().unwrap_or(0);
    let n = q.degree().unwrap_or(0);
    sylvester_matrix_formal(p.coeffs(), m, q.coeffs(), n)
}

/// `Res(p, q)` as the Sylvester determinant. Zero if either input is zero.
pub fn resultant<T: Scalar>(p: &UniPoly<T>, q: &UniPoly<T>) -> T {
    if p.is_zero() || q.is_zero() {
        return T::zero();
    }
    sylvester_matrix(p, q).determinant()
}

pub fn resultant_formal<T: Scalar>(p: &[T], m: usize, q: &[T], n: usize) -> T {
    sylvester_matrix_formal(p, m, q, n).determinant()
}

/// Discriminant `(-1)^{n(n-1)/2} Res(g, g') / lc(g)`.
pub fn discriminant_via_resultant<T: Scalar>(g: &UniPoly<T>) -> T {
    let n = g.degree().expect("discriminant of the zero polynomial");
    let r = resultant(g, &g.derivative()) / g.lc();
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Coefficients `(s0, s1)` of the first subresultant `S_1 = s1*x + s0` of
/// `p` (formal degree `m`) and `q` (formal degree `n`), `m, n >= 2`.
///
/// `S_1` is built from the `(m+n-2) x (m+n-1)` matrix of the shifts
/// `x^{n-2}p, ..., p, x^{m-2}q, ..., q`; `s_i` is the determinant of its
/// first `m+n-3` columns together with the column of `x^i`.
pub fn first_subresultant_formal<T: Scalar>(p: &[T], m: usize, q: &[T], n: usize) -> (T, T) {
    assert!(m >= 2 && n >= 2, "first subresultant needs both degrees >= 2");
    let rows = m + n - 2;
    let cols = m + n - 1;
    let full = Matrix::from_fn(rows, cols, |i, j| {
        let power = cols - 1 - j;
        let (src, deg, shift) = if i < n - 1 {
            (p, m, n - 2 - i)
        } else {
            (q, n, m - 2 - (i - (n - 1)))
        };
        if power >= shift && power - shift <= deg {
            at(src, power - shift)
        } else {
            T::zero()
        }
    });
    let pick = |last_power: usize| {
        let last_col = cols - 1 - last_power;
        Matrix::from_fn(rows, rows, |i, j| {
            if j + 1 < rows {
                full[(i, j)].clone()
            } else {
                full[(i, last_col)].clone()
            }
        })
        .determinant()
    };
    (pick(0), pick(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_i64(c)
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn resultant_vanishes_on_common_roots() {
        let a = p(&[2, -3, 1]); // roots 1, 2
        let b = p(&[-3, 4, -1]); // roots 1, 3
        assert_eq!(resultant(&a, &b), q(0));
        // Res(x - a, x - b) = a - b
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[-4, 1])), q(-3));
    }

    #[test]
    fn resultant_is_product_over_roots() {
        // Res(f, g) = lc(f)^deg g * prod g(roots of f)
        let f = p(&[2, -3, 1]);
        let g = p(&[1, 0, 1]);
        let expected = (q(1) + q(1)) * (q(4) + q(1));
        assert_eq!(resultant(&f, &g), expected);
    }

    #[test]
    fn quadratic_discriminant() {
        // x^2 + bx + c
        for (b, c) in [(3, 2), (-5, 7), (0, -1)] {
            let g = p(&[c, b, 1]);
            assert_eq!(discriminant_via_resultant(&g), q(b * b - 4 * c));
        }
    }

    #[test]
    fn constant_resultant() {
        assert_eq!(resultant(&p(&[3]), &p(&[1, 1, 1])), q(9));
    }

    #[test]
    fn first_subresultant_recovers_common_root() {
        // (x-2)(x+1) and (x-2)(x-5): gcd is x - 2
        let a = p(&[-2, -1, 1]);
        let b = p(&[10, -7, 1]);
        let (s0, s1) = first_subresultant_formal(a.coeffs(), 2, b.coeffs(), 2);
        assert!(!s1.is_zero());
        assert_eq!(-s0 / s1, q(2));
    }
}

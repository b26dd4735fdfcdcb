//! Real-root counting and isolation: Descartes' rule and Sturm sequences.

use num_traits::{One, Signed, Zero};

use super::{PolyError, UniPoly};
use crate::scalar::{simplest_rational_between, Scalar};
use crate::Rational;

/// Sign changes in the coefficient list, zeros skipped.
pub fn descartes_sign_changes<T: Scalar>(p: &UniPoly<T>) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(sign_variations(p.coeffs().iter().map(Scalar::sign_i8)))
}

fn sign_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sturm chain `p, p', -rem(p, p'), ...` of the square-free part of `p`.
pub fn sturm_sequence<T: Scalar>(p: &UniPoly<T>) -> Vec<UniPoly<T>> {
    let sf = p.square_free_part();
    let mut seq = vec![sf.clone()];
    let mut prev = sf.clone();
    let mut cur = sf.derivative();
    while !cur.is_zero() {
        seq.push(cur.clone());
        let r = -&prev.rem(&cur);
        prev = cur;
        cur = r;
    }
    seq
}

/// Sign of `p` just to the right of `a`: the first nonzero Taylor
/// coefficient at `a` decides.
pub fn sign_right_of<T: Scalar>(p: &UniPoly<T>, a: &T) -> i8 {
    let mut q = p.clone();
    while !q.is_zero() {
        let s = q.eval(a).sign_i8();
        if s != 0 {
            return s;
        }
        q = q.derivative();
    }
    0
}

/// Sign of `p` just to the left of `b`.
pub fn sign_left_of<T: Scalar>(p: &UniPoly<T>, b: &T) -> i8 {
    let mut q = p.clone();
    let mut flip = 1i8;
    while !q.is_zero() {
        let s = q.eval(b).sign_i8();
        if s != 0 {
            return s * flip;
        }
        q = q.derivative();
        flip = -flip;
    }
    0
}

fn sign_at_pos_inf<T: Scalar>(p: &UniPoly<T>) -> i8 {
    p.lc().sign_i8()
}

fn sign_at_neg_inf<T: Scalar>(p: &UniPoly<T>) -> i8 {
    let s = p.lc().sign_i8();
    if p.degree().unwrap_or(0) % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`,
/// counted by sign variations of the Sturm chain at `lo⁺` and `hi⁻`.
pub fn sturm_count_in<T: Scalar>(
    p: &UniPoly<T>,
    lo: Option<&T>,
    hi: Option<&T>,
) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if let (Some(a), Some(b)) = (lo, hi) {
        if a >= b {
            return Ok(0);
        }
    }
    let seq = sturm_sequence(p);
    Ok(count_with_chain(&seq, lo, hi))
}

fn count_with_chain<T: Scalar>(seq: &[UniPoly<T>], lo: Option<&T>, hi: Option<&T>) -> usize {
    let v_lo = sign_variations(seq.iter().map(|q| match lo {
        Some(a) => sign_right_of(q, a),
        None => sign_at_neg_inf(q),
    }));
    let v_hi = sign_variations(seq.iter().map(|q| match hi {
        Some(b) => sign_left_of(q, b),
        None => sign_at_pos_inf(q),
    }));
    v_lo.saturating_sub(v_hi)
}

/// Distinct roots in `(0, ∞)`.
pub fn sturm_count_positive<T: Scalar>(p: &UniPoly<T>) -> Result<usize, PolyError> {
    sturm_count_in(p, Some(&T::zero()), None)
}

/// Number of real roots counted without multiplicity.
pub fn sturm_count_real<T: Scalar>(p: &UniPoly<T>) -> Result<usize, PolyError> {
    sturm_count_in(p, None, None)
}

/// Cauchy bound: every root has absolute value below it.
pub fn root_bound<T: Scalar>(p: &UniPoly<T>) -> T {
    let lc = p.lc().abs();
    let max = p
        .coeffs()
        .iter()
        .take(p.coeffs().len().saturating_sub(1))
        .map(|c| c.abs() / lc.clone())
        .fold(T::zero(), |m, c| if c > m { c } else { m });
    T::one() + max
}

/// An isolating interval holding exactly one root of a square-free
/// polynomial, or the root itself when it was hit exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum RootInterval<T> {
    Exact(T),
    Open(T, T),
}

impl<T: Scalar> RootInterval<T> {
    pub fn midpoint(&self) -> T {
        match self {
            RootInterval::Exact(x) => x.clone(),
            RootInterval::Open(a, b) => (a.clone() + b.clone()) / T::from_i64(2).expect("2"),
        }
    }

    pub fn width(&self) -> T {
        match self {
            RootInterval::Exact(_) => T::zero(),
            RootInterval::Open(a, b) => b.clone() - a.clone(),
        }
    }

    pub fn lo(&self) -> T {
        match self {
            RootInterval::Exact(x) | RootInterval::Open(x, _) => x.clone(),
        }
    }

    pub fn hi(&self) -> T {
        match self {
            RootInterval::Exact(x) | RootInterval::Open(_, x) => x.clone(),
        }
    }
}

/// Isolates the distinct roots of `p` inside `(lo, hi)`; `hi = None` means ∞.
/// Intervals come back sorted.
pub fn isolate_roots<T: Scalar>(
    p: &UniPoly<T>,
    lo: &T,
    hi: Option<&T>,
) -> Result<Vec<RootInterval<T>>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let sf = p.square_free_part();
    let seq = sturm_sequence(&sf);
    let bound = root_bound(&sf);
    let hi = match hi {
        Some(h) if *h < bound => h.clone(),
        _ => bound,
    };
    let mut out = Vec::new();
    if *lo >= hi {
        return Ok(out);
    }
    let two = T::from_i64(2).expect("2");
    let mut stack = vec![(lo.clone(), hi)];
    while let Some((a, b)) = stack.pop() {
        let n = count_with_chain(&seq, Some(&a), Some(&b));
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(RootInterval::Open(a, b));
            continue;
        }
        let m = (a.clone() + b.clone()) / two.clone();
        if m <= a || m >= b {
            // floating types can run out of resolution
            out.push(RootInterval::Open(a, b));
            continue;
        }
        if sf.eval(&m).is_zero() {
            out.push(RootInterval::Exact(m.clone()));
        }
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.lo().partial_cmp(&y.lo()).expect("ordered"));
    Ok(out)
}

/// Bisects an isolating interval of the square-free `p` until its width is at
/// most `tol * max(1, |midpoint|)`.
pub fn refine_root<T: Scalar>(p: &UniPoly<T>, iv: RootInterval<T>, tol: &T) -> RootInterval<T> {
    let RootInterval::Open(mut a, mut b) = iv else {
        return iv;
    };
    let two = T::from_i64(2).expect("2");
    let s_a = sign_right_of(p, &a);
    loop {
        let m = (a.clone() + b.clone()) / two.clone();
        let scale = if m.abs() > T::one() { m.abs() } else { T::one() };
        if b.clone() - a.clone() <= tol.clone() * scale || m <= a || m >= b {
            return RootInterval::Open(a, b);
        }
        let s = p.eval(&m).sign_i8();
        if s == 0 {
            return RootInterval::Exact(m);
        }
        if s == s_a {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Refines an isolating interval of a square-free rational polynomial far
/// enough to decide whether its root is rational, returning it exactly if so.
///
/// A rational root `u/v` of an integer polynomial has `v | lc`, so two
/// candidates differ by at least `1/lc²`; once the interval is narrower than
/// that, the simplest rational inside it is the only possible candidate.
pub fn exact_rational_root(p: &UniPoly<Rational>, iv: &RootInterval<Rational>) -> Option<Rational> {
    let (a, b) = match iv {
        RootInterval::Exact(x) => return Some(x.clone()),
        RootInterval::Open(a, b) => (a.clone(), b.clone()),
    };
    let sf = p.square_free_part();
    let p = &sf;
    let int_lc = integer_leading_coefficient(p);
    let target = Rational::new(One::one(), (&int_lc * &int_lc) * 2u32);
    let mut iv = RootInterval::Open(a, b);
    // a handful of cheap probes first
    for _ in 0..4 {
        let cand = simplest_rational_between(&iv.lo(), &iv.hi());
        if cand > iv.lo() && cand < iv.hi() && p.eval(&cand).is_zero() {
            return Some(cand);
        }
        if iv.width() <= target {
            return None;
        }
        iv = refine_root(p, iv.clone(), &(iv.width() / Rational::from_integer(1024.into())));
        if let RootInterval::Exact(x) = iv {
            return Some(x);
        }
    }
    let iv = refine_steps(p, iv, &target);
    match iv {
        RootInterval::Exact(x) => Some(x),
        RootInterval::Open(a, b) => {
            let cand = simplest_rational_between(&a, &b);
            (cand > a && cand < b && p.eval(&cand).is_zero()).then_some(cand)
        }
    }
}

fn refine_steps(p: &UniPoly<Rational>, iv: RootInterval<Rational>, width: &Rational) -> RootInterval<Rational> {
    let RootInterval::Open(mut a, mut b) = iv else {
        return iv;
    };
    let two = Rational::from_integer(2.into());
    let s_a = sign_right_of(p, &a);
    while &(&b - &a) > width {
        let m = (&a + &b) / &two;
        let s = p.eval(&m).sign_i8();
        if s == 0 {
            return RootInterval::Exact(m);
        }
        if s == s_a {
            a = m;
        } else {
            b = m;
        }
    }
    RootInterval::Open(a, b)
}

fn integer_leading_coefficient(p: &UniPoly<Rational>) -> num_bigint::BigInt {
    use num_integer::Integer;
    let den_lcm = p
        .coeffs()
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<_> = p.coeffs().iter().map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, c| acc.gcd(c));
    let lc = ints.last().cloned().unwrap_or_else(num_bigint::BigInt::one);
    if g.is_zero() {
        lc.abs()
    } else {
        (lc / g).abs()
    }
}

/// Sign of `q` at the unique root of the square-free `p` inside `iv`.
pub fn sign_at_root(p: &UniPoly<Rational>, iv: &RootInterval<Rational>, q: &UniPoly<Rational>) -> i8 {
    let (mut a, mut b) = match iv {
        RootInterval::Exact(x) => return q.eval(x).sign_i8(),
        RootInterval::Open(a, b) => (a.clone(), b.clone()),
    };
    if q.is_zero() {
        return 0;
    }
    let g = p.gcd(q);
    if g.degree().unwrap_or(0) > 0 && sturm_count_in(&g, Some(&a), Some(&b)).unwrap_or(0) > 0 {
        return 0;
    }
    let two = Rational::from_integer(2.into());
    let s_a = sign_right_of(p, &a);
    loop {
        if sturm_count_in(q, Some(&a), Some(&b)).unwrap_or(0) == 0 {
            let m = (&a + &b) / &two;
            return q.eval(&m).sign_i8();
        }
        let m = (&a + &b) / &two;
        let s = p.eval(&m).sign_i8();
        if s == 0 {
            return q.eval(&m).sign_i8();
        }
        if s == s_a {
            a = m;
        } else {
            b = m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_i64(c)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn descartes_examples() {
        assert_eq!(descartes_sign_changes(&p(&[2, -3, 1])).unwrap(), 2);
        assert_eq!(descartes_sign_changes(&p(&[1, 1, 0, 1])).unwrap(), 0);
        // x*((k1R-k1L) + (k2R-k2L)x + (k3R-k3L)x^2) with signs (+,-,+)
        assert_eq!(descartes_sign_changes(&p(&[0, 2, -3, 1])).unwrap(), 2);
        assert_eq!(descartes_sign_changes(&UniPoly::<Rational>::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_count_positive(&p(&[2, -3, 1])).unwrap(), 2);
        assert_eq!(sturm_count_positive(&p(&[1, -2, 1])).unwrap(), 1);
        // x^4 - 3x^2 + 1: x^2 = (3 ± √5)/2, both positive, so two positive roots
        assert_eq!(sturm_count_positive(&p(&[1, 0, -3, 0, 1])).unwrap(), 2);
        assert_eq!(sturm_count_real(&p(&[1, 0, -3, 0, 1])).unwrap(), 4);
        assert_eq!(sturm_count_positive(&p(&[0, 0, 1])).unwrap(), 0);
        assert_eq!(sturm_count_positive(&p(&[5])).unwrap(), 0);
        assert!(sturm_count_positive(&UniPoly::<Rational>::zero()).is_err());
    }

    #[test]
    fn counts_on_open_intervals_exclude_endpoints() {
        let f = p(&[2, -3, 1]);
        assert_eq!(sturm_count_in(&f, Some(&q(1, 1)), Some(&q(2, 1))).unwrap(), 0);
        assert_eq!(sturm_count_in(&f, Some(&q(0, 1)), Some(&q(2, 1))).unwrap(), 1);
        assert_eq!(sturm_count_in(&f, Some(&q(1, 1)), Some(&q(5, 2))).unwrap(), 1);
        assert_eq!(sturm_count_in(&f, Some(&q(3, 1)), Some(&q(1, 1))).unwrap(), 0);
    }

    #[test]
    fn one_sided_signs() {
        let f = p(&[1, -2, 1]); // (x-1)^2
        assert_eq!(sign_right_of(&f, &q(1, 1)), 1);
        assert_eq!(sign_left_of(&f, &q(1, 1)), 1);
        let g = p(&[-1, 1]);
        assert_eq!(sign_left_of(&g, &q(1, 1)), -1);
        assert_eq!(sign_right_of(&g, &q(1, 1)), 1);
    }

    #[test]
    fn isolation_and_exact_roots() {
        // -(x - 1/2)(x - 2) * 2 = -2x^2 + 5x - 2
        let f = p(&[-2, 5, -2]);
        let ivs = isolate_roots(&f, &q(0, 1), Some(&q(5, 2))).unwrap();
        assert_eq!(ivs.len(), 2);
        let roots: Vec<_> = ivs.iter().map(|iv| exact_rational_root(&f, iv).unwrap()).collect();
        assert_eq!(roots, vec![q(1, 2), q(2, 1)]);

        let irr = p(&[-2, 0, 1]);
        let ivs = isolate_roots(&irr, &q(0, 1), None).unwrap();
        assert_eq!(ivs.len(), 1);
        assert_eq!(exact_rational_root(&irr, &ivs[0]), None);
        let fine = refine_root(&irr, ivs[0].clone(), &q(1, 1_000_000_000_000));
        assert!((fine.midpoint().to_f64_lossy() - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn root_with_large_denominator_is_recovered() {
        let r = q(123_456_789, 987_654_321);
        let f = UniPoly::new(vec![-r.clone(), Rational::one()]);
        let f = &f * &p(&[-3, 0, 1]);
        let ivs = isolate_roots(&f, &q(0, 1), None).unwrap();
        let exact: Vec<_> = ivs.iter().filter_map(|iv| exact_rational_root(&f, iv)).collect();
        assert_eq!(exact, vec![r]);
    }

    #[test]
    fn sign_at_algebraic_root() {
        let f = p(&[-2, 0, 1]);
        let iv = isolate_roots(&f, &q(0, 1), None).unwrap().remove(0);
        assert_eq!(sign_at_root(&f, &iv, &p(&[-1, 1])), 1); // √2 - 1 > 0
        assert_eq!(sign_at_root(&f, &iv, &p(&[-3, 2])), -1); // 2√2 - 3 < 0
        assert_eq!(sign_at_root(&f, &iv, &p(&[-4, 0, 2])), 0);
    }
}

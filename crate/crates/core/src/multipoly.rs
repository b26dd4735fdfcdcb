//! Sparse multivariate polynomials with a fixed variable count.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Ring, Scalar};
use crate::unipoly::UniPoly;
use crate::Rational;

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly<T: Ring = Rational> {
    nvars: usize,
    terms: BTreeMap<Exponents, T>,
}

/// `k` as an element of the ring, by repeated doubling.
fn ring_int<T: Ring>(k: u32) -> T {
    let mut acc = T::zero();
    for bit in (0..32).rev() {
        acc = acc.clone() + acc;
        if k >> bit & 1 == 1 {
            acc = acc + T::one();
        }
    }
    acc
}

fn add_exps(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl<T: Ring> MultiPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, T::one())
    }

    pub fn monomial(exps: Exponents, c: T) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, T)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn coeff(&self, exps: &[u32]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * s.clone())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.terms.keys().any(|e| e[v] > 0)).collect()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point dimension");
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            let m = e
                .iter()
                .zip(point)
                .filter(|(&k, _)| k > 0)
                .fold(c.clone(), |m, (&k, x)| m * num_traits::pow(x.clone(), k as usize));
            acc + m
        })
    }

    pub fn partial(&self, var: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[var];
                e2[var] -= 1;
                (e2, c.clone() * ring_int::<T>(k))
            }),
        )
    }

    /// Coefficients with respect to `var`, ascending; `var` no longer occurs
    /// in them.
    pub fn coeffs_in(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var] as usize;
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Replaces `var` by `q`.
    pub fn substitute(&self, var: usize, q: &Self) -> Self {
        let cs = self.coeffs_in(var);
        let mut acc = Self::zero(self.nvars);
        for c in cs.iter().rev() {
            acc = &(&acc * q) + c;
        }
        acc
    }

    /// Evaluates the variables with `Some` values and keeps the rest.
    pub fn partial_eval(&self, values: &[Option<T>]) -> Self {
        assert_eq!(values.len(), self.nvars, "value vector length");
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = e.clone();
                let mut coef = c.clone();
                for (v, val) in values.iter().enumerate() {
                    if let Some(x) = val {
                        if e2[v] > 0 {
                            coef = coef * num_traits::pow(x.clone(), e2[v] as usize);
                            e2[v] = 0;
                        }
                    }
                }
                (e2, coef)
            }),
        )
    }

    /// Moves variable `i` to position `map[i]` in a ring with `nvars` variables.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars, "map length");
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = vec![0; nvars];
                for (i, &k) in e.iter().enumerate() {
                    e2[map[i]] += k;
                }
                (e2, c.clone())
            }),
        )
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Exponents {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        it.fold(first.clone(), |m, e| m.iter().zip(e).map(|(a, b)| *a.min(b)).collect())
    }

    /// Divides by `x^m`; every term must be divisible.
    pub fn divide_monomial(&self, m: &[u32]) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let e2 = e
                        .iter()
                        .zip(m)
                        .map(|(a, b)| a.checked_sub(*b).expect("monomial does not divide"))
                        .collect();
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    pub fn negative_coefficients(&self) -> usize {
        self.terms.values().filter(|c| c.is_negative()).count()
    }

    pub fn positive_coefficients(&self) -> usize {
        self.terms.values().filter(|c| c.is_positive()).count()
    }

    /// `+1` / `-1` when every coefficient has that sign, so the value on the
    /// open positive orthant has that sign too; `0` otherwise.
    pub fn orthant_sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.negative_coefficients() == 0 {
            1
        } else if self.positive_coefficients() == 0 {
            -1
        } else {
            0
        }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> MultiPoly<U> {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Renders with the given variable names, highest total degree first.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = names.get(v).copied().map(str::to_string).unwrap_or_else(|| format!("v{}", v + 1));
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&format!("{mag}*"));
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl<T: Scalar> MultiPoly<T> {
    /// Univariate view in `var`; all other variables must be absent.
    pub fn to_univariate(&self, var: usize) -> Option<UniPoly<T>> {
        let cs = self.coeffs_in(var);
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            if !c.is_constant() {
                return None;
            }
            out.push(c.constant_term());
        }
        Some(UniPoly::new(out))
    }

    pub fn from_univariate(nvars: usize, var: usize, p: &UniPoly<T>) -> Self {
        Self::from_terms(
            nvars,
            p.coeffs().iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; nvars];
                e[var] = k as u32;
                (e, c.clone())
            }),
        )
    }
}

impl MultiPoly<Rational> {
    /// Positive rational multiple with coprime integer coefficients. The sign
    /// is kept, so `p > 0` and the result `> 0` describe the same set.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.terms.values().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .keys()
                .cloned()
                .zip(ints)
                .map(|(e, c)| (e, Rational::from_integer(c / &g)))
                .collect(),
        }
    }

    /// Strips the monomial content in the listed variables. On the open
    /// positive orthant of those variables this does not change signs.
    pub fn strip_content_in(&self, vars: &[usize]) -> Self {
        let content = self.monomial_content();
        let m: Exponents = (0..self.nvars).map(|v| if vars.contains(&v) { content[v] } else { 0 }).collect();
        self.divide_monomial(&m)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .filter(|(&k, _)| k > 0)
                    .fold(c.to_f64_lossy(), |m, (&k, x)| m * x.powi(k as i32))
            })
            .sum()
    }

    /// Sum of absolute values of the terms at `point`; the scale against
    /// which a value is judged close to zero.
    pub fn magnitude_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .filter(|(&k, _)| k > 0)
                    .fold(c.to_f64_lossy().abs(), |m, (&k, x)| m * x.abs().powi(k as i32))
            })
            .sum()
    }

    /// `(coefficient as decimal string, exponents)` pairs in map order.
    pub fn to_sparse(&self) -> Vec<(String, Exponents)> {
        self.terms.iter().map(|(e, c)| (c.to_string(), e.clone())).collect()
    }

    pub fn from_sparse(nvars: usize, terms: &[(String, Exponents)]) -> Option<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            if e.len() != nvars {
                return None;
            }
            out.push((e.clone(), crate::scalar::parse_rational(c)?));
        }
        Some(Self::from_terms(nvars, out))
    }
}

impl<T: Ring> fmt::Debug for MultiPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl<T: Ring> Add for &MultiPoly<T> {
    type Output = MultiPoly<T>;

    fn add(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<T: Ring> Sub for &MultiPoly<T> {
    type Output = MultiPoly<T>;

    fn sub(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<T: Ring> Mul for &MultiPoly<T> {
    type Output = MultiPoly<T>;

    fn mul(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exps(ea, eb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Ring> Neg for &MultiPoly<T> {
    type Output = MultiPoly<T>;

    fn neg(self) -> MultiPoly<T> {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Ring> $tr for MultiPoly<T> {
            type Output = MultiPoly<T>;

            fn $m(self, rhs: Self) -> MultiPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Ring> Neg for MultiPoly<T> {
    type Output = MultiPoly<T>;

    fn neg(self) -> MultiPoly<T> {
        -&self
    }
}

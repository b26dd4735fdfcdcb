//! Mass-action ODEs, the steady-state system with conservation laws, and an
//! exact steady-state counter for one- and two-species networks.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::multipoly::MultiPoly;
use crate::network::{ConservationMatrix, ReactionNetwork};
use crate::scalar::Scalar;
use crate::unipoly::resultant::{first_subresultant_formal, resultant_formal};
use crate::unipoly::sturm::{exact_rational_root, isolate_roots, refine_root, sign_at_root, sturm_count_positive};
use crate::unipoly::{interpolate, RootInterval, UniPoly};
use crate::Rational;

/// Polynomial in the concentrations `x_1..x_n` followed by the rate
/// constants `k_1..k_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoly {
    pub n_species: usize,
    pub n_rates: usize,
    pub poly: MultiPoly,
}

impl ParamPoly {
    pub fn zero(n_species: usize, n_rates: usize) -> Self {
        Self { n_species, n_rates, poly: MultiPoly::zero(n_species + n_rates) }
    }

    /// Substitutes numeric rates; the result lives in the `x` variables only.
    pub fn specialize(&self, kappa: &[Rational]) -> MultiPoly {
        assert_eq!(kappa.len(), self.n_rates, "rate vector length");
        let mut vals: Vec<Option<Rational>> = vec![None; self.n_species];
        vals.extend(kappa.iter().cloned().map(Some));
        let map: Vec<usize> = (0..self.n_species + self.n_rates).map(|v| v.min(self.n_species.saturating_sub(1))).collect();
        let p = self.poly.partial_eval(&vals);
        if self.n_species == 0 {
            return p;
        }
        p.remap(self.n_species, &map)
    }

    pub fn eval(&self, x: &[Rational], kappa: &[Rational]) -> Rational {
        let point: Vec<Rational> = x.iter().chain(kappa).cloned().collect();
        self.poly.eval(&point)
    }

    pub fn display_with(&self, species: &[String], rates: &[String]) -> String {
        let names: Vec<&str> = species.iter().chain(rates).map(String::as_str).collect();
        self.poly.display_with(&names)
    }
}

/// Component `j` is `sum_i k_i x^{y_i} (y'_ij - y_ij)`.
pub fn ode_rhs(net: &ReactionNetwork) -> Vec<ParamPoly> {
    let n = net.n_species();
    let r = net.n_reactions();
    let mut out = vec![ParamPoly::zero(n, r); n];
    for (i, rx) in net.reactions.iter().enumerate() {
        let mut exps = rx.reactant.coeffs.clone();
        exps.extend((0..r).map(|l| u32::from(l == i)));
        for (j, v) in rx.vector().into_iter().enumerate() {
            if v != 0 {
                let term = MultiPoly::monomial(exps.clone(), Rational::from_integer(v.into()));
                out[j].poly = &out[j].poly + &term;
            }
        }
    }
    out
}

/// `f_k(x)` computed reaction by reaction, without building polynomials.
pub fn direct_rhs(net: &ReactionNetwork, kappa: &[Rational], x: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); net.n_species()];
    for (rx, k) in net.reactions.iter().zip(kappa) {
        let rate = rx
            .reactant
            .coeffs
            .iter()
            .zip(x)
            .fold(k.clone(), |m, (&e, xi)| m * num_traits::pow(xi.clone(), e as usize));
        for (j, v) in rx.vector().into_iter().enumerate() {
            out[j] += &rate * Rational::from_integer(v.into());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSystem {
    pub odes: Vec<ParamPoly>,
    pub cons: ConservationMatrix,
    pub total_symbols: Vec<String>,
    pub species: Vec<String>,
    pub rate_labels: Vec<String>,
    /// Basis of the stoichiometric subspace.
    pub basis: Vec<Vec<Rational>>,
}

pub fn steady_state_system(net: &ReactionNetwork) -> SteadyStateSystem {
    let cons = net.conservation_matrix();
    let d = cons.d();
    let total_symbols = if d == 1 { vec!["c".to_string()] } else { (1..=d).map(|i| format!("c{i}")).collect() };
    SteadyStateSystem {
        odes: ode_rhs(net),
        cons,
        total_symbols,
        species: net.species.clone(),
        rate_labels: net.rate_labels(),
        basis: net.stoichiometric_basis(),
    }
}

impl SteadyStateSystem {
    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_rates(&self) -> usize {
        self.rate_labels.len()
    }

    pub fn dim_s(&self) -> usize {
        self.basis.len()
    }

    pub fn rhs_at(&self, kappa: &[Rational], x: &[Rational]) -> Vec<Rational> {
        self.odes.iter().map(|f| f.eval(x, kappa)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyStateCount {
    Finite(usize),
    /// A continuum of positive steady states in the class.
    Infinite,
}

impl SteadyStateCount {
    pub fn at_least_two(self) -> bool {
        match self {
            SteadyStateCount::Finite(n) => n >= 2,
            SteadyStateCount::Infinite => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::serde_util::rationals")]
    pub x: Vec<Rational>,
    /// `x` is an exact steady state; otherwise a refined approximation.
    pub exact: bool,
    /// `max_j |f_j(x)|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub count: SteadyStateCount,
    pub witnesses: Vec<Witness>,
    pub certified: bool,
    /// Some positive steady state is a multiple root of the reduced system.
    pub boundary: bool,
}

impl OracleResult {
    fn empty() -> Self {
        Self { count: SteadyStateCount::Finite(0), witnesses: Vec::new(), certified: true, boundary: false }
    }

    fn infinite(certified: bool) -> Self {
        Self { count: SteadyStateCount::Infinite, witnesses: Vec::new(), certified, boundary: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("steady-state counting supports at most 2 species (got {0})")]
    TooManySpecies(usize),
    #[error("expected {expected} rate constants, got {found}")]
    RateCount { expected: usize, found: usize },
    #[error("expected {expected} total constants, got {found}")]
    TotalCount { expected: usize, found: usize },
    #[error("rate constant {0} is not positive")]
    NonPositiveRate(usize),
}

const RESIDUAL_TOL: f64 = 1e-12;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Residual of a candidate witness; `None` skips witness construction.
type Residual<'a> = Option<&'a dyn Fn(&[Rational]) -> f64>;

/// Number of positive steady states in the class `W x = c`, counted without
/// multiplicity, with a witness for each.
pub fn count_positive_steady_states(
    sys: &SteadyStateSystem,
    kappa: &[Rational],
    c: &[Rational],
) -> Result<OracleResult, OracleError> {
    count_impl(sys, kappa, c, true)
}

/// Same count and certification as [`count_positive_steady_states`], without
/// refining witnesses (`witnesses` is empty).
pub fn count_positive_steady_states_only(
    sys: &SteadyStateSystem,
    kappa: &[Rational],
    c: &[Rational],
) -> Result<OracleResult, OracleError> {
    count_impl(sys, kappa, c, false)
}

fn count_impl(
    sys: &SteadyStateSystem,
    kappa: &[Rational],
    c: &[Rational],
    with_witnesses: bool,
) -> Result<OracleResult, OracleError> {
    let n = sys.n_species();
    if n > 2 {
        return Err(OracleError::TooManySpecies(n));
    }
    if kappa.len() != sys.n_rates() {
        return Err(OracleError::RateCount { expected: sys.n_rates(), found: kappa.len() });
    }
    if c.len() != sys.cons.d() {
        return Err(OracleError::TotalCount { expected: sys.cons.d(), found: c.len() });
    }
    if let Some(i) = kappa.iter().position(|k| !k.is_positive()) {
        return Err(OracleError::NonPositiveRate(i));
    }
    let fs: Vec<MultiPoly> = sys.odes.iter().map(|f| f.specialize(kappa)).collect();
    let eval_residual = |x: &[Rational]| -> f64 {
        fs.iter().map(|f| f.eval(x).to_f64_lossy().abs()).fold(0.0, f64::max)
    };
    let residual: Residual<'_> = with_witnesses.then_some(&eval_residual as &dyn Fn(&[Rational]) -> f64);
    Ok(match (n, sys.cons.d()) {
        (1, _) => one_species(&fs[0], residual),
        (2, 1) => on_line(&fs, sys.cons.row(0), &c[0], residual),
        (2, _) => full_dimensional(&fs, residual),
        _ => OracleResult::empty(),
    })
}

/// Witness value for the root of the square-free `p` isolated by `iv`:
/// exact when the root is rational, else a midpoint refined until `make`
/// yields a point with residual below tolerance.
fn root_witness(
    p: &UniPoly,
    iv: &RootInterval<Rational>,
    make: &dyn Fn(&Rational) -> Option<Vec<Rational>>,
    residual: Residual<'_>,
) -> Option<Witness> {
    let residual = residual?;
    if let Some(r) = exact_rational_root(p, iv) {
        let x = make(&r)?;
        let res = residual(&x);
        return Some(Witness { x, exact: res == 0.0, residual: res });
    }
    let mut tol = Rational::new(1.into(), 1_000_000_000_000i64.into());
    let mut cur = refine_root(p, iv.clone(), &tol);
    let mut best = None;
    for _ in 0..40 {
        let x = make(&cur.midpoint())?;
        let res = residual(&x);
        best = Some(Witness { x, exact: false, residual: res });
        if res < RESIDUAL_TOL {
            break;
        }
        tol /= q(1 << 20);
        cur = refine_root(p, cur, &tol);
    }
    best
}

fn has_multiple_positive_root(p: &UniPoly) -> bool {
    let g = p.gcd(&p.derivative());
    g.degree().unwrap_or(0) > 0 && sturm_count_positive(&g).unwrap_or(0) > 0
}

fn one_species(f: &MultiPoly, residual: Residual<'_>) -> OracleResult {
    let p = f.to_univariate(0).expect("one variable");
    if p.is_zero() {
        return OracleResult::infinite(true);
    }
    let sf = p.square_free_part();
    let roots = isolate_roots(&sf, &Rational::zero(), None).expect("nonzero");
    let witnesses = roots
        .iter()
        .filter_map(|iv| root_witness(&sf, iv, &|t| Some(vec![t.clone()]), residual))
        .collect();
    OracleResult {
        count: SteadyStateCount::Finite(roots.len()),
        witnesses,
        certified: true,
        boundary: has_multiple_positive_root(&p),
    }
}

/// `f(p0 + t*dir)` as a polynomial in `t`.
fn restrict_to_line(f: &MultiPoly, p0: &[Rational], dir: &[Rational]) -> UniPoly {
    let lines: Vec<UniPoly> = p0.iter().zip(dir).map(|(a, b)| UniPoly::new(vec![a.clone(), b.clone()])).collect();
    let mut out = UniPoly::zero();
    for (e, c) in f.terms() {
        let mut term = UniPoly::constant(c.clone());
        for (line, &k) in lines.iter().zip(e) {
            if k > 0 {
                term = &term * &line.pow(k);
            }
        }
        out = &out + &term;
    }
    out
}

fn on_line(
    fs: &[MultiPoly],
    w: &[Rational],
    c: &Rational,
    residual: Residual<'_>,
) -> OracleResult {
    let (w1, w2) = (&w[0], &w[1]);
    let (p0, dir) = if !w2.is_zero() {
        (vec![q(0), c / w2], vec![q(1), -(w1 / w2)])
    } else {
        (vec![c / w1, q(0)], vec![q(0), q(1)])
    };
    // open parameter interval on which both coordinates are positive
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (a, b) in p0.iter().zip(&dir) {
        if b.is_zero() {
            if !a.is_positive() {
                return OracleResult::empty();
            }
            continue;
        }
        let bound = -(a / b);
        if b.is_positive() {
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h| bound < *h) {
            hi = Some(bound);
        }
    }
    let lo = lo.expect("one coordinate is the parameter itself");
    if hi.as_ref().is_some_and(|h| *h <= lo) {
        return OracleResult::empty();
    }
    let Some(f) = fs.iter().find(|f| !f.is_zero()) else {
        return OracleResult::infinite(true);
    };
    let g = restrict_to_line(f, &p0, &dir);
    if g.is_zero() {
        return OracleResult::infinite(true);
    }
    let sf = g.square_free_part();
    let roots = isolate_roots(&sf, &lo, hi.as_ref()).expect("nonzero");
    let point = |t: &Rational| Some(p0.iter().zip(&dir).map(|(a, b)| a + b * t).collect());
    let witnesses = roots.iter().filter_map(|iv| root_witness(&sf, iv, &point, residual)).collect();
    let boundary = {
        let m = g.gcd(&g.derivative());
        m.degree().unwrap_or(0) > 0 && crate::unipoly::sturm::sturm_count_in(&m, Some(&lo), hi.as_ref()).unwrap_or(0) > 0
    };
    OracleResult { count: SteadyStateCount::Finite(roots.len()), witnesses, certified: true, boundary }
}

fn univariate_in(f: &MultiPoly, var: usize) -> UniPoly {
    f.to_univariate(var).expect("polynomial in one variable")
}

/// Polynomial coefficients (in `x1`) of `f` viewed in `x2`.
fn coeff_polys(f: &MultiPoly) -> Vec<UniPoly> {
    f.coeffs_in(1).iter().map(|c| univariate_in(c, 0)).collect()
}

/// Resultant and first subresultant in `x2`, as polynomials in `x1`, by
/// evaluation at integer points and interpolation.
fn eliminate(a: &[UniPoly], b: &[UniPoly], want_sub: bool) -> (UniPoly, Option<(UniPoly, UniPoly)>) {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let deg = |cs: &[UniPoly]| cs.iter().map(|c| c.degree().unwrap_or(0)).max().unwrap_or(0);
    let bound = m * deg(b) + n * deg(a) + 1;
    let mut res_pts = Vec::with_capacity(bound + 1);
    let mut s0_pts = Vec::new();
    let mut s1_pts = Vec::new();
    for i in 0..=bound {
        let x = q(i as i64);
        let av: Vec<Rational> = a.iter().map(|c| c.eval(&x)).collect();
        let bv: Vec<Rational> = b.iter().map(|c| c.eval(&x)).collect();
        res_pts.push((x.clone(), resultant_formal(&av, m, &bv, n)));
        if want_sub {
            let (s0, s1) = first_subresultant_formal(&av, m, &bv, n);
            s0_pts.push((x.clone(), s0));
            s1_pts.push((x, s1));
        }
    }
    let sub = want_sub.then(|| (interpolate(&s0_pts), interpolate(&s1_pts)));
    (interpolate(&res_pts), sub)
}

fn full_dimensional(fs: &[MultiPoly], residual: Residual<'_>) -> OracleResult {
    let strip = |f: &MultiPoly| if f.is_zero() { f.clone() } else { f.divide_monomial(&f.monomial_content()) };
    let f1 = strip(&fs[0]);
    let f2 = strip(&fs[1]);
    match (f1.is_zero(), f2.is_zero()) {
        (true, true) => return OracleResult::infinite(true),
        (true, false) | (false, true) => {
            let g = if f1.is_zero() { &f2 } else { &f1 };
            if g.orthant_sign() != 0 {
                return OracleResult::empty();
            }
            // a single nonzero equation in two unknowns: a curve, or isolated
            // points we do not try to enumerate
            let certified = !g.involves(0) || !g.involves(1);
            return OracleResult::infinite(certified);
        }
        _ => {}
    }
    let (a, b) = (f1.degree_in(1) as usize, f2.degree_in(1) as usize);
    if a == 0 && b == 0 {
        let g = univariate_in(&f1, 0).gcd(&univariate_in(&f2, 0));
        if g.degree().unwrap_or(0) > 0 && sturm_count_positive(&g).unwrap_or(0) > 0 {
            return OracleResult::infinite(true);
        }
        return OracleResult::empty();
    }
    if a == 0 || b == 0 {
        let (u, other) = if a == 0 { (&f1, &f2) } else { (&f2, &f1) };
        return x2_free(&univariate_in(u, 0), other, residual);
    }
    let ca = coeff_polys(&f1);
    let cb = coeff_polys(&f2);
    let (res, sub) = eliminate(&ca, &cb, a >= 2 && b >= 2);
    if res.is_zero() {
        return OracleResult::infinite(false);
    }
    let res = res.strip_x_power().1;
    let sf = res.square_free_part();
    let roots = isolate_roots(&sf, &Rational::zero(), None).expect("nonzero");
    let mut out = OracleResult { count: SteadyStateCount::Finite(0), witnesses: Vec::new(), certified: true, boundary: false };
    out.boundary = has_multiple_positive_root(&res);
    let mut count = 0usize;
    for iv in &roots {
        if let Some(xi) = exact_rational_root(&sf, iv) {
            match partners_at_rational(&f1, &f2, &xi, residual) {
                Partners::Infinite => return OracleResult::infinite(true),
                Partners::Finite { witnesses, multiple } => {
                    count += witnesses.len();
                    out.boundary |= multiple;
                    out.witnesses.extend(witnesses);
                }
            }
            continue;
        }
        // irrational x1: the common x2 is unique when the leading
        // coefficients and s1 stay nonzero there
        let lead_ok = sign_at_root(&sf, iv, &ca[a]) != 0 && sign_at_root(&sf, iv, &cb[b]) != 0;
        if !lead_ok {
            out.certified = false;
            continue;
        }
        let (num, den) = if a == 1 {
            (ca[0].clone(), ca[1].clone())
        } else if b == 1 {
            (cb[0].clone(), cb[1].clone())
        } else {
            sub.clone().expect("subresultant computed")
        };
        let s_den = sign_at_root(&sf, iv, &den);
        if s_den == 0 {
            out.certified = false;
            continue;
        }
        // x2 = -num/den
        let s_num = sign_at_root(&sf, iv, &num);
        if s_num * s_den >= 0 {
            continue;
        }
        count += 1;
        let point = |t: &Rational| {
            let d = den.eval(t);
            (!d.is_zero()).then(|| vec![t.clone(), -num.eval(t) / d])
        };
        if let Some(w) = root_witness(&sf, iv, &point, residual) {
            out.witnesses.push(w);
        }
    }
    out.count = SteadyStateCount::Finite(count);
    out
}

enum Partners {
    Finite { witnesses: Vec<Witness>, multiple: bool },
    Infinite,
}

fn partners_at_rational(
    f1: &MultiPoly,
    f2: &MultiPoly,
    xi: &Rational,
    residual: Residual<'_>,
) -> Partners {
    let sub = |f: &MultiPoly| univariate_in(&f.partial_eval(&[Some(xi.clone()), None]), 1);
    let (g1, g2) = (sub(f1), sub(f2));
    let g = match (g1.is_zero(), g2.is_zero()) {
        (true, true) => return Partners::Infinite,
        (true, false) => g2,
        (false, true) => g1,
        (false, false) => g1.gcd(&g2),
    };
    if g.degree().unwrap_or(0) == 0 {
        return Partners::Finite { witnesses: Vec::new(), multiple: false };
    }
    let sf = g.square_free_part();
    let roots = isolate_roots(&sf, &Rational::zero(), None).expect("nonzero");
    let point = |t: &Rational| Some(vec![xi.clone(), t.clone()]);
    let witnesses = roots.iter().filter_map(|iv| root_witness(&sf, iv, &point, residual)).collect();
    Partners::Finite { witnesses, multiple: has_multiple_positive_root(&g) }
}

/// `u(x1) = 0` pins `x1`; each positive root `xi` contributes the positive
/// roots of `other(xi, x2)`.
fn x2_free(u: &UniPoly, other: &MultiPoly, residual: Residual<'_>) -> OracleResult {
    let u = u.strip_x_power().1;
    let sf = u.square_free_part();
    let roots = isolate_roots(&sf, &Rational::zero(), None).expect("nonzero");
    let mut out = OracleResult::empty();
    let mut count = 0;
    for iv in &roots {
        if let Some(xi) = exact_rational_root(&sf, iv) {
            let h = univariate_in(&other.partial_eval(&[Some(xi.clone()), None]), 1);
            if h.is_zero() {
                return OracleResult::infinite(true);
            }
            let hsf = h.square_free_part();
            let r2 = isolate_roots(&hsf, &Rational::zero(), None).expect("nonzero");
            count += r2.len();
            out.boundary |= has_multiple_positive_root(&h);
            let point = |t: &Rational| Some(vec![xi.clone(), t.clone()]);
            out.witnesses.extend(r2.iter().filter_map(|iv2| root_witness(&hsf, iv2, &point, residual)));
        } else {
            // algebraic x1 substituted into the second equation: counted on
            // a high-precision rational approximation, not certified
            out.certified = false;
            let tight = refine_root(&sf, iv.clone(), &Rational::new(1.into(), num_bigint::BigInt::from(10u32).pow(40)));
            let xi = tight.midpoint();
            let h = univariate_in(&other.partial_eval(&[Some(xi.clone()), None]), 1);
            if h.is_zero() {
                continue;
            }
            let hsf = h.square_free_part();
            let r2 = isolate_roots(&hsf, &Rational::zero(), None).expect("nonzero");
            count += r2.len();
            let Some(residual) = residual else {
                continue;
            };
            for iv2 in &r2 {
                let t = refine_root(&hsf, iv2.clone(), &Rational::new(1.into(), 1_000_000_000_000i64.into())).midpoint();
                let x = vec![xi.clone(), t];
                let res = residual(&x);
                out.witnesses.push(Witness { x, exact: false, residual: res });
            }
        }
    }
    out.count = SteadyStateCount::Finite(count);
    out
}

/// Rank of `Df(x*)` restricted to the stoichiometric subspace.
pub fn jacobian_restricted_rank(sys: &SteadyStateSystem, kappa: &[Rational], x: &[Rational]) -> usize {
    let n = sys.n_species();
    let fs: Vec<MultiPoly> = sys.odes.iter().map(|f| f.specialize(kappa)).collect();
    let jac = Matrix::from_fn(n, n, |j, l| fs[j].partial(l).eval(x));
    let s = sys.basis.len();
    if s == 0 {
        return 0;
    }
    let b = Matrix::from_fn(n, s, |j, i| sys.basis[i][j].clone());
    jac.mul(&b).rank()
}

/// True when `x` is an exact positive steady state in the class `W x = c`.
pub fn is_exact_steady_state(sys: &SteadyStateSystem, kappa: &[Rational], c: &[Rational], x: &[Rational]) -> bool {
    x.iter().all(Signed::is_positive)
        && sys.rhs_at(kappa, x).iter().all(Zero::is_zero)
        && sys.cons.apply(x) == c
}

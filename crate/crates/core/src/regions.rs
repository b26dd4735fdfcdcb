//! Semialgebraic descriptions of the multistationarity regions of the
//! covered families, membership tests, projection to rate space and
//! analytic connectivity verdicts.
//!
//! A region is a union of pieces; each piece is a conjunction of sign
//! conditions on integer polynomials in the rate constants followed by the
//! total constants. Rate constants are implicitly positive; total constants
//! range over all reals.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classify::{self, BoxDiagram, MatchedCase};
use crate::massaction::{count_positive_steady_states, ode_rhs, steady_state_system, ParamPoly};
use crate::multipoly::MultiPoly;
use crate::network::ReactionNetwork;
use crate::scalar::{rational_from_f64, simplest_rational_between, Scalar};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Allowing,
    Enabling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Eq,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<0",
            Relation::Eq => "=0",
            Relation::Gt => ">0",
        }
    }

    fn holds(self, sign: i8) -> bool {
        match self {
            Relation::Lt => sign < 0,
            Relation::Eq => sign == 0,
            Relation::Gt => sign > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignCondition {
    pub poly: MultiPoly,
    pub rel: Relation,
}

impl SignCondition {
    /// Normal form: primitive integer coefficients, monomial content in the
    /// rate variables removed (positive there), strict conditions oriented
    /// as `> 0`, equalities with a positive leading term.
    pub fn new(poly: MultiPoly, rel: Relation, n_rates: usize) -> Self {
        let rates: Vec<usize> = (0..n_rates).collect();
        let mut p = poly.primitive().strip_content_in(&rates);
        let mut rel = rel;
        match rel {
            Relation::Lt => {
                p = -p;
                rel = Relation::Gt;
            }
            Relation::Eq => {
                if p.terms().last().is_some_and(|(_, c)| c.is_negative()) {
                    p = -p;
                }
            }
            Relation::Gt => {}
        }
        Self { poly: p, rel }
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        self.rel.holds(self.poly.eval(point).sign_i8())
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        format!("{} {} 0", self.poly.display_with(names), &self.rel.symbol()[..1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub conditions: Vec<SignCondition>,
    /// A point of the piece validated through the steady-state oracle.
    pub witness: Option<Vec<Rational>>,
}

impl Piece {
    pub fn contains(&self, point: &[Rational]) -> bool {
        self.conditions.iter().all(|c| c.holds(point))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectivityValue {
    Connected,
    Disconnected,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    /// No points at all.
    EmptyRegion,
    /// Only single-variable sign conditions: a product of half-lines.
    Orthant,
    /// `{g < 0}` on an open orthant with at most one negative coefficient.
    OneNegativeCoefficient,
    /// `u = k_a - k_b > 0` substituted, then one negative coefficient.
    DifferenceSubstitution,
    /// Equalities solved for a variable as a positive continuous function of
    /// the others: the graph of a map over an orthant.
    Graph,
    /// Connected by the classification theorem for the family.
    ClassifiedFamily,
    /// Disjoint open pieces separated by opposite strict signs of a common
    /// polynomial, each with a validated witness.
    SignPatternSplit,
    /// Sampling evidence only.
    ProbeOnly,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityVerdict {
    pub value: ConnectivityValue,
    pub justification: Justification,
    pub witnesses: Vec<Vec<Rational>>,
}

impl Serialize for ConnectivityVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let ws: Vec<Vec<String>> = self.witnesses.iter().map(|w| w.iter().map(ToString::to_string).collect()).collect();
        let mut st = s.serialize_struct("ConnectivityVerdict", 3)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("justification", &self.justification)?;
        st.serialize_field("witnesses", &ws)?;
        st.end()
    }
}

/// Which construction produced a region; drives projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Empty,
    OneSpeciesThreeReactions,
    OneSpeciesNetTrinomial,
    TwoSpeciesNondegenerate,
    TwoSpeciesDegenerate(u8),
    AbsoluteConcentrationRobustness,
}

impl Family {
    pub fn tag(self) -> String {
        match self {
            Family::Empty => "empty".into(),
            Family::OneSpeciesThreeReactions => "one-species-three-reactions".into(),
            Family::OneSpeciesNetTrinomial => "one-species-net-trinomial".into(),
            Family::TwoSpeciesNondegenerate => "two-species-nondegenerate".into(),
            Family::TwoSpeciesDegenerate(k) => format!("two-species-degenerate-{k}"),
            Family::AbsoluteConcentrationRobustness => "absolute-concentration-robustness".into(),
        }
    }
}

/// `c*(k, k~) = sign * (base * lambda * k / k~)^(1/m)`: the value of the
/// total constant at which the class line is tangent to the steady-state
/// curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff {
    pub sign: i8,
    pub base: Rational,
    pub m: i64,
    pub lambda: Rational,
    pub rate_names: [String; 2],
}

impl Cutoff {
    pub fn eval(&self, k: f64, k_tilde: f64) -> f64 {
        let rho = self.lambda.to_f64_lossy() * k / k_tilde;
        f64::from(self.sign) * (self.base.to_f64_lossy() * rho).powf(1.0 / self.m as f64)
    }

    pub fn display(&self) -> String {
        let n = self.m.unsigned_abs();
        // written with a positive root index
        let (constant, num, den) = if self.m > 0 {
            (&self.base * &self.lambda, &self.rate_names[0], &self.rate_names[1])
        } else {
            ((&self.base * &self.lambda).recip(), &self.rate_names[1], &self.rate_names[0])
        };
        let sign = if self.sign < 0 { "-" } else { "" };
        let root = if n == 1 { String::new() } else { format!("^(1/{n})") };
        match exact_root(&constant, n as u32) {
            Some(r) if r.is_one() => format!("{sign}({num}/{den}){root}"),
            Some(r) => format!("{sign}{r}*({num}/{den}){root}"),
            None => format!("{sign}({constant}*{num}/{den}){root}"),
        }
    }
}

fn exact_root(r: &Rational, n: u32) -> Option<Rational> {
    let root = |b: &BigInt| {
        let c = b.nth_root(n);
        (num_traits::pow(c.clone(), n as usize) == *b).then_some(c)
    };
    if r.is_negative() {
        return None;
    }
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub kind: RegionKind,
    pub ambient: Vec<String>,
    pub n_rates: usize,
    pub pieces: Vec<Piece>,
    pub family: Family,
    pub connectivity: ConnectivityVerdict,
    pub cutoff: Option<Cutoff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("unsupported network family: {0}")]
    Unsupported(String),
    #[error("point has {found} coordinates, region has {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("network is not in the required family: {0}")]
    NotInFamily(String),
}

impl Region {
    fn build(kind: RegionKind, ambient: Vec<String>, n_rates: usize, pieces: Vec<Piece>, family: Family) -> Self {
        let mut r = Self {
            kind,
            ambient,
            n_rates,
            pieces,
            family,
            connectivity: ConnectivityVerdict { value: ConnectivityValue::Unknown, justification: Justification::None, witnesses: vec![] },
            cutoff: None,
        };
        r.connectivity = connectivity_verdict(&r);
        r
    }

    pub fn dim(&self) -> usize {
        self.ambient.len()
    }

    pub fn n_totals(&self) -> usize {
        self.ambient.len() - self.n_rates
    }

    pub fn is_empty_description(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn case_tag(&self) -> String {
        self.family.tag()
    }

    fn names(&self) -> Vec<&str> {
        self.ambient.iter().map(String::as_str).collect()
    }

    /// Exact membership. Rate coordinates must be positive to belong.
    pub fn contains(&self, point: &[Rational]) -> Result<bool, RegionError> {
        if point.len() != self.dim() {
            return Err(RegionError::Dimension { expected: self.dim(), found: point.len() });
        }
        if point[..self.n_rates].iter().any(|k| !k.is_positive()) {
            return Ok(false);
        }
        Ok(self.pieces.iter().any(|p| p.contains(point)))
    }

    /// Floating-point membership; falls back to exact arithmetic on the
    /// binary value of the point when a condition is within rounding of 0.
    pub fn contains_f64(&self, point: &[f64]) -> bool {
        self.piece_mask_f64(point) != 0
    }

    /// Bit `i` set when piece `i` contains `point` (first 64 pieces).
    pub fn piece_mask_f64(&self, point: &[f64]) -> u64 {
        if point[..self.n_rates].iter().any(|&k| k <= 0.0) {
            return 0;
        }
        let mut exact: Option<Vec<Rational>> = None;
        let mut mask = 0u64;
        for (i, piece) in self.pieces.iter().enumerate().take(64) {
            let inside = piece.conditions.iter().all(|c| {
                let v = c.poly.eval_f64(point);
                let mag = c.poly.magnitude_f64(point);
                let sign = if v.abs() > 1e-9 * mag && v.is_finite() {
                    if v > 0.0 {
                        1
                    } else {
                        -1
                    }
                } else {
                    let pt = exact.get_or_insert_with(|| point.iter().map(|&x| rational_from_f64(x).expect("finite")).collect());
                    c.poly.eval(pt).sign_i8()
                };
                c.rel.holds(sign)
            });
            if inside {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Smallest `|g| / sum |terms|` over all conditions at `point`; small
    /// values flag points near the zero set of some condition.
    pub fn relative_boundary_distance(&self, point: &[f64]) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| &p.conditions)
            .map(|c| {
                let mag = c.poly.magnitude_f64(point);
                if mag == 0.0 {
                    0.0
                } else {
                    c.poly.eval_f64(point).abs() / mag
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn display_conditions(&self) -> Vec<Vec<String>> {
        let names = self.names();
        self.pieces.iter().map(|p| p.conditions.iter().map(|c| c.display_with(&names)).collect()).collect()
    }
}

fn coeff_json(c: &Rational) -> serde_json::Value {
    match c.to_integer().to_i64() {
        Some(v) if c.is_integer() => serde_json::Value::from(v),
        _ => serde_json::Value::from(c.to_string()),
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = self.names();
        let pieces: Vec<serde_json::Value> = self
            .pieces
            .iter()
            .map(|p| {
                let conds: Vec<serde_json::Value> = p
                    .conditions
                    .iter()
                    .map(|c| {
                        let terms: Vec<serde_json::Value> =
                            c.poly.terms().map(|(e, k)| serde_json::json!([coeff_json(k), e])).collect();
                        serde_json::json!({
                            "poly": terms,
                            "rel": c.rel.symbol(),
                            "text": c.display_with(&names),
                        })
                    })
                    .collect();
                let witness = p.witness.as_ref().map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>());
                serde_json::json!({ "conditions": conds, "witness": witness })
            })
            .collect();
        let mut st = s.serialize_struct("Region", 6)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("ambient", &self.ambient)?;
        st.serialize_field("pieces", &pieces)?;
        st.serialize_field("case_tag", &self.case_tag())?;
        st.serialize_field("connectivity", &self.connectivity)?;
        st.serialize_field("cutoff", &self.cutoff.as_ref().map(Cutoff::display))?;
        st.end()
    }
}

/// Allowing and enabling regions of a network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPair {
    pub allowing: Region,
    pub enabling: Region,
}

impl RegionPair {
    pub fn get(&self, kind: RegionKind) -> &Region {
        match kind {
            RegionKind::Allowing => &self.allowing,
            RegionKind::Enabling => &self.enabling,
        }
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `r^e` for a possibly negative exponent.
fn rpow(r: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(r.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

// ---------------------------------------------------------------------------
// one species

/// The single ODE of a one-species network: coefficient of `x^m` is
/// `sum (+-) k_i l_i` over reactions with reactant `mA`.
pub fn net_ode_poly(net: &ReactionNetwork) -> Result<ParamPoly, RegionError> {
    if net.n_species() != 1 {
        return Err(RegionError::NotInFamily("net polynomial needs exactly one species".into()));
    }
    Ok(ode_rhs(net).remove(0))
}

/// Nonzero coefficients of `pp` in `x` (variable 0), shifted so the lowest
/// exponent is 0, as polynomials in the rate variables only.
fn x_coefficients(pp: &ParamPoly) -> Vec<(u32, MultiPoly)> {
    let map: Vec<usize> = std::iter::once(0).chain(0..pp.n_rates).collect();
    let cs = pp.poly.coeffs_in(0);
    let nz: Vec<(u32, MultiPoly)> = cs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e as u32, c.remap(pp.n_rates, &map)))
        .collect();
    let shift = nz.first().map_or(0, |(e, _)| *e);
    nz.into_iter().map(|(e, c)| (e - shift, c)).collect()
}

/// Pieces of `{coefficients give two positive roots}` for a polynomial whose
/// support is `{0, k, n}`: one per feasible alternating sign pattern, each
/// with the sign conditions that are not automatic on the orthant and the
/// discriminant condition `D < 0`.
fn trinomial_pieces(coeffs: &[(u32, MultiPoly)], n_rates: usize) -> Vec<Vec<SignCondition>> {
    let [(0, a0), (k, ak), (n, an)] = coeffs else {
        return Vec::new();
    };
    let (n, k) = (*n, *k);
    let d = num_integer::gcd(n, k);
    let (big_n, big_k) = (n / d, k / d);
    let mut out = Vec::new();
    for s in [1i64, -1] {
        let sq = q(s);
        let b = a0.scale(&sq); // s*A0 > 0
        let c = ak.scale(&-sq.clone()); // -s*Ak > 0
        let lead = an.scale(&sq); // s*An > 0
        let mut conds = Vec::new();
        let mut feasible = true;
        for p in [&b, &c, &lead] {
            match p.orthant_sign() {
                1 => {}
                -1 => feasible = false,
                _ => conds.push(SignCondition::new(p.clone(), Relation::Gt, n_rates)),
            }
        }
        if !feasible {
            continue;
        }
        // n^N b^(N-K) a^K - (n-k)^(N-K) k^K c^N with a the leading coefficient
        let first = b.pow(big_n - big_k).scale(&q(i64::from(n).pow(big_n))) * lead.pow(big_k);
        let second = c.pow(big_n).scale(&(q(i64::from(n - k).pow(big_n - big_k)) * q(i64::from(k).pow(big_k))));
        conds.push(SignCondition::new(&first - &second, Relation::Lt, n_rates));
        out.push(conds);
    }
    out
}

/// Coefficient targets for `s * ((2^k-1) x^n - (2^n-1) x^k + (2^n-2^k))`,
/// which has the positive roots 1 and 2 and no others.
fn target_coefficients(k: u32, n: u32, s: i64) -> [Rational; 3] {
    let (pk, pn) = (q(1i64 << k), q(1i64 << n));
    let sq = q(s);
    [(&pn - &pk) * &sq, -(&pn - q(1)) * &sq, (&pk - q(1)) * &sq]
}

/// Solves `sum a_i k_i = t` with positive `k_i` when the coefficient is
/// linear: opposite-sign rates are set to 1 and same-sign rates share the
/// remainder.
fn solve_linear_coefficient(p: &MultiPoly, t: &Rational, kappa: &mut [Option<Rational>]) -> bool {
    let mut terms = Vec::new();
    for (e, a) in p.terms() {
        let vars: Vec<usize> = e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i).collect();
        if vars.len() != 1 || e[vars[0]] != 1 {
            return false;
        }
        terms.push((vars[0], a.clone()));
    }
    let same: Vec<_> = terms.iter().filter(|(_, a)| a.sign_i8() == t.sign_i8()).collect();
    if same.is_empty() || t.is_zero() {
        return false;
    }
    let mut rest = t.clone();
    for (i, a) in terms.iter().filter(|(_, a)| a.sign_i8() != t.sign_i8()) {
        kappa[*i] = Some(q(1));
        rest -= a;
    }
    let total: Rational = same.iter().map(|(_, a)| a.clone()).fold(q(0), |x, y| x + y);
    let v = rest / total;
    for (i, _) in same {
        kappa[*i] = Some(v.clone());
    }
    true
}

fn at_least_two(net: &ReactionNetwork, point: &[Rational]) -> bool {
    let sys = steady_state_system(net);
    let r = net.n_reactions();
    count_positive_steady_states(&sys, &point[..r], &point[r..]).is_ok_and(|o| o.count.at_least_two())
}

/// Constructs and validates a witness for a one-species trinomial piece.
fn trinomial_witness(net: &ReactionNetwork, coeffs: &[(u32, MultiPoly)], s: i64) -> Option<Vec<Rational>> {
    let [(0, a0), (k, ak), (n, an)] = coeffs else {
        return None;
    };
    let targets = target_coefficients(*k, *n, s);
    let mut kappa: Vec<Option<Rational>> = vec![None; net.n_reactions()];
    for (p, t) in [a0, ak, an].into_iter().zip(&targets) {
        if !solve_linear_coefficient(p, t, &mut kappa) {
            return None;
        }
    }
    let point: Vec<Rational> = kappa.into_iter().map(|k| k.unwrap_or_else(|| q(1))).collect();
    at_least_two(net, &point).then_some(point)
}

fn one_species_region(net: &ReactionNetwork, family: Family) -> Result<RegionPair, RegionError> {
    let pp = net_ode_poly(net)?;
    let coeffs = x_coefficients(&pp);
    if coeffs.len() > 3 {
        return Err(RegionError::Unsupported(format!(
            "net polynomial has {} distinct exponents; only trinomials are covered",
            coeffs.len()
        )));
    }
    let r = net.n_reactions();
    let mut pieces = Vec::new();
    if coeffs.len() == 3 {
        let conds = trinomial_pieces(&coeffs, r);
        // trinomial_pieces emits patterns in the order s = +1, -1
        let signs: Vec<i64> = [1, -1]
            .into_iter()
            .filter(|&s| {
                let (b, c, a) = (coeffs[0].1.scale(&q(s)), coeffs[1].1.scale(&q(-s)), coeffs[2].1.scale(&q(s)));
                [b, c, a].iter().all(|p| p.orthant_sign() != -1)
            })
            .collect();
        for (conds, s) in conds.into_iter().zip(signs) {
            let witness = trinomial_witness(net, &coeffs, s);
            let mut piece = Piece { conditions: conds, witness: None };
            piece.witness = witness.filter(|w| piece.contains(w));
            pieces.push(piece);
        }
    }
    let family = if pieces.is_empty() { Family::Empty } else { family };
    let ambient = net.rate_labels();
    let enabling = Region::build(RegionKind::Enabling, ambient.clone(), r, pieces.clone(), family);
    let allowing = Region::build(RegionKind::Allowing, ambient, r, pieces, family);
    Ok(RegionPair { allowing, enabling })
}

/// The region of a one-species network with three reactions whose
/// classification is multistationary: a single discriminant inequality in
/// the rates, with roles fixed by the sorted reactant coefficients.
pub fn region_one_species_three_reactions(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    if net.n_species() != 1 || net.n_reactions() != 3 {
        return Err(RegionError::NotInFamily("one species and exactly three reactions".into()));
    }
    let v = classify::classify_one_species(net).map_err(|e| RegionError::NotInFamily(e.to_string()))?;
    if !v.multistationary {
        return empty_pair(net);
    }
    one_species_region(net, Family::OneSpeciesThreeReactions)
}

/// Union over alternating sign patterns of the net polynomial's
/// coefficients, each intersected with the discriminant condition.
pub fn region_one_species_net_trinomial(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    one_species_region(net, Family::OneSpeciesNetTrinomial)
}

fn empty_pair(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    let r = net.n_reactions();
    let totals = steady_state_system(net).total_symbols;
    let labels = net.rate_labels();
    let enabling_ambient: Vec<String> = labels.iter().cloned().chain(totals).collect();
    Ok(RegionPair {
        allowing: Region::build(RegionKind::Allowing, labels, r, vec![], Family::Empty),
        enabling: Region::build(RegionKind::Enabling, enabling_ambient, r, vec![], Family::Empty),
    })
}

// ---------------------------------------------------------------------------
// two species, two reactions

/// Exact data of a two-species, two-reaction network with antiparallel
/// reaction vectors. Along the class line `x2 = gamma*x1 + e` the steady
/// states are the solutions of `psi(t) = e` with
/// `psi(t) = K t^(-1/alpha) - gamma t`, `K = rho^(1/delta2)`,
/// `rho = lambda*k/k~`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpeciesGeometry {
    pub diagram: BoxDiagram,
    pub v: [i64; 2],
    pub delta: [i64; 2],
    pub lambda: Rational,
    /// The conservation row `(w1, w2)`.
    pub w: [Rational; 2],
}

impl TwoSpeciesGeometry {
    pub fn new(net: &ReactionNetwork) -> Result<Self, RegionError> {
        let diagram = classify::build_box_diagram(net).map_err(|e| RegionError::NotInFamily(e.to_string()))?;
        let lambda = diagram
            .lambda
            .clone()
            .ok_or_else(|| RegionError::NotInFamily("reaction vectors are not antiparallel".into()))?;
        let cons = net.conservation_matrix();
        let row = cons.row(0);
        Ok(Self { v: diagram.v(), delta: diagram.delta(), diagram, lambda, w: [row[0].clone(), row[1].clone()] })
    }

    pub fn gamma(&self) -> Rational {
        Rational::new(self.v[1].into(), self.v[0].into())
    }

    pub fn alpha(&self) -> Rational {
        Rational::new(self.delta[1].into(), self.delta[0].into())
    }

    /// `tau` with `c = tau * e`, where `e` is the `x2`-intercept of the
    /// class line.
    pub fn tau(&self) -> Rational {
        // W is a multiple s*(-v2, v1) of the normal; the line reads
        // s*v1*(x2 - gamma*x1) = c
        let s = if self.v[1] != 0 { &self.w[0] / q(-self.v[1]) } else { &self.w[1] / q(self.v[0]) };
        s * q(self.v[0])
    }

    /// `|A|^m` where `psi* = A * rho^(1/m)` and `m = delta1 + delta2`.
    fn abs_a_pow_m(&self) -> Rational {
        let (g, a) = (self.gamma(), self.alpha());
        let m = self.delta[0] + self.delta[1];
        rpow(&(&g * (q(1) + &a)).abs(), m) * rpow(&(&g * &a).abs(), -self.delta[1])
    }

    pub fn cutoff(&self, rate_names: [String; 2]) -> Cutoff {
        let m = self.delta[0] + self.delta[1];
        let (g, a) = (self.gamma(), self.alpha());
        let sign_psi = (-(&g * (q(1) + &a))).sign_i8();
        let tau = self.tau();
        Cutoff {
            sign: sign_psi * tau.sign_i8(),
            base: rpow(&tau.abs(), m) * self.abs_a_pow_m(),
            m,
            lambda: self.lambda.clone(),
            rate_names,
        }
    }

    fn k_const(&self, k: f64, kt: f64) -> f64 {
        (self.lambda.to_f64_lossy() * k / kt).powf(1.0 / self.delta[1] as f64)
    }

    pub fn psi(&self, t: f64, k: f64, kt: f64) -> f64 {
        let beta = -1.0 / self.alpha().to_f64_lossy();
        self.k_const(k, kt) * t.powf(beta) - self.gamma().to_f64_lossy() * t
    }

    pub fn psi_prime(&self, t: f64, k: f64, kt: f64) -> f64 {
        let beta = -1.0 / self.alpha().to_f64_lossy();
        self.k_const(k, kt) * beta * t.powf(beta - 1.0) - self.gamma().to_f64_lossy()
    }

    /// Tangency abscissa `t* = (-gamma*alpha/K)^(-alpha/(1+alpha))`.
    pub fn t_star(&self, k: f64, kt: f64) -> f64 {
        let (g, a) = (self.gamma().to_f64_lossy(), self.alpha().to_f64_lossy());
        (-g * a / self.k_const(k, kt)).powf(-a / (1.0 + a))
    }
}

fn two_species_region(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    let verdict = classify::classify_two_species(net).map_err(|e| RegionError::NotInFamily(e.to_string()))?;
    if !verdict.multistationary {
        return empty_pair(net);
    }
    let geo = TwoSpeciesGeometry::new(net)?;
    let labels = net.rate_labels();
    let ambient: Vec<String> = labels.iter().cloned().chain(["c".to_string()]).collect();
    let nv = 3;
    let (k, kt, c) = (MultiPoly::var(nv, 0), MultiPoly::var(nv, 1), MultiPoly::var(nv, 2));
    let lam = geo.lambda.clone();
    let cond = |p: MultiPoly, rel| SignCondition::new(p, rel, 2);
    let rate_only = |p: &SignCondition| p.poly.remap(2, &[0, 1, 0]);
    let (enabling, allowing, family, cutoff) = match verdict.matched_case {
        MatchedCase::TwoSpeciesZigzag { .. } => {
            let alpha = geo.alpha();
            let m = geo.delta[0] + geo.delta[1];
            let n_abs = m.unsigned_abs() as u32;
            let tau = geo.tau();
            // sign of e = c / tau on the region, and whether |e|^N must
            // exceed the cutoff value or stay below it
            let (e_sign, above) = if alpha.is_positive() {
                (1, true)
            } else if alpha > q(-1) {
                (-1, false)
            } else {
                (1, false)
            };
            let c_sign = e_sign * i64::from(tau.sign_i8());
            let abs_c_pow = c.scale(&q(c_sign)).pow(n_abs);
            let b = rpow(&geo.abs_a_pow_m(), m.signum()) * rpow(&tau.abs(), i64::from(n_abs));
            let (lhs, rhs) = if m > 0 {
                (&abs_c_pow * &kt, k.scale(&(&b * &lam)))
            } else {
                (&abs_c_pow * &k.scale(&lam), kt.scale(&b))
            };
            let main = if above { &lhs - &rhs } else { &rhs - &lhs };
            let conds = vec![cond(c.scale(&q(c_sign)), Relation::Gt), cond(main, Relation::Gt)];
            let cut = geo.cutoff([labels[0].clone(), labels[1].clone()]);
            let mut piece = Piece { conditions: conds, witness: None };
            piece.witness = nondegenerate_witness(net, &geo, &cut, &piece);
            (vec![piece], vec![Piece { conditions: vec![], witness: None }], Family::TwoSpeciesNondegenerate, Some(cut))
        }
        MatchedCase::Degenerate { case } => {
            let (d1, d2) = (geo.delta[0], geo.delta[1]);
            let mut conds = Vec::new();
            let mut allow = Vec::new();
            match case {
                1 => {
                    let g = rpow(&geo.gamma(), d1);
                    let eq = cond(&kt - &k.scale(&(&lam * &g)), Relation::Eq);
                    allow.push(SignCondition::new(rate_only(&eq), Relation::Eq, 2));
                    conds.push(cond(c.clone(), Relation::Eq));
                    conds.push(eq);
                }
                2 => {
                    let eq = cond(&kt - &k.scale(&lam), Relation::Eq);
                    allow.push(SignCondition::new(rate_only(&eq), Relation::Eq, 2));
                    // the class line meets the open quadrant for every c only
                    // when W has entries of opposite signs
                    let [w1, w2] = &geo.w;
                    if !(w1 * w2).is_negative() {
                        let s = if w1.is_negative() || w2.is_negative() { -1 } else { 1 };
                        conds.push(cond(c.scale(&q(s)), Relation::Gt));
                    }
                    conds.push(eq);
                }
                3 | 4 => {
                    let e = if case == 3 { d1 } else { d2 };
                    let cp = c.pow(e.unsigned_abs() as u32);
                    let eq = if e > 0 { &cp * &kt - k.scale(&lam) } else { &cp * &k.scale(&lam) - kt.clone() };
                    conds.push(cond(c.clone(), Relation::Gt));
                    conds.push(cond(eq, Relation::Eq));
                }
                _ => unreachable!("degenerate cases are 1 to 4"),
            }
            let mut piece = Piece { conditions: conds, witness: None };
            piece.witness = degenerate_witness(net, &geo, case).filter(|w| piece.contains(w));
            (vec![piece], vec![Piece { conditions: allow, witness: None }], Family::TwoSpeciesDegenerate(case), None)
        }
        _ => return empty_pair(net),
    };
    let mut en = Region::build(RegionKind::Enabling, ambient, 2, enabling, family);
    en.cutoff = cutoff;
    let mut allowing_pieces = allowing;
    if let (Some(w), Some(p)) = (&en.pieces[0].witness, allowing_pieces.first_mut()) {
        p.witness = Some(w[..2].to_vec());
    }
    let al = Region::build(RegionKind::Allowing, labels, 2, allowing_pieces, family);
    Ok(RegionPair { allowing: al, enabling: en })
}

/// `(k, k~, c)` with `c` a short rational beyond the cutoff (for
/// `alpha > 0`) or halfway to it (otherwise), accepted by `ok`.
fn c_near_cutoff(
    geo: &TwoSpeciesGeometry,
    cut: &Cutoff,
    rates: &[Rational],
    ok: impl Fn(&[Rational]) -> bool,
) -> Option<Vec<Rational>> {
    let h = cut.eval(rates[0].to_f64_lossy(), rates[1].to_f64_lossy());
    let target = if geo.alpha().is_positive() { 1.25 * h } else { 0.5 * h };
    for width in [0.05, 0.01, 0.001] {
        let lo = rational_from_f64(target - width * h.abs())?;
        let hi = rational_from_f64(target + width * h.abs())?;
        let point = vec![rates[0].clone(), rates[1].clone(), simplest_rational_between(&lo, &hi)];
        if ok(&point) {
            return Some(point);
        }
    }
    None
}

/// Rates `(1, 1)` and `c` near the cutoff.
fn nondegenerate_witness(net: &ReactionNetwork, geo: &TwoSpeciesGeometry, cut: &Cutoff, piece: &Piece) -> Option<Vec<Rational>> {
    c_near_cutoff(geo, cut, &[q(1), q(1)], |p| piece.contains(p) && at_least_two(net, p))
}

/// A point of `pair.enabling` over the rate vector `rates` of
/// `pair.allowing`, with the totals picked by the case formulas. `None` when
/// `rates` is outside the allowing region or the total constant would be
/// irrational (degenerate cases 3 and 4 with a root that is not rational).
pub fn extend_to_enabling(net: &ReactionNetwork, pair: &RegionPair, rates: &[Rational]) -> Option<Vec<Rational>> {
    if !pair.allowing.contains(rates).ok()? {
        return None;
    }
    let en = &pair.enabling;
    let inside = |p: &[Rational]| en.contains(p).unwrap_or(false);
    let with_c = |c: Rational| {
        let p: Vec<Rational> = rates.iter().cloned().chain([c]).collect();
        inside(&p).then_some(p)
    };
    match en.family {
        _ if en.n_totals() == 0 => inside(rates).then(|| rates.to_vec()),
        Family::TwoSpeciesNondegenerate => {
            let geo = TwoSpeciesGeometry::new(net).ok()?;
            c_near_cutoff(&geo, en.cutoff.as_ref()?, rates, inside)
        }
        Family::TwoSpeciesDegenerate(1) => with_c(q(0)),
        Family::TwoSpeciesDegenerate(2) => [q(1), q(-1), q(0)].into_iter().find_map(with_c),
        Family::TwoSpeciesDegenerate(case @ (3 | 4)) => {
            let geo = TwoSpeciesGeometry::new(net).ok()?;
            let e = geo.delta[usize::from(case - 3)];
            // c^e = lambda k / k~
            let rho = &geo.lambda * &rates[0] / &rates[1];
            let base = if e > 0 { rho } else { rho.recip() };
            with_c(exact_root(&base, e.unsigned_abs() as u32)?)
        }
        _ => None,
    }
}

fn degenerate_witness(net: &ReactionNetwork, geo: &TwoSpeciesGeometry, case: u8) -> Option<Vec<Rational>> {
    let lam = geo.lambda.clone();
    let point = match case {
        1 => vec![q(1), &lam * rpow(&geo.gamma(), geo.delta[0]), q(0)],
        2 => {
            let [w1, w2] = &geo.w;
            let c = if (w1 * w2).is_negative() { q(0) } else if w1.is_negative() || w2.is_negative() { q(-1) } else { q(1) };
            vec![q(1), lam, c]
        }
        _ => vec![q(1), lam, q(1)],
    };
    at_least_two(net, &point).then_some(point)
}

/// Enabling region (with respect to the row-reduced conservation row) and
/// allowing region of a two-species, two-reaction network.
pub fn region_two_species_two_reactions(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    if net.n_species() != 2 || net.n_reactions() != 2 {
        return Err(RegionError::NotInFamily("two species and exactly two reactions".into()));
    }
    two_species_region(net)
}

/// The tangency value of the total constant, for nondegenerate two-species
/// networks.
pub fn cutoff_c_star(net: &ReactionNetwork) -> Result<Cutoff, RegionError> {
    let verdict = classify::classify_two_species(net).map_err(|e| RegionError::NotInFamily(e.to_string()))?;
    if !matches!(verdict.matched_case, MatchedCase::TwoSpeciesZigzag { .. }) {
        return Err(RegionError::NotInFamily("cutoff needs a nondegenerate zigzag network".into()));
    }
    let geo = TwoSpeciesGeometry::new(net)?;
    let labels = net.rate_labels();
    Ok(geo.cutoff([labels[0].clone(), labels[1].clone()]))
}

// ---------------------------------------------------------------------------
// full-dimensional two species with one concentration pinned

/// Full-dimensional two-species networks where one ODE, after removing its
/// monomial factor, is `a*x_j^p + b*x_j^(p+1)` in a single species: that
/// species is pinned at `-a/b` and the other ODE becomes a trinomial.
pub fn region_acr_reduction(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    if net.n_species() != 2 || !net.is_full_dimensional() {
        return Err(RegionError::NotInFamily("needs a full-dimensional two-species network".into()));
    }
    let r = net.n_reactions();
    let odes = ode_rhs(net);
    for (i, f) in odes.iter().enumerate() {
        let Some((j, a, b)) = pinned_species(f, r) else {
            continue;
        };
        let labels = net.rate_labels();
        if a.orthant_sign() == 0 || b.orthant_sign() == 0 {
            continue;
        }
        if a.orthant_sign() == b.orthant_sign() {
            return empty_pair(net);
        }
        let other = &odes[1 - i];
        let o = 1 - j;
        // other(x_j = -a/b, x_o) * b^D as a polynomial in x_o over the rates
        let nv = 2 + r;
        let lift = |p: &MultiPoly| p.remap(nv, &(2..2 + r).collect::<Vec<_>>());
        let (al, bl) = (lift(&a), lift(&b));
        let deg = other.poly.degree_in(j);
        let mut reduced = MultiPoly::zero(nv);
        for (kexp, ck) in other.poly.coeffs_in(j).iter().enumerate() {
            let factor = &(-&al).pow(kexp as u32) * &bl.pow(deg - kexp as u32);
            reduced = &reduced + &(ck * &factor);
        }
        let pp = ParamPoly { n_species: 1, n_rates: r, poly: reduced.remap(1 + r, &remap_species(o, r)) };
        let coeffs = x_coefficients(&pp);
        if coeffs.len() > 3 {
            return Err(RegionError::Unsupported("pinned reduction is not a trinomial".into()));
        }
        if coeffs.len() < 3 {
            return empty_pair(net);
        }
        let pieces: Vec<Piece> = trinomial_pieces(&coeffs, r)
            .into_iter()
            .map(|conditions| {
                let mut piece = Piece { conditions, witness: None };
                piece.witness = search_witness(net, &piece, 42);
                piece
            })
            .collect();
        let family = if pieces.is_empty() { Family::Empty } else { Family::AbsoluteConcentrationRobustness };
        let enabling = Region::build(RegionKind::Enabling, labels.clone(), r, pieces.clone(), family);
        let allowing = Region::build(RegionKind::Allowing, labels, r, pieces, family);
        return Ok(RegionPair { allowing, enabling });
    }
    Err(RegionError::Unsupported("no species is pinned by a two-term equation".into()))
}

/// Variable map from `[x1, x2, k...]` to `[x_o, k...]`.
fn remap_species(o: usize, r: usize) -> Vec<usize> {
    let mut map = vec![0usize; 2 + r];
    map[o] = 0;
    map[1 - o] = 0;
    for i in 0..r {
        map[2 + i] = 1 + i;
    }
    map
}

/// `(j, a, b)` when `f = x^m (a x_j^p + b x_j^(p+1))` with `a`, `b` polynomials
/// in the rates only.
fn pinned_species(f: &ParamPoly, r: usize) -> Option<(usize, MultiPoly, MultiPoly)> {
    if f.poly.is_zero() {
        return None;
    }
    let content = f.poly.monomial_content();
    let m: Vec<u32> = content.iter().enumerate().map(|(i, &e)| if i < 2 { e } else { 0 }).collect();
    let g = f.poly.divide_monomial(&m);
    for j in 0..2 {
        if g.involves(1 - j) {
            continue;
        }
        let cs = g.coeffs_in(j);
        let nz: Vec<usize> = (0..cs.len()).filter(|&e| !cs[e].is_zero()).collect();
        if nz.len() == 2 && nz[1] == nz[0] + 1 {
            let map: Vec<usize> = (0..2 + r).map(|v| v.saturating_sub(2)).collect();
            return Some((j, cs[nz[0]].remap(r, &map), cs[nz[1]].remap(r, &map)));
        }
    }
    None
}

/// Seeded log-uniform search over `[2^-6, 2^6]` for a point of `piece` with
/// at least two steady states, then shortened coordinate by coordinate to
/// simple rationals.
fn search_witness(net: &ReactionNetwork, piece: &Piece, seed: u64) -> Option<Vec<Rational>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = net.n_reactions() + steady_state_system(net).total_symbols.len();
    for _ in 0..20_000 {
        let p: Vec<f64> = (0..dim).map(|_| 2f64.powf(rng.gen_range(-6.0..6.0))).collect();
        let exact: Vec<Rational> = p.iter().map(|&x| rational_from_f64(x).expect("finite")).collect();
        if !piece.contains(&exact) {
            continue;
        }
        let mut point = exact;
        for i in 0..dim {
            for w in [0.5, 0.1, 0.02] {
                let x = point[i].to_f64_lossy();
                let cand = simplest_rational_between(&rational_from_f64(x * (1.0 - w))?, &rational_from_f64(x * (1.0 + w))?);
                let mut trial = point.clone();
                trial[i] = cand;
                if piece.contains(&trial) && at_least_two(net, &trial) {
                    point = trial;
                    break;
                }
            }
        }
        if at_least_two(net, &point) {
            return Some(point);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// dispatch and projection

/// Regions for any covered network.
pub fn regions_for(net: &ReactionNetwork) -> Result<RegionPair, RegionError> {
    match (net.n_species(), net.n_reactions()) {
        (1, 3) => region_one_species_three_reactions(net),
        (1, 1..=2) => empty_pair(net),
        (1, _) => region_one_species_net_trinomial(net),
        (2, 1) => empty_pair(net),
        (2, 2) => region_two_species_two_reactions(net),
        (2, _) if net.is_full_dimensional() => region_acr_reduction(net),
        (n, r) => Err(RegionError::Unsupported(format!("{n} species and {r} reactions"))),
    }
}

/// Projection of an enabling region to rate space, by case.
pub fn project_to_allowing(enabling: &Region) -> Result<Region, RegionError> {
    if enabling.kind != RegionKind::Enabling {
        return Err(RegionError::NotInFamily("projection takes an enabling region".into()));
    }
    let r = enabling.n_rates;
    let ambient = enabling.ambient[..r].to_vec();
    let drop_totals = |p: &Piece| -> Piece {
        let map: Vec<usize> = (0..enabling.dim()).map(|v| v.min(r.saturating_sub(1))).collect();
        Piece {
            conditions: p
                .conditions
                .iter()
                .filter(|c| (r..enabling.dim()).all(|v| !c.poly.involves(v)))
                .map(|c| SignCondition::new(c.poly.remap(r, &map), c.rel, r))
                .collect(),
            witness: p.witness.as_ref().map(|w| w[..r].to_vec()),
        }
    };
    let pieces = match enabling.family {
        _ if enabling.n_totals() == 0 => enabling.pieces.clone(),
        Family::Empty => vec![],
        Family::TwoSpeciesNondegenerate | Family::TwoSpeciesDegenerate(3) | Family::TwoSpeciesDegenerate(4) => {
            enabling.pieces.iter().map(|p| Piece { conditions: vec![], witness: drop_totals(p).witness }).collect()
        }
        Family::TwoSpeciesDegenerate(_) => enabling.pieces.iter().map(drop_totals).collect(),
        f => return Err(RegionError::Unsupported(format!("no projection rule for {}", f.tag()))),
    };
    Ok(Region::build(RegionKind::Allowing, ambient, r, pieces, enabling.family))
}

// ---------------------------------------------------------------------------
// connectivity

/// Sign of each ambient variable on the piece: rates are positive, totals
/// need an explicit `+-c > 0` condition. `None` when some total is free.
fn variable_signs(piece: &Piece, n_rates: usize, dim: usize) -> (Option<Vec<i64>>, Vec<usize>) {
    let mut signs: Vec<Option<i64>> = (0..dim).map(|v| (v < n_rates).then_some(1)).collect();
    let mut sign_conds = Vec::new();
    for (i, c) in piece.conditions.iter().enumerate() {
        if c.rel != Relation::Gt || c.poly.len() != 1 {
            continue;
        }
        let (e, coef) = c.poly.terms().next().expect("one term");
        let vars: Vec<usize> = (0..dim).filter(|&v| e[v] > 0).collect();
        if vars.len() == 1 && e[vars[0]] == 1 {
            signs[vars[0]] = Some(i64::from(coef.sign_i8()));
            sign_conds.push(i);
        } else if vars.iter().all(|&v| v < n_rates) && coef.is_positive() {
            sign_conds.push(i);
        }
    }
    (signs.into_iter().collect(), sign_conds)
}

/// `p(sigma_1 v_1, ..., sigma_n v_n)`.
fn flip_vars(p: &MultiPoly, signs: &[i64]) -> MultiPoly {
    MultiPoly::from_terms(
        p.nvars(),
        p.terms().map(|(e, c)| {
            let odd = e.iter().zip(signs).filter(|(&k, &s)| s < 0 && k % 2 == 1).count();
            (e.clone(), if odd % 2 == 1 { -c.clone() } else { c.clone() })
        }),
    )
}

fn one_negative_piece(piece: &Piece, n_rates: usize, dim: usize) -> Option<Justification> {
    let (signs, sign_conds) = variable_signs(piece, n_rates, dim);
    let signs = signs?;
    let rest: Vec<&SignCondition> =
        piece.conditions.iter().enumerate().filter(|(i, _)| !sign_conds.contains(i)).map(|(_, c)| c).collect();
    match rest.as_slice() {
        [] => Some(Justification::Orthant),
        [c] if c.rel == Relation::Gt => {
            let g = -flip_vars(&c.poly, &signs);
            (g.negative_coefficients() <= 1).then_some(Justification::OneNegativeCoefficient)
        }
        [l, c] | [c, l] if l.rel == Relation::Gt && c.rel == Relation::Gt && l.poly.len() == 2 => {
            // l = k_a - k_b with both rates; substitute k_a = u + k_b
            let terms: Vec<_> = l.poly.terms().collect();
            let lin = |e: &Vec<u32>| {
                let vars: Vec<usize> = (0..n_rates).filter(|&v| e[v] > 0).collect();
                (vars.len() == 1 && e[vars[0]] == 1 && e.iter().sum::<u32>() == 1).then(|| vars[0])
            };
            let (va, vb) = (lin(terms[0].0)?, lin(terms[1].0)?);
            let (a, b) = if terms[0].1.is_one() && (-terms[1].1.clone()).is_one() {
                (va, vb)
            } else if terms[1].1.is_one() && (-terms[0].1.clone()).is_one() {
                (vb, va)
            } else {
                return None;
            };
            let sub = &MultiPoly::var(dim, a) + &MultiPoly::var(dim, b);
            let g = -flip_vars(&c.poly, &signs).substitute(a, &sub);
            (g.negative_coefficients() <= 1).then_some(Justification::DifferenceSubstitution)
        }
        _ => None,
    }
}

/// Equalities that can be solved for one variable as a positive function of
/// the others (or that fix a total at 0), leaving an orthant.
fn graph_piece(piece: &Piece, n_rates: usize, dim: usize) -> bool {
    let (_, sign_conds) = variable_signs(piece, n_rates, dim);
    let mut eliminated: Vec<usize> = Vec::new();
    let mut zeroed: Vec<usize> = Vec::new();
    let positive = |v: usize| sign_of(&piece.conditions, v, n_rates);
    for (i, c) in piece.conditions.iter().enumerate() {
        if sign_conds.contains(&i) {
            continue;
        }
        if c.rel != Relation::Eq {
            return false;
        }
        let vars = c.poly.support_vars();
        if c.poly.len() == 1 && vars.len() == 1 && vars[0] >= n_rates {
            zeroed.push(vars[0]);
            continue;
        }
        // find v occurring linearly in a single term whose sign is opposite
        // to every other term, all terms positive-valued monomials
        if !vars.iter().all(|&v| positive(v)) {
            return false;
        }
        let solved = vars.iter().copied().find(|&v| {
            if eliminated.contains(&v) {
                return false;
            }
            let with: Vec<_> = c.poly.terms().filter(|(e, _)| e[v] > 0).collect();
            if with.len() != 1 || with[0].0[v] != 1 {
                return false;
            }
            let s = with[0].1.sign_i8();
            c.poly.terms().filter(|(e, _)| e[v] == 0).all(|(_, k)| k.sign_i8() == -s)
        });
        match solved {
            Some(v) => eliminated.push(v),
            None => return false,
        }
    }
    // each eliminated variable must not occur in any other equality
    for &v in &eliminated {
        let uses = piece.conditions.iter().filter(|c| c.rel == Relation::Eq && c.poly.involves(v)).count();
        if uses != 1 {
            return false;
        }
    }
    !eliminated.is_empty() || !zeroed.is_empty()
}

fn sign_of(conds: &[SignCondition], v: usize, n_rates: usize) -> bool {
    v < n_rates
        || conds.iter().any(|c| {
            c.rel == Relation::Gt
                && c.poly.len() == 1
                && c.poly.terms().next().is_some_and(|(e, k)| e[v] == 1 && e.iter().sum::<u32>() == 1 && k.is_positive())
        })
}

fn pieces_separated(a: &Piece, b: &Piece) -> bool {
    a.conditions.iter().any(|ca| {
        ca.rel == Relation::Gt && b.conditions.iter().any(|cb| cb.rel == Relation::Gt && cb.poly == -ca.poly.clone())
    })
}

pub fn connectivity_verdict(region: &Region) -> ConnectivityVerdict {
    let verdict = |value, justification, witnesses| ConnectivityVerdict { value, justification, witnesses };
    let (r, dim) = (region.n_rates, region.dim());
    match region.pieces.as_slice() {
        [] => verdict(ConnectivityValue::Connected, Justification::EmptyRegion, vec![]),
        [piece] => {
            if let Some(j) = one_negative_piece(piece, r, dim) {
                return verdict(ConnectivityValue::Connected, j, vec![]);
            }
            if graph_piece(piece, r, dim) {
                return verdict(ConnectivityValue::Connected, Justification::Graph, vec![]);
            }
            match region.family {
                Family::OneSpeciesThreeReactions | Family::TwoSpeciesNondegenerate => {
                    verdict(ConnectivityValue::Connected, Justification::ClassifiedFamily, vec![])
                }
                _ => verdict(ConnectivityValue::Unknown, Justification::None, vec![]),
            }
        }
        pieces => {
            let open = pieces.iter().all(|p| p.conditions.iter().all(|c| c.rel != Relation::Eq));
            let disjoint = (0..pieces.len()).all(|i| (i + 1..pieces.len()).all(|j| pieces_separated(&pieces[i], &pieces[j])));
            let witnesses: Option<Vec<Vec<Rational>>> = pieces.iter().map(|p| p.witness.clone()).collect();
            match witnesses {
                Some(ws) if open && disjoint => verdict(ConnectivityValue::Disconnected, Justification::SignPatternSplit, ws),
                _ => verdict(ConnectivityValue::Unknown, Justification::None, vec![]),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    fn net(s: &str) -> ReactionNetwork {
        parse_network(s).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn texts(region: &Region) -> Vec<Vec<String>> {
        region.display_conditions()
    }

    #[test]
    fn running_example_enabling() {
        let pair = regions_for(&net("2A + B -> 3A\nA -> B")).unwrap();
        assert_eq!(texts(&pair.enabling), vec![vec!["c > 0", "k1*c^2 - 4*k2 > 0"]]);
        assert!(pair.allowing.pieces[0].conditions.is_empty());
        assert!(pair.enabling.contains(&[q(1), q(1), r(5, 2)]).unwrap());
        assert!(!pair.enabling.contains(&[q(1), q(1), q(2)]).unwrap());
        assert_eq!(pair.enabling.pieces[0].witness, Some(vec![q(1), q(1), r(5, 2)]));
        assert_eq!(pair.enabling.connectivity.value, ConnectivityValue::Connected);
        assert_eq!(pair.enabling.cutoff.as_ref().unwrap().display(), "2*(k2/k1)^(1/2)");
        assert!((pair.enabling.cutoff.as_ref().unwrap().eval(1.0, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn example_three_reactions() {
        let pair = regions_for(&net("0 <- A, 2A -> 3A <- 4A")).unwrap();
        assert_eq!(texts(&pair.allowing), vec![vec!["-27*k1^2*k3 + 4*k2^3 > 0"]]);
        assert_eq!(pair.allowing.connectivity.justification, Justification::OneNegativeCoefficient);
    }

    #[test]
    fn two_inequality_example() {
        let pair = regions_for(&net("0 <- A ; k1L, A -> 2A ; k1R, 2A <-> 3A ; k2R k3L")).unwrap();
        assert_eq!(
            texts(&pair.allowing),
            vec![vec!["k1L - k1R > 0", "-4*k1L*k3L + 4*k1R*k3L + k2R^2 > 0"]]
        );
        assert_eq!(pair.allowing.connectivity.justification, Justification::DifferenceSubstitution);
    }

    #[test]
    fn six_reactions_split() {
        let six = net("A -> 0 ; k1L\nA -> 2A ; k1R\n2A -> A ; k2L\n2A -> 3A ; k2R\n3A -> 2A ; k3L\n3A -> 4A ; k3R");
        let pair = regions_for(&six).unwrap();
        assert_eq!(pair.allowing.pieces.len(), 2);
        let v = &pair.allowing.connectivity;
        assert_eq!(v.value, ConnectivityValue::Disconnected);
        let ws: Vec<Vec<i64>> = v.witnesses.iter().map(|w| w.iter().map(|x| x.to_integer().to_i64().unwrap()).collect()).collect();
        assert_eq!(ws, vec![vec![1, 3, 4, 1, 1, 2], vec![3, 1, 1, 4, 2, 1]]);
    }

    #[test]
    fn acr_network() {
        let pair = regions_for(&net("A <-> A + B ; k1 k2\n2B -> 3B ; k3\nA <-> 2A ; k5 k6")).unwrap();
        assert_eq!(texts(&pair.allowing), vec![vec!["-4*k1*k3*k6 + k2^2*k5 > 0"]]);
        assert!(pair.allowing.contains(&[q(1), q(4), q(1), q(4), q(1)]).unwrap());
        assert!(!pair.allowing.contains(&[q(1), q(1), q(1), q(1), q(1)]).unwrap());
        assert!(pair.allowing.pieces[0].witness.is_some());
    }

    #[test]
    fn degenerate_case_two() {
        let pair = regions_for(&net("A + B -> 2A + 2B\nA + B -> 0")).unwrap();
        assert_eq!(pair.enabling.family, Family::TwoSpeciesDegenerate(2));
        assert!(pair.enabling.pieces[0].witness.is_some());
        assert_eq!(pair.enabling.connectivity.value, ConnectivityValue::Connected);
    }

    #[test]
    fn tangency_at_cutoff() {
        let n = net("2A + B -> 3A\nA -> B");
        let geo = TwoSpeciesGeometry::new(&n).unwrap();
        let cut = cutoff_c_star(&n).unwrap();
        for (k, kt) in [(1.0, 1.0), (0.3, 2.5), (7.0, 0.2)] {
            let t = geo.t_star(k, kt);
            let e = cut.eval(k, kt) / geo.tau().to_f64_lossy();
            assert!((geo.psi(t, k, kt) - e).abs() < 1e-9 * e.abs().max(1.0));
            assert!(geo.psi_prime(t, k, kt).abs() < 1e-9);
        }
    }
}

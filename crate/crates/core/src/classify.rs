//! Combinatorial multistationarity tests for one-species networks with at
//! most three reactions and two-species networks with two reactions.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::network::ReactionNetwork;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotMultiReason {
    /// One or two reactions in one species.
    TooFewReactions,
    /// Three reactions whose reactants are not strictly increasing.
    RepeatedReactant,
    /// Three distinct reactants without an alternating direction pattern.
    SignPattern,
    /// The two reaction vectors are not negative multiples of each other.
    NotAntiparallel,
    /// Antiparallel, but no zigzag and none of the degenerate shapes.
    NoZigzag,
    /// A single reaction never balances.
    SingleReaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchedCase {
    /// `m1 < p1, m2 > p2, m3 < p3`.
    OneSpeciesA,
    /// `m1 > p1, m2 < p2, m3 > p3`.
    OneSpeciesB,
    TwoSpeciesZigzag { form: u8 },
    Degenerate { case: u8 },
    NotMulti { reason: NotMultiReason },
    Unsupported { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationVerdict {
    pub multistationary: bool,
    pub nondegenerate: bool,
    pub matched_case: MatchedCase,
}

impl ClassificationVerdict {
    fn multi(case: MatchedCase, nondegenerate: bool) -> Self {
        Self { multistationary: true, nondegenerate, matched_case: case }
    }

    fn not_multi(reason: NotMultiReason) -> Self {
        Self { multistationary: false, nondegenerate: false, matched_case: MatchedCase::NotMulti { reason } }
    }

    pub fn unsupported(reason: impl Into<String>) -> Self {
        Self {
            multistationary: false,
            nondegenerate: false,
            matched_case: MatchedCase::Unsupported { reason: reason.into() },
        }
    }

    pub fn is_supported(&self) -> bool {
        !matches!(self.matched_case, MatchedCase::Unsupported { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("expected {expected_species} species and {expected_reactions} reactions, got {species} and {reactions}")]
    Shape { expected_species: usize, expected_reactions: String, species: usize, reactions: usize },
}

/// Reactions `m_i A -> p_i A` sorted by reactant coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSpeciesProfile {
    /// `(m_i, p_i, original reaction index)`.
    pub reactions: Vec<(u32, u32, usize)>,
}

impl OneSpeciesProfile {
    pub fn new(net: &ReactionNetwork) -> Self {
        let mut reactions: Vec<_> = net
            .reactions
            .iter()
            .enumerate()
            .map(|(i, r)| (r.reactant.coeffs[0], r.product.coeffs[0], i))
            .collect();
        reactions.sort_by_key(|&(m, p, _)| (m, p));
        Self { reactions }
    }

    /// `l_i = |p_i - m_i|`.
    pub fn steps(&self) -> Vec<u32> {
        self.reactions.iter().map(|&(m, p, _)| m.abs_diff(p)).collect()
    }
}

pub fn classify_one_species(net: &ReactionNetwork) -> Result<ClassificationVerdict, ClassifyError> {
    let r = net.n_reactions();
    if net.n_species() != 1 || !(1..=3).contains(&r) {
        return Err(ClassifyError::Shape {
            expected_species: 1,
            expected_reactions: "1 to 3".into(),
            species: net.n_species(),
            reactions: r,
        });
    }
    if r < 3 {
        return Ok(ClassificationVerdict::not_multi(NotMultiReason::TooFewReactions));
    }
    let prof = OneSpeciesProfile::new(net);
    let [(m1, p1, _), (m2, p2, _), (m3, p3, _)] = prof.reactions[..] else {
        unreachable!("three reactions");
    };
    if !(m1 < m2 && m2 < m3) {
        return Ok(ClassificationVerdict::not_multi(NotMultiReason::RepeatedReactant));
    }
    Ok(if m1 < p1 && m2 > p2 && m3 < p3 {
        ClassificationVerdict::multi(MatchedCase::OneSpeciesA, true)
    } else if m1 > p1 && m2 < p2 && m3 > p3 {
        ClassificationVerdict::multi(MatchedCase::OneSpeciesB, true)
    } else {
        ClassificationVerdict::not_multi(NotMultiReason::SignPattern)
    })
}

/// Data of a two-species, two-reaction network `y -> y'`, `ỹ -> ỹ'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDiagram {
    pub y: [i64; 2],
    pub y_prime: [i64; 2],
    pub y_tilde: [i64; 2],
    pub y_tilde_prime: [i64; 2],
    /// Slope of the first reaction vector; `None` when it is vertical.
    #[serde(serialize_with = "opt_rat")]
    pub gamma: Option<Rational>,
    /// Slope of the reactant polytope; `None` when the reactants share `x1`.
    #[serde(serialize_with = "opt_rat")]
    pub alpha: Option<Rational>,
    /// `y' - y = -λ (ỹ' - ỹ)` with `λ > 0`, when the vectors are antiparallel.
    #[serde(serialize_with = "opt_rat")]
    pub lambda: Option<Rational>,
    pub zigzag_form: Option<u8>,
}

fn opt_rat<S: serde::Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

fn ratio(num: i64, den: i64) -> Option<Rational> {
    (den != 0).then(|| Rational::new(num.into(), den.into()))
}

impl BoxDiagram {
    pub fn v(&self) -> [i64; 2] {
        [self.y_prime[0] - self.y[0], self.y_prime[1] - self.y[1]]
    }

    pub fn v_tilde(&self) -> [i64; 2] {
        [self.y_tilde_prime[0] - self.y_tilde[0], self.y_tilde_prime[1] - self.y_tilde[1]]
    }

    /// `ỹ - y`.
    pub fn delta(&self) -> [i64; 2] {
        [self.y_tilde[0] - self.y[0], self.y_tilde[1] - self.y[1]]
    }

    pub fn reactants_differ_in_both(&self) -> bool {
        let d = self.delta();
        d[0] != 0 && d[1] != 0
    }
}

pub fn build_box_diagram(net: &ReactionNetwork) -> Result<BoxDiagram, ClassifyError> {
    if net.n_species() != 2 || net.n_reactions() != 2 {
        return Err(ClassifyError::Shape {
            expected_species: 2,
            expected_reactions: "2".into(),
            species: net.n_species(),
            reactions: net.n_reactions(),
        });
    }
    let pt = |c: &[u32]| [c[0] as i64, c[1] as i64];
    let (r0, r1) = (&net.reactions[0], &net.reactions[1]);
    let y = pt(&r0.reactant.coeffs);
    let y_prime = pt(&r0.product.coeffs);
    let y_tilde = pt(&r1.reactant.coeffs);
    let y_tilde_prime = pt(&r1.product.coeffs);
    let v = [y_prime[0] - y[0], y_prime[1] - y[1]];
    let vt = [y_tilde_prime[0] - y_tilde[0], y_tilde_prime[1] - y_tilde[1]];
    let cross = v[0] * vt[1] - v[1] * vt[0];
    let dot = v[0] * vt[0] + v[1] * vt[1];
    let lambda = (cross == 0 && dot < 0).then(|| Rational::new((-dot).into(), (vt[0] * vt[0] + vt[1] * vt[1]).into()));
    let gamma = ratio(v[1], v[0]);
    let alpha = ratio(y_tilde[1] - y[1], y_tilde[0] - y[0]);
    let mut diagram = BoxDiagram { y, y_prime, y_tilde, y_tilde_prime, gamma, alpha, lambda, zigzag_form: None };
    diagram.zigzag_form = zigzag_form(&diagram);
    Ok(diagram)
}

/// The zigzag pattern, read off from the sign of the slope `α` and the
/// direction of the reaction leaving the left corner of the box.
fn zigzag_form(b: &BoxDiagram) -> Option<u8> {
    b.lambda.as_ref()?;
    if !b.reactants_differ_in_both() {
        return None;
    }
    let (gamma, alpha) = (b.gamma.as_ref()?, b.alpha.as_ref()?);
    if gamma.is_zero() || !(gamma * alpha).is_negative() {
        return None;
    }
    let v_left = if b.y[0] < b.y_tilde[0] { b.v() } else { b.v_tilde() };
    let s = (v_left[0].signum(), v_left[1].signum());
    match (alpha.is_negative(), s) {
        (true, (1, 1)) => Some(1),
        (true, (-1, -1)) => Some(2),
        (false, (-1, 1)) => Some(3),
        (false, (1, -1)) => Some(4),
        _ => None,
    }
}

pub fn classify_two_species(net: &ReactionNetwork) -> Result<ClassificationVerdict, ClassifyError> {
    let b = build_box_diagram(net)?;
    Ok(classify_box(&b))
}

pub fn classify_box(b: &BoxDiagram) -> ClassificationVerdict {
    if b.lambda.is_none() {
        return ClassificationVerdict::not_multi(NotMultiReason::NotAntiparallel);
    }
    let (v, d) = (b.v(), b.delta());
    if b.y == b.y_tilde {
        return ClassificationVerdict::multi(MatchedCase::Degenerate { case: 2 }, false);
    }
    if v[0] == 0 && d[1] == 0 {
        return ClassificationVerdict::multi(MatchedCase::Degenerate { case: 3 }, false);
    }
    if d[0] == 0 && v[1] == 0 {
        return ClassificationVerdict::multi(MatchedCase::Degenerate { case: 4 }, false);
    }
    match b.zigzag_form {
        Some(_) if b.alpha == Some(Rational::from_integer((-1).into())) => {
            ClassificationVerdict::multi(MatchedCase::Degenerate { case: 1 }, false)
        }
        Some(form) => ClassificationVerdict::multi(MatchedCase::TwoSpeciesZigzag { form }, true),
        None => ClassificationVerdict::not_multi(NotMultiReason::NoZigzag),
    }
}

/// Dispatches to the covered families; anything else is reported as
/// unsupported.
pub fn classify(net: &ReactionNetwork) -> ClassificationVerdict {
    let (n, r) = (net.n_species(), net.n_reactions());
    match (n, r) {
        (1, 1..=3) => classify_one_species(net).expect("shape checked"),
        (1, _) => ClassificationVerdict::unsupported("one species with more than three reactions"),
        (2, 1) => ClassificationVerdict::not_multi(NotMultiReason::SingleReaction),
        (2, 2) => classify_two_species(net).expect("shape checked"),
        _ => ClassificationVerdict::unsupported(format!("{n} species and {r} reactions")),
    }
}

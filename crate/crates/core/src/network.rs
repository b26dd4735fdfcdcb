//! Reaction networks: the text format, the canonical printer, and the
//! stoichiometric structure (reaction vectors, conservation laws).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::Rational;

const MAX_COEFF: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Complex {
    pub coeffs: Vec<u32>,
}

impl Complex {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn write_with(&self, names: &[String], f: &mut impl fmt::Write) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *c == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{c}{name}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reaction {
    pub reactant: Complex,
    pub product: Complex,
    pub rate_label: String,
}

impl Reaction {
    /// `y' - y`.
    pub fn vector(&self) -> Vec<i64> {
        self.product
            .coeffs
            .iter()
            .zip(&self.reactant.coeffs)
            .map(|(&p, &r)| p as i64 - r as i64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReactionNetwork {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("negative stoichiometric coefficient")]
    NegativeCoefficient,
    #[error("stoichiometric coefficients must be integers")]
    NonIntegerCoefficient,
    #[error("zero coefficient; write the zero complex as 0")]
    ZeroCoefficient,
    #[error("stoichiometric coefficient exceeds 2^31 - 1")]
    CoefficientTooLarge,
    #[error("reactant equals product")]
    TrivialReaction,
    #[error("duplicate reaction")]
    DuplicateReaction,
    #[error("duplicate rate label `{0}`")]
    DuplicateLabel(String),
    #[error("statement has {reactions} reactions but {labels} labels")]
    LabelCount { reactions: usize, labels: usize },
    #[error("network has no reactions")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("complex has {found} entries, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("reaction {0} has equal reactant and product")]
    TrivialReaction(usize),
    #[error("reaction {0} repeats an earlier reaction")]
    DuplicateReaction(usize),
    #[error("rate label `{0}` is used twice")]
    DuplicateLabel(String),
    #[error("species `{0}` never occurs")]
    UnusedSpecies(String),
    #[error("network has no reactions")]
    Empty,
}

/// Row-reduced basis of the orthogonal complement of the stoichiometric
/// subspace. Zero rows for full-dimensional networks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationMatrix {
    pub rows: Matrix<Rational>,
}

impl ConservationMatrix {
    pub fn d(&self) -> usize {
        self.rows.nrows()
    }

    pub fn n(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        self.rows.row(i)
    }

    /// `W x`.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows.mul_vec(x)
    }
}

impl ReactionNetwork {
    /// Validating constructor for programmatic networks.
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, NetworkError> {
        if reactions.is_empty() {
            return Err(NetworkError::Empty);
        }
        let n = species.len();
        let mut seen = HashSet::new();
        let mut labels = HashSet::new();
        for (i, r) in reactions.iter().enumerate() {
            for c in [&r.reactant, &r.product] {
                if c.coeffs.len() != n {
                    return Err(NetworkError::Arity { expected: n, found: c.coeffs.len() });
                }
            }
            if r.reactant == r.product {
                return Err(NetworkError::TrivialReaction(i));
            }
            if !seen.insert((r.reactant.clone(), r.product.clone())) {
                return Err(NetworkError::DuplicateReaction(i));
            }
            if !labels.insert(r.rate_label.clone()) {
                return Err(NetworkError::DuplicateLabel(r.rate_label.clone()));
            }
        }
        for (j, s) in species.iter().enumerate() {
            if reactions.iter().all(|r| r.reactant.coeffs[j] == 0 && r.product.coeffs[j] == 0) {
                return Err(NetworkError::UnusedSpecies(s.clone()));
            }
        }
        Ok(Self { species, reactions })
    }

    /// Builds a network from `(reactant, product)` coefficient pairs with
    /// species `A, B, C, ...` and labels `k1, k2, ...`.
    pub fn from_pairs(n_species: usize, pairs: &[(Vec<u32>, Vec<u32>)]) -> Result<Self, NetworkError> {
        let species = (0..n_species).map(|j| ((b'A' + j as u8) as char).to_string()).collect();
        let reactions = pairs
            .iter()
            .enumerate()
            .map(|(i, (y, yp))| Reaction {
                reactant: Complex::new(y.clone()),
                product: Complex::new(yp.clone()),
                rate_label: format!("k{}", i + 1),
            })
            .collect();
        Self::new(species, reactions)
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn rate_labels(&self) -> Vec<String> {
        self.reactions.iter().map(|r| r.rate_label.clone()).collect()
    }

    /// `n x r` matrix whose column `i` is `y_i' - y_i`.
    pub fn stoichiometric_matrix<T: Scalar>(&self) -> Matrix<T> {
        let vs: Vec<Vec<i64>> = self.reactions.iter().map(Reaction::vector).collect();
        Matrix::from_fn(self.n_species(), self.n_reactions(), |j, i| T::from_i64(vs[i][j]).expect("small integer"))
    }

    pub fn stoichiometric_rank(&self) -> usize {
        self.stoichiometric_matrix::<Rational>().rank()
    }

    /// Basis of the stoichiometric subspace (pivot columns of the
    /// stoichiometric matrix).
    pub fn stoichiometric_basis(&self) -> Vec<Vec<Rational>> {
        let m = self.stoichiometric_matrix::<Rational>();
        let (_, pivots) = m.rref();
        pivots.iter().map(|&c| (0..m.nrows()).map(|j| m[(j, c)].clone()).collect()).collect()
    }

    /// Left null space of the stoichiometric matrix in reduced row echelon
    /// form.
    pub fn conservation_matrix(&self) -> ConservationMatrix {
        let n = self.n_species();
        let basis = self.stoichiometric_matrix::<Rational>().transpose().kernel();
        let rows = Matrix::from_rows(n, basis).rref().0;
        let keep: Vec<Vec<Rational>> = rows.to_rows().into_iter().filter(|r| !crate::linalg::is_zero_vec(r)).collect();
        ConservationMatrix { rows: Matrix::from_rows(n, keep) }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.stoichiometric_rank() == self.n_species()
    }

    /// One reaction per line, `reactant -> product ; label`.
    pub fn to_canonical_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reactions {
            r.reactant.write_with(&self.species, f)?;
            f.write_str(" -> ")?;
            r.product.write_with(&self.species, f)?;
            writeln!(f, " ; {}", r.rate_label)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// parser

type Terms = Vec<(String, u32)>;

struct RawReaction {
    reactant: Terms,
    product: Terms,
    label: Option<String>,
    line: usize,
    col: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Arrow {
    Forward,
    Backward,
    Both,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, at: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col: self.col0 + self.text[..at].chars().count() + 1, kind }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn arrow(&mut self) -> Option<Arrow> {
        self.skip_ws();
        if self.eat("<->") {
            Some(Arrow::Both)
        } else if self.eat("->") {
            Some(Arrow::Forward)
        } else if self.eat("<-") {
            Some(Arrow::Backward)
        } else {
            None
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        let mut chars = self.text[self.pos..].char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let mut end = self.text.len();
        for (i, c) in chars {
            if !(c.is_ascii_alphanumeric() || c == '_') {
                end = self.pos + i;
                break;
            }
        }
        self.pos = end;
        Some(self.text[start..end].to_string())
    }

    fn complex(&mut self) -> Result<Terms, ParseError> {
        self.skip_ws();
        let start = self.pos;
        // the zero complex: a lone `0` not followed by a species name
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            let digits_follow = matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.');
            self.skip_ws();
            let ident_follows = matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_');
            if !digits_follow && !ident_follows {
                return Ok(Vec::new());
            }
            self.pos = save;
        }
        let mut terms: Terms = Vec::new();
        loop {
            let (name, coeff) = self.term()?;
            match terms.iter_mut().find(|(s, _)| *s == name) {
                Some((_, c)) => {
                    let sum = *c as u64 + coeff as u64;
                    if sum > MAX_COEFF {
                        return Err(self.err(start, ParseErrorKind::CoefficientTooLarge));
                    }
                    *c = sum as u32;
                }
                None => terms.push((name, coeff)),
            }
            self.skip_ws();
            if !self.eat("+") {
                return Ok(terms);
            }
        }
    }

    fn term(&mut self) -> Result<(String, u32), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') && !self.text[self.pos..].starts_with("->") {
            return Err(self.err(start, ParseErrorKind::NegativeCoefficient));
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits = &self.text[digits_start..self.pos];
        if self.peek() == Some('.') || self.peek() == Some('/') {
            return Err(self.err(start, ParseErrorKind::NonIntegerCoefficient));
        }
        let coeff = if digits.is_empty() {
            1
        } else {
            match digits.parse::<u64>() {
                Ok(0) => return Err(self.err(start, ParseErrorKind::ZeroCoefficient)),
                Ok(v) if v <= MAX_COEFF => v as u32,
                _ => return Err(self.err(start, ParseErrorKind::CoefficientTooLarge)),
            }
        };
        self.skip_ws();
        let Some(name) = self.ident() else {
            let at = self.pos;
            return Err(self.err(at, ParseErrorKind::Syntax("expected a species name".into())));
        };
        Ok((name, coeff))
    }
}

fn parse_statement(
    text: &str,
    line: usize,
    col0: usize,
    out: &mut Vec<RawReaction>,
) -> Result<(), ParseError> {
    let (body, labels_text) = match text.find(';') {
        Some(i) => (&text[..i], Some(&text[i + 1..])),
        None => (text, None),
    };
    let mut cur = Cursor { text: body, pos: 0, line, col0 };
    if cur.at_end() {
        let kind = ParseErrorKind::Syntax("empty statement".into());
        return Err(ParseError { line, col: col0 + 1, kind });
    }
    let stmt_start = cur.pos;
    let mut complexes = vec![cur.complex()?];
    let mut arrows = Vec::new();
    while !cur.at_end() {
        let at = cur.pos;
        let Some(a) = cur.arrow() else {
            return Err(cur.err(at, ParseErrorKind::Syntax("expected `->`, `<-` or `<->`".into())));
        };
        arrows.push(a);
        if cur.at_end() {
            let at = cur.pos;
            return Err(cur.err(at, ParseErrorKind::Syntax("missing complex after arrow".into())));
        }
        complexes.push(cur.complex()?);
    }
    if arrows.is_empty() {
        return Err(cur.err(stmt_start, ParseErrorKind::Syntax("expected an arrow".into())));
    }
    let col = col0 + body[..stmt_start].chars().count() + 1;
    let mut pairs = Vec::new();
    for (i, a) in arrows.iter().enumerate() {
        let (l, r) = (&complexes[i], &complexes[i + 1]);
        match a {
            Arrow::Forward => pairs.push((l.clone(), r.clone())),
            Arrow::Backward => pairs.push((r.clone(), l.clone())),
            Arrow::Both => {
                pairs.push((l.clone(), r.clone()));
                pairs.push((r.clone(), l.clone()));
            }
        }
    }
    let labels: Vec<String> = match labels_text {
        Some(t) => {
            let mut v = Vec::new();
            let mut lc = Cursor { text: t, pos: 0, line, col0: col0 + body.chars().count() + 1 };
            while !lc.at_end() {
                let at = lc.pos;
                match lc.ident() {
                    Some(s) => v.push(s),
                    None => return Err(lc.err(at, ParseErrorKind::Syntax("bad rate label".into()))),
                }
            }
            v
        }
        None => Vec::new(),
    };
    let labels: Vec<Option<String>> = if labels.is_empty() {
        vec![None; pairs.len()]
    } else if labels.len() == pairs.len() {
        labels.into_iter().map(Some).collect()
    } else if labels.len() == 1 && arrows == [Arrow::Both] {
        vec![Some(format!("{}_f", labels[0])), Some(format!("{}_r", labels[0]))]
    } else {
        let kind = ParseErrorKind::LabelCount { reactions: pairs.len(), labels: labels.len() };
        return Err(ParseError { line, col, kind });
    };
    for ((reactant, product), label) in pairs.into_iter().zip(labels) {
        out.push(RawReaction { reactant, product, label, line, col });
    }
    Ok(())
}

/// Parses the network text format: statements separated by newlines or
/// commas, `#` comments, arrows `->`, `<-`, `<->` (chains allowed), and an
/// optional `; label ...` suffix per statement.
pub fn parse_network(text: &str) -> Result<ReactionNetwork, ParseError> {
    let mut raw = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let code = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut offset = 0;
        for piece in code.split(',') {
            let col0 = code[..offset].chars().count();
            if !piece.trim().is_empty() {
                parse_statement(piece, line_no, col0, &mut raw)?;
            } else if code.contains(',') {
                let kind = ParseErrorKind::Syntax("empty statement".into());
                return Err(ParseError { line: line_no, col: col0 + 1, kind });
            }
            offset += piece.len() + 1;
        }
    }
    if raw.is_empty() {
        return Err(ParseError { line: 1, col: 1, kind: ParseErrorKind::Empty });
    }
    // species by first appearance in reaction order, reactant before product
    let mut species: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for r in &raw {
        for (name, _) in r.reactant.iter().chain(&r.product) {
            if !index.contains_key(name) {
                index.insert(name.clone(), species.len());
                species.push(name.clone());
            }
        }
    }
    let n = species.len();
    let to_complex = |terms: &Terms| {
        let mut c = vec![0u32; n];
        for (name, k) in terms {
            c[index[name]] = *k;
        }
        Complex::new(c)
    };
    let mut reactions = Vec::with_capacity(raw.len());
    let mut seen = HashSet::new();
    let mut labels = HashSet::new();
    for (i, r) in raw.iter().enumerate() {
        let err = |kind| ParseError { line: r.line, col: r.col, kind };
        let reactant = to_complex(&r.reactant);
        let product = to_complex(&r.product);
        if reactant == product {
            return Err(err(ParseErrorKind::TrivialReaction));
        }
        if !seen.insert((reactant.clone(), product.clone())) {
            return Err(err(ParseErrorKind::DuplicateReaction));
        }
        let label = r.label.clone().unwrap_or_else(|| format!("k{}", i + 1));
        if !labels.insert(label.clone()) {
            return Err(err(ParseErrorKind::DuplicateLabel(label)));
        }
        reactions.push(Reaction { reactant, product, rate_label: label });
    }
    Ok(ReactionNetwork { species, reactions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn running_example() {
        let net = parse_network("2A + B -> 3A\nA -> B").unwrap();
        assert_eq!(net.species, vec!["A", "B"]);
        assert_eq!(net.reactions[0].reactant.coeffs, vec![2, 1]);
        assert_eq!(net.reactions[0].product.coeffs, vec![3, 0]);
        assert_eq!(net.reactions[1].vector(), vec![-1, 1]);
        assert_eq!(net.rate_labels(), vec!["k1", "k2"]);
        let s = net.stoichiometric_matrix::<Rational>();
        assert_eq!(s.to_rows(), vec![vec![q(1), q(-1)], vec![q(-1), q(1)]]);
        let w = net.conservation_matrix();
        assert_eq!(w.rows.to_rows(), vec![vec![q(1), q(1)]]);
        assert!(!net.is_full_dimensional());
    }

    #[test]
    fn chains_and_sugar() {
        let net = parse_network("0 <- A, 2A -> 3A <- 4A").unwrap();
        let pairs: Vec<_> = net.reactions.iter().map(|r| (r.reactant.coeffs[0], r.product.coeffs[0])).collect();
        assert_eq!(pairs, vec![(1, 0), (2, 3), (4, 3)]);
        let rev = parse_network("A <-> 2A ; k").unwrap();
        assert_eq!(rev.rate_labels(), vec!["k_f", "k_r"]);
        let two = parse_network("A <-> 2A ; a b").unwrap();
        assert_eq!(two.rate_labels(), vec!["a", "b"]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_network("A -> A").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::TrivialReaction);
        let e = parse_network("A -> B\n  -2A -> B").unwrap_err();
        assert_eq!((e.line, e.col, e.kind), (2, 3, ParseErrorKind::NegativeCoefficient));
        let e = parse_network("1.5A -> B").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerCoefficient);
        let e = parse_network("A -> B, A -> B").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateReaction);
        let e = parse_network("A -> B ; x, B -> A ; x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateLabel("x".into()));
        let e = parse_network("A B -> C").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(parse_network("# nothing\n").unwrap_err().kind, ParseErrorKind::Empty);
    }

    #[test]
    fn one_species_and_six_reactions() {
        let net = parse_network("A -> 2A").unwrap();
        assert!(net.is_full_dimensional());
        assert_eq!(net.conservation_matrix().d(), 0);
        let six = parse_network(
            "A -> 0 ; k1L\nA -> 2A ; k1R\n2A -> A ; k2L\n2A -> 3A ; k2R\n3A -> 2A ; k3L\n3A -> 4A ; k3R",
        )
        .unwrap();
        let s = six.stoichiometric_matrix::<Rational>();
        assert_eq!(s.row(0), &[q(-1), q(1), q(-1), q(1), q(-1), q(1)]);
    }

    #[test]
    fn full_dimensional_two_species() {
        let net = parse_network("A <-> A + B ; k1 k2\n2B -> 3B ; k3\nA <-> 2A ; k5 k6").unwrap();
        assert!(net.is_full_dimensional());
        assert_eq!(net.conservation_matrix().d(), 0);
    }

    #[test]
    fn printer_round_trips() {
        for text in ["2A + B -> 3A\nA -> B", "0 <- A, 2A -> 3A <- 4A", "B <- A + C ; q, C -> 0 ; r"] {
            let net = parse_network(text).unwrap();
            let again = parse_network(&net.to_string()).unwrap();
            assert_eq!(again, net);
        }
    }
}

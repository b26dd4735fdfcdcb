//! End-to-end analysis of a network: classification, regions, connectivity
//! verdicts, witnesses and a seeded region-versus-oracle cross-check.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, ClassificationVerdict};
use crate::connectivity::{probe, ProbeConfig, ProbeReport};
use crate::massaction::{count_positive_steady_states, count_positive_steady_states_only, steady_state_system, OracleError, SteadyStateCount, Witness};
use crate::network::ReactionNetwork;
use crate::regions::{regions_for, ConnectivityVerdict, Region, RegionError, RegionKind, RegionPair};
use crate::serde_util;
use crate::Rational;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub n: usize,
    pub r: usize,
    pub dim_s: usize,
    pub d: usize,
}

pub fn dimensions(net: &ReactionNetwork) -> Dimensions {
    let dim_s = net.stoichiometric_rank();
    Dimensions { n: net.n_species(), r: net.n_reactions(), dim_s, d: net.n_species() - dim_s }
}

/// Oracle output at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    #[serde(serialize_with = "serde_util::rationals")]
    pub rates: Vec<Rational>,
    #[serde(serialize_with = "serde_util::rationals")]
    pub totals: Vec<Rational>,
    pub count: SteadyStateCount,
    pub steady_states: Vec<Witness>,
    pub certified: bool,
}

pub fn oracle_at(net: &ReactionNetwork, rates: &[Rational], totals: &[Rational]) -> Result<WitnessReport, OracleError> {
    let sys = steady_state_system(net);
    let res = count_positive_steady_states(&sys, rates, totals)?;
    Ok(WitnessReport {
        rates: rates.to_vec(),
        totals: totals.to_vec(),
        count: res.count,
        steady_states: res.witnesses,
        certified: res.certified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    #[serde(serialize_with = "serde_util::rationals")]
    pub point: Vec<Rational>,
    pub member: bool,
    pub count: SteadyStateCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub checked: usize,
    pub members: usize,
    pub rejected_near_boundary: usize,
    pub uncertified: usize,
    pub disagreements: Vec<Disagreement>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Rounds to the grid `k / 2^24`.
fn quantize(x: f64) -> Rational {
    let scale = (1u64 << 24) as f64;
    Rational::new(BigInt::from((x * scale).round() as i64), BigInt::from(1u64 << 24))
}

/// How [`sweep_with`] draws the total constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalsSampling {
    /// Uniform in `[-2^hi, 2^hi]`.
    Symmetric,
    /// Log-uniform in `[2^lo, 2^hi]`, like the rates.
    LogUniform,
}

/// [`sweep_with`] using [`TotalsSampling::Symmetric`].
pub fn sweep(net: &ReactionNetwork, enabling: &Region, n: usize, seed: u64, lo: f64, hi: f64) -> SweepReport {
    sweep_with(net, enabling, n, seed, lo, hi, TotalsSampling::Symmetric)
}

/// Compares enabling-region membership with `oracle count >= 2` on `n`
/// seeded points: rates log-uniform in `[2^lo, 2^hi]`, totals drawn per
/// `totals`, both rounded to denominators `2^24`. Points where some
/// condition is within relative `1e-6` of zero are redrawn.
pub fn sweep_with(
    net: &ReactionNetwork,
    enabling: &Region,
    n: usize,
    seed: u64,
    lo: f64,
    hi: f64,
    totals: TotalsSampling,
) -> SweepReport {
    let sys = steady_state_system(net);
    let r = net.n_reactions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SweepReport { seed, checked: 0, members: 0, rejected_near_boundary: 0, uncertified: 0, disagreements: vec![] };
    let mut attempts = 0;
    while rep.checked < n && attempts < 100 * n {
        attempts += 1;
        let point: Vec<Rational> = (0..enabling.dim())
            .map(|i| {
                if i < r || totals == TotalsSampling::LogUniform {
                    quantize(2f64.powf(rng.gen_range(lo..=hi)))
                } else {
                    quantize(rng.gen_range(-(2f64.powf(hi))..=2f64.powf(hi)))
                }
            })
            .collect();
        let pf: Vec<f64> = point.iter().map(crate::Scalar::to_f64_lossy).collect();
        if enabling.relative_boundary_distance(&pf) < 1e-6 {
            rep.rejected_near_boundary += 1;
            continue;
        }
        let member = enabling.contains(&point).expect("dimension matches");
        let Ok(res) = count_positive_steady_states_only(&sys, &point[..r], &point[r..]) else {
            continue;
        };
        rep.checked += 1;
        rep.members += usize::from(member);
        rep.uncertified += usize::from(!res.certified);
        if member != res.count.at_least_two() {
            rep.disagreements.push(Disagreement { point, member, count: res.count });
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivitySummary {
    pub allowing: ConnectivityVerdict,
    pub enabling: ConnectivityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub network: String,
    pub species: Vec<String>,
    pub rate_labels: Vec<String>,
    pub dimensions: Dimensions,
    pub classification: ClassificationVerdict,
    pub multistationary: Option<bool>,
    pub regions: Option<RegionPair>,
    pub connectivity: Option<ConnectivitySummary>,
    pub probe: Option<ProbeReport>,
    pub witnesses: Vec<WitnessReport>,
    pub self_check: Option<SweepReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub verify: bool,
    pub self_check_samples: usize,
    /// `(lo, hi, n_samples)` for an optional probe of the enabling region.
    pub probe: Option<(f64, f64, usize)>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { seed: 42, verify: true, self_check_samples: 100, probe: None }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unsupported network: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {detail}")]
    Inconsistency { detail: String, report: Box<AnalysisReport> },
}

impl From<RegionError> for AnalysisError {
    fn from(e: RegionError) -> Self {
        AnalysisError::Unsupported(e.to_string())
    }
}

/// Witnesses recorded in the region pieces, re-run through the oracle.
pub fn region_witnesses(net: &ReactionNetwork, region: &Region) -> Vec<WitnessReport> {
    let r = net.n_reactions();
    region
        .pieces
        .iter()
        .filter_map(|p| p.witness.as_ref())
        .filter_map(|w| oracle_at(net, &w[..r], &w[r..]).ok())
        .collect()
}

/// A point with at least two steady states: a recorded piece witness when
/// there is one, otherwise a seeded search guided by region membership.
pub fn find_witness(net: &ReactionNetwork, seed: u64) -> Result<Option<WitnessReport>, AnalysisError> {
    let pair = regions_for(net)?;
    if let Some(w) = region_witnesses(net, &pair.enabling).into_iter().find(|w| w.count.at_least_two()) {
        return Ok(Some(w));
    }
    let region = &pair.enabling;
    if region.pieces.is_empty() {
        return Ok(None);
    }
    let r = net.n_reactions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20_000 {
        let point: Vec<Rational> = (0..region.dim())
            .map(|i| if i < r { quantize(2f64.powf(rng.gen_range(-6.0..=6.0))) } else { quantize(rng.gen_range(-64.0..=64.0)) })
            .collect();
        if region.contains(&point).unwrap_or(false) {
            if let Ok(w) = oracle_at(net, &point[..r], &point[r..]) {
                if w.count.at_least_two() {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

pub fn analyze(net: &ReactionNetwork, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalysisError> {
    let classification = classify(net);
    let pair = match regions_for(net) {
        Ok(p) => Some(p),
        Err(RegionError::Unsupported(msg)) if !classification.is_supported() => return Err(AnalysisError::Unsupported(msg)),
        Err(e) => return Err(e.into()),
    };
    let regions_nonempty = pair.as_ref().map(|p| !p.enabling.pieces.is_empty());
    let multistationary = if classification.is_supported() { Some(classification.multistationary) } else { regions_nonempty };
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        network: net.to_string(),
        species: net.species.clone(),
        rate_labels: net.rate_labels(),
        dimensions: dimensions(net),
        classification,
        multistationary,
        connectivity: pair.as_ref().map(|p| ConnectivitySummary {
            allowing: p.allowing.connectivity.clone(),
            enabling: p.enabling.connectivity.clone(),
        }),
        witnesses: pair.as_ref().map(|p| region_witnesses(net, &p.enabling)).unwrap_or_default(),
        regions: pair,
        probe: None,
        self_check: None,
    };
    if let (Some((lo, hi, n)), Some(pair)) = (opts.probe, &report.regions) {
        let cfg = ProbeConfig::for_region(&pair.enabling, lo, hi, n, opts.seed);
        report.probe = probe(&pair.enabling, &cfg).ok();
    }
    let mut problems = Vec::new();
    if report.classification.is_supported() && regions_nonempty != Some(report.classification.multistationary) {
        problems.push("classification and region disagree on multistationarity".to_string());
    }
    if report.witnesses.iter().any(|w| !w.count.at_least_two()) {
        problems.push("a region witness has fewer than two steady states".to_string());
    }
    if opts.verify {
        if let Some(pair) = &report.regions {
            let sw = sweep(net, &pair.enabling, opts.self_check_samples, opts.seed, -6.0, 6.0);
            if !sw.ok() {
                problems.push(format!("{} region/oracle disagreements in the self-check", sw.disagreements.len()));
            }
            report.self_check = Some(sw);
        }
    }
    if problems.is_empty() {
        Ok(report)
    } else {
        Err(AnalysisError::Inconsistency { detail: problems.join("; "), report: Box::new(report) })
    }
}

impl AnalysisReport {
    pub fn region(&self, kind: RegionKind) -> Option<&Region> {
        self.regions.as_ref().map(|p| p.get(kind))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.dimensions;
        out.push_str(&format!("network ({} species, {} reactions, dim S = {}, d = {}):\n", d.n, d.r, d.dim_s, d.d));
        for line in self.network.lines() {
            out.push_str(&format!("  {line}\n"));
        }
        let ms = match self.multistationary {
            Some(true) => "true",
            Some(false) => "false",
            None => "unknown",
        };
        out.push_str(&format!("multistationary: {ms}\n"));
        out.push_str(&format!("case: {}\n", serde_json::to_string(&self.classification.matched_case).unwrap_or_default()));
        if let Some(pair) = &self.regions {
            for (name, region) in [("allowing", &pair.allowing), ("enabling", &pair.enabling)] {
                out.push_str(&format!("{name} region [{}] ({}):\n", region.ambient.join(", "), region.case_tag()));
                out.push_str(&region_text(region));
                out.push_str(&format!(
                    "  connectivity: {:?} ({:?})\n",
                    region.connectivity.value, region.connectivity.justification
                ));
            }
            if let Some(c) = &pair.enabling.cutoff {
                out.push_str(&format!("cutoff c* = {}\n", c.display()));
            }
        }
        for w in &self.witnesses {
            let pt: Vec<String> = w.rates.iter().chain(&w.totals).map(ToString::to_string).collect();
            let xs: Vec<String> = w
                .steady_states
                .iter()
                .map(|s| format!("({})", s.x.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
                .collect();
            out.push_str(&format!("witness ({}): {:?} steady states {}\n", pt.join(", "), w.count, xs.join(" ")));
        }
        if let Some(p) = &self.probe {
            out.push_str(&format!(
                "probe (evidence, seed {}): {} accepted, {} components\n",
                p.seed, p.accepted_samples, p.component_count
            ));
        }
        if let Some(s) = &self.self_check {
            out.push_str(&format!(
                "self-check: {} points, {} members, {} disagreements\n",
                s.checked,
                s.members,
                s.disagreements.len()
            ));
        }
        out
    }
}

pub fn region_text(region: &Region) -> String {
    if region.pieces.is_empty() {
        return "  empty\n".into();
    }
    let mut out = String::new();
    for (i, conds) in region.display_conditions().iter().enumerate() {
        let body = if conds.is_empty() { "all positive rates".to_string() } else { conds.join(" and ") };
        let sep = if i == 0 { " " } else { "or" };
        out.push_str(&format!("  {sep} {body}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    #[test]
    fn running_example_report() {
        let net = parse_network("2A + B -> 3A\nA -> B").unwrap();
        let rep = analyze(&net, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.multistationary, Some(true));
        assert_eq!(rep.dimensions, Dimensions { n: 2, r: 2, dim_s: 1, d: 1 });
        assert!(rep.self_check.as_ref().unwrap().ok());
        assert_eq!(rep.witnesses.len(), 1);
    }

    #[test]
    fn too_many_species_is_unsupported() {
        let net = parse_network("A + B -> C\nC -> A + B").unwrap();
        assert!(matches!(analyze(&net, &AnalyzeOptions::default()), Err(AnalysisError::Unsupported(_))));
    }
}

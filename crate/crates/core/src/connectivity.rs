//! Seeded sampling evidence for the connectivity of a region.
//!
//! Rates are sampled and joined in log coordinates, totals linearly. Pairs
//! of accepted samples closer than `link_radius` are linked when every
//! checkpoint on the segment between them is a member, consecutive
//! checkpoints lying in a common piece. Components of that
//! graph are then bridged by polylines between their closest samples, so the
//! reported count is not an artifact of sampling density. Output is evidence,
//! never a proof.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::regions::Region;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeConfig {
    /// Closed interval per ambient symbol.
    pub bounds: Vec<(f64, f64)>,
    pub n_samples: usize,
    pub link_radius: f64,
    pub segment_checks: usize,
    pub waypoint_restarts: usize,
    pub seed: u64,
}

impl ProbeConfig {
    /// Rates in `[lo, hi]`, totals in `[-hi, hi]`, default budgets.
    pub fn for_region(region: &Region, lo: f64, hi: f64, n_samples: usize, seed: u64) -> Self {
        let bounds = (0..region.dim()).map(|i| if i < region.n_rates { (lo, hi) } else { (-hi, hi) }).collect();
        Self { bounds, n_samples, link_radius: 1.0, segment_checks: 32, waypoint_restarts: 64, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("box has {found} intervals, region has {expected} symbols")]
    Dimension { expected: usize, found: usize },
    #[error("interval {0} is empty or, for a rate, not positive")]
    BadInterval(usize),
    #[error("n_samples must be at least 2 and segment_checks at least 1")]
    Budget,
    #[error("endpoint is not in the region")]
    NotMember,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub label: &'static str,
    pub seed: u64,
    pub n_samples: usize,
    pub accepted_samples: usize,
    pub component_count: usize,
    /// First accepted sample of each component, in original coordinates.
    pub component_representatives: Vec<Vec<f64>>,
    /// Radius-graph edges plus bridges found between components.
    pub edge_count: usize,
    pub bridges: usize,
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
    #[serde(skip)]
    pub labels: Vec<usize>,
}

impl ProbeReport {
    /// Accepted samples, one per row, with a trailing component label.
    pub fn to_csv(&self, ambient: &[String]) -> String {
        let mut out = ambient.join(",");
        out.push_str(",component\n");
        for (s, l) in self.samples.iter().zip(&self.labels) {
            let row: Vec<String> = s.iter().map(|x| format!("{x:e}")).collect();
            out.push_str(&row.join(","));
            out.push_str(&format!(",{l}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    pub connected_evidence: bool,
    pub path: Option<Vec<Vec<f64>>>,
}

struct Space<'a> {
    region: &'a Region,
    cfg: &'a ProbeConfig,
}

impl Space<'_> {
    fn is_log(&self, i: usize) -> bool {
        i < self.region.n_rates
    }

    fn to_point(&self, s: &[f64]) -> Vec<f64> {
        s.iter().enumerate().map(|(i, &v)| if self.is_log(i) { v.exp() } else { v }).collect()
    }

    fn to_coords(&self, p: &[f64]) -> Vec<f64> {
        p.iter().enumerate().map(|(i, &v)| if self.is_log(i) { v.ln() } else { v }).collect()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.cfg
            .bounds
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                if self.is_log(i) {
                    rng.gen_range(lo.ln()..=hi.ln())
                } else {
                    rng.gen_range(lo..=hi)
                }
            })
            .collect()
    }

    fn mask(&self, s: &[f64]) -> u64 {
        self.region.piece_mask_f64(&self.to_point(s))
    }

    fn member(&self, s: &[f64]) -> bool {
        self.mask(s) != 0
    }

    /// Every checkpoint is a member and consecutive checkpoints share a
    /// piece, so the discretized path cannot hop between pieces across a gap
    /// narrower than the spacing.
    fn segment_ok(&self, a: &[f64], b: &[f64]) -> bool {
        let n = self.cfg.segment_checks;
        let mut prev = self.mask(a);
        for j in 1..=n + 1 {
            let t = j as f64 / (n + 1) as f64;
            let m = if j == n + 1 {
                self.mask(b)
            } else {
                let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                self.mask(&p)
            };
            if m & prev == 0 {
                return false;
            }
            prev = m;
        }
        true
    }

    /// Straight segment, then polylines through one or two waypoints drawn
    /// from `pool` or the box.
    fn connect(&self, a: &[f64], b: &[f64], pool: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<Vec<f64>>> {
        if a == b || self.segment_ok(a, b) {
            return Some(vec![a.to_vec(), b.to_vec()]);
        }
        for restart in 0..self.cfg.waypoint_restarts {
            let n_way = 1 + restart % 2;
            let mut path = vec![a.to_vec()];
            for _ in 0..n_way {
                let w = if !pool.is_empty() && rng.gen_bool(0.5) {
                    pool[rng.gen_range(0..pool.len())].clone()
                } else {
                    match (0..256).map(|_| self.sample(rng)).find(|s| self.member(s)) {
                        Some(s) => s,
                        None => break,
                    }
                };
                path.push(w);
            }
            path.push(b.to_vec());
            if path.windows(2).all(|w| self.segment_ok(&w[0], &w[1])) {
                return Some(path);
            }
        }
        None
    }
}

fn validate(region: &Region, cfg: &ProbeConfig) -> Result<(), ProbeError> {
    if cfg.bounds.len() != region.dim() {
        return Err(ProbeError::Dimension { expected: region.dim(), found: cfg.bounds.len() });
    }
    for (i, &(lo, hi)) in cfg.bounds.iter().enumerate() {
        if lo.is_nan() || hi.is_nan() || lo > hi || (i < region.n_rates && lo <= 0.0) {
            return Err(ProbeError::BadInterval(i));
        }
    }
    if cfg.n_samples < 2 || cfg.segment_checks == 0 {
        return Err(ProbeError::Budget);
    }
    Ok(())
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Joins components by verified polylines between their closest samples.
/// Each pass lets every component try its three nearest neighbours; passes
/// repeat until one merges nothing.
fn bridge(space: &Space, pts: &[Vec<f64>], uf: &mut UnionFind<usize>, rng: &mut ChaCha8Rng) -> usize {
    let mut bridges = 0;
    loop {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..pts.len() {
            groups.entry(uf.find_mut(i)).or_default().push(i);
        }
        if groups.len() <= 1 {
            return bridges;
        }
        let members: Vec<Vec<usize>> = groups.into_values().collect();
        let mut merged = false;
        for (gi, group) in members.iter().enumerate() {
            let mut cands: Vec<(f64, usize, usize)> = members
                .iter()
                .enumerate()
                .filter(|&(gj, _)| gj != gi)
                .map(|(_, other)| {
                    let mut best = (f64::INFINITY, 0, 0);
                    for &a in group {
                        for &b in other {
                            let d = dist2(&pts[a], &pts[b]);
                            if d < best.0 {
                                best = (d, a, b);
                            }
                        }
                    }
                    best
                })
                .collect();
            cands.sort_by(|x, y| x.0.total_cmp(&y.0));
            for &(_, a, b) in cands.iter().take(3) {
                if uf.equiv(a, b) {
                    continue;
                }
                if space.connect(&pts[a], &pts[b], pts, rng).is_some() {
                    uf.union(a, b);
                    bridges += 1;
                    merged = true;
                    break;
                }
            }
        }
        if !merged {
            return bridges;
        }
    }
}

pub fn probe(region: &Region, cfg: &ProbeConfig) -> Result<ProbeReport, ProbeError> {
    validate(region, cfg)?;
    let space = Space { region, cfg };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let accepted: Vec<Vec<f64>> = (0..cfg.n_samples).map(|_| space.sample(&mut rng)).filter(|s| space.member(s)).collect();
    let m = accepted.len();
    let mut uf = UnionFind::<usize>::new(m);
    let mut edges = 0;
    let r2 = cfg.link_radius * cfg.link_radius;
    for i in 0..m {
        for j in i + 1..m {
            let d2: f64 = accepted[i].iter().zip(&accepted[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= r2 && space.segment_ok(&accepted[i], &accepted[j]) {
                edges += 1;
                uf.union(i, j);
            }
        }
    }
    let bridges = bridge(&space, &accepted, &mut uf, &mut rng);
    let mut labels = vec![0; m];
    let mut reps: Vec<usize> = Vec::new();
    for (i, label) in labels.iter_mut().enumerate() {
        let r = uf.find_mut(i);
        *label = match reps.iter().position(|&x| uf.find_mut(x) == r) {
            Some(l) => l,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }
    Ok(ProbeReport {
        label: "evidence",
        seed: cfg.seed,
        n_samples: cfg.n_samples,
        accepted_samples: m,
        component_count: reps.len(),
        component_representatives: reps.iter().map(|&i| space.to_point(&accepted[i])).collect(),
        edge_count: edges + bridges,
        bridges,
        samples: accepted.iter().map(|s| space.to_point(s)).collect(),
        labels,
    })
}

/// Searches for a verified polyline from `p` to `q` inside the region. A
/// failed search says nothing about disconnectedness.
pub fn connect_witnesses(region: &Region, p: &[f64], q: &[f64], cfg: &ProbeConfig) -> Result<PathResult, ProbeError> {
    validate(region, cfg)?;
    if p.len() != region.dim() || q.len() != region.dim() {
        return Err(ProbeError::Dimension { expected: region.dim(), found: p.len().min(q.len()) });
    }
    if !region.contains_f64(p) || !region.contains_f64(q) {
        return Err(ProbeError::NotMember);
    }
    let space = Space { region, cfg };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let path = space.connect(&space.to_coords(p), &space.to_coords(q), &[], &mut rng);
    Ok(PathResult {
        connected_evidence: path.is_some(),
        path: path.map(|ps| ps.iter().map(|s| space.to_point(s)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use crate::regions::regions_for;

    #[test]
    fn running_example_path() {
        let pair = regions_for(&parse_network("2A + B -> 3A\nA -> B").unwrap()).unwrap();
        let cfg = ProbeConfig::for_region(&pair.enabling, 1.0 / 16.0, 16.0, 100, 42);
        let res = connect_witnesses(&pair.enabling, &[1.0, 1.0, 3.0], &[4.0, 1.0, 5.0], &cfg).unwrap();
        assert!(res.connected_evidence);
        let same = connect_witnesses(&pair.enabling, &[1.0, 1.0, 3.0], &[1.0, 1.0, 3.0], &cfg).unwrap();
        assert_eq!(same.path.unwrap().len(), 2);
    }

    #[test]
    fn empty_region_accepts_nothing() {
        let pair = regions_for(&parse_network("A -> 2A\nA -> 0").unwrap()).unwrap();
        let cfg = ProbeConfig::for_region(&pair.allowing, 0.5, 2.0, 50, 1);
        let rep = probe(&pair.allowing, &cfg).unwrap();
        assert_eq!((rep.accepted_samples, rep.component_count), (0, 0));
    }
}

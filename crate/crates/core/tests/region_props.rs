//! Regions against the steady-state oracle, projection, connectivity gates
//! and probe soundness.

use multistat::analysis::{find_witness, sweep};
use multistat::classify::{classify, MatchedCase};
use multistat::connectivity::{connect_witnesses, probe, ProbeConfig};
use multistat::massaction::{count_positive_steady_states_only, steady_state_system, SteadyStateCount};
use multistat::multipoly::MultiPoly;
use multistat::network::{parse_network, ReactionNetwork};
use multistat::regions::{extend_to_enabling, regions_for, Justification, Region, Relation};
use multistat::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn zero() -> Rational {
    q(0, 1)
}

type Pair = (Vec<u32>, Vec<u32>);

/// Two reactions in two species whose vectors are antiparallel
/// (`s1*u` and `-s2*u`), or two arbitrary reactions.
fn two_species() -> impl Strategy<Value = ReactionNetwork> {
    let pt = || prop::collection::vec(0..=3u32, 2);
    let antiparallel = ((-2..=2i64, -2..=2i64), 1..=2i64, 1..=2i64, pt(), pt()).prop_filter_map(
        "needs nonnegative products",
        |((u1, u2), s1, s2, y, yt)| {
            if (u1, u2) == (0, 0) {
                return None;
            }
            let add = |p: &[u32], s: i64| -> Option<Vec<u32>> {
                let a = p[0] as i64 + s * u1;
                let b = p[1] as i64 + s * u2;
                (a >= 0 && b >= 0).then(|| vec![a as u32, b as u32])
            };
            let (yp, ytp) = (add(&y, s1)?, add(&yt, -s2)?);
            ReactionNetwork::from_pairs(2, &[(y, yp), (yt, ytp)]).ok()
        },
    );
    let arbitrary = (pt(), pt(), pt(), pt()).prop_filter_map("distinct ends", |(a, b, c, d)| {
        (a != b && c != d).then(|| ReactionNetwork::from_pairs(2, &[(a, b), (c, d)]).ok()).flatten()
    });
    prop_oneof![4 => antiparallel, 1 => arbitrary]
        .prop_filter("both species occur", |net| net.n_species() == 2)
}

fn one_species_three() -> impl Strategy<Value = ReactionNetwork> {
    prop::collection::vec((0..=6u32, 0..=6u32), 3).prop_filter_map("distinct reactions", |rs| {
        let pairs: Vec<Pair> = rs.iter().map(|&(m, p)| (vec![m], vec![p])).collect();
        let distinct = (0..3).all(|i| rs[i].0 != rs[i].1 && (i + 1..3).all(|j| rs[i] != rs[j]));
        distinct.then(|| ReactionNetwork::from_pairs(1, &pairs).ok()).flatten()
    })
}

fn load(name: &str) -> ReactionNetwork {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../networks").join(format!("{name}.crn"));
    parse_network(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// `{g < 0}` with at most one negative coefficient, once the total constants
/// are flipped to be positive: `p > 0` with at most one positive coefficient.
fn one_negative_coefficient_holds(region: &Region) -> bool {
    let [piece] = &region.pieces[..] else {
        return false;
    };
    let mut flips = vec![1i64; region.dim()];
    let mut main = Vec::new();
    for c in &piece.conditions {
        if c.rel != Relation::Gt {
            return false;
        }
        let terms: Vec<_> = c.poly.terms().collect();
        let single = terms.len() == 1 && terms[0].0.iter().filter(|&&e| e > 0).count() == 1;
        if single && terms[0].0.iter().sum::<u32>() == 1 {
            let v = terms[0].0.iter().position(|&e| e > 0).unwrap();
            flips[v] = if *terms[0].1 > zero() { 1 } else { -1 };
        } else {
            main.push(c.poly.clone());
        }
    }
    main.len() == 1
        && main[0]
            .terms()
            .filter(|(e, c)| {
                let s: i64 = e.iter().zip(&flips).map(|(&k, &f)| if k % 2 == 1 { f } else { 1 }).product();
                (**c > zero()) == (s > 0)
            })
            .count()
            <= 1
}

fn check_gate(region: &Region) -> Result<(), TestCaseError> {
    if region.connectivity.justification == Justification::OneNegativeCoefficient {
        prop_assert!(one_negative_coefficient_holds(region), "{:?}", region.display_conditions());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn two_species_region_matches_oracle(net in two_species(), seed in 0..1000u64) {
        let pair = regions_for(&net).unwrap();
        let rep = sweep(&net, &pair.enabling, 40, seed, -3.0, 3.0);
        prop_assert!(rep.disagreements.is_empty(), "{}: {:?}", net, rep.disagreements);
        check_gate(&pair.enabling)?;
        check_gate(&pair.allowing)?;
        let verdict = classify(&net);
        if verdict.nondegenerate {
            let w = find_witness(&net, seed).unwrap();
            prop_assert_eq!(w.map(|w| w.count), Some(SteadyStateCount::Finite(2)), "{}", net);
        } else if verdict.multistationary {
            let degenerate = matches!(verdict.matched_case, MatchedCase::Degenerate { .. });
            prop_assert!(degenerate, "{:?}", verdict.matched_case);
            let w = find_witness(&net, seed).unwrap();
            prop_assert_eq!(w.map(|w| w.count), Some(SteadyStateCount::Infinite), "{}", net);
        }
    }

    #[test]
    fn one_species_region_matches_oracle(net in one_species_three(), seed in 0..1000u64) {
        let pair = regions_for(&net).unwrap();
        let rep = sweep(&net, &pair.enabling, 60, seed, -4.0, 4.0);
        prop_assert!(rep.disagreements.is_empty(), "{}: {:?}", net, rep.disagreements);
        check_gate(&pair.enabling)?;
        prop_assert_eq!(pair.enabling.pieces.is_empty(), !classify(&net).multistationary);
    }

    #[test]
    fn probe_is_deterministic(seed in 0..10_000u64) {
        let region = regions_for(&load("cubic_three")).unwrap().allowing;
        let cfg = ProbeConfig::for_region(&region, 1.0 / 16.0, 16.0, 300, seed);
        prop_assert_eq!(probe(&region, &cfg).unwrap(), probe(&region, &cfg).unwrap());
    }
}

/// Solves the equality `p = 0` for the first coordinate, `p` affine in it.
fn solve_first(p: &MultiPoly, point: &[Rational]) -> Option<Rational> {
    let mut at_zero = point.to_vec();
    at_zero[0] = zero();
    let slope = p.partial(0).eval(point);
    let v = -p.eval(&at_zero) / slope;
    (v > zero()).then_some(v)
}

fn quantized(x: f64) -> Rational {
    q((x * 256.0).round() as i64, 256)
}

#[test]
fn allowing_points_extend_to_enabling_points() {
    let mut nets: Vec<ReactionNetwork> =
        ["running", "pinned", "autocatalytic_n3_l2", "cubic_three", "two_inequality", "disconnected_six"]
            .iter()
            .map(|n| load(n))
            .collect();
    // one network per two-species shape: zigzag forms and degenerate cases
    let shapes: [[[u32; 2]; 4]; 8] = [
        [[0, 3], [1, 4], [3, 2], [1, 0]],
        [[2, 2], [1, 1], [5, 1], [7, 3]],
        [[2, 0], [0, 2], [3, 3], [4, 2]],
        [[0, 2], [2, 0], [1, 3], [0, 4]],
        [[1, 3], [0, 2], [3, 1], [4, 2]],
        [[1, 1], [1, 3], [1, 1], [1, 0]],
        [[1, 1], [1, 0], [3, 1], [3, 3]],
        [[1, 1], [0, 1], [1, 3], [3, 3]],
    ];
    for [y, yp, yt, ytp] in shapes {
        nets.push(ReactionNetwork::from_pairs(2, &[(y.to_vec(), yp.to_vec()), (yt.to_vec(), ytp.to_vec())]).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for net in &nets {
        let pair = regions_for(net).unwrap();
        let sys = steady_state_system(net);
        let r = net.n_reactions();
        let allow_eq = pair.allowing.pieces[0].conditions.iter().find(|c| c.rel == Relation::Eq).cloned();
        let enable_eq = pair.enabling.pieces[0].conditions.iter().find(|c| c.rel == Relation::Eq).cloned();
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 200 {
            attempts += 1;
            assert!(attempts < 200_000, "{net}: too few allowing samples");
            let mut rates: Vec<Rational> = (0..r).map(|_| quantized(2f64.powf(rng.gen_range(-4.0..=4.0)))).collect();
            if let Some(eq) = &allow_eq {
                let Some(k) = solve_first(&eq.poly, &rates) else { continue };
                rates[0] = k;
            } else if let Some(eq) = &enable_eq {
                // totals fixed first, then the rate that puts them on the curve
                let c = quantized(rng.gen_range(0.25..=4.0));
                let point: Vec<Rational> = rates.iter().cloned().chain([c]).collect();
                let Some(k) = solve_first(&eq.poly, &point) else { continue };
                rates[0] = k;
            }
            if !pair.allowing.contains(&rates).unwrap() {
                continue;
            }
            let point = extend_to_enabling(net, &pair, &rates)
                .unwrap_or_else(|| panic!("{net}: no extension over {rates:?}"));
            assert!(pair.enabling.contains(&point).unwrap());
            let res = count_positive_steady_states_only(&sys, &point[..r], &point[r..]).unwrap();
            assert!(res.count.at_least_two(), "{net}: {point:?} has {:?}", res.count);
            checked += 1;
        }
    }
}

#[test]
fn running_example_cutoff_is_the_squared_inequality() {
    let net = load("running");
    let en = regions_for(&net).unwrap().enabling;
    let cut = en.cutoff.clone().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let (k1, k2) = (q(rng.gen_range(1..=400), rng.gen_range(1..=20)), q(rng.gen_range(1..=400), rng.gen_range(1..=20)));
        let c = q(rng.gen_range(-400..=400), rng.gen_range(1..=20));
        let member = en.contains(&[k1.clone(), k2.clone(), c.clone()]).unwrap();
        // c > c* with c*^m = base * lambda * k1 / k2, compared after raising
        // both sides to |m|
        let rho = &cut.base * &cut.lambda * &k1 / &k2;
        let star_pow = if cut.m > 0 { rho } else { rho.recip() };
        let c_pow = num_traits::pow(c.clone(), cut.m.unsigned_abs() as usize);
        assert_eq!(member, c > zero() && c_pow > star_pow);
        assert_eq!(member, c > zero() && &c * &c * &k1 > q(4, 1) * &k2);
    }
}

#[test]
fn published_gates_hold() {
    for name in ["running", "pinned", "autocatalytic_n2_l1", "autocatalytic_n5_l4", "cubic_three", "two_inequality"] {
        let pair = regions_for(&load(name)).unwrap();
        for region in [&pair.allowing, &pair.enabling] {
            if region.connectivity.justification == Justification::OneNegativeCoefficient {
                assert!(one_negative_coefficient_holds(region), "{name}");
            }
        }
    }
}

#[test]
fn probe_paths_stay_in_the_region() {
    let region = regions_for(&load("cubic_three")).unwrap().allowing;
    let cfg = ProbeConfig::for_region(&region, 1.0 / 16.0, 16.0, 400, 3);
    let rep = probe(&region, &cfg).unwrap();
    assert!(rep.samples.len() >= 4);
    for pair in rep.samples.windows(2).take(10) {
        let res = connect_witnesses(&region, &pair[0], &pair[1], &cfg).unwrap();
        assert!(res.connected_evidence);
        for point in res.path.unwrap() {
            assert!(region.contains_f64(&point));
        }
    }
}

//! Properties of parsed networks and their mass-action systems.

use multistat::massaction::{count_positive_steady_states, direct_rhs, ode_rhs, steady_state_system, SteadyStateCount};
use multistat::network::{parse_network, ReactionNetwork};
use multistat::unipoly::sturm_count_positive;
use multistat::{RatPoly, Rational};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Up to `max_r` reactions over `n` species with coefficients at most `top`.
fn network(n: usize, max_r: usize, top: u32) -> impl Strategy<Value = ReactionNetwork> {
    let complex = prop::collection::vec(0..=top, n);
    prop::collection::vec((complex.clone(), complex), 1..=max_r)
        .prop_filter_map("reactant equals product", move |pairs| {
            let pairs: Vec<_> = pairs.into_iter().filter(|(y, yp)| y != yp).collect();
            if pairs.is_empty() {
                return None;
            }
            // through the printer so that species order is canonical
            let net = ReactionNetwork::from_pairs(n, &pairs).ok()?;
            parse_network(&net.to_canonical_string()).ok()
        })
}

fn any_network() -> impl Strategy<Value = ReactionNetwork> {
    (1..=3usize).prop_flat_map(|n| network(n, 5, 3))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1..=64i64, 1..=16i64).prop_map(|(a, b)| q(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conservation_rows_annihilate_reactions(net in any_network()) {
        let cons = net.conservation_matrix();
        for rx in &net.reactions {
            let v: Vec<Rational> = rx.vector().into_iter().map(|x| q(x, 1)).collect();
            for i in 0..cons.d() {
                let dot: Rational = cons.row(i).iter().zip(&v).map(|(a, b)| a * b).sum();
                prop_assert_eq!(dot, q(0, 1));
            }
        }
        prop_assert_eq!(net.stoichiometric_rank() + cons.d(), net.n_species());
    }

    #[test]
    fn print_parse_round_trip(net in any_network()) {
        let again = parse_network(&net.to_canonical_string()).unwrap();
        prop_assert_eq!(again, net);
    }

    #[test]
    fn conservation_rows_annihilate_the_ode(net in any_network()) {
        let f = ode_rhs(&net);
        let cons = net.conservation_matrix();
        for i in 0..cons.d() {
            let mut sum = f[0].poly.scale(&cons.row(i)[0]);
            for (j, fj) in f.iter().enumerate().skip(1) {
                sum = &sum + &fj.poly.scale(&cons.row(i)[j]);
            }
            prop_assert!(sum.is_zero(), "row {} of W against f", i);
        }
    }

    #[test]
    fn polynomial_and_direct_rates_agree(
        net in any_network(),
        kappa in prop::collection::vec(positive_rational(), 5),
        x in prop::collection::vec(positive_rational(), 3),
    ) {
        let kappa = &kappa[..net.n_reactions()];
        let x = &x[..net.n_species()];
        let by_poly: Vec<Rational> = ode_rhs(&net).iter().map(|f| f.eval(x, kappa)).collect();
        prop_assert_eq!(by_poly, direct_rhs(&net, kappa, x));
    }

    #[test]
    fn one_species_oracle_matches_sturm(
        net in network(1, 4, 6),
        kappa in prop::collection::vec(positive_rational(), 4),
    ) {
        let kappa = &kappa[..net.n_reactions()];
        // net polynomial assembled reaction by reaction
        let mut coeffs = vec![q(0, 1); 7];
        for (rx, k) in net.reactions.iter().zip(kappa) {
            coeffs[rx.reactant.coeffs[0] as usize] += k * q(rx.vector()[0], 1);
        }
        let p = RatPoly::new(coeffs);
        let res = count_positive_steady_states(&steady_state_system(&net), kappa, &[]).unwrap();
        if p.is_zero() {
            prop_assert_eq!(res.count, SteadyStateCount::Infinite);
        } else {
            let sf = p.square_free_part();
            prop_assert_eq!(res.count, SteadyStateCount::Finite(sturm_count_positive(&sf).unwrap()));
        }
    }

    #[test]
    fn witnesses_are_steady_states_in_the_class(
        net in (1..=2usize).prop_flat_map(|n| network(n, 3, 3)),
        kappa in prop::collection::vec(positive_rational(), 3),
        totals in prop::collection::vec((-32..=32i64, 1..=4i64), 2),
    ) {
        let sys = steady_state_system(&net);
        let kappa = &kappa[..net.n_reactions()];
        let c: Vec<Rational> = totals[..sys.cons.d()].iter().map(|&(a, b)| q(a, b)).collect();
        let res = count_positive_steady_states(&sys, kappa, &c).unwrap();
        for w in &res.witnesses {
            prop_assert!(w.x.iter().all(|xi| *xi > q(0, 1)));
            prop_assert_eq!(sys.cons.apply(&w.x), c.clone());
            let f = direct_rhs(&net, kappa, &w.x);
            if w.exact {
                prop_assert!(f.iter().all(|v| *v == q(0, 1)));
            } else {
                let worst = f.iter().map(|v| multistat::Scalar::to_f64_lossy(v).abs()).fold(0.0, f64::max);
                prop_assert!(worst < 1e-12, "residual {}", worst);
            }
        }
    }
}

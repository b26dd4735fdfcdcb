use multistat::connectivity::{connect_witnesses, probe, ProbeConfig};
use multistat::network::parse_network;
use multistat::regions::regions_for;

const SIX: &str = "A -> 0 ; k1L\nA -> 2A ; k1R\n2A -> A ; k2L\n2A -> 3A ; k2R\n3A -> 2A ; k3L\n3A -> 4A ; k3R";

#[test]
fn six_reaction_region_has_two_components() {
    let region = regions_for(&parse_network(SIX).unwrap()).unwrap().allowing;
    let cfg = ProbeConfig::for_region(&region, 0.125, 8.0, 4000, 42);
    let t = std::time::Instant::now();
    let rep = probe(&region, &cfg).unwrap();
    eprintln!("{} accepted, {} edges, {} bridges, {:?}", rep.accepted_samples, rep.edge_count, rep.bridges, t.elapsed());
    assert_eq!(rep.component_count, 2);
    // one representative on each side of k1L = k1R
    let sides: Vec<bool> = rep.component_representatives.iter().map(|p| p[0] > p[1]).collect();
    assert_ne!(sides[0], sides[1]);
    assert_eq!(probe(&region, &cfg).unwrap(), rep);
}

#[test]
fn six_reaction_witnesses_are_not_joined() {
    let region = regions_for(&parse_network(SIX).unwrap()).unwrap().allowing;
    let cfg = ProbeConfig::for_region(&region, 0.125, 8.0, 4000, 42);
    let res = connect_witnesses(&region, &[1.0, 3.0, 4.0, 1.0, 1.0, 2.0], &[3.0, 1.0, 1.0, 4.0, 2.0, 1.0], &cfg).unwrap();
    assert!(!res.connected_evidence);
    assert!(res.path.is_none());
}

#[test]
fn three_reaction_region_has_one_component() {
    let region = regions_for(&parse_network("0 <- A, 2A -> 3A <- 4A").unwrap()).unwrap().allowing;
    let cfg = ProbeConfig::for_region(&region, 1.0 / 16.0, 16.0, 2000, 42);
    let rep = probe(&region, &cfg).unwrap();
    assert!(rep.accepted_samples > 0);
    assert_eq!(rep.component_count, 1);
}

#[test]
fn component_counts_hold_across_seeds() {
    let six = regions_for(&parse_network(SIX).unwrap()).unwrap().allowing;
    let three = regions_for(&parse_network("0 <- A, 2A -> 3A <- 4A").unwrap()).unwrap().allowing;
    for seed in 0..20 {
        let rep = probe(&six, &ProbeConfig::for_region(&six, 0.125, 8.0, 4000, seed)).unwrap();
        assert_eq!(rep.component_count, 2, "seed {seed}");
        let rep = probe(&three, &ProbeConfig::for_region(&three, 1.0 / 16.0, 16.0, 2000, seed)).unwrap();
        assert_eq!(rep.component_count, 1, "seed {seed}");
    }
}

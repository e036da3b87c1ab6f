use ghz_star::model::{rng_stream, tag};
use ghz_star::switch::{self, Event, NetworkState};
use ghz_star::SimParams;

#[test]
fn noiseless_deliveries_are_perfect() {
    for n in 2..=5 {
        let p = SimParams { q_bsm: 0.9, ..SimParams::new(n, 0.3) };
        let mut state = NetworkState::new(n);
        let mut rng = rng_stream(1, n as u64, tag::SWITCH);
        let runs = if n == 5 { 1000 } else { 200 };
        for _ in 0..runs {
            let r = switch::run_to_ghz(&mut state, &p, &mut rng).unwrap();
            assert!((r.fidelity - 1.0).abs() < 1e-9, "{}", r.fidelity);
            state.check_invariants().unwrap();
        }
    }
}

#[test]
fn each_state_consumes_two_pairs_per_fusion_link() {
    let n = 5;
    let p = SimParams { p_mem: 0.999, p_link: 0.98, ..SimParams::new(n, 0.2) };
    let mut state = NetworkState::new(n);
    let mut rng = rng_stream(2, 0, tag::SWITCH);
    let (mut consumed, mut created) = (0, 0);
    let runs = 300;
    for _ in 0..runs {
        let r = switch::run_to_ghz(&mut state, &p, &mut rng).unwrap();
        consumed += r.link_pairs_consumed();
        created += r.links_created;
        assert!(r.duration_rounds >= 1);
    }
    assert_eq!(consumed, runs * 2 * (n as u64 - 1));
    // Pairs still waiting at the switch were created but not yet consumed.
    assert!(created >= consumed && created - consumed <= n as u64);
}

#[test]
fn bsm_pairs_are_chosen_uniformly() {
    let p = SimParams::new(3, 1.0);
    let mut counts = [0usize; 3];
    let trials = 6000;
    for t in 0..trials {
        let mut state = NetworkState::new(3);
        let mut rng = rng_stream(3, t, tag::SWITCH);
        switch::advance_round(&mut state, &p, &mut rng).unwrap();
        assert_eq!(state.valid_pairs().len(), 3);
        let events = switch::do_switch_bsms(&mut state, &p, &mut rng).unwrap();
        let Event::BsmSucceeded { nodes, .. } = events[0] else { panic!("expected a BSM") };
        let k = match nodes {
            (1, 2) => 0,
            (1, 3) => 1,
            (2, 3) => 2,
            other => panic!("unexpected pair {other:?}"),
        };
        counts[k] += 1;
        assert_eq!(events.len(), 1, "the remaining pair shares a component with a switch qubit");
    }
    let expected = trials as f64 / 3.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 13.8, "chi2 {chi2} for {counts:?}");
}

#[test]
fn link_attempts_succeed_at_the_given_rate() {
    let q = 0.01;
    let p = SimParams::new(5, q);
    let mut state = NetworkState::new(5);
    let mut rng = rng_stream(4, 0, tag::SWITCH);
    let (mut attempts, mut created) = (0usize, 0usize);
    for _ in 0..40_000 {
        attempts += (1..=5).filter(|&i| !state.switch_occupied(i) && state.node_occupancy(i) < 2).count();
        created += switch::advance_round(&mut state, &p, &mut rng).unwrap().len();
        if state.num_components() == 5 {
            state = NetworkState::new(5);
        }
    }
    let (n, mean) = (attempts as f64, attempts as f64 * q);
    let sd = (n * q * (1.0 - q)).sqrt();
    assert!((created as f64 - mean).abs() < 4.0 * sd, "{created} of {attempts}");
}

#[test]
fn perfect_links_give_rate_one_half() {
    let e = switch::estimate_switch(&SimParams { shots: 1000, ..SimParams::new(5, 1.0) }).unwrap();
    assert!((e.rate_mean - 0.5).abs() < 1e-12);
    assert_eq!(e.fidelity_mean, 1.0);
}

#[test]
fn replicated_estimates_agree_with_single_network() {
    let p = SimParams { shots: 4000, p_mem: 0.999, ..SimParams::new(4, 0.05) };
    let a = switch::estimate_switch(&p).unwrap();
    let b = switch::estimate_switch_replicated(&p, 4).unwrap();
    assert_eq!(b.shots, 4000);
    assert!((a.rate_mean - b.rate_mean).abs() < 4.0 * a.rate_stderr.hypot(b.rate_stderr));
    assert!((a.fidelity_mean - b.fidelity_mean).abs() < 4.0 * a.fidelity_stderr.hypot(b.fidelity_stderr));
}

#[test]
fn estimates_are_reproducible() {
    let p = SimParams { shots: 500, p_link: 0.95, q_bsm: 0.9, ..SimParams::new(4, 0.1) };
    assert_eq!(switch::estimate_switch(&p).unwrap(), switch::estimate_switch(&p).unwrap());
    assert_eq!(
        switch::estimate_switch_replicated(&p, 3).unwrap(),
        switch::estimate_switch_replicated(&p, 3).unwrap()
    );
}

#[test]
fn state_completed_by_stepping_is_delivered_at_once() {
    let p = SimParams::new(3, 1.0);
    let mut state = NetworkState::new(3);
    let mut rng = rng_stream(5, 0, tag::SWITCH);
    for _ in 0..2 {
        switch::advance_round(&mut state, &p, &mut rng).unwrap();
        switch::do_switch_bsms(&mut state, &p, &mut rng).unwrap();
        switch::do_fusions(&mut state, &p, &mut rng).unwrap();
    }
    assert!(state.components().any(|c| c.is_end_node_only() && c.end_nodes().len() == 3));
    let r = switch::run_to_ghz(&mut state, &p, &mut rng).unwrap();
    assert_eq!(r.duration_rounds, 0);
    assert!((r.fidelity - 1.0).abs() < 1e-12);
}

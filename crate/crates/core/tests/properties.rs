//! Invariants over random inputs.

use proptest::prelude::*;

use tca_core::corpus::{chain_instance, rng, tree_instance, ChainParams, TreeParams};
use tca_core::frontend::compile_source;
use tca_core::gantt::default_tick;
use tca_core::io::{graph_from_json, graph_to_json, schedule_from_json, schedule_to_json};
use tca_core::scheduler::{edf_dyn, explore_tree_schedule, simulate, validate_schedule, FirstBranch, SimOptions};
use tca_core::transform::{apply_cdi, simplify, to_absolute, to_relative, unfold};
use tca_core::{format_rat, parse_rat, ratio, ExecTimeMap, Rat, TcaError};

fn rational() -> impl Strategy<Value = Rat> {
    (0i64..1000, 1i64..60).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_print_and_parse_back(r in rational()) {
        prop_assert_eq!(parse_rat(&format_rat(r)).unwrap(), r);
    }

    #[test]
    fn relabeling_round_trips(seed in any::<u64>()) {
        let inst = chain_instance(&mut rng(seed), &ChainParams::default());
        for g in &inst.graphs {
            let back = to_absolute(&to_relative(g).unwrap()).unwrap();
            prop_assert_eq!(&back, g);
        }
    }

    #[test]
    fn graph_json_round_trips(seed in any::<u64>()) {
        let inst = tree_instance(&mut rng(seed), &TreeParams::default());
        for g in &inst.graphs {
            prop_assert_eq!(&graph_from_json(&graph_to_json(g)).unwrap(), g);
        }
    }

    #[test]
    fn simplify_is_idempotent(seed in any::<u64>()) {
        let p = ChainParams { inversions: true, ..ChainParams::default() };
        let inst = chain_instance(&mut rng(seed), &p);
        for g in &inst.graphs {
            match simplify(g) {
                Ok(s) => prop_assert_eq!(simplify(&s).unwrap(), s),
                Err(e) => {
                    let impossible = matches!(e, TcaError::ImpossibleConstraints { .. });
                    prop_assert!(impossible, "{}", e);
                }
            }
        }
    }

    #[test]
    fn cdi_is_idempotent(seed in any::<u64>()) {
        let inst = tree_instance(&mut rng(seed), &TreeParams::default());
        for g in &inst.graphs {
            let once = apply_cdi(g).unwrap();
            prop_assert_eq!(apply_cdi(&once).unwrap(), once);
        }
    }

    /// Segments never overlap, stay inside the horizon and a miss-free run
    /// passes the validator.
    #[test]
    fn edf_runs_are_well_formed(seed in any::<u64>()) {
        let inst = chain_instance(&mut rng(seed), &ChainParams::default());
        let exec = ExecTimeMap::from_graphs(&inst.graphs);
        let run = edf_dyn(&inst.graphs, &exec, &SimOptions::new(inst.horizon)).unwrap();
        let mut segs = run.mapping.segments.clone();
        segs.sort_by_key(|s| s.start);
        for w in segs.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        for s in &segs {
            prop_assert!(s.start < s.end && s.end <= inst.horizon);
        }
        if !run.missed() {
            prop_assert_eq!(validate_schedule(&inst.graphs, &run.mapping), vec![]);
        }
        prop_assert_eq!(schedule_from_json(&schedule_to_json(&run)).unwrap(), run.clone());
        let tick = default_tick(&run.mapping, &run.markers);
        for s in &segs {
            prop_assert!((s.start / tick).is_integer() && (s.end / tick).is_integer());
        }
    }

    /// Simulating a tree with the first-branch oracle reproduces the
    /// corresponding branch of the exhaustive exploration.
    #[test]
    fn first_branch_is_an_explored_branch(seed in any::<u64>()) {
        let inst = tree_instance(&mut rng(seed), &TreeParams::default());
        let exec = ExecTimeMap::from_graphs(&inst.graphs);
        let opts = SimOptions::new(inst.horizon);
        let run = simulate(&inst.graphs, &exec, &mut FirstBranch, &opts).unwrap();
        let ts = explore_tree_schedule(&inst.graphs, &exec, &opts, 4096).unwrap();
        prop_assert!(ts.branches().iter().any(|b| b.segments == run.mapping.segments));
    }

    /// A periodic agent compiles to one cycle whose every unfolded window
    /// equals its period.
    #[test]
    fn periodic_programs_keep_their_period(p in 1i64..6, q in 1i64..4, c in 1i64..4) {
        let period = ratio(p, q);
        let cost = period * ratio(c, 4);
        let src = format!(
            "agent t {{ loop {{ after({}); work(x, {}); before({}); }} }}",
            format_rat(period), format_rat(cost), format_rat(period)
        );
        let g = compile_source(&src).unwrap().remove(0);
        prop_assert_eq!(g.nodes.len(), 1);
        let u = unfold(&g, period * Rat::from_integer(4)).unwrap();
        for a in u.arcs.iter().filter(|a| a.key() == "x") {
            let w = tca_core::implicit_window(&u, &a.id).unwrap();
            prop_assert_eq!(w.min_deadline().finite().unwrap() - w.start, period);
        }
    }
}

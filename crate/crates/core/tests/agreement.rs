//! EDF-dyn and EDF-dyn-min against the exhaustive oracle on random
//! instances.

use tca_core::corpus::{chain_instance, rng, tree_instance, ChainParams, TreeParams};
use tca_core::feasibility::{feasible_chains, feasible_trees, SearchBudget};
use tca_core::scheduler::{
    check_correct, check_prefix_coincidence, edf_dyn, explore_tree_schedule, validate_schedule, SimOptions,
};
use tca_core::transform::{apply_cdi, extract_chains, simplify, ChoiceSet};
use tca_core::{ExecTimeMap, TcaError};

#[test]
fn edf_dyn_is_optimal_on_random_chains() {
    for seed in 0..300 {
        let inst = chain_instance(&mut rng(seed), &ChainParams::default());
        let exec = ExecTimeMap::from_graphs(&inst.graphs);
        let run = edf_dyn(&inst.graphs, &exec, &SimOptions::new(inst.horizon)).unwrap();
        let v = feasible_chains(&inst.graphs, &exec, inst.horizon, &SearchBudget::default()).unwrap();
        assert_eq!(v.feasible, !run.missed(), "seed {seed}: {:#?}", inst);
        if !run.missed() {
            assert_eq!(validate_schedule(&inst.graphs, &run.mapping), vec![], "seed {seed}");
            assert_eq!(check_correct(&inst.graphs, &run.mapping, &exec), vec![], "seed {seed}");
        }
        if let Some(w) = &v.witness {
            assert_eq!(validate_schedule(&inst.graphs, w), vec![], "seed {seed}");
            assert_eq!(check_correct(&inst.graphs, w, &exec), vec![], "seed {seed}");
        }
    }
}

#[test]
fn edf_dyn_min_is_optimal_on_random_trees() {
    let mut infeasible = 0;
    for seed in 0..150 {
        let inst = tree_instance(&mut rng(seed), &TreeParams::default());
        let exec = ExecTimeMap::from_graphs(&inst.graphs);
        let opts = SimOptions::new(inst.horizon);
        let ts = explore_tree_schedule(&inst.graphs, &exec, &opts, 256).unwrap();
        let v = feasible_trees(&inst.graphs, &exec, inst.horizon, &SearchBudget::default()).unwrap();
        assert_eq!(v.feasible, ts.miss_free(), "seed {seed}: {:#?}", inst);
        infeasible += usize::from(!v.feasible);
        let cdi: Vec<_> = inst.graphs.iter().map(|g| apply_cdi(g).unwrap()).collect();
        let vc = feasible_trees(&cdi, &exec, inst.horizon, &SearchBudget::default()).unwrap();
        assert_eq!(v.feasible, vc.feasible, "seed {seed}");
        assert_eq!(check_prefix_coincidence(&ts), vec![], "seed {seed}");
        for b in ts.branches() {
            let mut u = ChoiceSet::new();
            for l in &b.choices {
                u.insert(l.task, l.occurrence.clone(), l.arc.clone());
            }
            let chains = match extract_chains(&cdi, &u) {
                Ok(c) => c,
                Err(TcaError::UnresolvedChoice { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let run = edf_dyn(&chains, &exec, &opts).unwrap();
            assert_eq!(run.mapping.segments, b.segments, "seed {seed}");
        }
    }
    assert!(infeasible > 0);
}

#[test]
fn simplification_keeps_verdicts() {
    let p = ChainParams {
        inversions: true,
        ..ChainParams::default()
    };
    for seed in 0..100 {
        let inst = chain_instance(&mut rng(seed), &p);
        let exec = ExecTimeMap::from_graphs(&inst.graphs);
        let Ok(simple) = inst.graphs.iter().map(simplify).collect::<Result<Vec<_>, _>>() else {
            continue;
        };
        for (g, s) in inst.graphs.iter().zip(&simple) {
            assert_eq!(&simplify(s).unwrap(), s);
            assert_eq!(g.arcs, s.arcs);
        }
        let a = feasible_chains(&inst.graphs, &exec, inst.horizon, &SearchBudget::default()).unwrap();
        let b = feasible_chains(&simple, &exec, inst.horizon, &SearchBudget::default()).unwrap();
        assert_eq!(a.feasible, b.feasible, "seed {seed}");
    }
}

/// Inverted after/before pairs are exactly the chains with no schedule
/// even when every block is made arbitrarily short.
#[test]
fn impossible_constraints_match_empty_schedule_space() {
    use tca_core::{ratio, Rat};
    let p = ChainParams {
        inversions: true,
        max_tasks: 1,
        ..ChainParams::default()
    };
    let mut seen = [0; 2];
    for seed in 0..200 {
        let inst = chain_instance(&mut rng(seed), &p);
        let g = &inst.graphs[0];
        let impossible = matches!(simplify(g), Err(TcaError::ImpossibleConstraints { .. }));
        let mut tiny = g.clone();
        let eps = ratio(1, g.arcs.len() as i64 + 1);
        for a in &mut tiny.arcs {
            if a.block.cost > Rat::from_integer(0) {
                a.block.cost = eps;
            }
        }
        let last = g.nodes.iter().filter_map(|n| n.kind.date()).max().unwrap();
        let exec = ExecTimeMap::from_graphs(&[tiny.clone()]);
        let v = feasible_chains(&[tiny], &exec, last, &SearchBudget::default()).unwrap();
        assert_eq!(impossible, !v.feasible, "seed {seed}: {g:#?}");
        seen[usize::from(impossible)] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

use super::*;
use crate::fixtures::{f1, f9, f9d, single_block};
use crate::model::NodeKind;
use crate::scheduler::{check_correct, validate_schedule};
use crate::time::{rat, ratio};
use crate::transform::apply_cdi;

fn chains(gs: &[TcaGraph], h: i64) -> FeasibilityVerdict {
    feasible_chains(gs, &ExecTimeMap::from_graphs(gs), rat(h), &SearchBudget::default()).unwrap()
}

fn trees(gs: &[TcaGraph], h: i64) -> FeasibilityVerdict {
    feasible_trees(gs, &ExecTimeMap::from_graphs(gs), rat(h), &SearchBudget::default()).unwrap()
}

#[test]
fn f1_is_feasible_with_a_valid_witness() {
    let v = chains(&[f1()], 10);
    assert!(v.feasible);
    let w = v.witness.unwrap();
    assert_eq!(validate_schedule(&[f1()], &w), vec![]);
    assert_eq!(check_correct(&[f1()], &w, &ExecTimeMap::from_graphs(&[f1()])), vec![]);
    assert!(v.stats.states_explored > 0);
}

#[test]
fn single_overload_has_a_certificate() {
    let v = chains(&[single_block("o", 4, 3)], 10);
    assert!(!v.feasible);
    assert_eq!(
        v.certificate,
        Some(OverloadCertificate {
            start: rat(0),
            end: rat(3),
            demand: rat(4)
        })
    );
}

#[test]
fn two_chains_overload_together() {
    let a = single_block("a", 2, 3);
    let b = single_block("b", 2, 3);
    let v = chains(&[a, b], 10);
    assert!(!v.feasible);
    assert_eq!(v.certificate.unwrap().demand, rat(4));
}

#[test]
fn rational_instances_are_scaled() {
    let mut g = single_block("h", 1, 1);
    g.arcs[0].block.cost = ratio(1, 2);
    let other = g.clone();
    let v = chains(&[g.clone(), other.clone()], 2);
    assert!(v.feasible);
    let w = v.witness.unwrap();
    assert_eq!(w.segments[0].end, ratio(1, 2));
    g.arcs[0].block.cost = ratio(2, 3);
    assert!(!chains(&[g, other], 2).feasible);
}

#[test]
fn f9_pair_is_feasible_and_tight_variant_is_not() {
    assert!(trees(&[f9(), f9d()], 10).feasible);
    let mut tight = f9();
    tight.nodes[2].kind = NodeKind::Before(rat(2));
    tight.nodes[3].kind = NodeKind::Before(rat(2));
    assert!(!trees(&[tight, f9d()], 10).feasible);
}

#[test]
fn inherited_deadlines_do_not_change_the_verdict() {
    let mut t = f9();
    t.nodes[3].kind = NodeKind::Before(rat(3));
    assert!(trees(&[t.clone()], 10).feasible);
    assert_eq!(trees(&[t.clone()], 10), trees(&[apply_cdi(&t).unwrap()], 10));
}

#[test]
fn choice_free_trees_match_chains() {
    assert_eq!(trees(&[f1()], 10).feasible, chains(&[f1()], 10).feasible);
}

#[test]
fn budget_is_enforced() {
    let r = feasible_chains(
        &[f1()],
        &ExecTimeMap::from_graphs(&[f1()]),
        rat(10),
        &SearchBudget {
            max_slot_tasks: 5,
            max_states: 10,
        },
    );
    assert!(matches!(r, Err(FeasibilityError::BudgetExceeded(_))));
}

#[test]
fn every_branch_must_fit() {
    // Branch b alone fits; branch c cannot.
    let mut t = f9();
    t.nodes[3].kind = NodeKind::Before(rat(2));
    assert!(!trees(&[t.clone()], 10).feasible);
    t.nodes[3].kind = NodeKind::Before(rat(3));
    assert!(trees(&[t], 10).feasible);
}

#[test]
fn deadlines_past_the_horizon_are_ignored() {
    assert!(chains(&[single_block("late", 5, 8)], 4).feasible);
    assert!(!chains(&[single_block("late", 5, 4)], 4).feasible);
}

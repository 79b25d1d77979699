use serde::Serialize;

use crate::model::{implicit_window, ExecTimeMap, TcaGraph};
use crate::time::{serde_rat, Rat, TimeStamp};

use super::{ScheduleMapping, Segment};

/// A broken validity or correctness condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum ScheduleViolation {
    UnknownBlock {
        task: usize,
        block: String,
    },
    StartBeforeAfterDate {
        task: usize,
        block: String,
        #[serde(with = "serde_rat")]
        date: Rat,
    },
    EndAfterBeforeDate {
        task: usize,
        block: String,
        #[serde(with = "serde_rat")]
        date: Rat,
    },
    /// A later block of a task runs before an earlier one has stopped.
    OrderViolation {
        task: usize,
        earlier: String,
        later: String,
    },
    Overlap {
        #[serde(with = "serde_rat")]
        at: Rat,
    },
    Underallocated {
        task: usize,
        block: String,
        #[serde(with = "serde_rat")]
        got: Rat,
        #[serde(with = "serde_rat")]
        need: Rat,
    },
}

/// Arc indices of each chain, in path order from the initial node.
fn paths(chains: &[TcaGraph]) -> Vec<Vec<usize>> {
    chains
        .iter()
        .map(|c| {
            let ix = c.index();
            let mut out = Vec::new();
            let mut v = ix.initial;
            while let Some(&a) = v.and_then(|v| ix.out[v].first()) {
                if out.len() >= c.arcs.len() {
                    break;
                }
                out.push(a);
                v = ix.arc_to[a];
            }
            out
        })
        .collect()
}

/// Arc index of a segment's block in its chain, when the occurrence path
/// matches the chain.
fn locate(chains: &[TcaGraph], paths: &[Vec<usize>], s: &Segment) -> Option<usize> {
    let chain = chains.get(s.task)?;
    let path = &paths[s.task];
    let pos = s.occurrence.len().checked_sub(1)?;
    let &arc = path.get(pos)?;
    let path_matches = path
        .iter()
        .zip(&s.occurrence)
        .all(|(&a, k)| chain.arcs[a].key() == k);
    (path_matches && chain.arcs[arc].key() == s.block).then_some(arc)
}

/// Checks windows, per-task order and processor exclusivity against
/// absolute chains.
pub fn validate_schedule(chains: &[TcaGraph], schedule: &ScheduleMapping) -> Vec<ScheduleViolation> {
    let paths = paths(chains);
    let mut out = Vec::new();
    let mut located = Vec::new();
    for s in &schedule.segments {
        let Some(pos) = locate(chains, &paths, s) else {
            out.push(ScheduleViolation::UnknownBlock {
                task: s.task,
                block: s.block.clone(),
            });
            continue;
        };
        let chain = &chains[s.task];
        let arc = &chain.arcs[pos];
        let Ok(w) = implicit_window(chain, &arc.id) else {
            out.push(ScheduleViolation::UnknownBlock {
                task: s.task,
                block: s.block.clone(),
            });
            continue;
        };
        if s.start < w.start {
            out.push(ScheduleViolation::StartBeforeAfterDate {
                task: s.task,
                block: s.block.clone(),
                date: w.start,
            });
        }
        if let TimeStamp::Finite(d) = w.min_deadline() {
            if s.end > d {
                out.push(ScheduleViolation::EndAfterBeforeDate {
                    task: s.task,
                    block: s.block.clone(),
                    date: d,
                });
            }
        }
        located.push((s, pos));
    }
    for (i, (a, pa)) in located.iter().enumerate() {
        for (b, pb) in &located[i + 1..] {
            if a.start < b.end && b.start < a.end {
                out.push(ScheduleViolation::Overlap {
                    at: a.start.max(b.start),
                });
            }
            if a.task != b.task || pa == pb {
                continue;
            }
            let order = |p: &usize| paths[a.task].iter().position(|x| x == p);
            let (first, later) = if order(pa) < order(pb) { (a, b) } else { (b, a) };
            if later.start < first.end {
                out.push(ScheduleViolation::OrderViolation {
                    task: a.task,
                    earlier: first.block.clone(),
                    later: later.block.clone(),
                });
            }
        }
    }
    out
}

/// Checks that every block whose deadline lies within the horizon gets at
/// least its execution time. Blocks without a deadline, or with one past
/// the horizon, are not checked.
pub fn check_correct(
    chains: &[TcaGraph],
    schedule: &ScheduleMapping,
    exec: &ExecTimeMap,
) -> Vec<ScheduleViolation> {
    let paths = paths(chains);
    let mut out = Vec::new();
    for (task, chain) in chains.iter().enumerate() {
        for &pos in &paths[task] {
            let arc = &chain.arcs[pos];
            let Ok(w) = implicit_window(chain, &arc.id) else {
                continue;
            };
            let deadline = w.min_deadline();
            if !deadline.is_finite() || deadline > schedule.horizon {
                continue;
            }
            let need = exec.cost(task, arc.key()).unwrap_or(arc.block.cost);
            let got: Rat = schedule
                .segments
                .iter()
                .filter(|s| s.task == task && locate(chains, &paths, s) == Some(pos))
                .map(Segment::duration)
                .sum();
            if got < need {
                out.push(ScheduleViolation::Underallocated {
                    task,
                    block: arc.key().to_string(),
                    got,
                    need,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::f1;
    use crate::time::rat;

    fn seg(block: &str, pos: usize, start: i64, end: i64) -> Segment {
        let path = ["a", "b", "c", "d"];
        Segment {
            task: 0,
            occurrence: path[..=pos].iter().map(|s| s.to_string()).collect(),
            block: block.into(),
            start: rat(start),
            end: rat(end),
        }
    }

    fn f1_schedule(segs: Vec<Segment>) -> ScheduleMapping {
        ScheduleMapping {
            tasks: vec!["f1".into()],
            segments: segs,
            horizon: TimeStamp::Finite(rat(10)),
        }
    }

    fn valid() -> Vec<Segment> {
        vec![seg("a", 0, 1, 2), seg("b", 1, 2, 4), seg("c", 2, 4, 5), seg("d", 3, 7, 9)]
    }

    #[test]
    fn f1_hand_schedule_is_valid_and_correct() {
        let s = f1_schedule(valid());
        assert_eq!(validate_schedule(&[f1()], &s), vec![]);
        assert_eq!(check_correct(&[f1()], &s, &ExecTimeMap::from_graphs(&[f1()])), vec![]);
    }

    #[test]
    fn early_start_is_reported() {
        let mut segs = valid();
        segs[0] = seg("a", 0, 0, 1);
        assert_eq!(
            validate_schedule(&[f1()], &f1_schedule(segs)),
            vec![ScheduleViolation::StartBeforeAfterDate {
                task: 0,
                block: "a".into(),
                date: rat(1)
            }]
        );
    }

    #[test]
    fn late_end_is_reported() {
        let mut segs = valid();
        segs[2] = seg("c", 2, 6, 8);
        segs[3] = seg("d", 3, 8, 10);
        assert_eq!(
            validate_schedule(&[f1()], &f1_schedule(segs)),
            vec![ScheduleViolation::EndAfterBeforeDate {
                task: 0,
                block: "c".into(),
                date: rat(7)
            }]
        );
    }

    #[test]
    fn overlap_and_order() {
        let mut segs = valid();
        segs[1] = seg("b", 1, 1, 3);
        let v = validate_schedule(&[f1()], &f1_schedule(segs));
        assert!(v.contains(&ScheduleViolation::Overlap { at: rat(1) }));
        assert!(v.contains(&ScheduleViolation::OrderViolation {
            task: 0,
            earlier: "a".into(),
            later: "b".into()
        }));
    }

    #[test]
    fn under_and_over_allocation() {
        let s = f1_schedule(valid());
        let exec = ExecTimeMap::from_graphs(&[f1()]).with(0, "d", rat(3));
        assert_eq!(
            check_correct(&[f1()], &s, &exec),
            vec![ScheduleViolation::Underallocated {
                task: 0,
                block: "d".into(),
                got: rat(2),
                need: rat(3)
            }]
        );
        let mut segs = valid();
        segs[1] = seg("b", 1, 2, 5);
        segs[2] = seg("c", 2, 5, 6);
        let s = f1_schedule(segs);
        assert_eq!(validate_schedule(&[f1()], &s), vec![]);
        assert_eq!(check_correct(&[f1()], &s, &ExecTimeMap::from_graphs(&[f1()])), vec![]);
    }

    #[test]
    fn unknown_block() {
        let mut segs = valid();
        segs[0].block = "zz".into();
        assert!(matches!(
            validate_schedule(&[f1()], &f1_schedule(segs))[0],
            ScheduleViolation::UnknownBlock { .. }
        ));
    }
}

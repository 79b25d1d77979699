use std::collections::HashMap;

use serde::Serialize;

use super::{DiscreteInstance, FeasibilityError};
use crate::scheduler::{ScheduleMapping, Segment};
use crate::time::TimeStamp;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub states_explored: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Done,
    /// Arrived at a node, next block not chosen yet.
    At(usize),
    /// Working on an arc, with the number of units already received.
    In { arc: usize, units: i64 },
}

enum Settled {
    Failed,
    Ready(Vec<Slot>),
    Choice(Vec<Slot>, usize, usize),
}

pub(super) struct Search<'a> {
    inst: &'a DiscreteInstance,
    memo: HashMap<(i64, Vec<Slot>), bool>,
    max_states: usize,
}

impl<'a> Search<'a> {
    pub fn new(inst: &'a DiscreteInstance, max_states: usize) -> Self {
        Search {
            inst,
            memo: HashMap::new(),
            max_states,
        }
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            states_explored: self.memo.len(),
        }
    }

    pub fn run(&mut self) -> Result<bool, FeasibilityError> {
        let st = self.inst.tasks.iter().map(|t| Slot::At(t.initial)).collect();
        self.resolve(0, st)
    }

    /// Completes empty blocks and moves past non-choice nodes at instant
    /// `k`, checking the deadline of every node reached.
    fn settle(&self, k: i64, mut st: Vec<Slot>) -> Settled {
        for i in 0..st.len() {
            let t = &self.inst.tasks[i];
            loop {
                match st[i] {
                    Slot::In { arc, units } if units == t.arcs[arc].cost && t.arcs[arc].start <= k => {
                        let v = t.arcs[arc].to;
                        if t.nodes[v].deadline.is_some_and(|d| d < k) {
                            return Settled::Failed;
                        }
                        st[i] = Slot::At(v);
                    }
                    Slot::At(v) => {
                        let node = &t.nodes[v];
                        if node.frontier
                            || t.out[v].is_empty()
                            || node.after.is_some_and(|a| a > self.inst.horizon)
                        {
                            st[i] = Slot::Done;
                        } else if let [a] = t.out[v][..] {
                            st[i] = Slot::In { arc: a, units: 0 };
                        } else {
                            return Settled::Choice(st, i, v);
                        }
                    }
                    _ => break,
                }
            }
        }
        Settled::Ready(st)
    }

    /// True when every branch of the pending choices can still be
    /// completed correctly.
    fn resolve(&mut self, k: i64, st: Vec<Slot>) -> Result<bool, FeasibilityError> {
        match self.settle(k, st) {
            Settled::Failed => Ok(false),
            Settled::Ready(s) => self.search(k, s),
            Settled::Choice(s, i, v) => {
                for &a in &self.inst.tasks[i].out[v] {
                    let mut s2 = s.clone();
                    s2[i] = Slot::In { arc: a, units: 0 };
                    if !self.resolve(k, s2)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Tasks that may receive slot `[k, k+1)`.
    fn runnable(&self, k: i64, st: &[Slot]) -> Vec<usize> {
        (0..st.len())
            .filter(|&i| match st[i] {
                Slot::In { arc, units } => {
                    let a = &self.inst.tasks[i].arcs[arc];
                    units < a.cost && a.start <= k
                }
                _ => false,
            })
            .collect()
    }

    fn search(&mut self, k: i64, st: Vec<Slot>) -> Result<bool, FeasibilityError> {
        let key = (k, st);
        if let Some(&r) = self.memo.get(&key) {
            return Ok(r);
        }
        if self.memo.len() >= self.max_states {
            return Err(FeasibilityError::BudgetExceeded(format!(
                "more than {} search states",
                self.max_states
            )));
        }
        let st = &key.1;
        let late = st.iter().enumerate().any(|(i, s)| match *s {
            Slot::In { arc, .. } => {
                let t = &self.inst.tasks[i];
                t.min_deadline[t.arcs[arc].to].is_some_and(|d| d <= k)
            }
            _ => false,
        });
        let result = if late {
            false
        } else if k >= self.inst.horizon || st.iter().all(|s| *s == Slot::Done) {
            true
        } else {
            let mut found = false;
            for i in self.runnable(k, st) {
                let mut s2 = st.clone();
                if let Slot::In { units, .. } = &mut s2[i] {
                    *units += 1;
                }
                if self.resolve(k + 1, s2)? {
                    found = true;
                    break;
                }
            }
            found || self.resolve(k + 1, st.clone())?
        };
        self.memo.insert(key, result);
        Ok(result)
    }

    /// Replays a successful search on a choice-free instance.
    pub fn witness(&mut self, horizon: TimeStamp) -> ScheduleMapping {
        let inst = self.inst;
        let mut segments: Vec<Segment> = Vec::new();
        let mut k = 0;
        let start: Vec<Slot> = inst.tasks.iter().map(|t| Slot::At(t.initial)).collect();
        let Settled::Ready(mut st) = self.settle(0, start) else {
            panic!("witness needs a feasible choice-free instance");
        };
        while k < inst.horizon && !st.iter().all(|s| *s == Slot::Done) {
            let mut next = None;
            for i in self.runnable(k, &st).into_iter().map(Some).chain([None]) {
                let mut s2 = st.clone();
                if let Some(i) = i {
                    if let Slot::In { units, .. } = &mut s2[i] {
                        *units += 1;
                    }
                }
                if let Settled::Ready(s3) = self.settle(k + 1, s2) {
                    if self.search(k + 1, s3.clone()).unwrap_or(false) {
                        next = Some((i, s3));
                        break;
                    }
                }
            }
            let (ran, s3) = next.expect("memoized success has a successor");
            if let Some(i) = ran {
                let Slot::In { arc, .. } = st[i] else {
                    unreachable!()
                };
                let a = &inst.tasks[i].arcs[arc];
                let (start, end) = (inst.unscale(k), inst.unscale(k + 1));
                match segments.last_mut() {
                    Some(s) if s.task == i && s.occurrence == a.path && s.end == start => s.end = end,
                    _ => segments.push(Segment {
                        task: i,
                        occurrence: a.path.clone(),
                        block: a.key.clone(),
                        start,
                        end,
                    }),
                }
            }
            st = s3;
            k += 1;
        }
        ScheduleMapping {
            tasks: inst.tasks.iter().map(|t| t.name.clone()).collect(),
            segments,
            horizon,
        }
    }
}

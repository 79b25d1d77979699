use std::collections::BTreeMap;

use crate::error::{FormatError, TcaError};
use crate::time::Rat;
use crate::transform::ChoiceSet;

/// What the simulator knows at an instant of choice.
#[derive(Clone, Debug)]
pub struct ChoiceQuery<'a> {
    pub task: usize,
    pub task_name: &'a str,
    /// How many choices this task has already made.
    pub index: usize,
    /// Arc keys leading to the choice node.
    pub occurrence: &'a [String],
    pub time: Rat,
    /// Keys of the outgoing arcs, in declaration order.
    pub options: &'a [String],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub branch: usize,
    /// The oracle had no explicit answer and fell back to a default.
    pub defaulted: bool,
}

/// Resolves nondeterministic choices during a simulation. Must answer the
/// same query the same way.
pub trait ChoiceOracle {
    fn choose(&mut self, query: &ChoiceQuery<'_>) -> Result<Decision, TcaError>;
}

/// Always takes the first outgoing arc.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstBranch;

impl ChoiceOracle for FirstBranch {
    fn choose(&mut self, _: &ChoiceQuery<'_>) -> Result<Decision, TcaError> {
        Ok(Decision {
            branch: 0,
            defaulted: true,
        })
    }
}

/// Answers from a [`ChoiceSet`] keyed by occurrence.
pub struct ChoiceSetOracle<'a>(pub &'a ChoiceSet);

impl ChoiceOracle for ChoiceSetOracle<'_> {
    fn choose(&mut self, q: &ChoiceQuery<'_>) -> Result<Decision, TcaError> {
        let arc = self
            .0
            .get(q.task, q.occurrence)
            .ok_or_else(|| TcaError::UnresolvedChoice {
                task: q.task,
                occurrence: q.occurrence.to_vec(),
            })?;
        let branch = q
            .options
            .iter()
            .position(|o| o == arc)
            .ok_or_else(|| TcaError::BadChoice {
                task: q.task,
                occurrence: q.occurrence.to_vec(),
                arc: arc.to_string(),
            })?;
        Ok(Decision {
            branch,
            defaulted: false,
        })
    }
}

/// A textual list of choices.
///
/// ```text
/// # agent  choice-index  branch-index
/// f9 0 1
/// default 0
/// ```
///
/// The n-th choice made by an agent (counting from 0) takes the listed
/// branch; unlisted choices take the default branch (0 unless a
/// `default` line says otherwise).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChoiceScript {
    pub entries: BTreeMap<(String, usize), usize>,
    pub default: usize,
}

impl ChoiceScript {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut script = ChoiceScript::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| FormatError::Invalid(format!("choice script line {}: {what}", n + 1));
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("`{s}` is not an index")));
            match words.as_slice() {
                ["default", b] => script.default = num(b)?,
                [agent, occ, b] => {
                    if script
                        .entries
                        .insert((agent.to_string(), num(occ)?), num(b)?)
                        .is_some()
                    {
                        return Err(bad("duplicate entry"));
                    }
                }
                _ => return Err(bad("expected `agent choice-index branch-index`")),
            }
        }
        Ok(script)
    }
}

impl ChoiceOracle for ChoiceScript {
    fn choose(&mut self, q: &ChoiceQuery<'_>) -> Result<Decision, TcaError> {
        let listed = self.entries.get(&(q.task_name.to_string(), q.index));
        let branch = listed.copied().unwrap_or(self.default);
        if branch >= q.options.len() {
            return Err(TcaError::Oracle(format!(
                "branch {branch} requested for choice {} of `{}`, which has {} branches",
                q.index,
                q.task_name,
                q.options.len()
            )));
        }
        Ok(Decision {
            branch,
            defaulted: listed.is_none(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::rat;

    fn query<'a>(name: &'a str, index: usize, options: &'a [String]) -> ChoiceQuery<'a> {
        ChoiceQuery {
            task: 0,
            task_name: name,
            index,
            occurrence: &[],
            time: rat(0),
            options,
        }
    }

    #[test]
    fn script_lookup_and_default() {
        let opts = vec!["b".to_string(), "c".to_string()];
        let mut s = ChoiceScript::parse("# comment\nf9 0 1\n\ndefault 0\n").unwrap();
        assert_eq!(
            s.choose(&query("f9", 0, &opts)).unwrap(),
            Decision { branch: 1, defaulted: false }
        );
        assert_eq!(
            s.choose(&query("f9", 1, &opts)).unwrap(),
            Decision { branch: 0, defaulted: true }
        );
        let mut empty = ChoiceScript::parse("").unwrap();
        assert_eq!(empty.choose(&query("x", 0, &opts)).unwrap().branch, 0);
    }

    #[test]
    fn script_errors() {
        assert!(ChoiceScript::parse("f9 0").is_err());
        assert!(ChoiceScript::parse("f9 x 1").is_err());
        assert!(ChoiceScript::parse("f9 0 1\nf9 0 0").is_err());
        let opts = vec!["b".to_string(), "c".to_string()];
        let mut s = ChoiceScript::parse("f9 0 2").unwrap();
        assert!(matches!(s.choose(&query("f9", 0, &opts)), Err(TcaError::Oracle(_))));
    }
}

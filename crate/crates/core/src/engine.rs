//! Partial two-valued assignments and the admissibility rules.
//!
//! Rule (a): a context holding a 1 forces 0 on its other members.
//! Rule (b): a context whose other members are all 0 forces 1 on the last.
//!
//! [`propagate`] runs both rules to a fixpoint in synchronous rounds: every
//! derivation of a round is read off the assignment as it stood when the
//! round began, candidates are visited by ascending context id then
//! observable id, and the first derivation opposing a known value ends the
//! run. The values held when the conflicting round began are therefore the
//! same for every visiting order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, ObsId};
use crate::error::{Error, Result};

/// Default number of total assignments [`search_total_admissible`] collects.
pub const DEFAULT_SEARCH_CAP: usize = 16;

/// Partial map observable → {0,1}.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    values: BTreeMap<ObsId, u8>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: &[(ObsId, u8)]) -> Self {
        let mut a = Assignment::new();
        for &(id, v) in pairs {
            a.set(id, v);
        }
        a
    }

    /// Panics unless `value` is 0 or 1.
    pub fn set(&mut self, id: ObsId, value: u8) {
        assert!(value <= 1, "two-valued assignment got {value}");
        self.values.insert(id, value);
    }

    pub fn get(&self, id: ObsId) -> Option<u8> {
        self.values.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ObsId, u8)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn ids_with(&self, value: u8) -> BTreeSet<ObsId> {
        self.iter().filter(|&(_, v)| v == value).map(|(k, _)| k).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    A,
    B,
    #[serde(rename = "seed")]
    Seed,
}

/// One rule application. Seed steps carry no context and no premises.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeductionStep {
    pub context: Option<usize>,
    pub rule: Rule,
    pub premises: Vec<(ObsId, u8)>,
    pub conclusion: (ObsId, u8),
}

impl DeductionStep {
    pub fn seed(id: ObsId, value: u8) -> Self {
        DeductionStep { context: None, rule: Rule::Seed, premises: Vec::new(), conclusion: (id, value) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Fixpoint(Assignment),
    /// `established` set the value that `conflicting` opposes. `closure`
    /// holds every value known before the conflicting step.
    Contradiction {
        observable: ObsId,
        established: DeductionStep,
        conflicting: DeductionStep,
        closure: Assignment,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationResult {
    pub outcome: Outcome,
    /// Replayable from the seed; on contradiction the last step is the conflicting one.
    pub trace: Vec<DeductionStep>,
}

impl PropagationResult {
    pub fn is_contradiction(&self) -> bool {
        matches!(self.outcome, Outcome::Contradiction { .. })
    }

    /// Fixpoint assignment, or the closure preceding the conflict.
    pub fn assignment(&self) -> &Assignment {
        match &self.outcome {
            Outcome::Fixpoint(a) => a,
            Outcome::Contradiction { closure, .. } => closure,
        }
    }
}

/// Order in which rule applications are scheduled.
#[derive(Clone, Debug, Default)]
pub enum Schedule {
    /// Synchronous rounds, ascending context id inside a round.
    #[default]
    Rounds,
    /// Apply each derivation immediately, always revisiting the pending
    /// context with the smallest rank; `rank[c]` is context `c`'s priority.
    Eager { rank: Vec<usize> },
}

pub fn propagate(d: &Diagram, seed: &Assignment) -> Result<PropagationResult> {
    propagate_scheduled(d, seed, &Schedule::Rounds)
}

pub fn propagate_scheduled(d: &Diagram, seed: &Assignment, schedule: &Schedule) -> Result<PropagationResult> {
    if let Some((id, _)) = seed.iter().find(|&(id, _)| id >= d.len()) {
        return Err(Error::UnknownObservable(id.to_string()));
    }
    let state = State::new(d, seed);
    match schedule {
        Schedule::Rounds => state.run_rounds(),
        Schedule::Eager { rank } => {
            if rank.len() != d.contexts().len() {
                return Err(Error::PreconditionViolated("schedule rank must cover every context".into()));
            }
            state.run_eager(rank)
        }
    }
}

struct State<'a> {
    d: &'a Diagram,
    values: Vec<Option<u8>>,
    origin: Vec<usize>,
    trace: Vec<DeductionStep>,
}

impl<'a> State<'a> {
    fn new(d: &'a Diagram, seed: &Assignment) -> Self {
        let mut s = State { d, values: vec![None; d.len()], origin: vec![usize::MAX; d.len()], trace: Vec::new() };
        for (id, v) in seed.iter() {
            s.record(DeductionStep::seed(id, v));
        }
        s
    }

    fn record(&mut self, step: DeductionStep) {
        let (id, v) = step.conclusion;
        self.values[id] = Some(v);
        self.origin[id] = self.trace.len();
        self.trace.push(step);
    }

    fn seeded_contexts(&self) -> BTreeSet<usize> {
        self.trace.iter().flat_map(|s| self.d.contexts_of(s.conclusion.0).iter().copied()).collect()
    }

    fn assignment(&self) -> Assignment {
        let mut a = Assignment::new();
        for (id, v) in self.values.iter().enumerate() {
            if let Some(v) = v {
                a.set(id, *v);
            }
        }
        a
    }

    /// Every rule instance the context supports under the current values,
    /// ordered by conclusion id.
    fn derive(&self, cid: usize) -> Vec<DeductionStep> {
        let members = &self.d.contexts()[cid].members;
        let mut out = Vec::new();
        if let Some(&one) = members.iter().find(|&&m| self.values[m] == Some(1)) {
            for &m in members.iter().filter(|&&m| m != one) {
                out.push(DeductionStep { context: Some(cid), rule: Rule::A, premises: vec![(one, 1)], conclusion: (m, 0) });
            }
        }
        let zeros: Vec<ObsId> = members.iter().copied().filter(|&m| self.values[m] == Some(0)).collect();
        let target = if zeros.len() + 1 == members.len() {
            members.iter().copied().find(|m| !zeros.contains(m))
        } else if zeros.len() == members.len() {
            members.first().copied()
        } else {
            None
        };
        if let Some(t) = target {
            let premises = members.iter().filter(|&&m| m != t).map(|&m| (m, 0)).collect();
            out.push(DeductionStep { context: Some(cid), rule: Rule::B, premises, conclusion: (t, 1) });
        }
        out.sort_by_key(|s| s.conclusion.0);
        out
    }

    fn contradiction(mut self, observable: ObsId, established: DeductionStep, conflicting: DeductionStep) -> PropagationResult {
        let closure = self.assignment();
        self.trace.push(conflicting.clone());
        PropagationResult { outcome: Outcome::Contradiction { observable, established, conflicting, closure }, trace: self.trace }
    }

    fn run_rounds(mut self) -> Result<PropagationResult> {
        let mut dirty = self.seeded_contexts();
        while !dirty.is_empty() {
            let mut pending: Vec<DeductionStep> = Vec::new();
            let mut pending_at: HashMap<ObsId, usize> = HashMap::new();
            for &cid in &dirty {
                for step in self.derive(cid) {
                    let (id, v) = step.conclusion;
                    if let Some(old) = self.values[id] {
                        if old != v {
                            let established = self.trace[self.origin[id]].clone();
                            return Ok(self.contradiction(id, established, step));
                        }
                        continue;
                    }
                    match pending_at.get(&id) {
                        Some(&k) if pending[k].conclusion.1 != v => {
                            let established = pending[k].clone();
                            self.record(established.clone());
                            return Ok(self.contradiction(id, established, step));
                        }
                        Some(_) => {}
                        None => {
                            pending_at.insert(id, pending.len());
                            pending.push(step);
                        }
                    }
                }
            }
            dirty = BTreeSet::new();
            for step in pending {
                dirty.extend(self.d.contexts_of(step.conclusion.0).iter().copied());
                self.record(step);
            }
        }
        let a = self.assignment();
        Ok(PropagationResult { outcome: Outcome::Fixpoint(a), trace: self.trace })
    }

    fn run_eager(mut self, rank: &[usize]) -> Result<PropagationResult> {
        let mut queue: BTreeSet<(usize, usize)> = self.seeded_contexts().into_iter().map(|c| (rank[c], c)).collect();
        while let Some((_, cid)) = queue.pop_first() {
            for step in self.derive(cid) {
                let (id, v) = step.conclusion;
                match self.values[id] {
                    Some(old) if old != v => {
                        let established = self.trace[self.origin[id]].clone();
                        return Ok(self.contradiction(id, established, step));
                    }
                    Some(_) => {}
                    None => {
                        for &c in self.d.contexts_of(id) {
                            queue.insert((rank[c], c));
                        }
                        self.record(step);
                    }
                }
            }
        }
        let a = self.assignment();
        Ok(PropagationResult { outcome: Outcome::Fixpoint(a), trace: self.trace })
    }
}

/// Checks both rules on every context directly. An undefined member breaks
/// a rule whose conclusion would have to hold for it.
pub fn is_admissible(d: &Diagram, a: &Assignment) -> bool {
    d.contexts().iter().all(|c| {
        let n = c.members.len();
        let ones = c.members.iter().filter(|&&m| a.get(m) == Some(1)).count();
        let zeros = c.members.iter().filter(|&&m| a.get(m) == Some(0)).count();
        let rule_a = ones == 0 || (ones == 1 && zeros == n - 1);
        let rule_b = zeros < n - 1 || (zeros == n - 1 && ones == 1);
        rule_a && rule_b
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Sorted, at most `cap` entries.
    pub assignments: Vec<Assignment>,
    pub capped: bool,
}

/// Enumerates total admissible assignments by backtracking, pruning with
/// [`propagate`]. An empty, uncapped result proves none exists.
pub fn search_total_admissible(d: &Diagram, cap: usize) -> SearchOutcome {
    let mut found = Vec::new();
    let mut capped = false;
    if cap == 0 {
        return SearchOutcome { assignments: found, capped: !d.is_empty() };
    }
    let mut decisions = Assignment::new();
    search(d, &mut decisions, cap, &mut found, &mut capped);
    found.sort();
    SearchOutcome { assignments: found, capped }
}

fn search(d: &Diagram, decisions: &mut Assignment, cap: usize, found: &mut Vec<Assignment>, capped: &mut bool) {
    if *capped {
        return;
    }
    let res = propagate(d, decisions).expect("decisions reference diagram observables");
    let closure = match res.outcome {
        Outcome::Contradiction { .. } => return,
        Outcome::Fixpoint(a) => a,
    };
    match (0..d.len()).find(|&i| closure.get(i).is_none()) {
        None => {
            if is_admissible(d, &closure) {
                if found.len() == cap {
                    *capped = true;
                } else {
                    found.push(closure);
                }
            }
        }
        Some(free) => {
            for v in [1, 0] {
                decisions.set(free, v);
                search(d, decisions, cap, found, capped);
                decisions.values.remove(&free);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build_diagram;
    use crate::linalg::Vector;

    fn basis() -> Diagram {
        build_diagram(&[Vector::ints(&[1, 0, 0]), Vector::ints(&[0, 1, 0]), Vector::ints(&[0, 0, 1])]).unwrap()
    }

    #[test]
    fn admissibility_on_one_context() {
        let d = basis();
        assert!(is_admissible(&d, &Assignment::from_pairs(&[(0, 1), (1, 0), (2, 0)])));
        assert!(!is_admissible(&d, &Assignment::from_pairs(&[(0, 1), (1, 1), (2, 0)])));
        assert!(!is_admissible(&d, &Assignment::from_pairs(&[(0, 0), (1, 0)])));
        assert!(!is_admissible(&d, &Assignment::from_pairs(&[(0, 1)])));
        assert!(is_admissible(&d, &Assignment::from_pairs(&[(0, 0)])));
        assert!(is_admissible(&d, &Assignment::new()));
    }

    #[test]
    fn rule_a_then_fixpoint() {
        let d = basis();
        let r = propagate(&d, &Assignment::from_pairs(&[(1, 1)])).unwrap();
        assert_eq!(r.outcome, Outcome::Fixpoint(Assignment::from_pairs(&[(0, 0), (1, 1), (2, 0)])));
        assert_eq!(r.trace.len(), 3);
        assert_eq!(r.trace[1].rule, Rule::A);
    }

    #[test]
    fn rule_b_fires() {
        let d = basis();
        let r = propagate(&d, &Assignment::from_pairs(&[(0, 0), (2, 0)])).unwrap();
        assert_eq!(r.assignment().get(1), Some(1));
        let last = r.trace.last().unwrap();
        assert_eq!(last.rule, Rule::B);
        assert_eq!(last.premises, vec![(0, 0), (2, 0)]);
    }

    #[test]
    fn all_zero_context_contradicts() {
        let d = basis();
        let r = propagate(&d, &Assignment::from_pairs(&[(0, 0), (1, 0), (2, 0)])).unwrap();
        match r.outcome {
            Outcome::Contradiction { observable, established, conflicting, closure } => {
                assert_eq!(observable, 0);
                assert_eq!(established.rule, Rule::Seed);
                assert_eq!(conflicting.rule, Rule::B);
                assert_eq!(closure.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_ones_contradict() {
        let d = basis();
        let r = propagate(&d, &Assignment::from_pairs(&[(0, 1), (2, 1)])).unwrap();
        assert!(r.is_contradiction());
        assert_eq!(r.trace.last().unwrap().rule, Rule::A);
    }

    #[test]
    fn unknown_seed() {
        assert!(matches!(propagate(&basis(), &Assignment::from_pairs(&[(7, 1)])), Err(Error::UnknownObservable(_))));
    }

    #[test]
    fn undefined_never_fires() {
        let d = basis();
        let r = propagate(&d, &Assignment::from_pairs(&[(0, 0)])).unwrap();
        assert_eq!(r.outcome, Outcome::Fixpoint(Assignment::from_pairs(&[(0, 0)])));
    }

    #[test]
    fn single_context_has_three_total_assignments() {
        let s = search_total_admissible(&basis(), DEFAULT_SEARCH_CAP);
        assert_eq!(s.assignments.len(), 3);
        assert!(!s.capped);
        for a in &s.assignments {
            assert_eq!(a.len(), 3);
            assert!(is_admissible(&basis(), a));
        }
        let capped = search_total_admissible(&basis(), 2);
        assert_eq!(capped.assignments.len(), 2);
        assert!(capped.capped);
    }

    #[test]
    fn trace_json_shape() {
        let step = DeductionStep { context: Some(4), rule: Rule::B, premises: vec![(1, 0), (2, 0)], conclusion: (3, 1) };
        let json = serde_json::to_string(&vec![DeductionStep::seed(0, 1), step]).unwrap();
        assert_eq!(
            json,
            r#"[{"context":null,"rule":"seed","premises":[],"conclusion":[0,1]},{"context":4,"rule":"B","premises":[[1,0],[2,0]],"conclusion":[3,1]}]"#
        );
    }
}

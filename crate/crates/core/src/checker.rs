//! Stand-alone certificate verification.
//!
//! Only the serialized diagram and certificate are trusted as data. Every
//! context is re-tested for orthogonality, and every branch trace is
//! replayed against the two admissibility rules with a private assignment.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::certificate::{BranchProof, Certificate, LogEntry};
use crate::diagram::{Diagram, NumericMode, ObsId};
use crate::engine::{DeductionStep, Rule};
use crate::linalg::{inner, orthogonality_residual, overlap, Vector};

pub const DEFAULT_CHECK_EPSILON: f64 = 1e-8;

/// Parameter cross-checks only warn beyond this.
const PARAM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Orthogonality,
    ContextMembership,
    StepReplay,
    Contradiction,
    SeedShape,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Orthogonality => "orthogonality",
            Stage::ContextMembership => "context-membership",
            Stage::StepReplay => "step-replay",
            Stage::Contradiction => "contradiction",
            Stage::SeedShape => "seed-shape",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: Stage,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
    pub checker_epsilon: f64,
    pub diagram_epsilon: f64,
}

impl Verdict {
    pub fn has(&self, stage: Stage) -> bool {
        self.failures.iter().any(|f| f.stage == stage)
    }
}

pub fn check_certificate(d: &Diagram, c: &Certificate) -> Verdict {
    check_certificate_with(d, c, DEFAULT_CHECK_EPSILON)
}

pub fn check_certificate_with(d: &Diagram, c: &Certificate, eps: f64) -> Verdict {
    let mut ck = Checker { d, eps, failures: Vec::new(), warnings: Vec::new() };
    ck.contexts();
    ck.anchors(c);
    ck.seeds_shape(c);
    for (i, b) in c.branches.iter().enumerate() {
        ck.branch(i, c, b);
    }
    for e in &c.construction_log {
        ck.params(e);
    }
    let Checker { failures, warnings, .. } = ck;
    Verdict { ok: failures.is_empty(), failures, warnings, checker_epsilon: eps, diagram_epsilon: d.epsilon() }
}

struct Checker<'a> {
    d: &'a Diagram,
    eps: f64,
    failures: Vec<Failure>,
    warnings: Vec<String>,
}

impl Checker<'_> {
    fn fail(&mut self, stage: Stage, detail: String) {
        self.failures.push(Failure { stage, detail });
    }

    fn vector(&self, id: ObsId) -> Option<&Vector> {
        self.d.observable(id).map(|o| &o.vector)
    }

    fn orthogonal(&self, u: &Vector, v: &Vector) -> bool {
        if self.d.mode() == NumericMode::Exact && u.is_exact() && v.is_exact() {
            inner(u, v).is_zero()
        } else {
            orthogonality_residual(u, v) <= self.eps
        }
    }

    fn contexts(&mut self) {
        let n = self.d.len();
        for (cid, ctx) in self.d.contexts().iter().enumerate() {
            let m = &ctx.members;
            if m.len() != self.d.dim() {
                self.fail(Stage::Orthogonality, format!("context {cid} has {} members", m.len()));
                continue;
            }
            if m.iter().any(|&x| x >= n) {
                self.fail(Stage::Orthogonality, format!("context {cid} cites an unknown observable"));
                continue;
            }
            for (k, &i) in m.iter().enumerate() {
                for &j in &m[k + 1..] {
                    let (u, v) = (&self.d.observables()[i].vector, &self.d.observables()[j].vector);
                    if i == j || !self.orthogonal(u, v) {
                        let r = orthogonality_residual(u, v);
                        self.fail(Stage::Orthogonality, format!("context {cid}: observables {i}, {j} have residual {r:e}"));
                    }
                }
            }
        }
    }

    fn anchors(&mut self, c: &Certificate) {
        let (Some(psi), Some(phi)) = (self.vector(c.psi), self.vector(c.phi)) else {
            self.fail(Stage::SeedShape, format!("psi {} or phi {} is not in the diagram", c.psi, c.phi));
            return;
        };
        let actual = overlap(psi, phi);
        if !(c.overlap.is_finite() && (actual - c.overlap).abs() <= self.eps) {
            self.fail(Stage::SeedShape, format!("declared overlap {} but psi, phi have {actual}", c.overlap));
        }
        if !(actual > self.eps && actual < 1.0 - self.eps) {
            self.fail(Stage::SeedShape, format!("overlap {actual} is not strictly between 0 and 1"));
        }
    }

    fn seeds_shape(&mut self, c: &Certificate) {
        if c.branches.len() != 2 {
            self.fail(Stage::SeedShape, format!("expected 2 branches, found {}", c.branches.len()));
            return;
        }
        let mut values: Vec<u8> = c.branches.iter().map(|b| b.assumption.1).collect();
        values.sort_unstable();
        if values != [0, 1] {
            self.fail(Stage::SeedShape, format!("branch assumptions take values {values:?}, not 0 and 1"));
        }
    }

    fn branch(&mut self, i: usize, c: &Certificate, b: &BranchProof) {
        let (target, value) = b.assumption;
        if target != c.phi || value > 1 {
            self.fail(Stage::SeedShape, format!("branch {i} assumes {target}={value}, not a value of phi {}", c.phi));
        }
        let seeds: Vec<&DeductionStep> = b.trace.iter().take_while(|s| s.rule == Rule::Seed).collect();
        let mut got: Vec<(ObsId, u8)> = seeds.iter().map(|s| s.conclusion).collect();
        got.sort_unstable();
        let mut want = vec![(c.psi, 1), (c.phi, value)];
        want.sort_unstable();
        if got != want {
            self.fail(Stage::SeedShape, format!("branch {i} seeds {got:?}, expected {want:?}"));
        }
        for s in &seeds {
            if s.context.is_some() || !s.premises.is_empty() {
                self.fail(Stage::SeedShape, format!("branch {i} seed {:?} carries a context or premises", s.conclusion));
            }
        }

        let mut values: BTreeMap<ObsId, (u8, usize)> = BTreeMap::new();
        let last = b.trace.len().saturating_sub(1);
        let mut conflict: Option<(ObsId, usize)> = None;
        for (k, step) in b.trace.iter().enumerate() {
            let (id, v) = step.conclusion;
            if id >= self.d.len() || v > 1 {
                self.fail(Stage::StepReplay, format!("branch {i} step {k} concludes {id}={v}"));
                continue;
            }
            if step.rule == Rule::Seed {
                if k >= seeds.len() {
                    self.fail(Stage::SeedShape, format!("branch {i} step {k} is a seed after deductions began"));
                }
            } else {
                self.step(i, k, step, &values);
            }
            match values.get(&id) {
                Some(&(old, origin)) if old != v => {
                    if k == last {
                        conflict = Some((id, origin));
                    } else {
                        self.fail(Stage::StepReplay, format!("branch {i} step {k} contradicts step {origin} early"));
                    }
                }
                Some(_) => {}
                None => {
                    values.insert(id, (v, k));
                }
            }
        }

        let Some((id, origin)) = conflict else {
            self.fail(Stage::Contradiction, format!("branch {i} final step does not oppose an established value"));
            return;
        };
        let (cid, est, conf) = &b.contradiction;
        if *cid != id || *est != b.trace[origin] || *conf != b.trace[last] || last < seeds.len() {
            self.fail(
                Stage::Contradiction,
                format!("branch {i} contradiction record does not match the trace conflict at observable {id}"),
            );
        }
    }

    fn step(&mut self, i: usize, k: usize, step: &DeductionStep, values: &BTreeMap<ObsId, (u8, usize)>) {
        let Some(ctx) = step.context.and_then(|cid| self.d.contexts().get(cid)) else {
            self.fail(Stage::ContextMembership, format!("branch {i} step {k} cites context {:?}", step.context));
            return;
        };
        let (id, v) = step.conclusion;
        if !ctx.contains(id) || step.premises.iter().any(|&(p, _)| !ctx.contains(p)) {
            self.fail(
                Stage::ContextMembership,
                format!("branch {i} step {k}: context {:?} lacks a premise or the conclusion", step.context),
            );
        }
        let mut ids: Vec<ObsId> = step.premises.iter().map(|&(p, _)| p).collect();
        ids.push(id);
        ids.sort_unstable();
        let distinct = ids.windows(2).all(|w| w[0] != w[1]);
        let shape = distinct
            && match step.rule {
                Rule::A => step.premises.len() == 1 && step.premises[0].1 == 1 && v == 0,
                Rule::B => step.premises.len() + 1 == ctx.members.len() && step.premises.iter().all(|p| p.1 == 0) && v == 1,
                Rule::Seed => false,
            };
        if !shape {
            self.fail(Stage::StepReplay, format!("branch {i} step {k} does not match rule {:?}", step.rule));
        }
        for &(p, pv) in &step.premises {
            if values.get(&p).map(|x| x.0) != Some(pv) {
                self.fail(Stage::StepReplay, format!("branch {i} step {k}: premise {p}={pv} not established"));
            }
        }
    }

    fn params(&mut self, e: &LogEntry) {
        let pairs: &[(&str, &str, &str)] = match e.gadget.as_str() {
            "lemma1" => &[("a", "b", "")],
            "contraction" => &[("a", "b", "p"), ("a", "c", "z")],
            "expansion" => &[("a", "b", "alpha"), ("c", "d", "overlap")],
            "iteration" => &[("a", "b", "alpha0"), ("c", "d", "alpha_k")],
            "frame" => &[("psi", "phi", "p"), ("psi", "phi'", "q")],
            _ => &[],
        };
        for &(x, y, param) in pairs {
            let want = if param.is_empty() { Some(FRAC_1_SQRT_2) } else { e.params.get(param).copied() };
            let vx = e.anchors.get(x).and_then(|&id| self.vector(id));
            let vy = e.anchors.get(y).and_then(|&id| self.vector(id));
            match (vx, vy, want) {
                (Some(u), Some(v), Some(want)) => {
                    let got = overlap(u, v);
                    if (got - want).abs() > PARAM_TOLERANCE {
                        self.warnings.push(format!("{} branch {}: overlap({x},{y}) = {got}, logged {want}", e.gadget, e.branch));
                    }
                }
                _ => self.warnings.push(format!("{} branch {}: cannot cross-check {x},{y}", e.gadget, e.branch)),
            }
        }
    }
}

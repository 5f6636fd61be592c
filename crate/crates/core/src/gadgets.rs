//! Vector sets with a verified forcing contract.
//!
//! Each constructor builds its vectors in a fixed reference frame, rotates
//! them onto the caller's anchors, rebuilds the orthogonality diagram and
//! runs [`propagate`] on it to confirm the contract before returning.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::data;
use crate::diagram::{build_labeled, BuildOptions, Diagram, DiagramFile, LabeledVector, NumericMode, ObsId, DEFAULT_EPSILON};
use crate::engine::{propagate, Assignment, Outcome};
use crate::error::{Error, Result};
use crate::linalg::{cross3, dot3, map_pair, unit3, Transform, Vector, V3};

/// Overlaps within this distance above 1/3 count as having reached 1/3.
pub const ITERATION_TOLERANCE: f64 = 1e-12;

const THIRD: f64 = 1.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetKind {
    Lemma1,
    Contraction,
    Expansion,
    Iteration,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Lemma1 => "lemma1",
            GadgetKind::Contraction => "contraction",
            GadgetKind::Expansion => "expansion",
            GadgetKind::Iteration => "iteration",
        }
    }
}

/// Values assumed on anchors and what propagation must then yield: the
/// listed forced values, or a contradiction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub assume: Vec<(String, u8)>,
    #[serde(default)]
    pub force: Vec<(String, u8)>,
    #[serde(default)]
    pub contradiction: bool,
}

impl Clause {
    fn forces(assume: &[(&str, u8)], force: &[(&str, u8)]) -> Self {
        Clause { assume: owned(assume), force: owned(force), contradiction: false }
    }

    fn contradicts(assume: &[(&str, u8)]) -> Self {
        Clause { assume: owned(assume), force: Vec::new(), contradiction: true }
    }
}

fn owned(pairs: &[(&str, u8)]) -> Vec<(String, u8)> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub diagram: Diagram,
    /// Anchor name → observable id in `diagram`.
    pub anchors: BTreeMap<String, ObsId>,
    pub contract: Vec<Clause>,
    pub params: BTreeMap<String, f64>,
    /// Rotation from the reference frame, when one was applied.
    pub transform: Option<Transform>,
}

#[derive(Serialize)]
struct GadgetFile<'a> {
    kind: GadgetKind,
    diagram: DiagramFile,
    anchors: &'a BTreeMap<String, ObsId>,
    contract: &'a [Clause],
    params: &'a BTreeMap<String, f64>,
}

impl Gadget {
    pub fn vectors(&self) -> Vec<&Vector> {
        self.diagram.observables().iter().map(|o| &o.vector).collect()
    }

    pub fn anchor(&self, name: &str) -> Option<&Vector> {
        self.anchors.get(name).map(|&id| &self.diagram.observables()[id].vector)
    }

    /// Labeled vectors with `prefix` prepended to every label.
    pub fn labeled_entries(&self, prefix: &str) -> Vec<LabeledVector> {
        self.diagram
            .observables()
            .iter()
            .map(|o| LabeledVector {
                label: Some(format!("{prefix}{}", o.label.as_deref().unwrap_or(&o.id.to_string()))),
                vector: o.vector.clone(),
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GadgetFile {
            kind: self.kind,
            diagram: self.diagram.to_file(),
            anchors: &self.anchors,
            contract: &self.contract,
            params: &self.params,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    fn assemble(
        kind: GadgetKind,
        entries: Vec<LabeledVector>,
        anchor_vectors: Vec<(&str, Vector)>,
        contract: Vec<Clause>,
        params: BTreeMap<String, f64>,
        transform: Option<Transform>,
        epsilon: f64,
    ) -> Result<Gadget> {
        let mode = if entries.iter().all(|e| e.vector.is_exact()) { NumericMode::Exact } else { NumericMode::Float };
        let (diagram, _) = build_labeled(&entries, BuildOptions { mode: Some(mode), epsilon })?;
        let mut anchors = BTreeMap::new();
        for (name, v) in anchor_vectors {
            let id = diagram
                .find_vector(&v)
                .ok_or_else(|| Error::ContractViolated(format!("{} anchor {name} missing from diagram", kind.name())))?;
            anchors.insert(name.to_string(), id);
        }
        let g = Gadget { kind, diagram, anchors, contract, params, transform };
        g.verify()?;
        Ok(g)
    }

    /// Runs every contract clause through [`propagate`].
    pub fn verify(&self) -> Result<()> {
        let id = |name: &str| {
            self.anchors.get(name).copied().ok_or_else(|| Error::ContractViolated(format!("unknown anchor {name}")))
        };
        for clause in &self.contract {
            let mut seed = Assignment::new();
            for (name, v) in &clause.assume {
                seed.set(id(name)?, *v);
            }
            let res = propagate(&self.diagram, &seed)?;
            let fail = |what: String| Error::ContractViolated(format!("{}: {what}", self.kind.name()));
            match (&res.outcome, clause.contradiction) {
                (Outcome::Contradiction { .. }, true) => {}
                (Outcome::Fixpoint(_), true) => return Err(fail(format!("{:?} did not contradict", clause.assume))),
                (Outcome::Contradiction { observable, .. }, false) => {
                    return Err(fail(format!("{:?} contradicted at observable {observable}", clause.assume)))
                }
                (Outcome::Fixpoint(a), false) => {
                    for (name, v) in &clause.force {
                        if a.get(id(name)?) != Some(*v) {
                            return Err(fail(format!("{:?} did not force {name}={v}", clause.assume)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn lemma1_contract() -> Vec<Clause> {
    vec![Clause::contradicts(&[("a", 1), ("b", 1)]), Clause::contradicts(&[("a", 1), ("b", 0)])]
}

/// The 37-vector set in exact form, anchors `a = (1,0,0)` and `b = (√2,1,1)`.
/// Under `a = 1` both values of `b` contradict.
pub fn lemma1_canonical() -> Result<Gadget> {
    let entries = data::table1_entries();
    let anchor = |label: &str| entries.iter().find(|e| e.label.as_deref() == Some(label)).map(|e| e.vector.clone());
    let (a, b) = (anchor("P_a").expect("table has P_a"), anchor("P_b").expect("table has P_b"));
    Gadget::assemble(GadgetKind::Lemma1, entries, vec![("a", a), ("b", b)], lemma1_contract(), BTreeMap::new(), None, DEFAULT_EPSILON)
}

/// The 37-vector set rotated so that its anchors land on the rays of `a`
/// and `b`, which must have overlap 1/√2 within `eps`.
pub fn lemma1_for(a: &Vector, b: &Vector, eps: f64) -> Result<Gadget> {
    lemma1_for_with(a, b, eps, DEFAULT_EPSILON)
}

/// [`lemma1_for`] with an explicit diagram tolerance.
pub fn lemma1_for_with(a: &Vector, b: &Vector, eps: f64, diagram_eps: f64) -> Result<Gadget> {
    let p = unit_overlap(a, b)?;
    if (p - FRAC_1_SQRT_2).abs() > eps {
        return Err(Error::OverlapMismatch { expected: FRAC_1_SQRT_2, found: p });
    }
    let entries = data::table1_entries();
    let find = |l: &str| entries.iter().find(|e| e.label.as_deref() == Some(l)).expect("table anchor").vector.clone();
    let r = map_pair(&find("P_a"), &find("P_b"), a, b, eps)?;
    let rotated = entries
        .iter()
        .map(|e| Ok(LabeledVector { label: e.label.clone(), vector: r.apply(&e.vector)? }))
        .collect::<Result<Vec<_>>>()?;
    let ra = r.apply(&find("P_a"))?;
    let rb = r.apply(&find("P_b"))?;
    let mut params = BTreeMap::new();
    params.insert("p".to_string(), p);
    Gadget::assemble(GadgetKind::Lemma1, rotated, vec![("a", ra), ("b", rb)], lemma1_contract(), params, Some(r), diagram_eps)
}

/// `|⟨u,v⟩| / (‖u‖‖v‖)` as a float.
fn unit_overlap(u: &Vector, v: &Vector) -> Result<f64> {
    let (u, v) = (unit3(&u.to_v3()?)?, unit3(&v.to_v3()?)?);
    Ok(dot3(&u, &v).abs().min(1.0))
}

fn vec3(v: V3) -> Vector {
    Vector::from_f64(&v)
}

fn labeled(label: &str, v: Vector) -> LabeledVector {
    LabeledVector::new(label, v)
}

/// Finds a ray `c` with overlap `z` to `a` such that `v(a) = v(b) = 1`
/// forces `v(c) = 1`, through the auxiliaries `α = a×c`, `β = b×c`,
/// `α′ = a×α`, `β′ = b×β`. Requires `0 < |⟨a,b⟩| < z < 1` on unit vectors.
pub fn contraction(a: &Vector, b: &Vector, z: f64) -> Result<Gadget> {
    contraction_with(a, b, z, DEFAULT_EPSILON)
}

/// [`contraction`] with an explicit diagram tolerance.
pub fn contraction_with(a: &Vector, b: &Vector, z: f64, epsilon: f64) -> Result<Gadget> {
    let p = unit_overlap(a, b)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::PreconditionViolated(format!("contraction needs overlap in (0,1), got {p}")));
    }
    if !(p < z && z < 1.0) {
        return Err(Error::PreconditionViolated(format!("contraction needs {p} < z < 1, got z = {z}")));
    }
    let q = (1.0 - p * p).sqrt();
    let x = p * (1.0 - z * z) / (q * z);
    let y = (1.0 - x * x - z * z).max(0.0).sqrt();
    let a0 = [0.0, 0.0, 1.0];
    let b0 = [q, 0.0, p];
    let c0 = [x, y, z];
    let alpha = cross3(&a0, &c0);
    let beta = cross3(&b0, &c0);
    let alpha2 = cross3(&a0, &alpha);
    let beta2 = cross3(&b0, &beta);
    let r = map_pair(&vec3(a0), &vec3(b0), a, b, 1e-9)?;
    let rot = |v: &V3| vec3(r.apply3(v));
    let (a, b) = (a.to_float(), b.to_float());
    let c = rot(&c0);
    let entries = vec![
        labeled("a", a.clone()),
        labeled("b", b.clone()),
        labeled("c", c.clone()),
        labeled("alpha", rot(&alpha)),
        labeled("beta", rot(&beta)),
        labeled("alpha'", rot(&alpha2)),
        labeled("beta'", rot(&beta2)),
    ];
    let params = [("p", p), ("q", q), ("z", z), ("x", x), ("y", y)].map(|(k, v)| (k.to_string(), v)).into();
    let contract = vec![Clause::forces(&[("a", 1), ("b", 1)], &[("c", 1)])];
    Gadget::assemble(GadgetKind::Contraction, entries, vec![("a", a), ("b", b), ("c", c)], contract, params, Some(r), epsilon)
}

/// Finds rays `c`, `d` with overlap `3 − 4/(α+1)` such that
/// `v(a) = v(b) = 1` forces `v(c) = v(d) = 1`. Requires
/// `α = |⟨a,b⟩| ∈ (1/3, 1)`.
pub fn expansion(a: &Vector, b: &Vector) -> Result<Gadget> {
    expansion_with(a, b, DEFAULT_EPSILON)
}

/// [`expansion`] with an explicit diagram tolerance.
pub fn expansion_with(a: &Vector, b: &Vector, epsilon: f64) -> Result<Gadget> {
    let alpha = unit_overlap(a, b)?;
    if !(alpha > THIRD && alpha < 1.0) {
        return Err(Error::PreconditionViolated(format!("expansion needs overlap in (1/3,1), got {alpha}")));
    }
    let beta = ((alpha + 1.0) / 2.0).sqrt();
    let gamma = (2.0 - 1.0 / (beta * beta)).sqrt();
    let s = (1.0 - beta * beta).sqrt();
    let t = (1.0 - gamma * gamma).sqrt();
    let a0 = [s, 0.0, beta];
    let b0 = [-s, 0.0, beta];
    let c0 = [0.0, t, gamma];
    let d0 = [0.0, -t, gamma];
    let e = cross3(&a0, &c0);
    let f = cross3(&b0, &c0);
    let g = cross3(&a0, &d0);
    let h = cross3(&b0, &d0);
    let gh = dot3(&unit3(&g)?, &unit3(&h)?).abs();
    if gh > epsilon {
        return Err(Error::ContractViolated(format!("expansion auxiliaries g, h not orthogonal: residual {gh:e}")));
    }
    let r = map_pair(&vec3(a0), &vec3(b0), a, b, 1e-9)?;
    let rot = |v: &V3| vec3(r.apply3(v));
    let (a, b) = (a.to_float(), b.to_float());
    let (c, d) = (rot(&c0), rot(&d0));
    let mut entries = vec![labeled("a", a.clone()), labeled("b", b.clone()), labeled("c", c.clone()), labeled("d", d.clone())];
    for (name, v) in [("e", e), ("f", f), ("g", g), ("h", h)] {
        entries.push(labeled(name, rot(&v)));
    }
    for (name, anchor, v) in [("a*e", &a0, e), ("b*f", &b0, f), ("a*g", &a0, g), ("b*h", &b0, h)] {
        entries.push(labeled(name, rot(&cross3(anchor, &v))));
    }
    let params = [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("overlap", 2.0 * gamma * gamma - 1.0)]
        .map(|(k, v)| (k.to_string(), v))
        .into();
    let contract = vec![Clause::forces(&[("a", 1), ("b", 1)], &[("c", 1), ("d", 1)])];
    Gadget::assemble(
        GadgetKind::Expansion,
        entries,
        vec![("a", a), ("b", b), ("c", c), ("d", d)],
        contract,
        params,
        Some(r),
        epsilon,
    )
}

fn check_domain(u: f64) -> Result<()> {
    if u > THIRD && u < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError { value: u })
    }
}

/// `s(u) = 3 − 4/(u+1)`, the overlap after one expansion step.
pub fn overlap_step(u: f64) -> Result<f64> {
    check_domain(u)?;
    Ok(3.0 - 4.0 / (u + 1.0))
}

/// Smallest integer above `(α₀ − 1/3) / (α₀ − s(α₀))`.
pub fn iteration_bound(alpha0: f64) -> Result<u64> {
    let d = alpha0 - overlap_step(alpha0)?;
    Ok(((alpha0 - THIRD) / d).floor() as u64 + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrajectory {
    /// `α₀ > α₁ > … > α_k`, with `α_k ≤ 1/3`.
    pub alphas: Vec<f64>,
    pub k: usize,
}

/// Iterates [`overlap_step`] from `alpha0` until the overlap reaches 1/3,
/// failing if [`iteration_bound`] steps do not suffice.
pub fn overlap_trajectory(alpha0: f64) -> Result<OverlapTrajectory> {
    let bound = iteration_bound(alpha0)?;
    let mut alphas = vec![alpha0];
    let mut u = alpha0;
    loop {
        u = overlap_step(u)?;
        alphas.push(u);
        if u <= THIRD + ITERATION_TOLERANCE {
            break;
        }
        if alphas.len() as u64 > bound {
            return Err(Error::ContractViolated(format!("overlap iteration from {alpha0} exceeded its bound {bound}")));
        }
    }
    let k = alphas.len() - 1;
    Ok(OverlapTrajectory { alphas, k })
}

/// Chains [`expansion`] from `(a, b)` until the anchor overlap is at most
/// 1/3. The merged gadget has anchors `a`, `b` and the final pair `c`, `d`.
pub fn iterate_expansion(a: &Vector, b: &Vector) -> Result<(Gadget, OverlapTrajectory)> {
    iterate_expansion_with(a, b, DEFAULT_EPSILON)
}

/// [`iterate_expansion`] with an explicit diagram tolerance.
pub fn iterate_expansion_with(a: &Vector, b: &Vector, epsilon: f64) -> Result<(Gadget, OverlapTrajectory)> {
    let alpha0 = unit_overlap(a, b)?;
    if !(alpha0 > THIRD && alpha0 < 1.0) {
        return Err(Error::PreconditionViolated(format!("iteration needs overlap in (1/3,1), got {alpha0}")));
    }
    let trajectory = overlap_trajectory(alpha0)?;
    let mut entries = Vec::new();
    let (mut c, mut d) = (a.to_float(), b.to_float());
    for i in 1..=trajectory.k {
        let step = expansion_with(&c, &d, epsilon)?;
        entries.extend(step.labeled_entries(&format!("{i}:")));
        c = step.anchor("c").expect("expansion anchor").clone();
        d = step.anchor("d").expect("expansion anchor").clone();
    }
    let final_overlap = unit_overlap(&c, &d)?;
    if final_overlap > THIRD + 1e-9 {
        return Err(Error::ContractViolated(format!("iteration ended at overlap {final_overlap}")));
    }
    let params = [("alpha0", alpha0), ("alpha_k", final_overlap), ("k", trajectory.k as f64)]
        .map(|(k, v)| (k.to_string(), v))
        .into();
    let contract = vec![Clause::forces(&[("a", 1), ("b", 1)], &[("c", 1), ("d", 1)])];
    let g = Gadget::assemble(
        GadgetKind::Iteration,
        entries,
        vec![("a", a.to_float()), ("b", b.to_float()), ("c", c), ("d", d)],
        contract,
        params,
        None,
        epsilon,
    )?;
    Ok((g, trajectory))
}

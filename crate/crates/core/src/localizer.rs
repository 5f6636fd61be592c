//! Builds a finite observable set on which `v(psi) = 1` leaves `phi` with
//! no admissible value, and the certificate that proves it.
//!
//! Branch `v(phi) = 1` is refuted by moving the anchor overlap to 1/√2 and
//! placing the 37-vector set there. Branch `v(phi) = 0` adds the basis
//! `{psi, alpha, beta}` and the context `{phi, phi', beta}`, which forces
//! `v(phi') = 1`, then refutes `(psi, phi')` the same way.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certificate::{BranchProof, Certificate, LogEntry};
use crate::diagram::{build_labeled, BuildOptions, Diagram, LabeledVector, NumericMode, DEFAULT_EPSILON};
use crate::engine::{propagate, Assignment, Outcome};
use crate::error::{Error, Result};
use crate::gadgets::{contraction_with, iterate_expansion_with, lemma1_for_with, overlap_trajectory, Gadget};
use crate::linalg::{cross3, dot3, is_orthogonal, same_ray, unit3, Vector, V3};

/// Position of an observable relative to a state known to have value 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarClass {
    Forced1,
    Forced0,
    Indefinite,
}

/// Classifies each of `others` against `psi`: its own ray is forced to 1,
/// rays orthogonal to it are forced to 0, everything else is indefinite.
pub fn classify_star(psi: &Vector, others: &[Vector]) -> Result<Vec<StarClass>> {
    if psi.is_zero() {
        return Err(Error::ZeroVector);
    }
    others
        .iter()
        .map(|v| {
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            if v.dim() != psi.dim() {
                return Err(Error::DimensionMismatch { expected: psi.dim(), found: v.dim() });
            }
            let eps = if psi.is_exact() && v.is_exact() { 0.0 } else { DEFAULT_EPSILON };
            Ok(if same_ray(psi, v, eps) {
                StarClass::Forced1
            } else if is_orthogonal(psi, v, eps) {
                StarClass::Forced0
            } else {
                StarClass::Indefinite
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct LocalizeOptions {
    /// Orthogonality tolerance of the produced diagram.
    pub epsilon: f64,
    /// Overlaps this close to 1/√2 place the 37-vector set directly.
    pub window: f64,
    /// Refuse inputs whose overlap needs more expansion steps than this.
    pub max_iterations: usize,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        LocalizeOptions { epsilon: DEFAULT_EPSILON, window: 1e-9, max_iterations: 2000 }
    }
}

/// How an anchor pair was brought to overlap 1/√2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Path {
    Direct,
    Contract,
    Iterate { k: usize },
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Direct => write!(f, "direct"),
            Path::Contract => write!(f, "contract+lemma1"),
            Path::Iterate { k } => write!(f, "iterate({k})+contract+lemma1"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Localization {
    pub diagram: Diagram,
    pub certificate: Certificate,
    /// Path for `(psi, phi)` and for `(psi, phi')`.
    pub paths: [Path; 2],
}

pub fn localize(psi: &Vector, phi: &Vector) -> Result<Localization> {
    localize_with(psi, phi, &LocalizeOptions::default())
}

struct Pending {
    branch: u8,
    gadget: String,
    params: BTreeMap<String, f64>,
    anchors: Vec<(String, Vector)>,
}

struct Builder {
    entries: Vec<LabeledVector>,
    log: Vec<Pending>,
    opts: LocalizeOptions,
    diagram_eps: f64,
}

impl Builder {
    fn add(&mut self, branch: u8, tag: &str, g: &Gadget) {
        self.entries.extend(g.labeled_entries(&format!("{branch}:{tag}:")));
        let mut anchors: Vec<(String, Vector)> = g.anchors.keys().map(|k| (k.clone(), g.anchor(k).unwrap().clone())).collect();
        anchors.sort_by(|a, b| a.0.cmp(&b.0));
        self.log.push(Pending { branch, gadget: g.kind.name().to_string(), params: g.params.clone(), anchors });
    }

    fn lemma1(&mut self, branch: u8, a: &Vector, b: &Vector) -> Result<()> {
        let g = lemma1_for_with(a, b, self.opts.window, self.diagram_eps)?;
        self.add(branch, "lemma1", &g);
        Ok(())
    }

    fn contract(&mut self, branch: u8, a: &Vector, b: &Vector) -> Result<()> {
        let p = overlap_f(a, b)?;
        if !(p < FRAC_1_SQRT_2) {
            return Err(Error::ContractViolated(format!("contraction reached with overlap {p}")));
        }
        let g = contraction_with(a, b, FRAC_1_SQRT_2, self.diagram_eps)?;
        self.add(branch, "contraction", &g);
        let c = g.anchor("c").unwrap().clone();
        self.lemma1(branch, a, &c)
    }

    /// Entries refuting `v(a) = v(b) = 1`.
    fn refute_pair(&mut self, branch: u8, a: &Vector, b: &Vector) -> Result<Path> {
        let p = overlap_f(a, b)?;
        if (p - FRAC_1_SQRT_2).abs() <= self.opts.window {
            self.lemma1(branch, a, b)?;
            return Ok(Path::Direct);
        }
        if p < FRAC_1_SQRT_2 {
            self.contract(branch, a, b)?;
            return Ok(Path::Contract);
        }
        let k = overlap_trajectory(p)?.k;
        if k > self.opts.max_iterations {
            return Err(Error::PreconditionViolated(format!(
                "overlap {p} needs {k} expansion steps, above the limit of {}",
                self.opts.max_iterations
            )));
        }
        let (g, t) = iterate_expansion_with(a, b, self.diagram_eps)?;
        let (c, d) = (g.anchor("c").unwrap().clone(), g.anchor("d").unwrap().clone());
        let end = overlap_f(&c, &d)?;
        if !(end > 0.0 && end <= 1.0 / 3.0 + 1e-9) {
            return Err(Error::ContractViolated(format!("iteration ended at overlap {end}")));
        }
        self.add(branch, "iteration", &g);
        self.contract(branch, &c, &d)?;
        Ok(Path::Iterate { k: t.k })
    }
}

fn overlap_f(a: &Vector, b: &Vector) -> Result<f64> {
    Ok(dot3(&unit3(&a.to_v3()?)?, &unit3(&b.to_v3()?)?).abs())
}

fn fv(v: V3) -> Vector {
    Vector::from_f64(&v)
}

pub fn localize_with(psi: &Vector, phi: &Vector, opts: &LocalizeOptions) -> Result<Localization> {
    for v in [psi, phi] {
        if v.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: v.dim() });
        }
    }
    let u = unit3(&psi.to_v3()?)?;
    let mut w = unit3(&phi.to_v3()?)?;
    let mut p = dot3(&u, &w);
    if p < 0.0 {
        w = w.map(|x| -x);
        p = -p;
    }
    let sin = {
        let c = cross3(&u, &w);
        dot3(&c, &c).sqrt()
    };
    if sin <= opts.epsilon {
        return Err(Error::DegenerateOverlap { overlap: p.min(1.0), class: StarClass::Forced1 });
    }
    if p <= opts.epsilon {
        return Err(Error::DegenerateOverlap { overlap: p, class: StarClass::Forced0 });
    }
    let q = (1.0 - p * p).sqrt();
    let offset = (p - FRAC_1_SQRT_2).abs();
    // the direct placement is off by up to √2·offset in angle
    let diagram_eps = if offset <= opts.window { opts.epsilon.max(4.0 * offset) } else { opts.epsilon };

    let (psi_v, phi_v) = (fv(u), fv(w));
    let mut b = Builder {
        entries: vec![LabeledVector::new("psi", psi_v.clone()), LabeledVector::new("phi", phi_v.clone())],
        log: Vec::new(),
        opts: *opts,
        diagram_eps,
    };
    let path1 = b.refute_pair(1, &psi_v, &phi_v)?;

    let e2 = unit3(&[w[0] - p * u[0], w[1] - p * u[1], w[2] - p * u[2]])?;
    let e3 = cross3(&u, &e2);
    let phi2 = [q * u[0] - p * e2[0], q * u[1] - p * e2[1], q * u[2] - p * e2[2]];
    let (alpha, beta, phi2) = (fv(e2), fv(e3), fv(phi2));
    for (label, v) in [("alpha", &alpha), ("beta", &beta), ("phi'", &phi2)] {
        b.entries.push(LabeledVector::new(format!("0:frame:{label}"), v.clone()));
    }
    b.log.push(Pending {
        branch: 0,
        gadget: "frame".into(),
        params: [("p".to_string(), p), ("q".to_string(), q)].into(),
        anchors: vec![
            ("alpha".into(), alpha),
            ("beta".into(), beta),
            ("phi".into(), phi_v.clone()),
            ("phi'".into(), phi2.clone()),
            ("psi".into(), psi_v.clone()),
        ],
    });
    let path0 = b.refute_pair(0, &psi_v, &phi2)?;

    let (diagram, _) = build_labeled(&b.entries, BuildOptions { mode: Some(NumericMode::Float), epsilon: diagram_eps })?;
    let locate = |v: &Vector| {
        diagram.find_vector(v).ok_or_else(|| Error::ContractViolated("anchor vector lost while merging".into()))
    };
    let (psi_id, phi_id) = (locate(&psi_v)?, locate(&phi_v)?);
    let construction_log = b
        .log
        .iter()
        .map(|e| {
            let anchors = e.anchors.iter().map(|(k, v)| Ok((k.clone(), locate(v)?))).collect::<Result<_>>()?;
            Ok(LogEntry { branch: e.branch, gadget: e.gadget.clone(), params: e.params.clone(), anchors })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut branches = Vec::with_capacity(2);
    for value in [1u8, 0] {
        let seed = Assignment::from_pairs(&[(psi_id, 1), (phi_id, value)]);
        let res = propagate(&diagram, &seed)?;
        match res.outcome {
            Outcome::Contradiction { observable, established, conflicting, .. } => branches.push(BranchProof {
                assumption: (phi_id, value),
                trace: res.trace,
                contradiction: (observable, established, conflicting),
            }),
            Outcome::Fixpoint(_) => {
                return Err(Error::ContractViolated(format!("branch v(phi) = {value} reached a fixpoint")));
            }
        }
    }
    let certificate =
        Certificate { generated_at: None, psi: psi_id, phi: phi_id, overlap: p, construction_log, branches };
    Ok(Localization { diagram, certificate, paths: [path1, path0] })
}

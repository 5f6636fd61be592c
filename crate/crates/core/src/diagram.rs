//! Observable sets and their context hypergraphs (Greechie diagrams).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cmp_vectors, is_orthogonal, normalize_canonical, orthogonality_residual, same_ray, Vector};

/// Default relative orthogonality tolerance for float diagrams.
pub const DEFAULT_EPSILON: f64 = 1e-10;

pub type ObsId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub id: ObsId,
    pub vector: Vector,
    pub label: Option<String>,
}

/// Member ids in ascending order. Size equals the diagram dimension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    pub members: Vec<ObsId>,
}

impl Context {
    pub fn contains(&self, id: ObsId) -> bool {
        self.members.binary_search(&id).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    mode: NumericMode,
    epsilon: f64,
    dim: usize,
    observables: Vec<Observable>,
    contexts: Vec<Context>,
    member_of: Vec<Vec<usize>>,
}

/// Vector with an optional display label, the input unit of [`build_labeled`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledVector {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub vector: Vector,
}

impl LabeledVector {
    pub fn new(label: impl Into<String>, vector: Vector) -> Self {
        LabeledVector { label: Some(label.into()), vector }
    }
}

impl From<Vector> for LabeledVector {
    fn from(vector: Vector) -> Self {
        LabeledVector { label: None, vector }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    /// Input vectors folded into an earlier projectively-equal one.
    pub merged_duplicates: usize,
    /// Float pairs whose residual falls in `(ε, 10ε)`.
    pub near_threshold: Vec<(ObsId, ObsId, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// `None` picks exact when every input is exact.
    pub mode: Option<NumericMode>,
    pub epsilon: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { mode: None, epsilon: DEFAULT_EPSILON }
    }
}

/// Builds the diagram of `vectors` with default options.
pub fn build_diagram(vectors: &[Vector]) -> Result<Diagram> {
    let entries: Vec<LabeledVector> = vectors.iter().cloned().map(LabeledVector::from).collect();
    Ok(build_labeled(&entries, BuildOptions::default())?.0)
}

/// Deduplicates projectively, orders observables by canonical vector, and
/// enumerates every set of `dim` pairwise-orthogonal observables as a context.
pub fn build_labeled(entries: &[LabeledVector], opts: BuildOptions) -> Result<(Diagram, BuildReport)> {
    let first = entries.first().ok_or_else(|| Error::Malformed("empty vector list".into()))?;
    let dim = first.vector.dim();
    if let Some(bad) = entries.iter().find(|e| e.vector.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.vector.dim() });
    }
    if !(opts.epsilon > 0.0) {
        return Err(Error::PreconditionViolated("epsilon must be positive".into()));
    }
    let all_exact = entries.iter().all(|e| e.vector.is_exact());
    let mode = match opts.mode {
        Some(NumericMode::Exact) if !all_exact => {
            return Err(Error::PreconditionViolated("exact mode needs exact coordinates".into()))
        }
        Some(m) => m,
        None if all_exact => NumericMode::Exact,
        None => NumericMode::Float,
    };
    let eps = opts.epsilon;

    let mut canon: Vec<(Vector, Option<String>)> = Vec::with_capacity(entries.len());
    let mut report = BuildReport::default();
    for e in entries {
        let v = match mode {
            NumericMode::Exact => normalize_canonical(&e.vector)?,
            NumericMode::Float => normalize_canonical(&e.vector.to_float())?,
        };
        let dup = match mode {
            NumericMode::Exact => None,
            NumericMode::Float => canon.iter().position(|(w, _)| same_ray(w, &v, eps)),
        };
        match dup {
            Some(i) => {
                report.merged_duplicates += 1;
                if canon[i].1.is_none() {
                    canon[i].1 = e.label.clone();
                }
            }
            None => canon.push((v, e.label.clone())),
        }
    }
    // stable: first writer keeps its label among exact duplicates
    canon.sort_by(|a, b| cmp_vectors(&a.0, &b.0));
    if mode == NumericMode::Exact {
        let before = canon.len();
        let mut out: Vec<(Vector, Option<String>)> = Vec::with_capacity(before);
        for (v, label) in canon {
            match out.last_mut() {
                Some((w, l)) if *w == v => {
                    if l.is_none() {
                        *l = label;
                    }
                }
                _ => out.push((v, label)),
            }
        }
        report.merged_duplicates += before - out.len();
        canon = out;
    }

    let observables: Vec<Observable> = canon
        .into_iter()
        .enumerate()
        .map(|(id, (vector, label))| Observable { id, vector, label })
        .collect();
    let contexts = enumerate_contexts(&observables, dim, mode, eps, &mut report);
    Ok((Diagram::assemble(mode, eps, dim, observables, contexts), report))
}

fn enumerate_contexts(
    obs: &[Observable],
    dim: usize,
    mode: NumericMode,
    eps: f64,
    report: &mut BuildReport,
) -> Vec<Context> {
    let n = obs.len();
    let floats: Vec<Vec<f64>> = obs.iter().map(|o| o.vector.to_f64()).collect();
    let norms: Vec<f64> = floats.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    // neighbours with larger id
    let mut adj: Vec<Vec<ObsId>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let orth = match mode {
                NumericMode::Exact => is_orthogonal(&obs[i].vector, &obs[j].vector, 0.0),
                NumericMode::Float => {
                    let d: f64 = floats[i].iter().zip(&floats[j]).map(|(a, b)| a * b).sum();
                    let r = d.abs() / (norms[i] * norms[j]);
                    if r > eps && r < 10.0 * eps {
                        report.near_threshold.push((i, j, r));
                    }
                    r <= eps
                }
            };
            if orth {
                adj[i].push(j);
            }
        }
    }
    let mut out = Vec::new();
    let mut clique = Vec::with_capacity(dim);
    for i in 0..n {
        clique.push(i);
        extend_clique(&adj, &mut clique, &adj[i], dim, &mut out);
        clique.pop();
    }
    out
}

fn extend_clique(adj: &[Vec<ObsId>], clique: &mut Vec<ObsId>, candidates: &[ObsId], size: usize, out: &mut Vec<Context>) {
    if clique.len() == size {
        out.push(Context { members: clique.clone() });
        return;
    }
    for (k, &c) in candidates.iter().enumerate() {
        let next: Vec<ObsId> = candidates[k + 1..].iter().copied().filter(|x| adj[c].binary_search(x).is_ok()).collect();
        clique.push(c);
        extend_clique(adj, clique, &next, size, out);
        clique.pop();
    }
}

/// Union of the two observable sets with contexts recomputed over the union.
/// Labels follow the first writer, so `d1` wins.
pub fn merge(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    if d1.observables.is_empty() {
        return Ok(d2.clone());
    }
    if d2.observables.is_empty() {
        return Ok(d1.clone());
    }
    let entries: Vec<LabeledVector> = d1
        .observables
        .iter()
        .chain(&d2.observables)
        .map(|o| LabeledVector { label: o.label.clone(), vector: o.vector.clone() })
        .collect();
    let (mode, epsilon) = match (d1.mode, d2.mode) {
        (NumericMode::Exact, NumericMode::Exact) => (NumericMode::Exact, d1.epsilon.max(d2.epsilon)),
        (NumericMode::Float, NumericMode::Exact) => (NumericMode::Float, d1.epsilon),
        (NumericMode::Exact, NumericMode::Float) => (NumericMode::Float, d2.epsilon),
        (NumericMode::Float, NumericMode::Float) => (NumericMode::Float, d1.epsilon.max(d2.epsilon)),
    };
    Ok(build_labeled(&entries, BuildOptions { mode: Some(mode), epsilon })?.0)
}

impl Diagram {
    pub fn empty(dim: usize) -> Self {
        Diagram::assemble(NumericMode::Exact, DEFAULT_EPSILON, dim, Vec::new(), Vec::new())
    }

    fn assemble(mode: NumericMode, epsilon: f64, dim: usize, observables: Vec<Observable>, contexts: Vec<Context>) -> Self {
        let mut member_of = vec![Vec::new(); observables.len()];
        for (cid, c) in contexts.iter().enumerate() {
            for &m in &c.members {
                member_of[m].push(cid);
            }
        }
        Diagram { mode, epsilon, dim, observables, contexts, member_of }
    }

    /// Reassembles a diagram from explicit parts without recomputing contexts.
    /// Structural checks only: dense ids, known members, right context size.
    /// Orthogonality of the stated contexts is *not* re-verified here.
    pub fn from_parts(
        mode: NumericMode,
        epsilon: f64,
        observables: Vec<Observable>,
        contexts: Vec<Context>,
    ) -> Result<Self> {
        let dim = observables.first().map(|o| o.vector.dim()).unwrap_or(3);
        for (i, o) in observables.iter().enumerate() {
            if o.id != i {
                return Err(Error::Malformed(format!("observable ids must be dense, found {} at {i}", o.id)));
            }
            if o.vector.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: o.vector.dim() });
            }
        }
        let mut contexts = contexts;
        for c in &mut contexts {
            c.members.sort_unstable();
            if c.members.len() != dim {
                return Err(Error::Malformed(format!("context {:?} does not have {dim} members", c.members)));
            }
            if c.members.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("context {:?} repeats a member", c.members)));
            }
            if let Some(&m) = c.members.iter().find(|&&m| m >= observables.len()) {
                return Err(Error::UnknownObservable(m.to_string()));
            }
        }
        Ok(Diagram::assemble(mode, epsilon, dim, observables, contexts))
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn observable(&self, id: ObsId) -> Option<&Observable> {
        self.observables.get(id)
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    /// Context ids containing `id`, ascending.
    pub fn contexts_of(&self, id: ObsId) -> &[usize] {
        &self.member_of[id]
    }

    pub fn find_label(&self, label: &str) -> Option<ObsId> {
        self.observables.iter().position(|o| o.label.as_deref() == Some(label))
    }

    /// Id of the observable spanning the same ray as `v`.
    pub fn find_vector(&self, v: &Vector) -> Option<ObsId> {
        let eps = match self.mode {
            NumericMode::Exact if v.is_exact() => 0.0,
            _ => self.epsilon.max(1e-9),
        };
        self.observables.iter().position(|o| same_ray(&o.vector, v, eps))
    }

    /// Resolves a user reference: a label, a label with the `P_` prefix
    /// dropped, or a numeric id.
    pub fn resolve(&self, key: &str) -> Result<ObsId> {
        if let Some(id) = self.find_label(key).or_else(|| self.find_label(&format!("P_{key}"))) {
            return Ok(id);
        }
        match key.parse::<ObsId>() {
            Ok(id) if id < self.len() => Ok(id),
            _ => Err(Error::UnknownObservable(key.to_string())),
        }
    }

    pub fn display_name(&self, id: ObsId) -> String {
        match self.observables.get(id).and_then(|o| o.label.as_deref()) {
            Some(l) => l.to_string(),
            None => format!("#{id}"),
        }
    }

    /// Context members mapped to labels (falling back to `#id`), for
    /// order-insensitive comparison against transcribed tables.
    pub fn labeled_contexts(&self) -> Vec<Vec<String>> {
        self.contexts
            .iter()
            .map(|c| {
                let mut v: Vec<String> = c.members.iter().map(|&m| self.display_name(m)).collect();
                v.sort();
                v
            })
            .collect()
    }

    /// Largest relative residual over all context pairs.
    pub fn max_context_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.contexts {
            for (k, &i) in c.members.iter().enumerate() {
                for &j in &c.members[k + 1..] {
                    worst = worst.max(orthogonality_residual(&self.observables[i].vector, &self.observables[j].vector));
                }
            }
        }
        worst
    }

    pub fn to_file(&self) -> DiagramFile {
        DiagramFile {
            generated_at: None,
            mode: self.mode,
            epsilon: match self.mode {
                NumericMode::Float => Some(self.epsilon),
                NumericMode::Exact => None,
            },
            observables: self
                .observables
                .iter()
                .map(|o| ObservableRecord { id: o.id, label: o.label.clone(), vector: o.vector.clone() })
                .collect(),
            contexts: self.contexts.iter().map(|c| c.members.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Diagram> {
        let file: DiagramFile = serde_json::from_str(text)?;
        file.into_diagram()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub id: ObsId,
    #[serde(default)]
    pub label: Option<String>,
    pub vector: Vector,
}

/// On-disk diagram:
/// `{ "mode", "epsilon"?, "observables": [{"id","label","vector"}], "contexts": [[id,..]] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub mode: NumericMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub observables: Vec<ObservableRecord>,
    pub contexts: Vec<Vec<ObsId>>,
}

impl DiagramFile {
    pub fn into_diagram(self) -> Result<Diagram> {
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        let observables = self
            .observables
            .into_iter()
            .map(|r| {
                let vector = match self.mode {
                    NumericMode::Float => r.vector.to_float(),
                    NumericMode::Exact if r.vector.is_exact() => r.vector,
                    NumericMode::Exact => {
                        return Err(Error::Malformed(format!("observable {} is not exact", r.id)));
                    }
                };
                Ok(Observable { id: r.id, vector, label: r.label })
            })
            .collect::<Result<Vec<_>>>()?;
        let contexts = self.contexts.into_iter().map(|members| Context { members }).collect();
        Diagram::from_parts(self.mode, epsilon, observables, contexts)
    }
}

/// Input vector list accepted by `build`: a bare array of vectors, an array
/// of `{label, vector}` records, or an object wrapping either with an
/// optional mode and epsilon.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorsFile {
    Wrapped {
        #[serde(default)]
        mode: Option<NumericMode>,
        #[serde(default)]
        epsilon: Option<f64>,
        vectors: Vec<VectorEntry>,
    },
    Bare(Vec<VectorEntry>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorEntry {
    Labeled(LabeledVector),
    Plain(Vector),
}

impl VectorsFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn mode(&self) -> Option<NumericMode> {
        match self {
            VectorsFile::Wrapped { mode, .. } => *mode,
            VectorsFile::Bare(_) => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            VectorsFile::Wrapped { epsilon, .. } => *epsilon,
            VectorsFile::Bare(_) => None,
        }
    }

    pub fn entries(&self) -> Vec<LabeledVector> {
        let list = match self {
            VectorsFile::Wrapped { vectors, .. } => vectors,
            VectorsFile::Bare(v) => v,
        };
        list.iter()
            .map(|e| match e {
                VectorEntry::Labeled(l) => l.clone(),
                VectorEntry::Plain(v) => LabeledVector::from(v.clone()),
            })
            .collect()
    }
}

/// Observable id → label for every labelled observable.
pub fn label_index(d: &Diagram) -> BTreeMap<String, ObsId> {
    d.observables.iter().filter_map(|o| o.label.clone().map(|l| (l, o.id))).collect()
}

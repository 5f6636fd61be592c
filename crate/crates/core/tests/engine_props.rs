//! Invariants of propagation on random small integer diagrams.

use proptest::prelude::*;

use vindef::diagram::{build_diagram, Diagram};
use vindef::engine::{is_admissible, propagate, search_total_admissible, Assignment, Outcome, Rule};
use vindef::linalg::Vector;

fn diagram_strategy() -> impl Strategy<Value = Diagram> {
    prop::collection::vec(prop::array::uniform3(-2i64..=2), 4..14).prop_filter_map("needs a nonzero vector", |raw| {
        let vs: Vec<Vector> = raw.iter().filter(|v| v.iter().any(|&x| x != 0)).map(|v| Vector::ints(v)).collect();
        build_diagram(&vs).ok().filter(|d| !d.contexts().is_empty())
    })
}

fn seed_strategy() -> impl Strategy<Value = (Diagram, Assignment)> {
    diagram_strategy().prop_flat_map(|d| {
        let n = d.len();
        prop::collection::btree_map(0..n, 0u8..=1, 1..=3.min(n)).prop_map(move |m| {
            let pairs: Vec<(usize, u8)> = m.into_iter().collect();
            (d.clone(), Assignment::from_pairs(&pairs))
        })
    })
}

/// Re-derives every step of a trace from the values established before it.
fn replay(d: &Diagram, seed: &Assignment, steps: &[vindef::engine::DeductionStep]) -> Result<(), String> {
    let mut known = Assignment::new();
    for s in steps {
        match s.rule {
            Rule::Seed => {
                if seed.get(s.conclusion.0) != Some(s.conclusion.1) {
                    return Err(format!("seed {:?} not requested", s.conclusion));
                }
            }
            Rule::A | Rule::B => {
                let ctx = &d.contexts()[s.context.ok_or("missing context")?].members;
                for &(p, v) in &s.premises {
                    if known.get(p) != Some(v) || !ctx.contains(&p) {
                        return Err(format!("premise {p}={v} unsupported"));
                    }
                }
                if !ctx.contains(&s.conclusion.0) {
                    return Err("conclusion outside context".into());
                }
                let others: Vec<usize> = ctx.iter().copied().filter(|&m| m != s.conclusion.0).collect();
                let valid = match s.rule {
                    Rule::A => s.conclusion.1 == 0 && s.premises.len() == 1 && s.premises[0].1 == 1,
                    _ => s.conclusion.1 == 1 && s.premises.len() == others.len() && s.premises.iter().all(|p| p.1 == 0),
                };
                if !valid {
                    return Err(format!("rule {:?} misapplied", s.rule));
                }
            }
        }
        if known.get(s.conclusion.0).is_none() {
            known.set(s.conclusion.0, s.conclusion.1);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn traces_replay((d, seed) in seed_strategy()) {
        let r = propagate(&d, &seed).unwrap();
        prop_assert_eq!(replay(&d, &seed, &r.trace), Ok(()));
    }

    #[test]
    fn fixpoints_are_admissible_and_closed((d, seed) in seed_strategy()) {
        let r = propagate(&d, &seed).unwrap();
        if let Outcome::Fixpoint(a) = &r.outcome {
            prop_assert!(is_admissible(&d, a));
            let again = propagate(&d, a).unwrap();
            prop_assert_eq!(again.assignment(), a);
        }
    }

    #[test]
    fn search_results_are_total_and_admissible(d in diagram_strategy()) {
        let s = search_total_admissible(&d, 8);
        for a in &s.assignments {
            prop_assert_eq!(a.len(), d.len());
            prop_assert!(is_admissible(&d, a));
        }
    }
}

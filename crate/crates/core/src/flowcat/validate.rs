use std::collections::{BTreeMap, BTreeSet};

use crate::report::Report;

use super::{BrokenFlow, FlowCategory, ModuliComponent, OrientationData};

fn edge_label(a: &str, b: &str) -> String {
    format!("{a}->{b}")
}

/// Checks the flow-category axioms on finite data.
pub fn validate_morse_smale(cat: &FlowCategory) -> Report {
    let mut report = Report::new("morse-smale");
    let edges = cat.direct_edges();
    let index = |id: &str| cat.index(id).expect("references checked at construction");

    let mut order = Vec::new();
    for (a, b) in &edges {
        if a != b && index(a) <= index(b) {
            order.push(format!("{} goes from index {} to index {}", edge_label(a, b), index(a), index(b)));
        }
    }
    for o in cat.objects() {
        if cat.below(&o.id).contains(&o.id) && !edges.contains(&(o.id.clone(), o.id.clone())) {
            order.push(format!("{} lies on a cycle", o.id));
        }
    }
    report.check("partial order", order);

    let selfm = edges
        .iter()
        .filter(|(a, b)| a == b)
        .map(|(a, _)| format!("non-identity morphisms {}", edge_label(a, a)))
        .collect();
    report.check("only identities on objects", selfm);

    let mut dim = Vec::new();
    for f in cat.flows() {
        let gap = index(&f.from) - index(&f.to);
        if gap != 1 {
            dim.push(format!("rigid flow {} spans index gap {gap}", f.id));
        }
    }
    for m in cat.moduli().iter().filter(|m| !m.components.is_empty()) {
        let gap = index(&m.from) - index(&m.to);
        if gap != 2 {
            dim.push(format!("1-dimensional moduli {} spans index gap {gap}", edge_label(&m.from, &m.to)));
        }
    }
    report.check("dimension rule", dim);

    // Finite object sets bound every interval; the check records the bound.
    report.check("finite type", Vec::new());

    report.check("composition into boundary", boundary_failures(cat));
    report
}

fn boundary_failures(cat: &FlowCategory) -> Vec<String> {
    let index = |id: &str| cat.index(id).expect("references checked at construction");
    let mut fails = Vec::new();
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for f in cat.flows() {
        for g in cat.flows().iter().filter(|g| g.from == f.to) {
            pairs.insert((f.from.clone(), g.to.clone()));
        }
    }
    for m in cat.moduli() {
        pairs.insert((m.from.clone(), m.to.clone()));
    }
    for (a, b) in &pairs {
        let mut count: BTreeMap<BrokenFlow, usize> = cat.broken_flows(a, b).into_iter().map(|bf| (bf, 0)).collect();
        for (k, c) in cat.moduli_between(a, b).into_iter().enumerate() {
            let ModuliComponent::Interval { ends } = c else {
                continue;
            };
            for e in ends {
                let (f, g) = (
                    cat.flow(&e.first).expect("checked"),
                    cat.flow(&e.second).expect("checked"),
                );
                if f.from != *a || g.to != *b || f.to != g.from {
                    fails.push(format!(
                        "interval {k} of {} has end ({}, {}) which is not a composite {}",
                        edge_label(a, b),
                        e.first,
                        e.second,
                        edge_label(a, b)
                    ));
                    continue;
                }
                if index(&f.to) != index(a) - 1 {
                    fails.push(format!(
                        "interval {k} of {} breaks at {} of index {}",
                        edge_label(a, b),
                        f.to,
                        index(&f.to)
                    ));
                }
                *count.entry(e.clone()).or_insert(0) += 1;
            }
        }
        for (bf, n) in count {
            if n != 1 {
                fails.push(format!(
                    "broken flow ({}, {}) of {} is an interval end {n} times",
                    bf.first,
                    bf.second,
                    edge_label(a, b)
                ));
            }
        }
    }
    fails
}

/// Boundary-sign matching on the ends of every interval component.
pub fn check_orientation_coherence(cat: &FlowCategory, or: &OrientationData) -> Report {
    let mut report = Report::new("orientation coherence");
    let missing = cat
        .flows()
        .iter()
        .filter(|f| or.sign(&f.id).is_none())
        .map(|f| format!("flow {} has no sign", f.id))
        .collect();
    report.check("signs defined", missing);

    let sign = |id: &str| or.sign(id).unwrap_or(0);
    let product = |b: &BrokenFlow| sign(&b.first) * sign(&b.second);
    let mut ends = Vec::new();
    for m in cat.moduli() {
        for (k, c) in m.components.iter().enumerate() {
            if let ModuliComponent::Interval { ends: [e0, e1] } = c {
                if product(e0) != -product(e1) {
                    ends.push(format!(
                        "interval {k} of {}: ({}, {}) and ({}, {}) carry sign products {} and {}",
                        edge_label(&m.from, &m.to),
                        e0.first,
                        e0.second,
                        e1.first,
                        e1.second,
                        product(e0),
                        product(e1)
                    ));
                }
            }
        }
    }
    report.check("interval ends carry opposite signs", ends);

    let mut sums = Vec::new();
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for f in cat.flows() {
        for g in cat.flows().iter().filter(|g| g.from == f.to) {
            pairs.insert((f.from.clone(), g.to.clone()));
        }
    }
    for (a, b) in pairs {
        let s: i64 = cat.broken_flows(&a, &b).iter().map(product).sum();
        if s != 0 {
            sums.push(format!("signed count of broken flows {} is {s}", edge_label(&a, &b)));
        }
    }
    report.check("broken flows cancel in pairs", sums);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::{Object, OneDimModuli, RigidFlow};

    fn obj(id: &str, index: i64) -> Object {
        Object { id: id.into(), index }
    }

    fn flow(id: &str, from: &str, to: &str) -> RigidFlow {
        RigidFlow {
            id: id.into(),
            from: from.into(),
            to: to.into(),
        }
    }

    fn interval(a: (&str, &str), b: (&str, &str)) -> ModuliComponent {
        ModuliComponent::Interval {
            ends: [BrokenFlow::new(a.0, a.1), BrokenFlow::new(b.0, b.1)],
        }
    }

    /// Torus-shaped category: each saddle has two flows up and two down.
    fn torus() -> (FlowCategory, OrientationData) {
        let cat = FlowCategory::new(
            vec![obj("M", 2), obj("s1", 1), obj("s2", 1), obj("m", 0)],
            vec![
                flow("a1", "M", "s1"),
                flow("a2", "M", "s1"),
                flow("b1", "M", "s2"),
                flow("b2", "M", "s2"),
                flow("c1", "s1", "m"),
                flow("c2", "s1", "m"),
                flow("d1", "s2", "m"),
                flow("d2", "s2", "m"),
            ],
            vec![OneDimModuli {
                from: "M".into(),
                to: "m".into(),
                components: vec![
                    interval(("a1", "c1"), ("b1", "d1")),
                    interval(("a1", "c2"), ("b2", "d1")),
                    interval(("a2", "c2"), ("b2", "d2")),
                    interval(("a2", "c1"), ("b1", "d2")),
                ],
            }],
        )
        .unwrap();
        let or = OrientationData::from_pairs([
            ("a1", 1),
            ("a2", -1),
            ("b1", 1),
            ("b2", -1),
            ("c1", 1),
            ("c2", -1),
            ("d1", -1),
            ("d2", 1),
        ])
        .unwrap();
        (cat, or)
    }

    #[test]
    fn torus_passes_both() {
        let (cat, or) = torus();
        let r = validate_morse_smale(&cat);
        assert!(r.passed(), "{r}");
        let r = check_orientation_coherence(&cat, &or);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn equal_index_flow_fails_dimension_rule() {
        let cat = FlowCategory::new(vec![obj("p", 1), obj("q", 1)], vec![flow("f", "p", "q")], vec![]).unwrap();
        let r = validate_morse_smale(&cat);
        assert_eq!(r.failed_checks(), ["partial order", "dimension rule"]);
    }

    #[test]
    fn unmatched_broken_flow_fails_boundary() {
        let (cat, _) = torus();
        let mut moduli = cat.moduli().to_vec();
        moduli[0].components.pop();
        let cat = FlowCategory::new(cat.objects().to_vec(), cat.flows().to_vec(), moduli).unwrap();
        let r = validate_morse_smale(&cat);
        assert_eq!(r.failed_checks(), ["composition into boundary"]);
        assert_eq!(r.failures_of("composition into boundary").len(), 2);
    }

    #[test]
    fn flipped_sign_fails_exactly_touching_intervals() {
        let (cat, mut or) = torus();
        or.flip("c1");
        let r = check_orientation_coherence(&cat, &or);
        let fails = r.failures_of("interval ends carry opposite signs");
        assert_eq!(fails.len(), 2);
        assert!(fails[0].starts_with("interval 0 "));
        assert!(fails[1].starts_with("interval 3 "));
        // both broken flows through c1 change sign and still cancel
        assert!(r.outcome("broken flows cancel in pairs").unwrap().passed);
    }

    #[test]
    fn no_gap_two_pairs_pass_vacuously() {
        let cat = FlowCategory::new(
            vec![obj("A", 1), obj("B", 0)],
            vec![flow("f1", "A", "B"), flow("f2", "A", "B")],
            vec![],
        )
        .unwrap();
        let or = OrientationData::from_pairs([("f1", 1), ("f2", -1)]).unwrap();
        assert!(validate_morse_smale(&cat).passed());
        assert!(check_orientation_coherence(&cat, &or).passed());
    }

    #[test]
    fn self_morphisms_and_cycles() {
        let cat = FlowCategory::new(
            vec![obj("p", 1), obj("q", 0)],
            vec![flow("f", "p", "q"), flow("g", "q", "p"), flow("h", "q", "q")],
            vec![],
        )
        .unwrap();
        let r = validate_morse_smale(&cat);
        assert!(!r.outcome("partial order").unwrap().passed);
        assert!(!r.outcome("only identities on objects").unwrap().passed);
    }
}

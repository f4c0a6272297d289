use std::collections::BTreeMap;

use serde::Serialize;

use crate::flowcat::FlowCategory;

use super::CornerError;

/// A strictly decreasing chain `a = a_0 > a_1 > ... > a_r = b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumChain {
    pub chain: Vec<String>,
    pub dimension: i64,
}

impl StratumChain {
    pub fn intermediates(&self) -> &[String] {
        &self.chain[1..self.chain.len() - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrataReport {
    pub pair: [String; 2],
    pub chains: Vec<Vec<String>>,
    pub dims: Vec<i64>,
}

fn check_pair(cat: &FlowCategory, a: &str, b: &str) -> Result<(i64, i64), CornerError> {
    let ia = cat.index(a).map_err(|_| CornerError::UnknownObject(a.to_string()))?;
    let ib = cat.index(b).map_err(|_| CornerError::UnknownObject(b.to_string()))?;
    if !cat.greater(a, b) {
        return Err(CornerError::NotComparable {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok((ia, ib))
}

/// Every chain from `a` to `b` in the category's order, open stratum first,
/// then by length and lexicographically.
pub fn strata(cat: &FlowCategory, a: &str, b: &str) -> Result<Vec<StratumChain>, CornerError> {
    let (ia, ib) = check_pair(cat, a, b)?;
    let below: BTreeMap<String, _> = cat
        .objects()
        .iter()
        .map(|o| (o.id.clone(), cat.below(&o.id)))
        .collect();
    let mut out = Vec::new();
    let mut path = vec![a.to_string()];
    dfs(cat, &below, b, &mut path, &mut out);
    let mut chains: Vec<StratumChain> = out
        .into_iter()
        .map(|chain| {
            let inter = chain.len() as i64 - 2;
            StratumChain {
                dimension: ia - ib - 1 - inter,
                chain,
            }
        })
        .collect();
    chains.sort_by(|x, y| x.chain.len().cmp(&y.chain.len()).then_with(|| x.chain.cmp(&y.chain)));
    Ok(chains)
}

fn dfs(
    cat: &FlowCategory,
    below: &BTreeMap<String, std::collections::BTreeSet<String>>,
    b: &str,
    path: &mut Vec<String>,
    out: &mut Vec<Vec<String>>,
) {
    let cur = path.last().expect("nonempty path").clone();
    let icur = cat.index(&cur).expect("known object");
    for next in &below[&cur] {
        let inext = cat.index(next).expect("known object");
        // guards against cyclic input
        if inext >= icur {
            continue;
        }
        if next == b {
            let mut done = path.clone();
            done.push(b.to_string());
            out.push(done);
        } else if below[next].contains(b) {
            path.push(next.clone());
            dfs(cat, below, b, path, out);
            path.pop();
        }
    }
}

/// Chains through some `c` with `μ(c) = μ(a) - j`, grouped by `c`.
pub fn face_decomposition(
    cat: &FlowCategory,
    a: &str,
    b: &str,
    j: i64,
) -> Result<BTreeMap<String, Vec<StratumChain>>, CornerError> {
    let (ia, ib) = check_pair(cat, a, b)?;
    let high = ia - ib - 1;
    if j < 1 || j > high {
        return Err(CornerError::IndexOutOfRange { index: j, low: 1, high });
    }
    let mut faces: BTreeMap<String, Vec<StratumChain>> = BTreeMap::new();
    for s in strata(cat, a, b)? {
        for c in s.intermediates() {
            if cat.index(c).expect("known object") == ia - j {
                faces.entry(c.clone()).or_default().push(s.clone());
            }
        }
    }
    Ok(faces)
}

pub fn strata_report(cat: &FlowCategory, a: &str, b: &str) -> Result<StrataReport, CornerError> {
    let s = strata(cat, a, b)?;
    Ok(StrataReport {
        pair: [a.to_string(), b.to_string()],
        dims: s.iter().map(|c| c.dimension).collect(),
        chains: s.into_iter().map(|c| c.chain).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::{Object, RigidFlow};

    fn cat(objs: &[(&str, i64)], flows: &[(&str, &str)]) -> FlowCategory {
        FlowCategory::new(
            objs.iter()
                .map(|&(id, index)| Object { id: id.into(), index })
                .collect(),
            flows
                .iter()
                .enumerate()
                .map(|(i, &(from, to))| RigidFlow {
                    id: format!("f{i}"),
                    from: from.into(),
                    to: to.into(),
                })
                .collect(),
            vec![],
        )
        .unwrap()
    }

    fn torus() -> FlowCategory {
        cat(
            &[("M", 2), ("s1", 1), ("s2", 1), ("m", 0)],
            &[("M", "s1"), ("M", "s1"), ("M", "s2"), ("M", "s2"), ("s1", "m"), ("s1", "m"), ("s2", "m"), ("s2", "m")],
        )
    }

    #[test]
    fn torus_strata() {
        let s = strata(&torus(), "M", "m").unwrap();
        let chains: Vec<Vec<&str>> = s.iter().map(|c| c.chain.iter().map(String::as_str).collect()).collect();
        assert_eq!(chains, [vec!["M", "m"], vec!["M", "s1", "m"], vec!["M", "s2", "m"]]);
        assert_eq!(s.iter().map(|c| c.dimension).collect::<Vec<_>>(), [1, 0, 0]);
        let f = face_decomposition(&torus(), "M", "m", 1).unwrap();
        assert_eq!(f.keys().collect::<Vec<_>>(), ["s1", "s2"]);
        assert!(matches!(
            face_decomposition(&torus(), "M", "m", 2),
            Err(CornerError::IndexOutOfRange { .. })
        ));
        assert!(matches!(strata(&torus(), "s1", "s2"), Err(CornerError::NotComparable { .. })));
    }

    #[test]
    fn gap_one_pair() {
        let s = strata(&torus(), "s1", "m").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].dimension, 0);
    }

    #[test]
    fn ladder_of_span_three() {
        let c = cat(&[("a", 3), ("c2", 2), ("c1", 1), ("b", 0)], &[("a", "c2"), ("c2", "c1"), ("c1", "b")]);
        let s = strata(&c, "a", "b").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.iter().map(|c| c.dimension).collect::<Vec<_>>(), [2, 1, 1, 0]);
        let j1 = face_decomposition(&c, "a", "b", 1).unwrap();
        let j2 = face_decomposition(&c, "a", "b", 2).unwrap();
        let both: Vec<_> = j1["c2"].iter().filter(|x| j2["c1"].contains(x)).collect();
        assert_eq!(both.len(), 1);
        assert_eq!(both[0].chain.len(), 4);
        let r = strata_report(&c, "a", "b").unwrap();
        assert_eq!(
            serde_json::to_value(&r).unwrap()["dims"],
            serde_json::json!([2, 1, 1, 0])
        );
    }
}

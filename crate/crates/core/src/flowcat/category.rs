use std::collections::{BTreeMap, BTreeSet};

use super::FlowError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Object {
    pub id: String,
    pub index: i64,
}

/// A rigid (isolated) flow line `from -> to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidFlow {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// A composite of two rigid flows, `first: a -> c` then `second: c -> b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BrokenFlow {
    pub first: String,
    pub second: String,
}

impl BrokenFlow {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Self {
        Self {
            first: first.into(),
            second: second.into(),
        }
    }
}

/// Connected component of a one-dimensional moduli space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuliComponent {
    Interval { ends: [BrokenFlow; 2] },
    Circle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneDimModuli {
    pub from: String,
    pub to: String,
    pub components: Vec<ModuliComponent>,
}

/// Finite flow category: objects graded by an index, rigid flows and
/// one-dimensional moduli. Construction checks references only; the
/// category axioms are checked by [`super::validate_morse_smale`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCategory {
    objects: Vec<Object>,
    flows: Vec<RigidFlow>,
    moduli: Vec<OneDimModuli>,
    object_pos: BTreeMap<String, usize>,
    flow_pos: BTreeMap<String, usize>,
}

impl FlowCategory {
    pub fn new(objects: Vec<Object>, flows: Vec<RigidFlow>, moduli: Vec<OneDimModuli>) -> Result<Self, FlowError> {
        let mut object_pos = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            if object_pos.insert(o.id.clone(), i).is_some() {
                return Err(FlowError::DuplicateId(o.id.clone()));
            }
        }
        let mut flow_pos = BTreeMap::new();
        for (i, f) in flows.iter().enumerate() {
            if flow_pos.insert(f.id.clone(), i).is_some() {
                return Err(FlowError::DuplicateId(f.id.clone()));
            }
            for end in [&f.from, &f.to] {
                if !object_pos.contains_key(end) {
                    return Err(FlowError::UnknownObject(end.clone()));
                }
            }
        }
        for m in &moduli {
            for end in [&m.from, &m.to] {
                if !object_pos.contains_key(end) {
                    return Err(FlowError::UnknownObject(end.clone()));
                }
            }
            for c in &m.components {
                if let ModuliComponent::Interval { ends } = c {
                    for b in ends {
                        for id in [&b.first, &b.second] {
                            if !flow_pos.contains_key(id) {
                                return Err(FlowError::UnknownFlow(id.clone()));
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            objects,
            flows,
            moduli,
            object_pos,
            flow_pos,
        })
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn flows(&self) -> &[RigidFlow] {
        &self.flows
    }

    pub fn moduli(&self) -> &[OneDimModuli] {
        &self.moduli
    }

    pub fn object(&self, id: &str) -> Result<&Object, FlowError> {
        self.object_pos
            .get(id)
            .map(|&i| &self.objects[i])
            .ok_or_else(|| FlowError::UnknownObject(id.to_string()))
    }

    pub fn index(&self, id: &str) -> Result<i64, FlowError> {
        self.object(id).map(|o| o.index)
    }

    pub fn flow(&self, id: &str) -> Result<&RigidFlow, FlowError> {
        self.flow_pos
            .get(id)
            .map(|&i| &self.flows[i])
            .ok_or_else(|| FlowError::UnknownFlow(id.to_string()))
    }

    pub fn flows_between<'a>(&'a self, a: &'a str, b: &'a str) -> impl Iterator<Item = &'a RigidFlow> + 'a {
        self.flows.iter().filter(move |f| f.from == a && f.to == b)
    }

    pub fn moduli_between(&self, a: &str, b: &str) -> Vec<&ModuliComponent> {
        self.moduli
            .iter()
            .filter(|m| m.from == a && m.to == b)
            .flat_map(|m| m.components.iter())
            .collect()
    }

    /// All composites `a -> c -> b` of rigid flows, in flow declaration order.
    pub fn broken_flows(&self, a: &str, b: &str) -> Vec<BrokenFlow> {
        let mut out = Vec::new();
        for f in self.flows.iter().filter(|f| f.from == a) {
            for g in self.flows.iter().filter(|g| g.from == f.to && g.to == b) {
                out.push(BrokenFlow::new(&f.id, &g.id));
            }
        }
        out
    }

    /// Pairs `(a, b)` with nonempty morphism data.
    pub fn direct_edges(&self) -> BTreeSet<(String, String)> {
        let mut e: BTreeSet<(String, String)> = self.flows.iter().map(|f| (f.from.clone(), f.to.clone())).collect();
        for m in &self.moduli {
            if !m.components.is_empty() {
                e.insert((m.from.clone(), m.to.clone()));
            }
        }
        e
    }

    /// Objects strictly below `a` in the order generated by the morphism data.
    pub fn below(&self, a: &str) -> BTreeSet<String> {
        let edges = self.direct_edges();
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (x, y) in &edges {
            adj.entry(x.as_str()).or_default().push(y.as_str());
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for &y in adj.get(x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y.to_string()) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// `a > b` in the transitive closure of the morphism data.
    pub fn greater(&self, a: &str, b: &str) -> bool {
        a != b && self.below(a).contains(b)
    }
}

/// Sign `±1` attached to every rigid flow.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrientationData {
    signs: BTreeMap<String, i8>,
}

impl OrientationData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, FlowError>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut o = Self::new();
        for (id, s) in pairs {
            o.set(id, s)?;
        }
        Ok(o)
    }

    pub fn set(&mut self, id: impl Into<String>, sign: i64) -> Result<(), FlowError> {
        let id = id.into();
        let s = match sign {
            1 => 1,
            -1 => -1,
            _ => return Err(FlowError::InvalidSign { flow: id, sign }),
        };
        self.signs.insert(id, s);
        Ok(())
    }

    pub fn sign(&self, id: &str) -> Option<i64> {
        self.signs.get(id).map(|&s| s as i64)
    }

    pub fn flip(&mut self, id: &str) {
        if let Some(s) = self.signs.get_mut(id) {
            *s = -*s;
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.signs.iter().map(|(k, &v)| (k.as_str(), v as i64))
    }
}

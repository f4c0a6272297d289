use serde::{Deserialize, Serialize};

use super::{BrokenFlow, FlowCategory, FlowError, ModuliComponent, Object, OneDimModuli, OrientationData, RigidFlow};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CategoryJson {
    objects: Vec<ObjectJson>,
    rigid_flows: Vec<FlowJson>,
    #[serde(default)]
    one_dim_moduli: Vec<ModuliJson>,
}

#[derive(Serialize, Deserialize)]
struct ObjectJson {
    id: String,
    index: i64,
}

#[derive(Serialize, Deserialize)]
struct FlowJson {
    id: String,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct ModuliJson {
    from: String,
    to: String,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ComponentJson {
    Interval { ends: [[String; 2]; 2] },
    Circle,
}

/// Parses the interchange format. Signs are optional; the orientation holds
/// whichever flows carry one.
pub fn category_from_json(value: &serde_json::Value) -> Result<(FlowCategory, OrientationData), FlowError> {
    let raw: CategoryJson = serde_json::from_value(value.clone()).map_err(|e| FlowError::Json(e.to_string()))?;
    let objects = raw
        .objects
        .into_iter()
        .map(|o| Object { id: o.id, index: o.index })
        .collect();
    let mut orientation = OrientationData::new();
    let mut flows = Vec::with_capacity(raw.rigid_flows.len());
    for f in raw.rigid_flows {
        if let Some(s) = f.sign {
            orientation.set(f.id.clone(), s)?;
        }
        flows.push(RigidFlow {
            id: f.id,
            from: f.from,
            to: f.to,
        });
    }
    let moduli = raw
        .one_dim_moduli
        .into_iter()
        .map(|m| OneDimModuli {
            from: m.from,
            to: m.to,
            components: m
                .components
                .into_iter()
                .map(|c| match c {
                    ComponentJson::Interval { ends: [[a, b], [c, d]] } => ModuliComponent::Interval {
                        ends: [BrokenFlow::new(a, b), BrokenFlow::new(c, d)],
                    },
                    ComponentJson::Circle => ModuliComponent::Circle,
                })
                .collect(),
        })
        .collect();
    Ok((FlowCategory::new(objects, flows, moduli)?, orientation))
}

pub fn category_from_str(s: &str) -> Result<(FlowCategory, OrientationData), FlowError> {
    let v: serde_json::Value = serde_json::from_str(s).map_err(|e| FlowError::Json(e.to_string()))?;
    category_from_json(&v)
}

pub fn category_to_json(cat: &FlowCategory, orientation: Option<&OrientationData>) -> serde_json::Value {
    let raw = CategoryJson {
        objects: cat
            .objects()
            .iter()
            .map(|o| ObjectJson {
                id: o.id.clone(),
                index: o.index,
            })
            .collect(),
        rigid_flows: cat
            .flows()
            .iter()
            .map(|f| FlowJson {
                id: f.id.clone(),
                from: f.from.clone(),
                to: f.to.clone(),
                sign: orientation.and_then(|o| o.sign(&f.id)),
            })
            .collect(),
        one_dim_moduli: cat
            .moduli()
            .iter()
            .map(|m| ModuliJson {
                from: m.from.clone(),
                to: m.to.clone(),
                components: m
                    .components
                    .iter()
                    .map(|c| match c {
                        ModuliComponent::Interval { ends } => ComponentJson::Interval {
                            ends: [
                                [ends[0].first.clone(), ends[0].second.clone()],
                                [ends[1].first.clone(), ends[1].second.clone()],
                            ],
                        },
                        ModuliComponent::Circle => ComponentJson::Circle,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_value(raw).expect("category serializes")
}

use std::collections::BTreeMap;

use crate::flowcat::{FlowCategory, ModuliComponent, Object, OneDimModuli, OrientationData, RigidFlow};

use super::integrate::Direction;
use super::orbits::{assign_ids, FlowLine, MorseSolver, Scan};
use super::{find_critical_points, CriticalPoint, MorseError, NumericalConfig, TrigPolynomial};

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub critical: Vec<CriticalPoint>,
    pub flows: Vec<FlowLine>,
    pub category: FlowCategory,
    pub orientation: OrientationData,
    pub warnings: Vec<String>,
}

/// Critical points, signed rigid flows and the one-dimensional moduli of
/// index-gap-two pairs, assembled into a flow category.
pub fn build_flow_category(f: &TrigPolynomial, cfg: &NumericalConfig) -> Result<BuildOutput, MorseError> {
    let critical = find_critical_points(f, cfg)?;
    build_from_critical(f, critical, cfg)
}

pub fn build_from_critical(
    f: &TrigPolynomial,
    critical: Vec<CriticalPoint>,
    cfg: &NumericalConfig,
) -> Result<BuildOutput, MorseError> {
    let n = f.dim();
    let solver = MorseSolver::new(f, &critical, cfg)?;
    let mut flows = Vec::new();
    let mut forward_scans: Vec<Scan> = Vec::new();
    for (a, c) in critical.iter().enumerate() {
        match c.index {
            1 => flows.extend(solver.shots_forward(a)?),
            2 if n == 3 => {
                let scan = solver.scan(a, Direction::Forward)?;
                flows.extend(solver.flows_from_scan(&scan)?);
                forward_scans.push(scan);
            }
            2 => forward_scans.push(solver.scan(a, Direction::Forward)?),
            _ => {}
        }
    }
    if n >= 2 {
        for (b, c) in critical.iter().enumerate() {
            if c.index + 1 == n {
                flows.extend(solver.shots_backward(b)?);
            }
        }
    }
    assign_ids(&mut flows);

    let mut warnings = Vec::new();
    let mut moduli: BTreeMap<(usize, usize), Vec<ModuliComponent>> = BTreeMap::new();
    for scan in &forward_scans {
        for (t, ct) in critical.iter().enumerate() {
            if ct.index + 2 == critical[scan.center].index {
                let comps = solver.moduli_family(scan, &flows, t)?;
                if !comps.is_empty() {
                    moduli.insert((scan.center, t), comps);
                }
            }
        }
    }
    if n == 3 {
        for (c, cc) in critical.iter().enumerate() {
            if cc.index != 1 {
                continue;
            }
            let scan = solver.scan(c, Direction::Backward)?;
            for (a, ca) in critical.iter().enumerate() {
                if ca.index == 3 {
                    let comps = solver.moduli_family(&scan, &flows, a)?;
                    if !comps.is_empty() {
                        moduli.insert((a, c), comps);
                    }
                }
            }
        }
    }
    for scan in &forward_scans {
        for b in scan.boundaries.iter().filter(|b| b.approach >= cfg.landing_radius) {
            warnings.push(format!(
                "separatrix from {} at angle {:.12} resolved only to distance {:.3e} from {}",
                critical[scan.center].id, b.theta, b.approach, critical[b.separator.crit].id
            ));
        }
    }
    for ((a, b), comps) in &moduli {
        let circles = comps.iter().filter(|c| matches!(c, ModuliComponent::Circle)).count();
        if circles > 0 {
            warnings.push(format!(
                "{} circle component(s) between {} and {}",
                circles, critical[*a].id, critical[*b].id
            ));
        }
    }

    let objects = critical
        .iter()
        .map(|c| Object {
            id: c.id.clone(),
            index: c.index as i64,
        })
        .collect();
    let rigid = flows
        .iter()
        .map(|fl| RigidFlow {
            id: fl.id.clone(),
            from: fl.from.clone(),
            to: fl.to.clone(),
        })
        .collect();
    let one_dim = moduli
        .into_iter()
        .map(|((a, b), components)| OneDimModuli {
            from: critical[a].id.clone(),
            to: critical[b].id.clone(),
            components,
        })
        .collect();
    let category = FlowCategory::new(objects, rigid, one_dim)?;
    let orientation = OrientationData::from_pairs(flows.iter().map(|fl| (fl.id.clone(), fl.sign)))?;
    Ok(BuildOutput {
        critical,
        flows,
        category,
        orientation,
        warnings,
    })
}

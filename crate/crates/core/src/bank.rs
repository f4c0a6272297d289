//! Named example flow categories and Morse functions.

use thiserror::Error;

use crate::flowcat::{BrokenFlow, FlowCategory, FlowError, ModuliComponent, Object, OneDimModuli, OrientationData, RigidFlow};
use crate::morse::{build_flow_category, MorseError, NumericalConfig, TrigPolynomial};
use crate::synth::perturbed_torus;

#[derive(Debug, Error)]
pub enum ExampleError {
    #[error("unknown example {0:?}; expected one of circle, torus, klein, rp2, torus-perturbed:SEED")]
    UnknownName(String),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub category: FlowCategory,
    pub orientation: OrientationData,
    /// Morse function the category comes from, when there is one.
    pub function: Option<TrigPolynomial>,
}

/// Handcrafted examples, in a fixed order.
pub const NAMES: [&str; 4] = ["circle", "torus", "klein", "rp2"];

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

fn circle() -> Result<(FlowCategory, OrientationData), FlowError> {
    let cat = FlowCategory::new(
        vec![obj("M", 1), obj("m", 0)],
        vec![flow("a1", "M", "m"), flow("a2", "M", "m")],
        Vec::new(),
    )?;
    Ok((cat, OrientationData::from_pairs([("a1", 1), ("a2", -1)])?))
}

/// One maximum, two saddles, one minimum; `∂₂` has columns `(e1, e2)` for
/// the signed counts into `s1, s2`.
fn two_cell(signs: [(&str, i64); 8], intervals: Vec<ModuliComponent>) -> Result<(FlowCategory, OrientationData), FlowError> {
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
            components: intervals,
        }],
    )?;
    Ok((cat, OrientationData::from_pairs(signs)?))
}

fn torus() -> Result<(FlowCategory, OrientationData), FlowError> {
    two_cell(
        [("a1", 1), ("a2", -1), ("b1", 1), ("b2", -1), ("c1", 1), ("c2", -1), ("d1", -1), ("d2", 1)],
        vec![
            interval(("a1", "c1"), ("b1", "d1")),
            interval(("a1", "c2"), ("b2", "d1")),
            interval(("a2", "c2"), ("b2", "d2")),
            interval(("a2", "c1"), ("b1", "d2")),
        ],
    )
}

/// Word `a b a b⁻¹`: the top cell hits `s2` twice with the same sign.
fn klein() -> Result<(FlowCategory, OrientationData), FlowError> {
    two_cell(
        [("a1", 1), ("a2", -1), ("b1", 1), ("b2", 1), ("c1", 1), ("c2", -1), ("d1", 1), ("d2", -1)],
        vec![
            interval(("a1", "c1"), ("b1", "d2")),
            interval(("a1", "c2"), ("b1", "d1")),
            interval(("a2", "c2"), ("b2", "d2")),
            interval(("a2", "c1"), ("b2", "d1")),
        ],
    )
}

fn rp2() -> Result<(FlowCategory, OrientationData), FlowError> {
    let cat = FlowCategory::new(
        vec![obj("M", 2), obj("s", 1), obj("m", 0)],
        vec![
            flow("a1", "M", "s"),
            flow("a2", "M", "s"),
            flow("c1", "s", "m"),
            flow("c2", "s", "m"),
        ],
        vec![OneDimModuli {
            from: "M".into(),
            to: "m".into(),
            components: vec![interval(("a1", "c1"), ("a2", "c2")), interval(("a2", "c1"), ("a1", "c2"))],
        }],
    )?;
    Ok((cat, OrientationData::from_pairs([("a1", 1), ("a2", 1), ("c1", 1), ("c2", -1)])?))
}

/// Looks up `circle`, `torus`, `klein`, `rp2` or `torus-perturbed:SEED`.
/// Perturbed tori are built numerically with `cfg`.
pub fn example(name: &str, cfg: &NumericalConfig) -> Result<Example, ExampleError> {
    let (category, orientation, function) = match name {
        "circle" => {
            let (c, o) = circle()?;
            (c, o, Some(TrigPolynomial::standard(1)))
        }
        "torus" => {
            let (c, o) = torus()?;
            (c, o, Some(TrigPolynomial::standard(2)))
        }
        "klein" => {
            let (c, o) = klein()?;
            (c, o, None)
        }
        "rp2" => {
            let (c, o) = rp2()?;
            (c, o, None)
        }
        other => {
            let seed = other
                .strip_prefix("torus-perturbed:")
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| ExampleError::UnknownName(other.into()))?;
            let f = perturbed_torus(seed);
            let out = build_flow_category(&f, cfg)?;
            (out.category, out.orientation, Some(f))
        }
    };
    Ok(Example {
        name: name.into(),
        category,
        orientation,
        function,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoefficientRing, HomologyGroup};
    use crate::flowcat::{check_orientation_coherence, floer_complex, validate_morse_smale, FloerOptions};

    fn homology(name: &str, ring: &CoefficientRing) -> Vec<HomologyGroup> {
        let ex = example(name, &NumericalConfig::default()).unwrap();
        floer_complex(&ex.category, &ex.orientation, FloerOptions::default())
            .unwrap()
            .homology(ring)
            .unwrap()
            .into_iter()
            .map(|(_, g)| g)
            .collect()
    }

    #[test]
    fn handcrafted_examples_validate() {
        for name in NAMES {
            let ex = example(name, &NumericalConfig::default()).unwrap();
            assert!(validate_morse_smale(&ex.category).passed(), "{name}");
            assert!(check_orientation_coherence(&ex.category, &ex.orientation).passed(), "{name}");
        }
    }

    #[test]
    fn klein_and_rp2_homology() {
        let z = CoefficientRing::Integers;
        let z2 = CoefficientRing::modular(2).unwrap();
        assert_eq!(
            homology("klein", &z),
            [HomologyGroup::free(1), HomologyGroup::with_torsion(1, &[2]), HomologyGroup::free(0)]
        );
        assert_eq!(homology("klein", &z2).iter().map(|g| g.free_rank).collect::<Vec<_>>(), [1, 2, 1]);
        assert_eq!(
            homology("rp2", &z),
            [HomologyGroup::free(1), HomologyGroup::with_torsion(0, &[2]), HomologyGroup::free(0)]
        );
        assert_eq!(homology("rp2", &z2).iter().map(|g| g.free_rank).collect::<Vec<_>>(), [1, 1, 1]);
    }

    #[test]
    fn unknown_names() {
        let cfg = NumericalConfig::default();
        assert!(matches!(example("sphere", &cfg), Err(ExampleError::UnknownName(_))));
        assert!(matches!(example("torus-perturbed:x", &cfg), Err(ExampleError::UnknownName(_))));
    }
}

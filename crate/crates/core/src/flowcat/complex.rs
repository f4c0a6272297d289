use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::coeff::{CoefficientRing, HomologyGroup, IntegerMatrix};
use crate::jcat::ChainComplexData;

use super::{check_orientation_coherence, FlowCategory, FlowError, OrientationData};

/// Floer chain complex graded by index relative to an optional base object.
/// Complex degree `k` carries grading `k + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerComplexExtract {
    pub base_object: Option<String>,
    pub offset: i64,
    pub complex: ChainComplexData,
}

impl FloerComplexExtract {
    pub fn grading(&self, degree: usize) -> i64 {
        degree as i64 + self.offset
    }

    /// Homology paired with its grading.
    pub fn homology(&self, ring: &CoefficientRing) -> Result<Vec<(i64, HomologyGroup)>, FlowError> {
        let hs = self.complex.homology(ring)?;
        Ok(hs.into_iter().enumerate().map(|(k, h)| (self.grading(k), h)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FloerOptions<'a> {
    pub base_object: Option<&'a str>,
    /// Reject negative relative gradings instead of shifting them.
    pub strict: bool,
}

/// `∂[a] = Σ_b (Σ signs of rigid flows a -> b) [b]` over index-adjacent objects.
pub fn floer_complex(
    cat: &FlowCategory,
    or: &OrientationData,
    opts: FloerOptions<'_>,
) -> Result<FloerComplexExtract, FlowError> {
    let coherence = check_orientation_coherence(cat, or);
    if !coherence.passed() {
        let first = coherence
            .checks
            .iter()
            .flat_map(|c| c.failures.iter())
            .next()
            .cloned()
            .unwrap_or_default();
        return Err(FlowError::IncoherentOrientation(first));
    }
    let base = match opts.base_object {
        Some(id) => cat.index(id)?,
        None => 0,
    };
    let grade = |id: &str| cat.index(id).expect("checked") - base;
    let min = cat.objects().iter().map(|o| grade(&o.id)).min();
    let max = cat.objects().iter().map(|o| grade(&o.id)).max();
    let (Some(min), Some(max)) = (min, max) else {
        return Ok(FloerComplexExtract {
            base_object: opts.base_object.map(str::to_string),
            offset: 0,
            complex: ChainComplexData::zero(),
        });
    };
    if min < 0 && opts.strict {
        let obj = cat.objects().iter().find(|o| grade(&o.id) == min).expect("min attained");
        return Err(FlowError::NegativeRelativeIndex {
            object: obj.id.clone(),
            grading: min,
        });
    }
    let offset = min.min(0);
    let top = (max - offset) as usize;
    let mut bases: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    let mut pos: BTreeMap<&str, usize> = BTreeMap::new();
    for o in cat.objects() {
        let k = (grade(&o.id) - offset) as usize;
        pos.insert(&o.id, bases[k].len());
        bases[k].push(o.id.clone());
    }
    let mut boundaries: Vec<IntegerMatrix> = (1..=top)
        .map(|i| IntegerMatrix::zeros(bases[i - 1].len(), bases[i].len()))
        .collect();
    for f in cat.flows() {
        let (ka, kb) = (grade(&f.from) - offset, grade(&f.to) - offset);
        if ka != kb + 1 {
            continue;
        }
        let d = &mut boundaries[kb as usize];
        let (r, c) = (pos[f.to.as_str()], pos[f.from.as_str()]);
        let s = or.sign(&f.id).expect("coherence checked signs");
        let v = d.get(r, c) + BigInt::from(s);
        d.set(r, c, v);
    }
    let complex = ChainComplexData::new(bases, boundaries)?;
    Ok(FloerComplexExtract {
        base_object: opts.base_object.map(str::to_string),
        offset,
        complex,
    })
}

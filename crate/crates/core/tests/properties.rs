//! Randomized invariants of the algebraic and numerical layers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use morsecat::bank::{example, NAMES};
use morsecat::coeff::{smith_normal_form, CoefficientRing, HomologyGroup, IntegerMatrix};
use morsecat::corners::{face_decomposition, strata, validate_sign_diagram, CubeObject, SignDiagram};
use morsecat::flowcat::{
    check_orientation_coherence, floer_complex, FloerOptions, FlowCategory, Object, OrientationData, RigidFlow,
};
use morsecat::jcat::{compose, in_face_image, realize, ChainComplexData, Components, JError, JPoint};
use morsecat::morse::{NumericalConfig, Term, TrigPolynomial};
use morsecat::synth::{random_filtered_complex, SynthBounds};

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (0..=max_dim, 0..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c)
            .prop_map(move |v| IntegerMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap())
    })
}

/// Rank over `F_p` by plain elimination on `i64` residues.
fn rank_mod(m: &IntegerMatrix, p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let r = m.get(i, j) % BigInt::from(p);
                    let r: i64 = r.try_into().unwrap();
                    r.rem_euclid(p)
                })
                .collect()
        })
        .collect();
    let inv = |x: i64| (1..p).find(|y| x * y % p == 1).unwrap();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let s = inv(a[rank][col]);
        for x in a[rank].iter_mut() {
            *x = *x * s % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..m.cols() {
                    a[r][c] = (a[r][c] - f * a[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over `Q` by fraction-exact elimination.
fn rank_q(m: &IntegerMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[rank][col];
                for c in 0..m.cols() {
                    let v = &a[rank][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn complex_strategy() -> impl Strategy<Value = ChainComplexData> {
    any::<u64>().prop_map(|s| random_filtered_complex(s, SynthBounds::default()).complex)
}

fn homology(c: &ChainComplexData, ring: &CoefficientRing) -> Vec<HomologyGroup> {
    c.homology(ring).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(a in matrix(8, 5)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.u.determinant().unwrap().abs().is_one());
        prop_assert!(s.v.determinant().unwrap().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        prop_assert!(f.iter().all(|x| x.is_positive()));
        prop_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        prop_assert_eq!(f.len(), rank_q(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rational_homology_matches_integral_free_rank(c in complex_strategy()) {
        let z = homology(&c, &CoefficientRing::Integers);
        let q = homology(&c, &CoefficientRing::Rationals);
        let ranks = c.ranks();
        for k in 0..ranks.len() {
            prop_assert!(q[k].torsion.is_empty());
            prop_assert_eq!(q[k].free_rank, z[k].free_rank);
            let out = if k == 0 { 0 } else { rank_q(&c.boundaries()[k - 1]) };
            let inn = c.boundary(k + 1).map_or(0, rank_q);
            prop_assert_eq!(q[k].free_rank, ranks[k] - out - inn);
        }
    }

    #[test]
    fn euler_characteristic_is_homological(c in complex_strategy()) {
        let z = homology(&c, &CoefficientRing::Integers);
        let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
        let chains: i64 = c.ranks().iter().enumerate().map(|(k, &r)| sign(k) * r as i64).sum();
        let hom: i64 = z.iter().enumerate().map(|(k, h)| sign(k) * h.free_rank as i64).sum();
        prop_assert_eq!(chains, hom);
    }

    #[test]
    fn prime_field_dimensions_follow_universal_coefficients(c in complex_strategy(), p in prop::sample::select(vec![2i64, 3, 5])) {
        let z = homology(&c, &CoefficientRing::Integers);
        let fp = homology(&c, &CoefficientRing::modular(p as u64).unwrap());
        let ranks = c.ranks();
        let divisible = |h: &HomologyGroup| h.torsion.iter().filter(|t| (*t % p).is_zero()).count();
        for k in 0..ranks.len() {
            let out = if k == 0 { 0 } else { rank_mod(&c.boundaries()[k - 1], p) };
            let inn = c.boundary(k + 1).map_or(0, |d| rank_mod(d, p));
            prop_assert_eq!(fp[k].free_rank, ranks[k] - out - inn);
            let lower = if k == 0 { 0 } else { divisible(&z[k - 1]) };
            prop_assert_eq!(fp[k].free_rank, z[k].free_rank + divisible(&z[k]) + lower);
        }
    }
}

fn ratio() -> impl Strategy<Value = BigRational> {
    (0i64..=10, 1i64..=5).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn point(n: i64, m: i64) -> BoxedStrategy<JPoint> {
    let len = if n == m { 0 } else { (n - m - 1) as usize };
    let finite = prop::collection::vec(ratio(), len).prop_map(move |c| JPoint::new(n, m, c).unwrap());
    if n > m {
        prop_oneof![9 => finite, 1 => Just(JPoint::infinity(n, m).unwrap())].boxed()
    } else {
        finite.boxed()
    }
}

fn triple() -> impl Strategy<Value = (JPoint, JPoint, JPoint)> {
    prop::collection::vec(0i64..=4, 3).prop_flat_map(|steps| {
        let p = -2;
        let m = p + steps[0];
        let n = m + steps[1];
        let k = n + steps[2];
        (point(k, n), point(n, m), point(m, p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn j_composition_is_associative((h, g, f) in triple()) {
        let left = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        let right = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composites_lie_in_face_images((_, g, f) in triple()) {
        let x = compose(&g, &f).unwrap();
        let m = g.target();
        if x.is_infinity() {
            prop_assert!(g.is_infinity() || f.is_infinity());
        } else if m > x.target() && m < x.source() {
            prop_assert!(in_face_image(&x, m).unwrap());
        }
        // basepoint absorption
        if g.is_infinity() && !f.is_identity() || f.is_infinity() && !g.is_identity() {
            prop_assert!(x.is_infinity());
        }
    }
}

/// `D²` of the block total differential, computed densely on `i64`.
fn total_square_vanishes(ranks: &[usize], blocks: &Components) -> bool {
    let off: Vec<usize> = std::iter::once(0)
        .chain(ranks.iter().scan(0, |acc, r| {
            *acc += r;
            Some(*acc)
        }))
        .collect();
    let n = off[ranks.len()];
    let mut d = vec![vec![0i64; n]; n];
    for (&(p, q), m) in blocks {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                d[off[q] + r][off[p] + c] = m.get(r, c).try_into().unwrap();
            }
        }
    }
    (0..n).all(|i| (0..n).all(|j| (0..n).map(|k| d[i][k] * d[k][j]).sum::<i64>() == 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn graded_realization_recovers_homology(seed in any::<u64>()) {
        let s = random_filtered_complex(seed, SynthBounds::default());
        let x = realize(&s.complex, &CoefficientRing::Integers, None).unwrap();
        let graded = x.graded_total_homology().unwrap().unwrap();
        prop_assert_eq!(graded, homology(&s.complex, &CoefficientRing::Integers));
    }

    #[test]
    fn realize_rejects_exactly_the_nonzero_squares(seed in any::<u64>(), pick in any::<prop::sample::Index>(), entry in any::<prop::sample::Index>(), delta in prop::sample::select(vec![-1i64, 1])) {
        let s = random_filtered_complex(seed, SynthBounds::default());
        let ranks = s.complex.ranks();
        let mut blocks: Components = s.higher.clone();
        for (k, d) in s.complex.boundaries().iter().enumerate() {
            blocks.insert((k + 1, k), d.clone());
        }
        let keys: Vec<(usize, usize)> = blocks.keys().copied().filter(|k| {
            let m = &blocks[k];
            m.rows() * m.cols() > 0
        }).collect();
        prop_assume!(!keys.is_empty());
        let key = keys[pick.index(keys.len())];
        let m = blocks.get_mut(&key).unwrap();
        let e = entry.index(m.rows() * m.cols());
        let (r, c) = (e / m.cols(), e % m.cols());
        let v = m.get(r, c) + BigInt::from(delta);
        m.set(r, c, v);
        let expect_ok = total_square_vanishes(&ranks, &blocks);

        let boundaries: Vec<IntegerMatrix> = (1..ranks.len()).map(|p| blocks[&(p, p - 1)].clone()).collect();
        let higher: Components = blocks.iter().filter(|(k, _)| k.0 > k.1 + 1).map(|(k, m)| (*k, m.clone())).collect();
        let result = ChainComplexData::new(s.complex.bases().to_vec(), boundaries)
            .and_then(|c| realize(&c, &CoefficientRing::Integers, Some(&higher)));
        match result {
            Ok(_) => prop_assert!(expect_ok),
            Err(JError::BoundaryCompositeNonzero { .. } | JError::TotalDifferentialSquareNonzero { .. }) => {
                prop_assert!(!expect_ok)
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

/// Random graded category: objects at indices 0..=4, flows strictly lowering the index.
fn graded_category() -> impl Strategy<Value = FlowCategory> {
    prop::collection::vec(0i64..=4, 2..=7).prop_flat_map(|indices| {
        let n = indices.len();
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |mask| {
            let objects: Vec<Object> = indices
                .iter()
                .enumerate()
                .map(|(i, &index)| Object { id: format!("o{i}"), index })
                .collect();
            let mut flows = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if indices[i] > indices[j] && mask[i * n + j] {
                        flows.push(RigidFlow {
                            id: format!("f{i}_{j}"),
                            from: format!("o{i}"),
                            to: format!("o{j}"),
                        });
                    }
                }
            }
            FlowCategory::new(objects, flows, Vec::new()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strata_faces_count_intermediates(cat in graded_category()) {
        for a in cat.objects() {
            for b in cat.objects() {
                if !cat.greater(&a.id, &b.id) {
                    continue;
                }
                let all = strata(&cat, &a.id, &b.id).unwrap();
                let gap = a.index - b.index;
                for s in &all {
                    prop_assert_eq!(s.dimension, gap - 1 - s.intermediates().len() as i64);
                }
                let mut count: BTreeMap<Vec<String>, usize> = BTreeMap::new();
                for j in 1..gap {
                    for chains in face_decomposition(&cat, &a.id, &b.id, j).unwrap().values() {
                        for c in chains {
                            *count.entry(c.chain.clone()).or_default() += 1;
                        }
                    }
                }
                for s in &all {
                    prop_assert_eq!(count.get(&s.chain).copied().unwrap_or(0), s.intermediates().len());
                }
                let closed: Vec<Vec<String>> = all.iter().filter(|s| !s.intermediates().is_empty()).map(|s| s.chain.clone()).collect();
                prop_assert_eq!(count.keys().cloned().collect::<Vec<_>>(), {
                    let mut c = closed;
                    c.sort();
                    c
                });
            }
        }
    }

    #[test]
    fn paired_sign_diagrams_multiply(k in 0usize..=3, r in 0usize..=3, seed in prop::collection::vec(any::<bool>(), 16)) {
        let table = &seed;
        let unit = |offset: usize| move |s: usize, e: usize| if table[(offset + s * 4 + e) % 16] { 1 } else { -1 };
        let a = SignDiagram::from_block_units(k, unit(0)).unwrap();
        let b = SignDiagram::from_block_units(r, unit(7)).unwrap();
        let ab = a.pair(&b);
        prop_assert_eq!(ab.k(), k + r);
        for x in CubeObject::all(k) {
            for y in CubeObject::all(r) {
                prop_assert_eq!(ab.sign(&x.concat(&y)), a.sign(&x) * b.sign(&y));
            }
        }
        prop_assert!(validate_sign_diagram(&a).passed());
        prop_assert!(validate_sign_diagram(&ab).passed());
    }
}

fn bank_example() -> impl Strategy<Value = (FlowCategory, OrientationData)> {
    prop::sample::select(NAMES.to_vec()).prop_map(|name| {
        let ex = example(name, &NumericalConfig::default()).unwrap();
        (ex.category, ex.orientation)
    })
}

fn floer_homology(cat: &FlowCategory, or: &OrientationData, base: Option<&str>) -> Vec<(i64, HomologyGroup)> {
    floer_complex(cat, or, FloerOptions { base_object: base, strict: false })
        .unwrap()
        .homology(&CoefficientRing::Integers)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugating_signs_at_an_object_keeps_homology((cat, or) in bank_example(), pick in any::<prop::sample::Index>()) {
        let obj = cat.objects()[pick.index(cat.objects().len())].id.clone();
        let mut flipped = or.clone();
        for f in cat.flows().iter().filter(|f| f.from == obj || f.to == obj) {
            flipped.flip(&f.id);
        }
        prop_assert!(check_orientation_coherence(&cat, &flipped).passed());
        prop_assert_eq!(floer_homology(&cat, &flipped, None), floer_homology(&cat, &or, None));
    }

    #[test]
    fn flipping_outgoing_signs_scales_a_column((cat, or) in bank_example(), pick in any::<prop::sample::Index>()) {
        let fc = floer_complex(&cat, &or, FloerOptions::default()).unwrap();
        let obj = &cat.objects()[pick.index(cat.objects().len())].id;
        let k = fc.complex.bases().iter().position(|b| b.contains(obj)).unwrap();
        let col = fc.complex.basis(k).iter().position(|x| x == obj).unwrap();
        let mut boundaries = fc.complex.boundaries().to_vec();
        if k > 0 {
            boundaries[k - 1].negate_col(col);
        }
        let scaled = ChainComplexData::new(fc.complex.bases().to_vec(), boundaries).unwrap();
        for ring in [CoefficientRing::Integers, CoefficientRing::modular(2).unwrap()] {
            prop_assert_eq!(homology(&scaled, &ring), homology(&fc.complex, &ring));
        }
    }

    #[test]
    fn base_object_shifts_grading_uniformly((cat, or) in bank_example(), pick in any::<prop::sample::Index>()) {
        let base = cat.objects()[pick.index(cat.objects().len())].clone();
        let plain = floer_homology(&cat, &or, None);
        let shifted = floer_homology(&cat, &or, Some(&base.id));
        prop_assert_eq!(plain.len(), shifted.len());
        for ((g0, h0), (g1, h1)) in plain.iter().zip(&shifted) {
            prop_assert_eq!(*g1, g0 - base.index);
            prop_assert_eq!(h0, h1);
        }
    }

    #[test]
    fn boundaries_square_to_zero_and_bound_homology((cat, or) in bank_example()) {
        let fc = floer_complex(&cat, &or, FloerOptions::default()).unwrap();
        let ds = fc.complex.boundaries();
        for w in ds.windows(2) {
            prop_assert!(w[0].mul(&w[1]).unwrap().is_zero());
        }
        let h = fc.complex.homology(&CoefficientRing::Integers).unwrap();
        for (k, r) in fc.complex.ranks().into_iter().enumerate() {
            prop_assert!(r >= h[k].free_rank);
        }
    }
}

fn trig_polynomial() -> impl Strategy<Value = TrigPolynomial> {
    (1usize..=3).prop_flat_map(|dim| {
        let term = (prop::collection::vec(-2i64..=2, dim), -20i64..=20, -20i64..=20)
            .prop_filter("nonzero frequency", |(k, _, _)| k.iter().any(|&x| x != 0))
            .prop_map(|(k, c, s)| Term::new(k, Rational64::new(c, 10), Rational64::new(s, 10)));
        prop::collection::vec(term, 1..=4).prop_filter_map("live terms", move |terms| TrigPolynomial::new(dim, terms).ok())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivatives_match_central_differences(f in trig_polynomial(), x in prop::collection::vec(0.0f64..1.0, 3)) {
        let n = f.dim();
        let x = &x[..n];
        let h = 1e-5;
        let jet = f.jet(x);
        prop_assert!((jet.value - f.value(x)).abs() <= 1e-12 * (1.0 + jet.value.abs()));
        let scale = 1.0 + jet.grad.amax();
        for i in 0..n {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            let fd = (f.value(&up) - f.value(&down)) / (2.0 * h);
            prop_assert!((fd - jet.grad[i]).abs() <= 1e-6 * scale, "grad {i}: {fd} vs {}", jet.grad[i]);
            let gd = (f.gradient(&up) - f.gradient(&down)) / (2.0 * h);
            let hscale = 1.0 + jet.hess.amax();
            for j in 0..n {
                prop_assert!((gd[j] - jet.hess[(j, i)]).abs() <= 1e-6 * hscale, "hess {j},{i}");
            }
        }
        prop_assert_eq!(jet.hess.clone(), jet.hess.transpose());
    }
}

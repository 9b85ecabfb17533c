mod common;

use sewerbench::classifiers::{fit, stump_fit, Algorithm, ClassDistribution, ClassifierSpec, LmtLeaf, Model, Payload};
use sewerbench::gasdata::{synthesize_dataset, SynthConfig};
use sewerbench::learner::{LearnedModel, ModelEnvelope};
use sewerbench::numerics::RngStream;

use common::*;

fn payload_name(m: &Model) -> &'static str {
    match &m.payload {
        Payload::ZeroR(_) => "ZeroR",
        Payload::Ibk(_) => "Ibk",
        Payload::KStar(_) => "KStar",
        Payload::Lwl(_) => "Lwl",
        Payload::Stump(_) => "Stump",
        Payload::RepTree(_) => "RepTree",
        Payload::RandomTree(_) => "RandomTree",
        Payload::NaiveBayes(_) => "NaiveBayes",
        Payload::NbTree(_) => "NbTree",
        Payload::Lmt(_) => "Lmt",
        Payload::DecisionTable(_) => "DecisionTable",
        Payload::Part(_) => "Part",
        Payload::Mlp(_) => "Mlp",
        Payload::Rbf(_) => "Rbf",
        Payload::Svm(_) => "Svm",
    }
}

fn quick_spec(a: Algorithm) -> ClassifierSpec {
    let s = ClassifierSpec::new(a).with_seed(42, vec![3]);
    match a {
        Algorithm::Mlp => s.with_param("hidden", 8.0).with_param("epochs", 50.0),
        _ => s,
    }
}

fn probes(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed, vec![77]);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.uniform_in(-0.5, 1.5)).collect())
        .collect()
}

#[test]
fn single_class_training_predicts_that_class() {
    for label in [0u8, 1] {
        let data = rows(
            &(0..20)
                .map(|i| (vec![i as f64 * 0.1, (i * 7 % 5) as f64], label))
                .collect::<Vec<_>>(),
        );
        for a in Algorithm::ALL {
            let m = fit(&quick_spec(a), &data).unwrap_or_else(|e| panic!("{a}: {e}"));
            for p in probes(2, 50, 1) {
                assert_eq!(m.predict(&p).unwrap(), label, "{a} on single-class {label}");
            }
        }
    }
}

#[test]
fn refitting_is_deterministic() {
    let data = threshold_data(80, 3, 11);
    for a in Algorithm::ALL {
        let m1 = fit(&quick_spec(a), &data).unwrap();
        let m2 = fit(&quick_spec(a), &data).unwrap();
        for p in probes(3, 100, 2) {
            let (d1, d2) = (m1.predict_dist(&p).unwrap(), m2.predict_dist(&p).unwrap());
            assert_eq!(d1.p_unsafe.to_bits(), d2.p_unsafe.to_bits(), "{a}");
        }
    }
}

#[test]
fn every_algorithm_round_trips_through_an_envelope() {
    let data = threshold_data(80, 3, 12);
    for a in Algorithm::ALL {
        let model = fit(&quick_spec(a), &data).unwrap();
        let name = payload_name(&model);
        let learned = LearnedModel::Classifier(model.into());
        let json = ModelEnvelope::new(learned.clone()).to_json().unwrap();
        let back = ModelEnvelope::from_json(&json).unwrap().model;
        assert_eq!(back.parameter_count(), learned.parameter_count(), "{name}");
        for p in probes(3, 200, 3) {
            let x = learned.predict_dist(&p).unwrap();
            let y = back.predict_dist(&p).unwrap();
            assert_eq!(x.p_unsafe.to_bits(), y.p_unsafe.to_bits(), "{name}");
        }
    }
}

#[test]
fn arity_mismatch_is_an_error() {
    let m = fit(&ClassifierSpec::new(Algorithm::ZeroR), &threshold_data(10, 3, 1)).unwrap();
    assert!(m.predict(&[0.1, 0.2]).is_err());
}

#[test]
fn zeror_predicts_training_frequencies() {
    let data = rows(&(0..10).map(|i| (vec![i as f64], u8::from(i >= 7))).collect::<Vec<_>>());
    let m = fit(&ClassifierSpec::new(Algorithm::ZeroR), &data).unwrap();
    let d = m.predict_dist(&[100.0]).unwrap();
    assert_eq!(m.predict(&[-3.0]).unwrap(), 0);
    assert!((d.p_safe - 0.7).abs() < 1e-12 && (d.p_unsafe - 0.3).abs() < 1e-12);

    let tie = rows(&(0..10).map(|i| (vec![i as f64], (i % 2) as u8)).collect::<Vec<_>>());
    assert_eq!(
        fit(&ClassifierSpec::new(Algorithm::ZeroR), &tie)
            .unwrap()
            .predict(&[0.0])
            .unwrap(),
        0
    );
}

#[test]
fn ibk_recalls_training_points_and_breaks_ties_by_index() {
    let data = threshold_data(60, 3, 5);
    let m = fit(&ClassifierSpec::new(Algorithm::Ibk), &data).unwrap();
    for inst in &data.instances {
        assert_eq!(m.predict(&inst.features).unwrap(), inst.label);
    }
    let three = rows(&[(vec![0.0], 1), (vec![1.0], 0), (vec![2.0], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::Ibk), &three).unwrap();
    // equidistant from stored points 0 and 1: the earlier one wins
    assert_eq!(m.predict(&[0.5]).unwrap(), 1);
    assert_eq!(m.predict(&[1.5]).unwrap(), 0);
}

#[test]
fn kstar_limits_and_symmetry() {
    let data = rows(&[
        (vec![0.0], 0),
        (vec![1.0], 1),
        (vec![2.0], 0),
        (vec![3.0], 1),
        (vec![4.0], 1),
    ]);
    let sharp = fit(&ClassifierSpec::new(Algorithm::KStar).with_param("blend", 0.01), &data).unwrap();
    for inst in &data.instances {
        assert!(sharp.predict_dist(&inst.features).unwrap().get(inst.label) > 0.99);
    }
    let pair = rows(&[(vec![0.0], 0), (vec![2.0], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::KStar), &pair).unwrap();
    assert!((m.predict_dist(&[1.0]).unwrap().p_unsafe - 0.5).abs() <= 1e-9);
}

#[test]
fn kstar_skips_constant_attributes() {
    let data = rows(&[(vec![0.0, 5.0], 0), (vec![1.0, 5.0], 1), (vec![3.0, 5.0], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::KStar), &data).unwrap();
    let d = m.predict_dist(&[0.2, 9.0]).unwrap();
    let oracle = kstar_oracle(
        &[vec![0.0, 5.0], vec![1.0, 5.0], vec![3.0, 5.0]],
        &[0, 1, 1],
        &[0.2, 9.0],
        0.2,
    );
    assert!((d.p_unsafe - oracle).abs() <= 1e-9);
}

#[test]
fn lwl_degenerate_cases() {
    let one = rows(&[(vec![0.3, 0.7], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::Lwl), &one).unwrap();
    assert_eq!(m.predict(&[5.0, -1.0]).unwrap(), 1);

    // all points coincide with the query: weights are uniform, so the local
    // model is the unweighted majority
    let same = rows(&[(vec![1.0], 0), (vec![1.0], 1), (vec![1.0], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::Lwl), &same).unwrap();
    assert_eq!(m.predict(&[1.0]).unwrap(), 1);
}

#[test]
fn stump_separable_and_xor() {
    let data = rows(&[
        (vec![1.0], 0),
        (vec![2.0], 0),
        (vec![3.0], 0),
        (vec![7.0], 1),
        (vec![9.0], 1),
    ]);
    let m = stump_fit(&data, &[1.0; 5]).unwrap();
    let Payload::Stump(s) = &m.payload else { unreachable!() };
    assert_eq!((s.feature, s.threshold, s.error), (Some(0), 5.0, 0.0));

    let xor = xor_data();
    let w = vec![1.0 / 16.0; 16];
    let m = stump_fit(&xor, &w).unwrap();
    let Payload::Stump(s) = &m.payload else { unreachable!() };
    assert!((s.error - 0.5).abs() < 1e-12);
    let x: Vec<Vec<f64>> = xor.instances.iter().map(|i| i.features.clone()).collect();
    let (f, t, _) = exhaustive_stump(&x, &xor.labels(), &w).unwrap();
    assert_eq!((s.feature, s.threshold), (Some(f), t));
    assert_eq!(
        stump_fit(&xor, &w).unwrap().predict(&[0.3, 0.9]).unwrap(),
        m.predict(&[0.3, 0.9]).unwrap()
    );
}

#[test]
fn stump_matches_enumeration_on_a_weighted_hand_case() {
    let data = rows(&[
        (vec![1.0, 4.0], 0),
        (vec![2.0, 1.0], 1),
        (vec![3.0, 3.0], 0),
        (vec![4.0, 2.0], 1),
        (vec![5.0, 5.0], 1),
    ]);
    let w = [0.1, 0.4, 0.2, 0.2, 0.1];
    let m = stump_fit(&data, &w).unwrap();
    let Payload::Stump(s) = &m.payload else { unreachable!() };
    let x: Vec<Vec<f64>> = data.instances.iter().map(|i| i.features.clone()).collect();
    let (f, t, e) = exhaustive_stump(&x, &data.labels(), &w).unwrap();
    assert_eq!((s.feature, s.threshold), (Some(f), t));
    assert!((s.error - e).abs() < 1e-12);
}

#[test]
fn pure_data_gives_single_leaf_trees_and_rules() {
    let data = rows(&(0..30).map(|i| (vec![i as f64, (i % 4) as f64], 1)).collect::<Vec<_>>());
    for a in [
        Algorithm::RepTree,
        Algorithm::RandomTree,
        Algorithm::NbTree,
        Algorithm::Part,
    ] {
        let m = fit(&ClassifierSpec::new(a), &data).unwrap();
        match &m.payload {
            Payload::RepTree(t) => assert_eq!(t.tree.n_leaves(), 1),
            Payload::RandomTree(t) => assert_eq!(t.tree.n_leaves(), 1),
            Payload::NbTree(t) => assert_eq!(t.tree.n_leaves(), 1),
            Payload::Part(p) => {
                assert_eq!(p.rules.len(), 1);
                assert!(p.rules[0].conditions.is_empty());
                assert_eq!(p.rules[0].dist.label(), 1);
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn rep_tree_prunes_a_noisy_branch() {
    // one mislabeled point inside a clean region invites a spurious split
    let mut pts = Vec::new();
    for i in 0..40 {
        let x = i as f64 / 40.0;
        let y = u8::from(x > 0.5);
        pts.push((vec![x], if i == 10 { 1 } else { y }));
    }
    let data = rows(&pts);
    let pruned = fit(
        &ClassifierSpec::new(Algorithm::RepTree).with_param("min_leaf", 1.0),
        &data,
    )
    .unwrap();
    let Payload::RepTree(t) = &pruned.payload else {
        unreachable!()
    };
    assert!(t.pruned);
    assert!(t.tree.n_leaves() <= 3, "pruned tree has {} leaves", t.tree.n_leaves());
    assert_eq!(pruned.predict(&[0.1]).unwrap(), 0);
    assert_eq!(pruned.predict(&[0.9]).unwrap(), 1);
}

#[test]
fn naive_bayes_boundary_and_posterior() {
    let sym = rows(&[
        (vec![-1.2], 0),
        (vec![-1.0], 0),
        (vec![-0.8], 0),
        (vec![0.8], 1),
        (vec![1.0], 1),
        (vec![1.2], 1),
    ]);
    let m = fit(&ClassifierSpec::new(Algorithm::NaiveBayes), &sym).unwrap();
    assert!((m.predict_dist(&[0.0]).unwrap().p_unsafe - 0.5).abs() < 1e-12);
    assert_eq!(m.predict(&[-0.01]).unwrap(), 0);
    assert_eq!(m.predict(&[0.01]).unwrap(), 1);

    // direct Bayes rule: Laplace priors, per-class ML Gaussians
    let pts = [
        (vec![1.0, 2.0], 0),
        (vec![2.0, 1.0], 0),
        (vec![3.0, 3.0], 0),
        (vec![4.0, 5.0], 1),
        (vec![6.0, 4.0], 1),
        (vec![5.0, 7.0], 1),
    ];
    let data = rows(&pts);
    let m = fit(&ClassifierSpec::new(Algorithm::NaiveBayes), &data).unwrap();
    let q = [3.5, 3.0];
    let mut joint = [0.0; 2];
    for c in 0..2u8 {
        let members: Vec<&Vec<f64>> = pts.iter().filter(|p| p.1 == c).map(|p| &p.0).collect();
        let n = members.len() as f64;
        let mut density = (n + 1.0) / (pts.len() as f64 + 2.0);
        for (a, qa) in q.iter().enumerate() {
            let mean = members.iter().map(|r| r[a]).sum::<f64>() / n;
            let var = members.iter().map(|r| (r[a] - mean).powi(2)).sum::<f64>() / n;
            density *= (-(qa - mean).powi(2) / (2.0 * var)).exp() / (std::f64::consts::TAU * var).sqrt();
        }
        joint[c as usize] = density;
    }
    let want = joint[1] / (joint[0] + joint[1]);
    assert!((m.predict_dist(&q).unwrap().p_unsafe - want).abs() <= 1e-12);

    let flat = rows(&[
        (vec![1.0, 0.0], 0),
        (vec![1.0, 1.0], 0),
        (vec![2.0, 5.0], 1),
        (vec![2.0, 6.0], 1),
    ]);
    let m = fit(&ClassifierSpec::new(Algorithm::NaiveBayes), &flat).unwrap();
    let d = m.predict_dist(&[1.5, 3.0]).unwrap();
    assert!(d.p_unsafe.is_finite() && d.p_safe.is_finite());
}

#[test]
fn nbtree_keeps_a_single_leaf_when_no_split_pays() {
    let mut rng = RngStream::new(3, vec![1]);
    let pts: Vec<(Vec<f64>, u8)> = (0..200)
        .map(|i| {
            let y = (i % 2) as u8;
            let c = if y == 1 { 2.0 } else { -2.0 };
            (vec![c + rng.normal(), c + rng.normal()], y)
        })
        .collect();
    let m = fit(&ClassifierSpec::new(Algorithm::NbTree), &rows(&pts)).unwrap();
    let Payload::NbTree(t) = &m.payload else { unreachable!() };
    assert_eq!(t.tree.n_leaves(), 1);
}

#[test]
fn lmt_small_training_sets_use_one_logistic_model() {
    let data = threshold_data(14, 2, 4);
    let m = fit(&ClassifierSpec::new(Algorithm::Lmt), &data).unwrap();
    let Payload::Lmt(l) = &m.payload else { unreachable!() };
    assert_eq!(l.tree.n_leaves(), 1);
    assert!(matches!(l.tree.leaf(&[0.5, 0.5]), LmtLeaf::Logistic(_)));

    let pure = rows(&(0..10).map(|i| (vec![i as f64], 0)).collect::<Vec<_>>());
    let m = fit(&ClassifierSpec::new(Algorithm::Lmt), &pure).unwrap();
    let Payload::Lmt(l) = &m.payload else { unreachable!() };
    assert!(matches!(l.tree.leaf(&[0.5]), LmtLeaf::Constant(0)));
}

#[test]
fn decision_table_selects_the_predictive_feature() {
    let mut rng = RngStream::new(6, vec![6]);
    let pts: Vec<(Vec<f64>, u8)> = (0..100)
        .map(|i| {
            let v = (i % 10) as f64;
            (vec![rng.uniform(), v], u8::from(v >= 5.0))
        })
        .collect();
    let data = rows(&pts);
    let m = fit(&ClassifierSpec::new(Algorithm::DecisionTable), &data).unwrap();
    let Payload::DecisionTable(dt) = &m.payload else {
        unreachable!()
    };
    assert_eq!(dt.selected, vec![1]);
    assert_eq!(dt.merit, 1.0);

    // keys never seen in training fall back to the global majority
    let pts: Vec<(Vec<f64>, u8)> = [0.0, 7.0, 8.0, 9.0]
        .iter()
        .flat_map(|&v| (0..10).map(move |i| (vec![i as f64, v], u8::from(v >= 5.0))))
        .collect();
    let m = fit(&ClassifierSpec::new(Algorithm::DecisionTable), &rows(&pts)).unwrap();
    let Payload::DecisionTable(dt) = &m.payload else {
        unreachable!()
    };
    assert_eq!(dt.selected, vec![1]);
    assert_eq!(m.predict(&[3.0, 0.0]).unwrap(), 0);
    assert_eq!(m.predict(&[3.0, 3.0]).unwrap(), 1);
}

#[test]
fn mlp_learns_separable_data_deterministically() {
    let pts: Vec<(Vec<f64>, u8)> = (0..40)
        .map(|i| {
            let x = (i % 8) as f64 / 7.0;
            let y = (i / 8) as f64 / 4.0;
            (vec![x, y], u8::from(x + y > 1.0))
        })
        .collect();
    let data = rows(&pts);
    let spec = ClassifierSpec::new(Algorithm::Mlp)
        .with_param("hidden", 10.0)
        .with_seed(42, vec![1]);
    let m = fit(&spec, &data).unwrap();
    let acc = data
        .instances
        .iter()
        .filter(|i| m.predict(&i.features).unwrap() == i.label)
        .count();
    assert_eq!(acc, data.len());
    let again = fit(&spec, &data).unwrap();
    let (Payload::Mlp(a), Payload::Mlp(b)) = (&m.payload, &again.payload) else {
        unreachable!()
    };
    assert_eq!(serde_json::to_string(a).unwrap(), serde_json::to_string(b).unwrap());
}

#[test]
fn rbf_centers_land_in_the_blobs() {
    let mut rng = RngStream::new(9, vec![1]);
    let pts: Vec<(Vec<f64>, u8)> = (0..60)
        .map(|i| {
            let (c, y) = if i % 2 == 0 { ((0.0, 0.0), 0) } else { ((10.0, 10.0), 1) };
            (vec![c.0 + 0.1 * rng.normal(), c.1 + 0.1 * rng.normal()], y)
        })
        .collect();
    let data = rows(&pts);
    let m = fit(&ClassifierSpec::new(Algorithm::Rbf).with_param("centers", 2.0), &data).unwrap();
    let Payload::Rbf(r) = &m.payload else { unreachable!() };
    // centers live in min-max scaled space, where the blobs sit near 0 and 1
    let mut corners: Vec<f64> = r.centers.iter().map(|c| c[0]).collect();
    corners.sort_by(f64::total_cmp);
    assert!(corners[0] < 0.05 && corners[1] > 0.95, "centers {:?}", r.centers);
    assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), 0);
    assert_eq!(m.predict(&[10.0, 10.0]).unwrap(), 1);
}

#[test]
fn svm_two_points_and_xor() {
    let two = rows(&[(vec![0.0, 0.0], 0), (vec![2.0, 2.0], 1)]);
    let m = fit(&ClassifierSpec::new(Algorithm::Svm), &two).unwrap();
    let Payload::Svm(s) = &m.payload else { unreachable!() };
    assert_eq!(s.n_support(), 2);
    let scaled_mid = m.scaler.as_ref().unwrap().transform(&[1.0, 1.0]);
    assert!(s.decision(&scaled_mid).abs() < 1e-6);

    let xor = xor_data();
    let m = fit(
        &ClassifierSpec::new(Algorithm::Svm)
            .with_param("c", 10.0)
            .with_param("gamma", 5.0),
        &xor,
    )
    .unwrap();
    for inst in &xor.instances {
        assert_eq!(m.predict(&inst.features).unwrap(), inst.label);
    }
}

#[test]
fn random_trees_depend_on_the_seed() {
    let data = synthesize_dataset(&SynthConfig::fast()).unwrap();
    let small = data.subset(&(0..data.len()).step_by(8).collect::<Vec<_>>());
    let t = |seed| {
        let m = fit(
            &ClassifierSpec::new(Algorithm::RandomTree).with_seed(seed, vec![]),
            &small,
        )
        .unwrap();
        let Payload::RandomTree(r) = m.payload else {
            unreachable!()
        };
        r.tree.split_sequence()
    };
    assert_ne!(t(1), t(2));
    assert_eq!(t(1), t(1));

    let one_feature = rows(&(0..20).map(|i| (vec![i as f64], u8::from(i > 12))).collect::<Vec<_>>());
    let a = fit(
        &ClassifierSpec::new(Algorithm::RandomTree).with_seed(1, vec![]),
        &one_feature,
    )
    .unwrap();
    let b = fit(
        &ClassifierSpec::new(Algorithm::RandomTree).with_seed(2, vec![]),
        &one_feature,
    )
    .unwrap();
    let seq = |m: &Model| match &m.payload {
        Payload::RandomTree(r) => r.tree.split_sequence(),
        _ => unreachable!(),
    };
    assert_eq!(seq(&a), seq(&b));
    assert_eq!(seq(&a), vec![(0, 12.5)]);
}

#[test]
fn invalid_parameters_are_rejected() {
    let data = threshold_data(20, 2, 1);
    assert!(fit(&ClassifierSpec::new(Algorithm::Svm).with_param("c", -1.0), &data).is_err());
    assert!(fit(&ClassifierSpec::new(Algorithm::KStar).with_param("blend", 0.0), &data).is_err());
    assert!(fit(&ClassifierSpec::new(Algorithm::ZeroR).with_param("bogus", 1.0), &data).is_err());
    assert!(fit(&ClassifierSpec::new(Algorithm::ZeroR), &data.subset(&[])).is_err());
}

#[test]
fn class_distribution_tie_resolves_to_safe() {
    assert_eq!(ClassDistribution::UNIFORM.label(), 0);
    assert_eq!(ClassDistribution::from_scores(0.0, 0.0), ClassDistribution::UNIFORM);
}

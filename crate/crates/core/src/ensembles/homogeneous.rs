use std::sync::Arc;

use super::{
    internal_folds, rotate_row, split_by_fold, EnsembleParams, EnsemblePayload, EnsembleSpec, RotationMember,
    SubspaceMember,
};
use crate::classifiers::{self, Model};
use crate::dataset::{Dataset, Instance};
use crate::error::Result;
use crate::numerics::pca::pca;
use crate::numerics::rng::tags;
use crate::numerics::Matrix;

fn fit_member(spec: &EnsembleSpec, j: usize, data: &Dataset) -> Result<Arc<Model>> {
    Ok(Arc::new(classifiers::fit(&spec.member_spec(j), data)?))
}

/// Row indices of bootstrap replicate `j` (`n` draws with replacement).
pub(crate) fn bootstrap_indices(spec: &EnsembleSpec, j: usize, n: usize) -> Vec<usize> {
    let mut rng = spec.sub_stream(&[tags::BOOTSTRAP, j as u64]);
    (0..n).map(|_| rng.below(n)).collect()
}

pub(super) fn bagging(spec: &EnsembleSpec, train: &Dataset) -> Result<EnsemblePayload> {
    let members = (0..spec.size)
        .map(|j| fit_member(spec, j, &train.subset(&bootstrap_indices(spec, j, train.len()))))
        .collect::<Result<_>>()?;
    Ok(EnsemblePayload::Bagging { members })
}

/// Sorted feature subset of member `j`: `ceil(fraction * d)` distinct columns.
pub(crate) fn subspace_features(spec: &EnsembleSpec, j: usize, dim: usize, fraction: f64) -> Vec<usize> {
    let m = ((fraction * dim as f64).ceil() as usize).clamp(1, dim.max(1));
    let mut rng = spec.sub_stream(&[tags::SUBSPACE, j as u64]);
    let mut f = rng.sample_indices(dim, m);
    f.sort_unstable();
    f
}

pub(super) fn random_subspace(spec: &EnsembleSpec, train: &Dataset, p: &EnsembleParams) -> Result<EnsemblePayload> {
    let members = (0..spec.size)
        .map(|j| {
            let features = subspace_features(spec, j, train.dim(), p.subspace_fraction);
            let model = fit_member(spec, j, &train.project(&features))?;
            Ok(SubspaceMember { features, model })
        })
        .collect::<Result<_>>()?;
    Ok(EnsemblePayload::RandomSubspace { members })
}

pub(super) fn random_committee(spec: &EnsembleSpec, train: &Dataset) -> Result<EnsemblePayload> {
    let members = (0..spec.size)
        .map(|j| fit_member(spec, j, train))
        .collect::<Result<_>>()?;
    Ok(EnsemblePayload::RandomCommittee { members })
}

/// Splits a shuffled feature order into `k` contiguous blocks whose sizes
/// differ by at most one (larger blocks first).
fn feature_groups(order: &[usize], k: usize) -> Vec<Vec<usize>> {
    let d = order.len();
    let mut groups = Vec::with_capacity(k);
    let mut start = 0;
    for g in 0..k {
        let len = d / k + usize::from(g < d % k);
        groups.push(order[start..start + len].to_vec());
        start += len;
    }
    groups
}

pub(super) fn rotation_forest(spec: &EnsembleSpec, train: &Dataset, p: &EnsembleParams) -> Result<EnsemblePayload> {
    let d = train.dim();
    let n = train.len();
    let members = (0..spec.size)
        .map(|j| {
            let mut rng = spec.sub_stream(&[tags::ROTATION, j as u64]);
            let mut order: Vec<usize> = (0..d).collect();
            rng.shuffle(&mut order);
            let groups = feature_groups(&order, p.groups.min(d.max(1)));
            let mut rotations = Vec::with_capacity(groups.len());
            for g in &groups {
                // non-empty random class subset, then a bootstrap of
                // `class_sample` of its rows
                let mask = 1 + rng.below(3);
                let mut pool: Vec<usize> = (0..n)
                    .filter(|&i| mask & (1 << train.instances[i].label) != 0)
                    .collect();
                if pool.len() < 2 {
                    pool = (0..n).collect();
                }
                let m = ((p.class_sample * pool.len() as f64).ceil() as usize).max(1);
                let rows: Vec<usize> = if m < 2 {
                    pool
                } else {
                    (0..m).map(|_| pool[rng.below(pool.len())]).collect()
                };
                let mut data = Vec::with_capacity(rows.len() * g.len());
                for &i in &rows {
                    data.extend(g.iter().map(|&c| train.instances[i].features[c]));
                }
                let mat = Matrix::from_vec(rows.len(), g.len(), data)?;
                rotations.push(pca(&mat, g.len())?);
            }
            let rotated: Vec<Instance> = train
                .instances
                .iter()
                .map(|r| Instance {
                    features: rotate_row(&groups, &rotations, &r.features),
                    label: r.label,
                })
                .collect();
            let rotated = Dataset::new(train.feature_names.clone(), rotated)?;
            Ok(RotationMember {
                model: fit_member(spec, j, &rotated)?,
                groups,
                rotations,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EnsemblePayload::RotationForest { members })
}

pub(super) fn ensemble_selection(spec: &EnsembleSpec, train: &Dataset, p: &EnsembleParams) -> Result<EnsemblePayload> {
    let mut rng = spec.sub_stream(&[tags::SELECTION]);
    let (fit_rows, sel_rows) = match internal_folds(&train.labels(), p.holdout_folds, &mut rng) {
        Some((_, assignments)) => {
            let (fit_idx, sel_idx) = split_by_fold(&assignments, 0);
            (train.subset(&fit_idx), train.subset(&sel_idx))
        }
        None => (train.clone(), train.clone()),
    };
    let library: Vec<Arc<Model>> = (0..spec.size)
        .map(|j| fit_member(spec, j, &fit_rows))
        .collect::<Result<_>>()?;
    let truth = sel_rows.labels();
    let preds: Vec<Vec<u8>> = library
        .iter()
        .map(|m| m.predict_batch(&sel_rows.instances))
        .collect::<Result<_>>()?;
    let n_sel = truth.len();
    let mut votes = vec![[0usize; 2]; n_sel];
    let mut bag = Vec::new();
    let mut selection_accuracy = Vec::new();
    let mut current = f64::NEG_INFINITY;
    for _ in 0..spec.size {
        let mut best: Option<(usize, f64)> = None;
        for (j, pj) in preds.iter().enumerate() {
            let hits = (0..n_sel)
                .filter(|&i| {
                    let mut v = votes[i];
                    v[usize::from(pj[i])] += 1;
                    u8::from(v[1] > v[0]) == truth[i]
                })
                .count();
            let acc = hits as f64 / n_sel as f64;
            if best.is_none_or(|(_, b)| acc > b) {
                best = Some((j, acc));
            }
        }
        let (j, acc) = best.expect("library is non-empty");
        if acc <= current {
            break;
        }
        for (v, &l) in votes.iter_mut().zip(&preds[j]) {
            v[usize::from(l)] += 1;
        }
        bag.push(j);
        selection_accuracy.push(acc);
        current = acc;
    }
    Ok(EnsemblePayload::EnsembleSelection {
        library,
        bag,
        selection_accuracy,
    })
}

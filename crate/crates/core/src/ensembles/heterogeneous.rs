use std::sync::Arc;

use super::{
    internal_folds, label_accuracy, split_by_fold, EnsembleParams, EnsemblePayload, EnsembleSpec, WeightedVote,
};
use crate::classifiers::Model;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::learner::FitContext;
use crate::numerics::rng::tags;

pub(super) fn vote(spec: &EnsembleSpec, train: &Dataset, ctx: &FitContext) -> Result<EnsemblePayload> {
    let members = (0..spec.members.len())
        .map(|j| ctx.fit(&spec.member_spec(j), train))
        .collect::<Result<_>>()?;
    Ok(EnsemblePayload::Vote { members })
}

/// Internal fold plan shared by multi-scheme selection and WPE weighting: with
/// the same fold count, WPE's held-out slice is fold 0 of multi-scheme's plan.
fn shared_plan(spec: &EnsembleSpec, train: &Dataset, k: usize) -> Option<(usize, Vec<usize>)> {
    let mut rng = spec.sub_stream(&[tags::ENSEMBLE_CV]);
    internal_folds(&train.labels(), k, &mut rng)
}

pub(super) fn multi_scheme(
    spec: &EnsembleSpec,
    train: &Dataset,
    p: &EnsembleParams,
    ctx: &FitContext,
) -> Result<EnsemblePayload> {
    let m = spec.members.len();
    let plan = if m > 1 {
        shared_plan(spec, train, p.cv_folds)
    } else {
        None
    };
    let mut cv_accuracy = Vec::new();
    let mut selected = 0;
    if let Some((k, assignments)) = plan {
        let folds: Vec<(Dataset, Dataset)> = (0..k)
            .map(|f| {
                let (tr, te) = split_by_fold(&assignments, f);
                (train.subset(&tr), train.subset(&te))
            })
            .collect();
        for j in 0..m {
            let member = spec.member_spec(j);
            let mut total = 0.0;
            for (tr, te) in &folds {
                let model = ctx.fit(&member, tr)?;
                total += label_accuracy(&ctx.predict(&model, te)?, te);
            }
            cv_accuracy.push(total / k as f64);
        }
        for (j, &a) in cv_accuracy.iter().enumerate() {
            if a > cv_accuracy[selected] {
                selected = j;
            }
        }
    }
    let model = ctx.fit(&spec.member_spec(selected), train)?;
    Ok(EnsemblePayload::MultiScheme {
        cv_accuracy,
        selected,
        model,
    })
}

pub(super) fn wpe(
    spec: &EnsembleSpec,
    train: &Dataset,
    p: &EnsembleParams,
    ctx: &FitContext,
) -> Result<EnsemblePayload> {
    let m = spec.members.len();
    let (members, weights): (Vec<Arc<Model>>, Vec<f64>) = match shared_plan(spec, train, p.holdout_folds) {
        Some((_, assignments)) => {
            let (tr, te) = split_by_fold(&assignments, 0);
            let (fit_rows, held_out) = (train.subset(&tr), train.subset(&te));
            let mut members = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for j in 0..m {
                let model = ctx.fit(&spec.member_spec(j), &fit_rows)?;
                weights.push(label_accuracy(&ctx.predict(&model, &held_out)?, &held_out));
                members.push(model);
            }
            (members, weights)
        }
        None => {
            let members = (0..m)
                .map(|j| ctx.fit(&spec.member_spec(j), train))
                .collect::<Result<_>>()?;
            (members, vec![1.0; m])
        }
    };
    Ok(EnsemblePayload::Wpe {
        members,
        vote: WeightedVote::new(weights)?,
    })
}

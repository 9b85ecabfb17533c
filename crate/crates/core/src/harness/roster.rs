use crate::classifiers::{Algorithm, ClassifierSpec};
use crate::ensembles::{EnsembleSpec, Method};
use crate::learner::{Category, NamedLearner};

/// The twelve base classifiers and nine ensembles with default parameters,
/// grouped by category.
pub fn default_roster() -> Vec<NamedLearner> {
    let base = |name: &str, cat: Category, alg: Algorithm| NamedLearner::new(name, Some(cat), ClassifierSpec::new(alg));
    let ens = |name: &str, cat: Category, m: Method| NamedLearner::new(name, Some(cat), EnsembleSpec::new(m));
    vec![
        base("MLP", Category::F1, Algorithm::Mlp),
        base("RBF", Category::F1, Algorithm::Rbf),
        base("SVM", Category::F1, Algorithm::Svm),
        base("REPTree", Category::F2, Algorithm::RepTree),
        base("NBTree", Category::F2, Algorithm::NbTree),
        base("LMT", Category::F2, Algorithm::Lmt),
        base("IBK", Category::F3, Algorithm::Ibk),
        base("KStar", Category::F3, Algorithm::KStar),
        base("LWL", Category::F3, Algorithm::Lwl),
        base("DT", Category::F4, Algorithm::DecisionTable),
        base("PART", Category::F4, Algorithm::Part),
        base("ZeroR", Category::F4, Algorithm::ZeroR),
        ens("Bagging", Category::E1, Method::Bagging),
        ens("AdaBoost", Category::E1, Method::AdaBoostM1),
        ens("RandomSubspace", Category::E1, Method::RandomSubspace),
        ens("RandomCommittee", Category::E1, Method::RandomCommittee),
        ens("RotationForest", Category::E1, Method::RotationForest),
        ens("EnsembleSelection", Category::E1, Method::EnsembleSelection),
        ens("Vote", Category::E2, Method::Vote),
        ens("Multi", Category::E2, Method::MultiScheme),
        ens("WPE", Category::E2, Method::Wpe),
    ]
}

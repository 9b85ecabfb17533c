//! End-to-end acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.
//!
//! Criteria 2, 3, 4 and 6 share one full-profile benchmark run (16,384 rows,
//! 10 x 10-fold), which takes hours on a single core. Setting
//! `SEWERBENCH_ACCEPTANCE_QUICK=1` skips that run and reports those criteria
//! as skipped (which counts as failure).

mod common;

use std::path::Path;
use std::time::Instant;

use sewerbench::classifiers::MlpWeights;
use sewerbench::classifiers::{fit, stump_fit, Algorithm, ClassifierSpec, Payload};
use sewerbench::dataset::{majority_class, Dataset};
use sewerbench::ensembles::{self, plurality, EnsemblePayload, EnsembleSpec, Method, WeightedVote};
use sewerbench::gasdata::{synthesize_dataset, SynthConfig};
use sewerbench::harness::{cmd_bench, BenchConfig, BenchOutcome};
use sewerbench::learner::FitContext;
use sewerbench::numerics::smo::{dual_objective, kkt_violation};
use sewerbench::numerics::{logistic_loss, logistic_loss_grad, pca, smo_train, Matrix, RngStream};
use sewerbench::stats::{
    build_ks_matrix, build_rank_table, critical_value, cv_plans, ks_statistic, ks_two_sample, Relation,
};

use common::*;

const PAPER_ZEROR: f64 = 0.7613;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct Report {
    lines: Vec<(usize, &'static str, Verdict)>,
}

impl Report {
    fn record(&mut self, id: usize, title: &'static str, v: Verdict) {
        println!(
            "criterion {id:>2} [{}] {title}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        self.lines.push((id, title, v));
    }
}

fn jobs_for_machine() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let data = synthesize_dataset(&SynthConfig::default()).expect("default synthesis");
    let secs = start.elapsed().as_secs_f64();
    let [_, unsafe_] = data.class_counts();
    let frac = unsafe_ as f64 / data.len() as f64;
    let pass =
        data.len() == 16_384 && unsafe_ * 1024 == 781 * data.len() && (frac - PAPER_ZEROR).abs() <= 0.02 && secs < 5.0;
    verdict(
        pass,
        format!(
            "{} rows, unsafe {unsafe_} (fraction {frac:.6}, 781/1024 = {:.6}, paper {PAPER_ZEROR}), {secs:.2} s",
            data.len(),
            781.0 / 1024.0
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = RngStream::new(5, vec![5]);
    let mut mismatches = 0;
    for t in 0..1000 {
        let n = 10 + rng.below(91);
        let m = 10 + rng.below(91);
        // alternate continuous draws with a coarse grid that forces ties
        let draw = |rng: &mut RngStream| {
            if t % 2 == 0 {
                rng.uniform_in(0.7, 1.0)
            } else {
                0.8 + (rng.below(20) as f64) / 100.0
            }
        };
        let a: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..m).map(|_| draw(&mut rng)).collect();
        if ks_statistic(&a, &b) != ks_oracle(&a, &b) {
            mismatches += 1;
        }
    }
    let hand = ks_two_sample(&[0.95; 100], &[0.80; 100], 0.05).expect("hand case");
    let crit = 1.358 * (2.0f64 / 100.0).sqrt();
    let pass = mismatches == 0
        && hand.d_statistic == 1.0
        && hand.relation == Relation::Dominates
        && (hand.critical_value - crit).abs() <= 1e-12
        && (critical_value(100, 100, 0.05) - crit).abs() <= 1e-12;
    verdict(
        pass,
        format!(
            "{mismatches}/1000 oracle mismatches; hand case D = {}, {:?}, critical {:.12}",
            hand.d_statistic, hand.relation, hand.critical_value
        ),
    )
}

fn mlp_gradient_error(rng: &mut RngStream) -> f64 {
    let inputs = 1 + rng.below(7);
    let hidden = 1 + rng.below(12);
    let n = 1 + rng.below(20);
    let w = MlpWeights::random(inputs, hidden, rng);
    let x: Vec<f64> = (0..n * inputs).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
    let (_, grad) = w.loss_grad(&x, &y);
    let fd = central_difference(&w.to_flat(), 1e-5, |p| {
        MlpWeights::from_flat(inputs, hidden, p)
            .expect("flat weights")
            .loss(&x, &y)
    });
    relative_error(&grad, &fd)
}

fn logistic_gradient_error(rng: &mut RngStream) -> f64 {
    let d = 1 + rng.below(7);
    let n = 1 + rng.below(30);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.uniform_in(-2.0, 2.0)).collect())
        .collect();
    let x = Matrix::from_rows(&rows).expect("matrix");
    let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
    let w: Vec<f64> = (0..=d).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let l2 = if rng.below(2) == 0 {
        0.0
    } else {
        rng.uniform_in(0.0, 0.5)
    };
    let (_, grad) = logistic_loss_grad(&x, &y, &w, l2);
    let fd = central_difference(&w, 1e-5, |p| logistic_loss(&x, &y, p, l2));
    relative_error(&grad, &fd)
}

fn orthonormality_error(r: &Matrix) -> f64 {
    let rtr = r.transpose().matmul(r).expect("square product");
    rtr.max_abs_diff(&Matrix::identity(r.cols()))
}

/// Best dual objective over a grid on the constraint surface of a 3-point
/// problem.
fn grid_dual_optimum(gram: &Matrix, y: &[f64], c: f64, steps: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let a0 = c * i as f64 / steps as f64;
            let a1 = c * j as f64 / steps as f64;
            // y0 a0 + y1 a1 + y2 a2 = 0
            let a2 = -(y[0] * a0 + y[1] * a1) * y[2];
            if !(-1e-12..=c + 1e-12).contains(&a2) {
                continue;
            }
            best = best.max(dual_objective(gram, y, &[a0, a1, a2.clamp(0.0, c)]));
        }
    }
    best
}

fn criterion_7() -> Verdict {
    let mut rng = RngStream::new(7, vec![7]);
    let mlp_worst = (0..100).map(|_| mlp_gradient_error(&mut rng)).fold(0.0, f64::max);
    let log_worst = (0..100).map(|_| logistic_gradient_error(&mut rng)).fold(0.0, f64::max);

    let mut pca_worst: f64 = 0.0;
    for _ in 0..100 {
        let d = 1 + rng.below(7);
        let n = 2 + rng.below(40);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.normal() * (1.0 + rng.uniform())).collect())
            .collect();
        let p = pca(&Matrix::from_rows(&rows).expect("matrix"), d).expect("pca");
        pca_worst = pca_worst.max(orthonormality_error(&p.rotation));
    }
    let fast = synthesize_dataset(&SynthConfig::fast()).expect("fast synthesis");
    let forest = ensembles::fit(
        &EnsembleSpec::new(Method::RotationForest).with_seed(42, vec![7]),
        &fast,
        &FitContext::uncached(),
    )
    .expect("rotation forest");
    if let EnsemblePayload::RotationForest { members } = &forest.payload {
        for m in members {
            pca_worst = pca_worst.max(orthonormality_error(&m.rotation_matrix(fast.dim())));
        }
    }

    let mut kkt_worst: f64 = 0.0;
    for _ in 0..100 {
        let n = 4 + rng.below(30);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)])
            .collect();
        let y: Vec<f64> = pts
            .iter()
            .map(|p| {
                if p[0] + 0.3 * p[1] > rng.uniform_in(-0.3, 0.3) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let gram = rbf_gram(&pts, 0.5);
        let sol = smo_train(&gram, &y, 1.0, 1e-3, 1000).expect("smo");
        kkt_worst = kkt_worst.max(kkt_violation(&gram, &y, &sol, 1.0));
    }

    let mut grid_worst: f64 = 0.0;
    for t in 0..30 {
        let pts: Vec<Vec<f64>> = (0..3)
            .map(|_| vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)])
            .collect();
        let y = match t % 3 {
            0 => [1.0, -1.0, 1.0],
            1 => [-1.0, 1.0, 1.0],
            _ => [1.0, 1.0, -1.0],
        };
        let c = [0.5, 1.0, 5.0][t % 3];
        let gram = rbf_gram(&pts, 1.0);
        let sol = smo_train(&gram, &y, c, 1e-6, 1000).expect("smo");
        let smo_obj = dual_objective(&gram, &y, &sol.alphas);
        let grid = grid_dual_optimum(&gram, &y, c, 2000);
        grid_worst = grid_worst.max((smo_obj - grid).abs());
    }

    let pass = mlp_worst <= 1e-4 && log_worst <= 1e-4 && pca_worst <= 1e-8 && kkt_worst <= 1e-3 && grid_worst <= 1e-3;
    verdict(
        pass,
        format!(
            "gradient rel. error MLP {mlp_worst:.2e}, logistic {log_worst:.2e}; |R'R - I| {pca_worst:.2e}; \
             KKT {kkt_worst:.2e}; 3-point grid gap {grid_worst:.2e}"
        ),
    )
}

fn rbf_gram(pts: &[Vec<f64>], gamma: f64) -> Matrix {
    let n = pts.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            g[(i, j)] = (-gamma * d2).exp();
        }
    }
    g
}

fn random_small(rng: &mut RngStream, n: usize, d: usize) -> Dataset {
    let data: Vec<(Vec<f64>, u8)> = (0..n)
        .map(|_| {
            let f: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
            let signal = f[0] + if d > 1 { 0.5 * f[1] } else { 0.0 };
            let y = u8::from(signal + 0.3 * rng.normal() > 0.7);
            (f, y)
        })
        .collect();
    rows(&data)
}

fn subsets(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << d).map(move |m| (0..d).filter(|b| m >> b & 1 == 1).collect())
}

fn criterion_8() -> Verdict {
    let mut rng = RngStream::new(8, vec![8]);
    let mut dt_fail = 0;
    for _ in 0..100 {
        let d = 1 + rng.below(4);
        let n = 10 + rng.below(50);
        let data = random_small(&mut rng, n, d);
        let model = fit(&ClassifierSpec::new(Algorithm::DecisionTable), &data).expect("decision table");
        let Payload::DecisionTable(dt) = &model.payload else {
            unreachable!()
        };
        let best = subsets(d)
            .map(|s| sewerbench::classifiers::loo_accuracy(&data, &s, dt.bins))
            .fold(f64::NEG_INFINITY, f64::max);
        if dt.merit != best || sewerbench::classifiers::loo_accuracy(&data, &dt.selected, dt.bins) != best {
            dt_fail += 1;
        }
    }

    let mut stump_fail = 0;
    for _ in 0..100 {
        let d = 1 + rng.below(4);
        let n = 2 + rng.below(30);
        let data = random_small(&mut rng, n, d);
        let w: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.05, 1.0)).collect();
        let model = stump_fit(&data, &w).expect("stump");
        let Payload::Stump(s) = &model.payload else {
            unreachable!()
        };
        let x: Vec<Vec<f64>> = data.instances.iter().map(|i| i.features.clone()).collect();
        let oracle = exhaustive_stump(&x, &data.labels(), &w);
        let same = match (oracle, s.feature) {
            (None, None) => true,
            (Some((f, t, e)), Some(sf)) => sf == f && s.threshold == t && (s.error - e).abs() <= 1e-9,
            _ => false,
        };
        if !same {
            stump_fail += 1;
        }
    }

    let mut kstar_worst: f64 = 0.0;
    for t in 0..100 {
        let d = 1 + t % 3;
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..d).map(|_| rng.uniform_in(0.0, 10.0)).collect())
            .collect();
        let mut labels: Vec<u8> = (0..5).map(|_| rng.below(2) as u8).collect();
        labels[0] = 0;
        labels[1] = 1;
        let data = rows(&pts.iter().cloned().zip(labels.iter().copied()).collect::<Vec<_>>());
        let model = fit(&ClassifierSpec::new(Algorithm::KStar), &data).expect("kstar");
        for _ in 0..10 {
            let q: Vec<f64> = (0..d).map(|_| rng.uniform_in(-1.0, 11.0)).collect();
            let got = model.predict_dist(&q).expect("predict").p_unsafe;
            let want = kstar_oracle(&pts, &labels, &q, 0.2);
            kstar_worst = kstar_worst.max((got - want).abs());
        }
    }
    let pass = dt_fail == 0 && stump_fail == 0 && kstar_worst <= 1e-9;
    verdict(
        pass,
        format!(
            "decision table vs exhaustive: {dt_fail}/100 differ; stump vs enumeration: {stump_fail}/100 differ; \
             K* posterior max error {kstar_worst:.2e}"
        ),
    )
}

fn criterion_9() -> Verdict {
    let hand = WeightedVote::new(vec![0.9, 0.8, 0.6]).expect("weights");
    let scores = hand.scores(&[1, 0, 0]).expect("scores");
    let hand_ok = hand.decide(&[1, 0, 0]).expect("decide") == 0 && (scores[0] - 1.4).abs() < 1e-15 && scores[1] == 0.9;

    let mut rng = RngStream::new(9, vec![9]);
    let mut plurality_fail = 0;
    let mut scaling_fail = 0;
    for _ in 0..1000 {
        let m = 1 + rng.below(12);
        let votes: Vec<u8> = (0..m).map(|_| rng.below(2) as u8).collect();
        let c = rng.uniform_in(0.01, 10.0);
        if WeightedVote::new(vec![c; m])
            .expect("weights")
            .decide(&votes)
            .expect("decide")
            != plurality(&votes)
        {
            plurality_fail += 1;
        }
        let w: Vec<f64> = (0..m)
            .map(|_| if rng.below(4) == 0 { 1.0 } else { rng.uniform() })
            .collect();
        let base = WeightedVote::new(w.clone())
            .expect("weights")
            .decide(&votes)
            .expect("decide");
        for lambda in [1e-9, 1e-3, 0.37, 3.0, 1e6, rng.uniform_in(0.001, 1000.0)] {
            let scaled = WeightedVote::new(w.iter().map(|x| x * lambda).collect()).expect("weights");
            if scaled.decide(&votes).expect("decide") != base {
                scaling_fail += 1;
            }
        }
    }

    // a trained WPE model, probed on 1,000 instances under rescaled weights
    let fast = synthesize_dataset(&SynthConfig::fast()).expect("fast synthesis");
    let train = fast.subset(&(0..fast.len()).step_by(4).collect::<Vec<_>>());
    let members = vec![
        ClassifierSpec::new(Algorithm::RepTree),
        ClassifierSpec::new(Algorithm::Ibk),
        ClassifierSpec::new(Algorithm::NaiveBayes),
        ClassifierSpec::new(Algorithm::ZeroR),
        ClassifierSpec::new(Algorithm::Stump),
    ];
    let wpe = ensembles::fit(
        &EnsembleSpec::new(Method::Wpe)
            .with_members(members)
            .with_seed(42, vec![9]),
        &train,
        &FitContext::uncached(),
    )
    .expect("wpe");
    let probes: Vec<Vec<f64>> = (0..1000)
        .map(|i| {
            let base = &fast.instances[(i * 7) % fast.len()].features;
            base.iter().map(|v| v + 0.2 * rng.normal()).collect()
        })
        .collect();
    let mut model_fail = 0;
    for lambda in [1e-6, 0.5, 7.0, 1e5] {
        let mut scaled = wpe.clone();
        if let EnsemblePayload::Wpe { vote, .. } = &mut scaled.payload {
            *vote = WeightedVote::new(vote.weights.iter().map(|w| w * lambda).collect()).expect("weights");
        }
        for p in &probes {
            if scaled.predict(p).expect("predict") != wpe.predict(p).expect("predict") {
                model_fail += 1;
            }
        }
    }
    let pass = hand_ok && plurality_fail == 0 && scaling_fail == 0 && model_fail == 0;
    verdict(
        pass,
        format!(
            "hand case scores {scores:?} -> {}; equal weights vs plurality: {plurality_fail}/1000 differ; \
             lambda scaling: {scaling_fail} vote and {model_fail} model decisions changed",
            hand.decide(&[1, 0, 0]).unwrap_or(9)
        ),
    )
}

const TABLE_ARTIFACTS: [&str; 7] = [
    "eval.json",
    "table3.md",
    "table3.csv",
    "table4.md",
    "table4.csv",
    "table5.md",
    "table5.csv",
];

fn fast_run(dir: &Path, jobs: usize) -> (BenchOutcome, f64) {
    let mut c = BenchConfig::fast();
    c.out_dir = dir.to_path_buf();
    let start = Instant::now();
    let outcome = cmd_bench(&c, jobs).expect("fast bench run");
    (outcome, start.elapsed().as_secs_f64())
}

fn criterion_10(root: &Path) -> (Verdict, f64) {
    let n = jobs_for_machine().max(4);
    let (a, secs_a) = fast_run(&root.join("fast-1"), 1);
    let (b, secs_b) = fast_run(&root.join("fast-n"), n);
    let mut differing = Vec::new();
    for name in TABLE_ARTIFACTS {
        let x = std::fs::read(a.out_dir.join(name)).expect("artifact");
        let y = std::fs::read(b.out_dir.join(name)).expect("artifact");
        if x != y {
            differing.push(name);
        }
    }
    let pass = differing.is_empty() && a.failures.is_empty() && b.failures.is_empty();
    (
        verdict(
            pass,
            format!(
                "fast profile, jobs 1 ({secs_a:.0} s) vs jobs {n} ({secs_b:.0} s): {} of {} table artifacts differ{}",
                differing.len(),
                TABLE_ARTIFACTS.len(),
                if differing.is_empty() {
                    String::new()
                } else {
                    format!(" {differing:?}")
                }
            ),
        ),
        secs_a.max(secs_b),
    )
}

// ---------------------------------------------------------------------------
// Criteria on the full-profile run

fn sample<'a>(o: &'a BenchOutcome, name: &str) -> &'a sewerbench::stats::EvalSample {
    o.samples
        .iter()
        .find(|s| s.classifier_id == name)
        .unwrap_or_else(|| panic!("no sample for {name}"))
}

fn criterion_2(o: &BenchOutcome, data: &Dataset, config: &BenchConfig) -> Verdict {
    let z = sample(o, "ZeroR");
    let plans = cv_plans(data, config.k, config.repeats, config.root_seed).expect("plans");
    let mut fractions = Vec::new();
    for plan in &plans {
        for f in 0..config.k {
            let train = data.subset(&plan.train_indices(f));
            let test = data.subset(&plan.test_indices(f));
            let (label, _) = majority_class(&train.instances).expect("majority");
            let hits = test.instances.iter().filter(|i| i.label == label).count();
            fractions.push(hits as f64 / test.len() as f64);
        }
    }
    let oracle = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let pass = (z.test_mean - oracle).abs() <= 1e-9 && (z.test_mean - PAPER_ZEROR).abs() <= 0.02;
    verdict(
        pass,
        format!(
            "ZeroR mean test accuracy {:.10}, per-fold training-majority fraction {oracle:.10}, paper {PAPER_ZEROR}",
            z.test_mean
        ),
    )
}

fn criterion_3(o: &BenchOutcome) -> Verdict {
    let s = sample(o, "IBK");
    let pass = s.train_accuracies.iter().all(|&a| a == 1.0) && s.train_mean == 1.0 && s.train_std == 0.0;
    verdict(
        pass,
        format!("IBK training accuracy {:.4} (std {:.4})", s.train_mean, s.train_std),
    )
}

const BASE_NAMES: [&str; 12] = [
    "MLP", "RBF", "SVM", "REPTree", "NBTree", "LMT", "IBK", "KStar", "LWL", "DT", "PART", "ZeroR",
];

fn criterion_4(o: &BenchOutcome, full_secs: f64, fast_secs: f64) -> Verdict {
    let mean = |n: &str| sample(o, n).test_mean;
    let (ibk, kstar) = (mean("IBK"), mean("KStar"));
    let weak = ["ZeroR", "LWL", "RBF"];
    let a = weak.iter().all(|w| ibk > mean(w) && kstar > mean(w));
    let best_member = BASE_NAMES.iter().map(|n| mean(n)).fold(f64::NEG_INFINITY, f64::max);
    let multi = mean("Multi");
    let b = multi >= best_member - 0.005;
    let ranks = build_rank_table(&o.samples);
    let n = ranks.rows.len();
    let bottom: Vec<&str> = ranks.rows[n.saturating_sub(3)..]
        .iter()
        .map(|r| r.classifier_id.as_str())
        .collect();
    let c = bottom.contains(&"ZeroR") && bottom.contains(&"LWL");
    // compute budget: projected onto four cores from the measured single
    // process time, plus the measured fast profile
    let cores = jobs_for_machine();
    let projected = full_secs * cores.min(4) as f64 / 4.0;
    let budget = projected < 45.0 * 60.0 && fast_secs < 5.0 * 60.0;
    verdict(
        a && b && c && budget,
        format!(
            "(a) IBK {ibk:.4}, KStar {kstar:.4} vs ZeroR {:.4}, LWL {:.4}, RBF {:.4}: {}; \
             (b) Multi {multi:.4} vs best member {best_member:.4}: {}; (c) bottom three {bottom:?}: {}; \
             runtime full {full_secs:.0} s on {cores} core(s), projected 4-core {projected:.0} s, fast {fast_secs:.0} s: {}",
            mean("ZeroR"),
            mean("LWL"),
            mean("RBF"),
            ok(a),
            ok(b),
            ok(c),
            ok(budget)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "NOT MET"
    }
}

fn criterion_6(o: &BenchOutcome, alpha: f64) -> Verdict {
    let m = build_ks_matrix(&o.samples, alpha).expect("ks matrix");
    let n = m.names.len();
    let mut diag = 0;
    let mut anti = 0;
    for i in 0..n {
        if m.cells[i][i].relation != Relation::Equal {
            diag += 1;
        }
        for j in 0..n {
            if m.cells[i][j].relation != m.cells[j][i].relation.reverse() {
                anti += 1;
            }
        }
    }
    verdict(
        n == 21 && diag == 0 && anti == 0,
        format!("{n}x{n} matrix, {diag} non-'=' diagonal cells, {anti} antisymmetry violations"),
    )
}

fn main() {
    let mut report = Report { lines: Vec::new() };
    let tmp = tempfile::tempdir().expect("temp dir");
    println!("acceptance suite ({} core(s) available)", jobs_for_machine());

    report.record(1, "dataset reproduction", criterion_1());
    report.record(5, "KS oracle equivalence", criterion_5());
    report.record(7, "numerical kernels", criterion_7());
    report.record(8, "oracle equivalences", criterion_8());
    report.record(9, "WPE formula", criterion_9());
    let (v10, fast_secs) = criterion_10(tmp.path());
    report.record(10, "determinism", v10);

    let quick = std::env::var("SEWERBENCH_ACCEPTANCE_QUICK").is_ok_and(|v| v == "1");
    if quick {
        for (id, title) in [
            (2, "ZeroR identity"),
            (3, "IBK training accuracy"),
            (4, "qualitative ranking"),
            (6, "KS matrix properties"),
        ] {
            report.record(id, title, verdict(false, "skipped (full-profile run disabled)"));
        }
    } else {
        let config = BenchConfig {
            out_dir: tmp.path().join("full"),
            ..BenchConfig::default()
        };
        let jobs = jobs_for_machine();
        println!("running the full-profile benchmark on {jobs} worker(s)...");
        let start = Instant::now();
        let outcome = cmd_bench(&config, jobs).expect("full bench run");
        let full_secs = start.elapsed().as_secs_f64();
        for r in &outcome.manifest.learners {
            println!(
                "  {:<18} {:>9.1} s{}",
                r.name,
                r.seconds,
                if r.ok { "" } else { "  FAILED" }
            );
        }
        print!("{}", build_rank_table(&outcome.samples).to_markdown());
        let data = config.load_dataset().expect("dataset");
        report.record(2, "ZeroR identity", criterion_2(&outcome, &data, &config));
        report.record(3, "IBK training accuracy", criterion_3(&outcome));
        report.record(4, "qualitative ranking", criterion_4(&outcome, full_secs, fast_secs));
        report.record(6, "KS matrix properties", criterion_6(&outcome, config.alpha));
    }

    report.lines.sort_by_key(|l| l.0);
    println!("\nsummary");
    let mut failed = 0;
    for (id, title, v) in &report.lines {
        println!("criterion {id:>2} [{}] {title}", if v.pass { "PASS" } else { "FAIL" });
        failed += usize::from(!v.pass);
    }
    println!("{} passed, {failed} failed", report.lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ks::{csv_field, markdown_table};
use super::EvalSample;
use crate::learner::Category;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub classifier_id: String,
    pub category: Option<Category>,
    pub train_mean: f64,
    pub test_mean: f64,
    pub test_std: f64,
}

/// Learners ordered by descending mean test accuracy. Ties go to the higher
/// mean training accuracy, then to the lexicographically smaller name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub rows: Vec<RankRow>,
}

pub fn build_rank_table(samples: &[EvalSample]) -> RankTable {
    let mut order: Vec<&EvalSample> = samples.iter().collect();
    order.sort_by(|a, b| rank_order(a, b));
    RankTable {
        rows: order
            .into_iter()
            .enumerate()
            .map(|(i, s)| RankRow {
                rank: i + 1,
                classifier_id: s.classifier_id.clone(),
                category: s.category,
                train_mean: s.train_mean,
                test_mean: s.test_mean,
                test_std: s.test_std,
            })
            .collect(),
    }
}

fn category_str(c: Option<Category>) -> &'static str {
    c.map_or("", Category::as_str)
}

/// Accuracy as a percentage with four decimals.
fn pct(x: f64) -> String {
    format!("{:.4}", 100.0 * x)
}

impl RankTable {
    /// 1-based rank of `name`.
    pub fn rank_of(&self, name: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.classifier_id == name).map(|r| r.rank)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,category,classifier,train_accuracy_pct,test_accuracy_pct,test_std_pct\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.rank,
                category_str(r.category),
                csv_field(&r.classifier_id),
                pct(r.train_mean),
                pct(r.test_mean),
                pct(r.test_std)
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let header: Vec<String> = [
            "Rank",
            "Category",
            "Classifier",
            "Training (%)",
            "Test (%)",
            "Test std (%)",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    category_str(r.category).to_string(),
                    r.classifier_id.clone(),
                    pct(r.train_mean),
                    pct(r.test_mean),
                    pct(r.test_std),
                ]
            })
            .collect();
        markdown_table(&header, &rows, &[0, 3, 4, 5])
    }
}

/// Accuracy summary grouped by category, in first-appearance order of the
/// categories and roster order within each.
pub fn accuracy_table_rows(samples: &[EvalSample]) -> Vec<&EvalSample> {
    let mut cats: Vec<Option<Category>> = Vec::new();
    for s in samples {
        if !cats.contains(&s.category) {
            cats.push(s.category);
        }
    }
    let mut out = Vec::with_capacity(samples.len());
    for c in cats {
        out.extend(samples.iter().filter(|s| s.category == c));
    }
    out
}

fn accuracy_cells(s: &EvalSample) -> [String; 4] {
    [
        format!("{:.4}", s.train_mean),
        format!("{:.4}", s.train_std),
        format!("{:.4}", s.test_mean),
        format!("{:.4}", s.test_std),
    ]
}

/// Category-grouped mean and standard deviation of training and test
/// accuracy, as CSV.
pub fn accuracy_table_csv(samples: &[EvalSample]) -> String {
    let mut out = String::from("category,classifier,train_mean,train_std,test_mean,test_std\n");
    for s in accuracy_table_rows(samples) {
        let [a, b, c, d] = accuracy_cells(s);
        let _ = writeln!(
            out,
            "{},{},{a},{b},{c},{d}",
            category_str(s.category),
            csv_field(&s.classifier_id)
        );
    }
    out
}

/// The same table as aligned Markdown, with the category description shown
/// on the first row of each group.
pub fn accuracy_table_markdown(samples: &[EvalSample]) -> String {
    let header: Vec<String> = [
        "Category",
        "Classifier",
        "Train mean",
        "Train std",
        "Test mean",
        "Test std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::with_capacity(samples.len());
    let mut last: Option<Option<Category>> = None;
    for s in accuracy_table_rows(samples) {
        let label = if last == Some(s.category) {
            String::new()
        } else {
            s.category
                .map_or_else(String::new, |c| format!("{} ({})", c.description(), c.as_str()))
        };
        last = Some(s.category);
        let mut r = vec![label, s.classifier_id.clone()];
        r.extend(accuracy_cells(s));
        rows.push(r);
    }
    markdown_table(&header, &rows, &[2, 3, 4, 5])
}

/// Orders two samples the way the rank table does.
pub fn rank_order(a: &EvalSample, b: &EvalSample) -> Ordering {
    b.test_mean
        .total_cmp(&a.test_mean)
        .then_with(|| b.train_mean.total_cmp(&a.train_mean))
        .then_with(|| a.classifier_id.cmp(&b.classifier_id))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, train: f64, test: f64) -> EvalSample {
        EvalSample::new(id, None, 2, 1, vec![train; 2], vec![test; 2]).unwrap()
    }

    #[test]
    fn orders_by_test_then_train_then_name() {
        let t = build_rank_table(&[
            sample("b", 0.9, 0.8),
            sample("a", 0.9, 0.8),
            sample("c", 0.95, 0.8),
            sample("d", 0.5, 0.9),
        ]);
        let ids: Vec<&str> = t.rows.iter().map(|r| r.classifier_id.as_str()).collect();
        assert_eq!(ids, ["d", "c", "a", "b"]);
        assert_eq!(t.rank_of("a"), Some(3));
    }
}

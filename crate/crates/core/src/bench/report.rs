use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::corpus::{Category, Odp, Phrasing};
use super::score::FailureKind;
use crate::gateway::TranslationResult;

/// Category clusters of the results table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cluster {
    BooleanCountRank,
    SimpleStringTwoHop,
    TwoIntent,
}

impl Cluster {
    pub const ALL: [Cluster; 3] = [Cluster::BooleanCountRank, Cluster::SimpleStringTwoHop, Cluster::TwoIntent];

    pub fn of(category: Category) -> Cluster {
        match category {
            Category::Boolean | Category::Count | Category::Rank => Cluster::BooleanCountRank,
            Category::Simple | Category::String | Category::TwoHop => Cluster::SimpleStringTwoHop,
            Category::TwoIntent => Cluster::TwoIntent,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Cluster::BooleanCountRank => "Boolean, Count, Rank",
            Cluster::SimpleStringTwoHop => "Simple, String, Two Hop",
            Cluster::TwoIntent => "Two Intent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub question_id: String,
    pub odp: Odp,
    pub category: Category,
    pub phrasing: Phrasing,
    pub comments: bool,
    /// Absent only when the question never reached the provider.
    pub translation: Option<TranslationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_error: Option<String>,
    pub correct: bool,
    pub failure_kind: Option<FailureKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub cluster: Cluster,
    pub comments: bool,
    pub phrasing: Phrasing,
    pub correct: usize,
    pub total: usize,
    pub percent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub template_version: String,
    pub provider: String,
    pub runs: Vec<RunOutcome>,
    pub aggregate: Vec<Cell>,
}

impl RunReport {
    pub fn new(template_version: &str, provider: &str, runs: Vec<RunOutcome>) -> Self {
        let aggregate = aggregate(&runs);
        RunReport {
            template_version: String::from(template_version),
            provider: String::from(provider),
            runs,
            aggregate,
        }
    }

    pub fn cell(&self, cluster: Cluster, comments: bool, phrasing: Phrasing) -> Option<&Cell> {
        self.aggregate
            .iter()
            .find(|c| c.cluster == cluster && c.comments == comments && c.phrasing == phrasing)
    }
}

/// `100 * correct / total` rounded half up; 0 for an empty cell.
pub fn percent(correct: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    ((200 * correct + total) / (2 * total)) as u32
}

/// Table cells in row order (cluster), then without/with comments, then
/// SCQ/NSCQ.
pub fn aggregate(runs: &[RunOutcome]) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(12);
    for cluster in Cluster::ALL {
        for comments in [false, true] {
            for phrasing in Phrasing::ALL {
                let selected = runs
                    .iter()
                    .filter(|r| Cluster::of(r.category) == cluster && r.comments == comments && r.phrasing == phrasing);
                let (correct, total) = selected.fold((0, 0), |(c, t), r| (c + usize::from(r.correct), t + 1));
                cells.push(Cell {
                    cluster,
                    comments,
                    phrasing,
                    correct,
                    total,
                    percent: percent(correct, total),
                });
            }
        }
    }
    cells
}

pub fn render_markdown(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("# Correctly generated SPARQL queries\n\n");
    let _ = writeln!(out, "Prompt template: `{}`  ", report.template_version);
    let _ = writeln!(out, "Provider: {}\n", report.provider);
    out.push_str("| Categories | w/o comments SCQs | w/o comments NSCQs | commented SCQs | commented NSCQs |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for cluster in Cluster::ALL {
        let _ = write!(out, "| {} |", cluster.label());
        for c in report.aggregate.iter().filter(|c| c.cluster == cluster) {
            let _ = write!(out, " {}% |", c.percent);
        }
        out.push('\n');
    }
    out.push_str("\n## Counts\n\n");
    out.push_str("| Categories | w/o comments SCQs | w/o comments NSCQs | commented SCQs | commented NSCQs |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for cluster in Cluster::ALL {
        let _ = write!(out, "| {} |", cluster.label());
        for c in report.aggregate.iter().filter(|c| c.cluster == cluster) {
            let _ = write!(out, " {}/{} |", c.correct, c.total);
        }
        out.push('\n');
    }
    out.push_str("\n## Runs\n\n");
    out.push_str("| Question | ODP | Category | Phrasing | Comments | Attempts | Correct | Failure |\n");
    out.push_str("|---|---|---|---|---|---:|---|---|\n");
    for r in &report.runs {
        let attempts = r.translation.as_ref().map_or(0, |t| t.attempts.len());
        let failure = r.failure_kind.map_or(String::new(), |k| format!("{k:?}"));
        let _ = writeln!(
            out,
            "| {} | {} | {:?} | {:?} | {} | {} | {} | {} |",
            r.question_id,
            r.odp,
            r.category,
            r.phrasing,
            if r.comments { "yes" } else { "no" },
            attempts,
            if r.correct { "yes" } else { "no" },
            failure
        );
    }
    out
}

pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::from("cluster,comments,phrasing,correct,total,percent\n");
    for c in &report.aggregate {
        let _ = writeln!(
            out,
            "\"{}\",{},{:?},{},{},{}",
            c.cluster.label(),
            if c.comments { "commented" } else { "w/o comments" },
            c.phrasing,
            c.correct,
            c.total,
            c.percent
        );
    }
    out
}

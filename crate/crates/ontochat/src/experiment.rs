//! Parallel benchmark runs and report files.

use std::fs;
use std::path::Path;

use ontochat_core::bench::{render_csv, render_markdown, RunReport};
use ontochat_core::gateway::{Provider, TEMPLATE_VERSION};
use ontochat_core::pipeline::run_question;
use rayon::prelude::*;

use crate::load::Benchmark;

/// Runs every (question, condition) pair on up to `jobs` threads. Outcomes
/// keep the matrix order whatever the scheduling.
pub fn run_experiment(
    bench: &Benchmark,
    provider: &dyn Provider,
    provider_name: &str,
    jobs: usize,
    max_attempts: usize,
) -> Result<RunReport, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let matrix = &bench.matrix;
    let runs = pool.install(|| {
        matrix
            .runs()
            .into_par_iter()
            .map(|(i, condition)| {
                let record = &matrix.corpus[i];
                let ontology = &bench.ontologies[&record.odp];
                run_question(ontology, record, &matrix.gold[i], condition, provider, max_attempts)
            })
            .collect()
    });
    Ok(RunReport::new(TEMPLATE_VERSION, provider_name, runs))
}

pub fn render_json(report: &RunReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Writes `report.md`, `report.csv` and `report.json` into `dir`.
pub fn write_reports(report: &RunReport, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.md"), render_markdown(report))?;
    fs::write(dir.join("report.csv"), render_csv(report))?;
    fs::write(dir.join("report.json"), render_json(report))?;
    Ok(())
}

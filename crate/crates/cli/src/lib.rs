//! Library side of the `ekrgl` command: campaign parsing, job execution,
//! caching and reporting.

pub mod campaign;
pub mod jobs;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use ekrgl::certificate::Verdict;

use campaign::Campaign;
use jobs::{execute, sizes, JobOutcome, JobSpec};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
}

#[derive(Clone, Debug)]
pub enum JobResult {
    Done(Box<JobOutcome>),
    Error { spec: JobSpec, message: String },
    /// Not started because the time budget ran out.
    Skipped { spec: JobSpec },
}

impl JobResult {
    pub fn spec(&self) -> &JobSpec {
        match self {
            JobResult::Done(o) => &o.spec,
            JobResult::Error { spec, .. } | JobResult::Skipped { spec } => spec,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, JobResult::Done(o) if o.verdict() == Verdict::Pass)
    }
}

#[derive(Clone, Debug)]
pub struct RunSettings<'a> {
    pub output_dir: &'a Path,
    pub force: bool,
    pub jobs: usize,
    pub seed: u64,
}

/// Runs every job with up to `settings.jobs` worker threads. Results come
/// back in campaign order.
pub fn run_campaign(campaign: &Campaign, settings: &RunSettings<'_>) -> Vec<JobResult> {
    let budget = campaign.time_budget_s.map(Duration::from_secs);
    let start = Instant::now();
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<JobResult>>> = campaign.jobs.iter().map(|_| Mutex::new(None)).collect();
    let workers = settings.jobs.clamp(1, campaign.jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = campaign.jobs.get(i) else { break };
                let spec = job.spec.clone();
                let result = if budget.is_some_and(|b| start.elapsed() >= b) {
                    JobResult::Skipped { spec }
                } else {
                    match execute(&spec, &campaign.caps, settings.seed, settings.output_dir, settings.force) {
                        Ok(outcome) => JobResult::Done(Box::new(outcome)),
                        Err(message) => JobResult::Error { spec, message },
                    }
                };
                *slots[i].lock().expect("no panics while holding the lock") = Some(result);
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("lock").expect("every job ran")).collect()
}

/// Summary table with one row per job: label, verdict, sizes, wall time.
pub fn summary_table(results: &[JobResult]) -> String {
    let rows: Vec<[String; 4]> = results
        .iter()
        .map(|r| match r {
            JobResult::Done(o) => [
                o.spec.label(),
                match o.verdict() {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "FAIL",
                }
                .to_string(),
                sizes(&o.certificate),
                if o.cached { format!("{} (cached)", o.wall_ms) } else { o.wall_ms.to_string() },
            ],
            JobResult::Error { spec, message } => [spec.label(), "error".into(), message.clone(), "-".into()],
            JobResult::Skipped { spec } => [spec.label(), "skipped".into(), "time budget exhausted".into(), "-".into()],
        })
        .collect();
    let header = ["job".to_string(), "verdict".into(), "sizes".into(), "wall_ms".into()];
    let mut widths = header.clone().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let fmt_row = |row: &[String; 4]| {
        let cells: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        cells.join("  ").trim_end().to_string()
    };
    let mut out = fmt_row(&header) + "\n";
    for row in &rows {
        out += &fmt_row(row);
        out.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    out += &format!("{passed}/{} jobs passed\n", results.len());
    out
}

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetric {
    pub run: usize,
    pub seed: u64,
    pub value: f64,
}

/// Per-run values of one metric and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub task: String,
    pub runs: Vec<RunMetric>,
}

impl MetricReport {
    pub fn new(task: &str) -> Self {
        MetricReport {
            task: task.to_string(),
            runs: Vec::new(),
        }
    }

    pub fn push(&mut self, run: usize, seed: u64, value: f64) {
        self.runs.push(RunMetric { run, seed, value });
    }

    pub fn mean(&self) -> f64 {
        if self.runs.is_empty() {
            return f64::NAN;
        }
        self.runs.iter().map(|r| r.value).sum::<f64>() / self.runs.len() as f64
    }

    /// Tab-separated `task run seed value mean` rows, with header.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("task\trun\tseed\tvalue\tmean\n");
        let mean = self.mean();
        for r in &self.runs {
            let _ = writeln!(s, "{}\t{}\t{}\t{:.6}\t{:.6}", self.task, r.run, r.seed, r.value, mean);
        }
        s
    }

    pub fn to_human(&self) -> String {
        let mut s = String::new();
        for r in &self.runs {
            let _ = writeln!(s, "{} run {} (seed {}): accuracy {:.4}", self.task, r.run, r.seed, r.value);
        }
        let _ = writeln!(s, "{} mean accuracy over {} runs: {:.4}", self.task, self.runs.len(), self.mean());
        s
    }
}

//! Performance functions available to the CLI: registered benchmarks and
//! external programs.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

use isus_core::benchmarks::Benchmark;
use isus_core::{Error, PerformanceFunction, Result};
use rayon::prelude::*;

/// An external program evaluated in batches. The child reads one
/// whitespace-separated point per line on stdin and writes one `g` value per
/// line on stdout.
#[derive(Debug, Clone)]
pub struct ExternalModel {
    pub command: String,
    pub batch: usize,
}

impl ExternalModel {
    fn run_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut child = shell(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Model(format!("cannot start '{}': {e}", self.command)))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input: String = xs
            .iter()
            .map(|x| {
                let fields: Vec<String> = x.iter().map(|v| format!("{v:e}")).collect();
                fields.join(" ") + "\n"
            })
            .collect();
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped stdout");
        let mut values = Vec::with_capacity(xs.len());
        for line in BufReader::new(stdout).lines() {
            let line = line.map_err(|e| Error::Model(format!("reading model output: {e}")))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Model(format!("model wrote '{line}', expected a number")))?;
            values.push(v);
        }
        let status = child.wait().map_err(|e| Error::Model(format!("waiting for model: {e}")))?;
        let _ = writer.join();
        if !status.success() {
            return Err(Error::Model(format!("'{}' exited with {status}", self.command)));
        }
        if values.len() != xs.len() {
            return Err(Error::Model(format!(
                "model returned {} values for {} points",
                values.len(),
                xs.len()
            )));
        }
        Ok(values)
    }
}

#[cfg(unix)]
fn shell(command: &str) -> Command {
    let mut c = Command::new("sh");
    c.arg("-c").arg(command);
    c
}

#[cfg(not(unix))]
fn shell(command: &str) -> Command {
    let mut c = Command::new("cmd");
    c.arg("/C").arg(command);
    c
}

impl PerformanceFunction for ExternalModel {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.run_batch(&[x.to_vec()])?[0])
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let chunks: Vec<Vec<f64>> = xs
            .par_chunks(self.batch)
            .map(|c| self.run_batch(c))
            .collect::<Result<_>>()?;
        Ok(chunks.concat())
    }
}

/// The performance function selected by the run configuration.
pub enum Problem {
    Benchmark(Benchmark),
    External(ExternalModel),
}

impl Problem {
    pub fn benchmark(&self) -> Option<&Benchmark> {
        match self {
            Problem::Benchmark(b) => Some(b),
            Problem::External(_) => None,
        }
    }
}

impl PerformanceFunction for Problem {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Problem::Benchmark(b) => b.evaluate(x),
            Problem::External(m) => m.evaluate(x),
        }
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        match self {
            Problem::Benchmark(b) => b.evaluate_batch(xs),
            Problem::External(m) => m.evaluate_batch(xs),
        }
    }
}

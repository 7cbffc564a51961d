//! Built-in verification suite.
//!
//! Each check runs small purpose-built experiments and reports pass or fail
//! with a short explanation. The suite covers extreme parameter values,
//! units tested in isolation, warm-up and run-length variation, flow
//! conservation, data collection and analytic oracles.

mod ccu;
mod stroke;

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;

use crate::experiment::ModelId;
use crate::models::occupancy::OccupancyPmf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    ExtremeValue,
    ComponentIsolation,
    WarmUp,
    Conservation,
    DataCollection,
    Oracle,
    Configuration,
}

impl Category {
    pub fn label(self) -> &'static str {
        match self {
            Category::ExtremeValue => "extreme value",
            Category::ComponentIsolation => "component isolation",
            Category::WarmUp => "warm-up / run length",
            Category::Conservation => "conservation",
            Category::DataCollection => "data collection",
            Category::Oracle => "oracle",
            Category::Configuration => "configuration",
        }
    }
}

type CheckFn = fn() -> Result<String, String>;

/// A named verification check. `run` returns a detail message on success
/// and the reason for failure otherwise.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub model: ModelId,
    pub category: Category,
    run: CheckFn,
}

impl Check {
    pub(crate) const fn new(
        name: &'static str,
        model: ModelId,
        category: Category,
        run: CheckFn,
    ) -> Self {
        Check {
            name,
            model,
            category,
            run,
        }
    }

    pub fn run(&self) -> CheckResult {
        let outcome = catch_unwind(AssertUnwindSafe(self.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "check panicked".into());
            Err(format!("panic: {msg}"))
        });
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        CheckResult {
            name: self.name,
            model: self.model,
            category: self.category,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub model: ModelId,
    pub category: Category,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn count_for(&self, model: ModelId) -> (usize, usize) {
        let of: Vec<_> = self.results.iter().filter(|r| r.model == model).collect();
        (of.iter().filter(|r| r.passed).count(), of.len())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(
                f,
                "{} {}::{} [{}] {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.model,
                r.name,
                r.category.label(),
                r.detail
            )?;
        }
        for model in [ModelId::Ccu, ModelId::Stroke] {
            let (p, n) = self.count_for(model);
            if n > 0 {
                writeln!(f, "{model}: {p}/{n} checks passed")?;
            }
        }
        write!(f, "total: {}/{} checks passed", self.passed(), self.results.len())
    }
}

/// Every check registered for `model`.
pub fn checks(model: ModelId) -> Vec<Check> {
    match model {
        ModelId::Ccu => ccu::checks(),
        ModelId::Stroke => stroke::checks(),
    }
}

/// Runs the checks of each listed model in parallel; results keep
/// registration order.
pub fn run_suite(models: &[ModelId]) -> SuiteReport {
    let all: Vec<Check> = models.iter().flat_map(|&m| checks(m)).collect();
    SuiteReport {
        results: all.par_iter().map(Check::run).collect(),
    }
}

/// Poisson(`lambda`) probabilities for `0..=max`.
pub fn poisson_pmf(lambda: f64, max: usize) -> OccupancyPmf {
    let mut p = Vec::with_capacity(max + 1);
    p.push((-lambda).exp());
    for k in 1..=max {
        p.push(p[k - 1] * lambda / k as f64);
    }
    OccupancyPmf::from_probabilities(p)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `actual` within relative `tol` of `expected`.
fn within(what: &str, actual: f64, expected: f64, tol: f64) -> Result<String, String> {
    let rel = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
    let msg = format!("{what}: {actual:.4} vs expected {expected:.4} ({:.2}%)", rel * 100.0);
    if rel <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Checks that every trace line has the `t= id= class= event=` layout with a
/// two-decimal time.
fn trace_lines_well_formed(lines: &[String]) -> Result<(), String> {
    for line in lines {
        let mut parts = line.splitn(5, ' ');
        let ok = (|| {
            let t = parts.next()?.strip_prefix("t=")?;
            let (_, frac) = t.split_once('.')?;
            t.parse::<f64>().ok().filter(|_| frac.len() == 2)?;
            parts.next()?.strip_prefix("id=")?.parse::<u64>().ok()?;
            parts.next()?.strip_prefix("class=")?;
            parts.next()?.strip_prefix("event=")?;
            match parts.next() {
                None => Some(()),
                Some(rest) => rest.starts_with("detail=").then_some(()),
            }
        })();
        ok.ok_or_else(|| format!("malformed trace line {line:?}"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_reference_sums_to_one() {
        let p = poisson_pmf(5.0, 60);
        assert!((p.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_format_checker() {
        let good = vec![
            "t=1.00 id=0 class=AandE event=arrival".to_string(),
            "t=12.50 id=3 class=Stroke event=asu_discharge detail=Rehab".to_string(),
        ];
        assert!(trace_lines_well_formed(&good).is_ok());
        let bad = vec!["t=1.0 id=0 class=AandE event=arrival".to_string()];
        assert!(trace_lines_well_formed(&bad).is_err());
    }

    #[test]
    fn check_names_are_unique() {
        for model in [ModelId::Ccu, ModelId::Stroke] {
            let names: Vec<_> = checks(model).iter().map(|c| c.name).collect();
            let mut dedup = names.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), names.len());
        }
    }

    #[test]
    fn panicking_check_is_reported_as_failure() {
        let c = Check::new("boom", ModelId::Ccu, Category::Oracle, || panic!("kaput"));
        let r = c.run();
        assert!(!r.passed);
        assert!(r.detail.contains("kaput"));
    }
}

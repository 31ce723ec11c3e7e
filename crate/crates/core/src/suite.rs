//! Batches of independent seeded checks.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gen::{instance_rng, GenRng};
use crate::par::{self, Parallelism};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub parallelism: Parallelism,
}

impl SuiteConfig {
    pub fn new(seed: u64, instances: usize) -> Self {
        SuiteConfig {
            seed,
            instances,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub instance: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub instances: usize,
    /// In instance order.
    pub failures: Vec<Failure>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `check` once per instance, each with its own RNG stream. `Ok(None)`
/// is a pass, `Ok(Some(msg))` a failure, and an error counts as a failure
/// too.
pub fn run_suite<F>(config: SuiteConfig, check: F) -> SuiteOutcome
where
    F: Fn(&mut GenRng, usize) -> Result<Option<String>> + Sync + Send,
{
    let results = par::map_range(config.parallelism, config.instances, |i| {
        let mut rng = instance_rng(config.seed, i as u64);
        match check(&mut rng, i) {
            Ok(None) => None,
            Ok(Some(message)) => Some(Failure { instance: i, message }),
            Err(e) => Some(Failure {
                instance: i,
                message: format!("error: {e}"),
            }),
        }
    });
    SuiteOutcome {
        instances: config.instances,
        failures: results.into_iter().flatten().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn outcome_does_not_depend_on_parallelism() {
        let check = |rng: &mut GenRng, i: usize| -> Result<Option<String>> {
            let v: u8 = rng.gen();
            Ok((v % 3 == 0).then(|| format!("{i}:{v}")))
        };
        let seq = run_suite(
            SuiteConfig {
                parallelism: Parallelism::Sequential,
                ..SuiteConfig::new(3, 200)
            },
            check,
        );
        let par = run_suite(
            SuiteConfig {
                parallelism: Parallelism::Parallel,
                ..SuiteConfig::new(3, 200)
            },
            check,
        );
        assert_eq!(seq, par);
        assert!(!seq.passed());
    }
}

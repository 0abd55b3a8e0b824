//! Experiment manifests: the parameter set embedded in every emitted table
//! so a report can be reproduced from its own header.

use fortify_core::de_optimizer::DEConfig;
use fortify_core::replicate_harness::SuccessCriterion;

/// Bump placement options shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpOptions {
    pub target_label: usize,
    pub epsilon: f64,
    pub amplitude: f64,
}

/// Everything that determines an experiment's output bytes, rendered as
/// comment lines. Worker counts are deliberately absent: scheduling must not
/// affect results.
#[derive(Debug, Clone)]
pub struct ExperimentManifest {
    command: String,
    function: String,
    bump_line: Option<String>,
    details: Vec<(String, String)>,
    n_runs: Option<usize>,
    master_seed: Option<u64>,
    criterion: Option<SuccessCriterion>,
}

impl ExperimentManifest {
    pub fn new(command: &str, function: &str) -> Self {
        Self {
            command: command.to_string(),
            function: function.to_string(),
            bump_line: None,
            details: Vec::new(),
            n_runs: None,
            master_seed: None,
            criterion: None,
        }
    }

    pub fn with_bump(mut self, bump: Option<&BumpOptions>) -> Self {
        self.bump_line = Some(match bump {
            Some(b) => format!(
                "optimum {} epsilon {} amplitude {}",
                b.target_label, b.epsilon, b.amplitude
            ),
            None => "none".to_string(),
        });
        self
    }

    /// Free-form bump description, e.g. for multi-epsilon slices.
    pub fn with_bump_text(mut self, text: impl Into<String>) -> Self {
        self.bump_line = Some(text.into());
        self
    }

    pub fn with_runs(mut self, n_runs: usize) -> Self {
        self.n_runs = Some(n_runs);
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = Some(master_seed);
        self
    }

    pub fn with_criterion(mut self, criterion: &SuccessCriterion) -> Self {
        self.criterion = Some(criterion.clone());
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_de_config(self, config: &DEConfig) -> Self {
        self.with_detail("pop", config.pop)
            .with_detail("max_iter", config.max_iter)
            .with_detail("polish", config.polish)
            .with_detail(
                "mutation_range",
                format!("{}..{}", config.mutation_range.0, config.mutation_range.1),
            )
            .with_detail("crossover_prob", config.crossover_prob)
    }

    /// Deterministic key=value comment lines.
    pub fn lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("manifest: artifact=fortify {}", env!("CARGO_PKG_VERSION")),
            format!("manifest: command={}", self.command),
            format!("manifest: function={}", self.function),
        ];
        if let Some(bump) = &self.bump_line {
            lines.push(format!("manifest: bump={bump}"));
        }
        for (k, v) in &self.details {
            lines.push(format!("manifest: {k}={v}"));
        }
        if let Some(n) = self.n_runs {
            lines.push(format!("manifest: runs={n}"));
        }
        if let Some(seed) = self.master_seed {
            lines.push(format!("manifest: seed={seed}"));
        }
        if let Some(c) = &self.criterion {
            lines.push(format!(
                "manifest: criterion=value_tolerance {} near_radius {} target_value {:.6}",
                c.value_tolerance, c.near_radius, c.target_value
            ));
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lines_are_deterministic() {
        let build = || {
            ExperimentManifest::new("table", "branin")
                .with_bump(Some(&BumpOptions {
                    target_label: 1,
                    epsilon: 1.0,
                    amplitude: 10.0,
                }))
                .with_runs(1000)
                .with_seed(42)
                .with_criterion(&SuccessCriterion::new(-3.280907))
                .with_detail("rows", "de,10,20")
        };
        assert_eq!(build().lines(), build().lines());
        let lines = build().lines();
        assert!(lines[0].starts_with("manifest: artifact=fortify "));
        assert!(lines.contains(&"manifest: bump=optimum 1 epsilon 1 amplitude 10".to_string()));
        assert!(lines.contains(&"manifest: seed=42".to_string()));
    }

    #[test]
    fn bumpless_manifest_says_none() {
        let lines = ExperimentManifest::new("table", "branin")
            .with_bump(None)
            .lines();
        assert!(lines.contains(&"manifest: bump=none".to_string()));
    }

    #[test]
    fn optional_lines_are_omitted() {
        let lines = ExperimentManifest::new("slice", "branin").lines();
        assert!(!lines.iter().any(|l| l.contains("seed=")));
        assert!(!lines.iter().any(|l| l.contains("bump=")));
        assert!(!lines.iter().any(|l| l.contains("runs=")));
    }
}

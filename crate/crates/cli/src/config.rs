use std::path::Path;

use raequiv::checker::Budget;
use serde::Deserialize;

use crate::CliError;

/// Environment variable consulted for the default time budget.
pub const BUDGET_ENV: &str = "RAEQUIV_BUDGET_SECS";

/// Optional TOML file; every field may be omitted.
///
/// ```toml
/// [budget]
/// secs = 30
/// max_tree_size = 10
/// deterministic = true
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub budget: BudgetSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub secs: Option<f64>,
    pub max_steps: Option<u64>,
    pub max_tree_size: Option<usize>,
    pub max_degree: Option<u32>,
    pub max_height: Option<i64>,
    pub max_generators: Option<usize>,
    pub seed: Option<u64>,
    pub deterministic: Option<bool>,
}

/// Budget overrides given on the command line.
#[derive(Debug, Default, Clone)]
pub struct FlagBudget {
    pub secs: Option<f64>,
    pub max_steps: Option<u64>,
    pub max_tree_size: Option<usize>,
    pub max_degree: Option<u32>,
    pub seed: Option<u64>,
    pub deterministic: bool,
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn env_secs() -> Result<Option<f64>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{BUDGET_ENV} is not a number: {v}"))),
        Err(_) => Ok(None),
    }
}

/// Flags override the config file, which overrides the environment default.
pub fn resolve(flags: &FlagBudget, file: &FileConfig) -> Result<Budget, CliError> {
    let mut b = Budget::default();
    if let Some(s) = env_secs()? {
        b.max_secs = s;
    }
    let f = &file.budget;
    b.max_secs = flags.secs.or(f.secs).unwrap_or(b.max_secs);
    b.max_steps = flags.max_steps.or(f.max_steps).unwrap_or(b.max_steps);
    b.max_tree_size = flags.max_tree_size.or(f.max_tree_size).unwrap_or(b.max_tree_size);
    b.max_degree = flags.max_degree.or(f.max_degree).unwrap_or(b.max_degree);
    b.max_height = f.max_height.unwrap_or(b.max_height);
    b.max_generators = f.max_generators.unwrap_or(b.max_generators);
    b.seed = flags.seed.or(f.seed).unwrap_or(b.seed);
    b.deterministic = flags.deterministic || f.deterministic.unwrap_or(false);
    if b.max_secs <= 0.0 || b.max_steps == 0 || b.max_degree == 0 || b.max_height <= 0 || b.max_generators == 0 {
        return Err(CliError::Config("budget bounds must be positive".into()));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file() {
        let file: FileConfig = toml::from_str("[budget]\nsecs = 3\nmax_tree_size = 5\nseed = 9\n").unwrap();
        let flags = FlagBudget {
            secs: Some(7.0),
            ..FlagBudget::default()
        };
        let b = resolve(&flags, &file).unwrap();
        assert_eq!(b.max_secs, 7.0);
        assert_eq!(b.max_tree_size, 5);
        assert_eq!(b.seed, 9);
    }

    #[test]
    fn rejects_unknown_keys_and_zero_bounds() {
        assert!(toml::from_str::<FileConfig>("[budget]\nsecz = 3\n").is_err());
        let flags = FlagBudget {
            max_steps: Some(0),
            ..FlagBudget::default()
        };
        assert!(resolve(&flags, &FileConfig::default()).is_err());
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GroupRun, RoundRecord, SessionConfig, SessionError};
use crate::stats::{tabulate, ChoiceCounts};

/// Runs every group of an all-agent session; groups run in parallel and are
/// concatenated in group order.
pub fn run_session(config: &SessionConfig) -> Result<Vec<RoundRecord>, SessionError> {
    config.validate()?;
    if let Some((group, subject)) = config.human_seats().next() {
        return Err(SessionError::HumanSeat { group, subject });
    }
    let groups: Vec<Vec<RoundRecord>> = (0..config.groups.len())
        .into_par_iter()
        .map(|g| {
            let mut run = GroupRun::new(config, g)?;
            run.run_to_end()?;
            Ok(run.into_records())
        })
        .collect::<Result<_, SessionError>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Seeds for successive replications of one configuration.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSchedule {
    /// Replication `i` uses `config.seed + i`.
    #[default]
    Consecutive,
    /// Replication `i` of config `j` uses `seeds[j * replications + i]`.
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub records: Vec<RoundRecord>,
    pub summary: Vec<ChoiceCounts>,
}

pub fn batch(
    configs: &[SessionConfig],
    replications: usize,
    schedule: &SeedSchedule,
) -> Result<BatchResult, SessionError> {
    if configs.is_empty() || replications == 0 {
        return Err(SessionError::Config(
            "batch needs at least one config and one replication".into(),
        ));
    }
    if let SeedSchedule::Explicit(s) = schedule {
        if s.len() < configs.len() * replications {
            return Err(SessionError::Config(format!(
                "seed schedule has {} seeds for {} runs",
                s.len(),
                configs.len() * replications
            )));
        }
    }
    let jobs: Vec<SessionConfig> = configs
        .iter()
        .enumerate()
        .flat_map(|(j, c)| {
            (0..replications).map(move |i| {
                let mut c = c.clone();
                c.seed = match schedule {
                    SeedSchedule::Consecutive => c.seed.wrapping_add(i as u64),
                    SeedSchedule::Explicit(s) => s[j * replications + i],
                };
                if replications > 1 {
                    c.session_id = format!("{}-r{}", c.session_id, i + 1);
                }
                c
            })
        })
        .collect();
    let logs: Vec<Vec<RoundRecord>> = jobs.par_iter().map(run_session).collect::<Result<_, SessionError>>()?;
    let records: Vec<RoundRecord> = logs.into_iter().flatten().collect();
    let summary = tabulate(&records);
    Ok(BatchResult { records, summary })
}

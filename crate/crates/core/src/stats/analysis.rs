use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{clustered_comparison, tabulate, ChoiceCounts, ComparisonResult, StatsError};
use crate::game::{Action, Treatment};
use crate::session::RoundRecord;

type SubjectKey = (String, u32, u32);

/// Mean share of `action` per subject over the records of `treatment`.
pub fn subject_shares(records: &[RoundRecord], treatment: Treatment, action: Action) -> Vec<f64> {
    let mut acc: BTreeMap<SubjectKey, (u32, u32)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.treatment == treatment) {
        let e = acc.entry((r.session_id.clone(), r.group, r.subject)).or_default();
        e.0 += u32::from(r.action == action);
        e.1 += 1;
    }
    acc.values().map(|&(k, n)| k as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub records: usize,
    pub counts: Vec<ChoiceCounts>,
    pub comparisons: Vec<ComparisonResult>,
    pub warnings: Vec<String>,
}

/// Consistency checks on a choice log.
pub fn log_warnings(records: &[RoundRecord]) -> Vec<String> {
    let mut w = Vec::new();
    let mut seen = BTreeSet::new();
    let mut paid: BTreeMap<(String, u32, u8), BTreeSet<u32>> = BTreeMap::new();
    let mut rounds: BTreeMap<(String, u32, u8), BTreeSet<u32>> = BTreeMap::new();
    for r in records {
        if !seen.insert((r.session_id.clone(), r.group, r.part, r.round, r.position)) {
            w.push(format!(
                "duplicate record for {} group {} part {} round {} position {}",
                r.session_id, r.group, r.part, r.round, r.position
            ));
        }
        if !r.treatment.admits(r.action) {
            w.push(format!(
                "{} chosen in {} ({} group {})",
                r.action, r.treatment, r.session_id, r.group
            ));
        }
        if !(0.0..=1.0).contains(&r.loss_probability) {
            w.push(format!("loss probability {} out of range", r.loss_probability));
        }
        if !(1..=2).contains(&r.part) {
            w.push(format!("part {} out of range", r.part));
        }
        let key = (r.session_id.clone(), r.group, r.part);
        rounds.entry(key.clone()).or_default().insert(r.round);
        if r.paid {
            paid.entry(key).or_default().insert(r.round);
        }
    }
    for (key, rs) in &rounds {
        match paid.get(key).map(|s| s.len()).unwrap_or(0) {
            1 => {}
            n => w.push(format!("{} group {} part {}: {n} paid rounds", key.0, key.1, key.2)),
        }
        let expected = seen
            .iter()
            .filter(|s| (&s.0, s.1, s.2) == (&key.0, key.1, key.2))
            .count();
        if expected != rs.len() * 6 {
            w.push(format!("{} group {} part {}: incomplete rounds", key.0, key.1, key.2));
        }
    }
    w
}

/// Counts, subject-clustered comparisons between every pair of treatments
/// present, and log warnings.
pub fn analyze(records: &[RoundRecord]) -> Result<Analysis, StatsError> {
    let counts = tabulate(records);
    let present: BTreeSet<Treatment> = records.iter().map(|r| r.treatment).collect();
    let present: Vec<Treatment> = present.into_iter().collect();
    let mut comparisons = Vec::new();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            for action in [Action::NoBuy, Action::TokenX] {
                let s1 = subject_shares(records, a, action);
                let s2 = subject_shares(records, b, action);
                if s1.len() >= 2 && s2.len() >= 2 {
                    comparisons.push(
                        clustered_comparison(&s1, &s2)?.labelled(format!("{a}/{action}"), format!("{b}/{action}")),
                    );
                }
            }
        }
    }
    Ok(Analysis {
        records: records.len(),
        counts,
        comparisons,
        warnings: log_warnings(records),
    })
}

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonRecord {
    pub horizon: usize,
    pub verdict: Verdict,
    pub conflicts: u64,
    pub decisions: u64,
    pub learned_exported: u64,
    pub candidates_proven: u64,
    pub candidates_refuted: u64,
    pub candidates_unknown: u64,
    /// Milliseconds, present only when timing is enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub conflicts: u64,
    pub decisions: u64,
    pub learned_exported: u64,
    pub candidates_proven: u64,
    pub candidates_refuted: u64,
    pub candidates_unknown: u64,
    pub invariants_active: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub makespan: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub schema: u32,
    pub horizons: Vec<HorizonRecord>,
    pub totals: Totals,
}

impl Default for RunStats {
    fn default() -> Self {
        RunStats {
            schema: SCHEMA_VERSION,
            horizons: Vec::new(),
            totals: Totals::default(),
        }
    }
}

impl RunStats {
    /// Builds stats from horizon records, summing the counters.
    pub fn from_records(horizons: Vec<HorizonRecord>, invariants_active: usize, makespan: Option<usize>) -> Self {
        let mut totals = Totals {
            invariants_active: invariants_active as u64,
            makespan,
            ..Totals::default()
        };
        for r in &horizons {
            totals.conflicts += r.conflicts;
            totals.decisions += r.decisions;
            totals.learned_exported += r.learned_exported;
            totals.candidates_proven += r.candidates_proven;
            totals.candidates_refuted += r.candidates_refuted;
            totals.candidates_unknown += r.candidates_unknown;
            if let Some(ms) = r.wall_time_ms {
                *totals.wall_time_ms.get_or_insert(0) += ms;
            }
        }
        RunStats {
            schema: SCHEMA_VERSION,
            horizons,
            totals,
        }
    }

    /// Checks that horizons strictly increase and only the last may be SAT.
    pub fn is_well_formed(&self) -> bool {
        let increasing = self.horizons.windows(2).all(|w| w[0].horizon < w[1].horizon);
        let sat_last = self
            .horizons
            .iter()
            .rev()
            .skip(1)
            .all(|r| r.verdict != Verdict::Sat);
        self.schema == SCHEMA_VERSION && increasing && sat_last
    }
}

/// Compact JSON with fields in declaration order, newline-terminated.
pub fn print_stats(stats: &RunStats) -> String {
    let mut s = serde_json::to_string(stats).expect("stats serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(horizon: usize, verdict: Verdict) -> HorizonRecord {
        HorizonRecord {
            horizon,
            verdict,
            conflicts: 3,
            decisions: 5,
            learned_exported: 2,
            candidates_proven: 1,
            candidates_refuted: 0,
            candidates_unknown: 1,
            wall_time_ms: None,
        }
    }

    #[test]
    fn empty_run() {
        let s = print_stats(&RunStats::default());
        assert_eq!(
            s,
            "{\"schema\":1,\"horizons\":[],\"totals\":{\"conflicts\":0,\"decisions\":0,\"learned_exported\":0,\
             \"candidates_proven\":0,\"candidates_refuted\":0,\"candidates_unknown\":0,\"invariants_active\":0}}\n"
        );
    }

    #[test]
    fn single_sat_record() {
        let stats = RunStats::from_records(vec![record(1, Verdict::Sat)], 0, Some(1));
        let v: serde_json::Value = serde_json::from_str(&print_stats(&stats)).unwrap();
        assert_eq!(v["horizons"][0]["verdict"], "sat");
        assert_eq!(v["totals"]["makespan"], 1);
        assert!(v["horizons"][0].get("wall_time_ms").is_none());
        let back: RunStats = serde_json::from_value(v).unwrap();
        assert_eq!(back, stats);
        assert!(stats.is_well_formed());
    }

    #[test]
    fn well_formedness() {
        let bad = RunStats::from_records(vec![record(1, Verdict::Sat), record(2, Verdict::Unsat)], 0, None);
        assert!(!bad.is_well_formed());
        let bad = RunStats::from_records(vec![record(2, Verdict::Unsat), record(2, Verdict::Unsat)], 0, None);
        assert!(!bad.is_well_formed());
        let stats = RunStats::from_records(vec![record(0, Verdict::Unsat), record(1, Verdict::Sat)], 2, Some(1));
        assert_eq!(stats.totals.conflicts, 6);
        assert_eq!(stats.totals.invariants_active, 2);
    }
}

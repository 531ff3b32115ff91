use std::collections::BTreeMap;

use super::candidate::{CandidateProperty, PropLit};
use super::prove::{ProofOutcome, ValidatedInvariant};
use crate::task::Semantics;

/// Failed proof attempts before a candidate is retired.
pub const MAX_ATTEMPTS: u32 = 3;

type Key = Vec<PropLit>;

/// Candidates by status. Each key is in at most one of pending, proven,
/// refuted and retired.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    semantics: Semantics,
    pending: BTreeMap<Key, (CandidateProperty, u32)>,
    proven: BTreeMap<Key, ValidatedInvariant>,
    refuted: BTreeMap<Key, CandidateProperty>,
    retired: BTreeMap<Key, CandidateProperty>,
    /// Proven but subsumed by a stronger proven invariant.
    redundant: BTreeMap<Key, ValidatedInvariant>,
    /// Size of the proven set when each pending candidate was last tried.
    tried_with: BTreeMap<Key, usize>,
    proofs_recorded: usize,
}

impl CandidatePool {
    pub fn new(semantics: Semantics) -> Self {
        CandidatePool {
            semantics,
            pending: BTreeMap::new(),
            proven: BTreeMap::new(),
            refuted: BTreeMap::new(),
            retired: BTreeMap::new(),
            redundant: BTreeMap::new(),
            tried_with: BTreeMap::new(),
            proofs_recorded: 0,
        }
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    fn known(&self, key: &[PropLit]) -> bool {
        self.pending.contains_key(key)
            || self.proven.contains_key(key)
            || self.refuted.contains_key(key)
            || self.retired.contains_key(key)
            || self.redundant.contains_key(key)
    }

    /// Adds a candidate unless it is already known or implied by a proven
    /// invariant. Returns whether it was added.
    pub fn offer(&mut self, candidate: CandidateProperty) -> bool {
        if self.known(candidate.key()) || self.proven.values().any(|v| v.property.subsumes(&candidate)) {
            return false;
        }
        self.pending.insert(candidate.key().to_vec(), (candidate, 0));
        true
    }

    /// Pending candidates worth trying now: never tried, or tried before the
    /// proven set last grew.
    pub fn ready(&self) -> Vec<CandidateProperty> {
        self.pending
            .iter()
            .filter(|(k, _)| self.tried_with.get(*k).is_none_or(|&n| n < self.proofs_recorded))
            .map(|(_, (c, _))| c.clone())
            .collect()
    }

    pub fn record(&mut self, candidate: &CandidateProperty, outcome: ProofOutcome) {
        let key = candidate.key().to_vec();
        let Some((c, attempts)) = self.pending.remove(&key) else {
            return;
        };
        self.tried_with.remove(&key);
        match outcome {
            ProofOutcome::Proven(certificate) => {
                self.insert_proven(ValidatedInvariant { property: c, certificate });
            }
            ProofOutcome::Refuted(_) => {
                self.refuted.insert(key, c);
            }
            ProofOutcome::Unknown(_) if attempts + 1 >= MAX_ATTEMPTS => {
                self.retired.insert(key, c);
            }
            ProofOutcome::Unknown(_) => {
                self.tried_with.insert(key.clone(), self.proofs_recorded);
                self.pending.insert(key, (c, attempts + 1));
            }
        }
    }

    /// Adds an already validated invariant, keeping only the strongest ones
    /// active.
    pub fn insert_proven(&mut self, inv: ValidatedInvariant) {
        let key = inv.property.key().to_vec();
        self.pending.remove(&key);
        self.tried_with.remove(&key);
        if self.proven.contains_key(&key) {
            return;
        }
        if self.proven.values().any(|v| v.property.subsumes(&inv.property)) {
            self.redundant.insert(key, inv);
            return;
        }
        let weaker: Vec<Key> = self
            .proven
            .iter()
            .filter(|(_, v)| inv.property.subsumes(&v.property))
            .map(|(k, _)| k.clone())
            .collect();
        for k in weaker {
            let v = self.proven.remove(&k).expect("present");
            self.redundant.insert(k, v);
        }
        self.proven.insert(key, inv);
        self.proofs_recorded += 1;
    }

    /// Active invariants in canonical order.
    pub fn proven(&self) -> Vec<ValidatedInvariant> {
        self.proven.values().cloned().collect()
    }

    /// Active and redundant invariants.
    pub fn all_proven(&self) -> Vec<ValidatedInvariant> {
        let mut all: Vec<_> = self.proven.values().chain(self.redundant.values()).cloned().collect();
        all.sort_by(|a, b| a.property.key().cmp(b.property.key()));
        all
    }

    pub fn pending(&self) -> Vec<CandidateProperty> {
        self.pending.values().map(|(c, _)| c.clone()).collect()
    }

    pub fn refuted(&self) -> Vec<CandidateProperty> {
        self.refuted.values().cloned().collect()
    }

    pub fn retired(&self) -> Vec<CandidateProperty> {
        self.retired.values().cloned().collect()
    }

    pub fn num_proven(&self) -> usize {
        self.proven.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.pending.len() + self.proven.len() + self.refuted.len() + self.retired.len() + self.redundant.len()
    }
}

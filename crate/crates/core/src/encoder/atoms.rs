use crate::task::{Fact, GroundTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimedAtom {
    Holds { fact: Fact, time: usize },
    Occurs { action: usize, time: usize },
}

/// Dense bijection between timed atoms and solver variables. All `holds`
/// atoms come first, time-major, then all `occurs` atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    horizon: usize,
    fact_offset: Vec<usize>,
    num_facts: usize,
    num_actions: usize,
}

impl AtomTable {
    pub fn new(task: &GroundTask, horizon: usize) -> Self {
        let mut fact_offset = Vec::with_capacity(task.variables.len() + 1);
        let mut acc = 0;
        for v in &task.variables {
            fact_offset.push(acc);
            acc += v.domain_size();
        }
        fact_offset.push(acc);
        AtomTable {
            horizon,
            fact_offset,
            num_facts: acc,
            num_actions: task.actions.len(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_variables(&self) -> usize {
        self.fact_offset.len() - 1
    }

    pub fn domain_size(&self, var: usize) -> usize {
        self.fact_offset[var + 1] - self.fact_offset[var]
    }

    pub fn len(&self) -> usize {
        self.num_facts * (self.horizon + 1) + self.num_actions * self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn holds(&self, fact: Fact, time: usize) -> u32 {
        debug_assert!(time <= self.horizon && fact.value < self.domain_size(fact.var));
        (time * self.num_facts + self.fact_offset[fact.var] + fact.value) as u32
    }

    pub fn occurs(&self, action: usize, time: usize) -> u32 {
        debug_assert!(time < self.horizon && action < self.num_actions);
        (self.num_facts * (self.horizon + 1) + time * self.num_actions + action) as u32
    }

    /// Index of `atom`, or `None` if it lies outside the table.
    pub fn index(&self, atom: TimedAtom) -> Option<u32> {
        match atom {
            TimedAtom::Holds { fact, time } => {
                (time <= self.horizon
                    && fact.var < self.num_variables()
                    && fact.value < self.domain_size(fact.var))
                .then(|| self.holds(fact, time))
            }
            TimedAtom::Occurs { action, time } => {
                (time < self.horizon && action < self.num_actions).then(|| self.occurs(action, time))
            }
        }
    }

    pub fn atom(&self, index: u32) -> TimedAtom {
        let i = index as usize;
        let holds_len = self.num_facts * (self.horizon + 1);
        if i < holds_len {
            let time = i / self.num_facts;
            let off = i % self.num_facts;
            let var = self.fact_offset.partition_point(|&o| o <= off) - 1;
            TimedAtom::Holds {
                fact: Fact::new(var, off - self.fact_offset[var]),
                time,
            }
        } else {
            let j = i - holds_len;
            TimedAtom::Occurs {
                action: j % self.num_actions,
                time: j / self.num_actions,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{GroundAction, StateVariable};

    #[test]
    fn table_is_a_bijection() {
        let task = GroundTask {
            name: "t".into(),
            variables: vec![
                StateVariable::boolean(0, "a".into()),
                StateVariable { id: 1, name: "b".into(), values: vec!["x".into(), "y".into(), "z".into()] },
            ],
            actions: (0..2)
                .map(|id| GroundAction { id, name: format!("(o{id})"), pre: vec![], eff: vec![Fact::new(0, 1)] })
                .collect(),
            init: vec![0, 0],
            goal: vec![],
            mutex_groups: vec![],
        };
        let table = AtomTable::new(&task, 3);
        assert_eq!(table.len(), 5 * 4 + 2 * 3);
        for i in 0..table.len() as u32 {
            assert_eq!(table.index(table.atom(i)), Some(i));
        }
        assert_eq!(table.index(TimedAtom::Occurs { action: 0, time: 3 }), None);
        assert_eq!(table.index(TimedAtom::Holds { fact: Fact::new(1, 3), time: 0 }), None);
    }
}

use std::fmt::Write;

use super::{CnfProgram, TimedAtom};

/// DIMACS CNF: `p cnf V C` header, one zero-terminated clause per line.
pub fn to_dimacs(program: &CnfProgram) -> String {
    let mut s = format!("p cnf {} {}\n", program.num_vars(), program.clauses.len());
    for c in &program.clauses {
        for l in c {
            let _ = write!(s, "{} ", l.to_dimacs());
        }
        s.push_str("0\n");
    }
    s
}

/// Sidecar atom map, one `index kind args time` line per variable with
/// 1-based DIMACS indices. `holds` args are `var value`, `occurs` args are
/// the action id.
pub fn atom_map(program: &CnfProgram) -> String {
    let mut s = String::new();
    for i in 0..program.num_vars() as u32 {
        let _ = match program.atoms.atom(i) {
            TimedAtom::Holds { fact, time } => {
                writeln!(s, "{} holds {} {} {}", i + 1, fact.var, fact.value, time)
            }
            TimedAtom::Occurs { action, time } => writeln!(s, "{} occurs {} {}", i + 1, action, time),
        };
    }
    s
}

//! The machine-relative equivalence `≡_S`.

use std::collections::HashMap;

use crate::machine::{run, Configuration, RunOutcome, Ssrt};
use crate::words::{DataValue, DataWord, OriginWord};

use super::{AnalysisError, Analyzer, Bounds, MachineOracle};

/// Everything `≡_S` looks at for one word.
#[derive(Clone, Debug)]
pub struct SProfile {
    pub config: Configuration,
    /// Vulnerable values, freshest first.
    pub suffix_influencing: Vec<DataValue>,
    /// Memorable values, freshest first.
    pub prefix_influencing: Vec<DataValue>,
}

fn by_freshness(u: &DataWord, mut vals: Vec<DataValue>) -> Vec<DataValue> {
    vals.sort_by_key(|&d| std::cmp::Reverse(u.last_occurrence(d)));
    vals
}

impl SProfile {
    pub fn new(an: &Analyzer, m: &Ssrt, u: &DataWord) -> Result<SProfile, AnalysisError> {
        let config = match run(m, u)? {
            RunOutcome::Reached(c) => c,
            RunOutcome::Stuck { .. } => return Err(AnalysisError::NotComparable(u.clone())),
        };
        let inf = an.influence(u);
        Ok(SProfile {
            config,
            suffix_influencing: by_freshness(u, inf.vulnerable.iter().map(|w| w.value).collect()),
            prefix_influencing: by_freshness(u, inf.memorable.iter().map(|w| w.value).collect()),
        })
    }

    /// First condition of `≡_S` that fails between the two profiles.
    pub fn first_difference(&self, other: &SProfile) -> Option<u8> {
        let (c1, c2) = (&self.config, &other.config);
        if c1.state != c2.state {
            return Some(1);
        }
        let (r1, r2) = (&c1.valuation.regs, &c2.valuation.regs);
        for a in 0..r1.len() {
            for b in 0..r1.len() {
                if (r1[a] == r1[b]) != (r2[a] == r2[b]) {
                    return Some(2);
                }
            }
        }
        for (l1, l2) in [
            (&self.suffix_influencing, &other.suffix_influencing),
            (&self.prefix_influencing, &other.prefix_influencing),
        ] {
            for r in 0..r1.len() {
                for i in 0..l1.len().max(l2.len()) {
                    let h1 = r1[r].is_some() && r1[r] == l1.get(i).copied();
                    let h2 = r2[r].is_some() && r2[r] == l2.get(i).copied();
                    if h1 != h2 {
                        return Some(3);
                    }
                }
            }
        }
        let (x1, x2) = (&c1.valuation.vars, &c2.valuation.vars);
        if x1.iter().zip(x2).any(|(a, b)| a.is_empty() != b.is_empty()) {
            return Some(4);
        }
        let arrangements = arrangements(x1.len());
        let concat = |vars: &[OriginWord], chi: &[usize]| -> OriginWord {
            OriginWord(
                chi.iter()
                    .flat_map(|&x| vars[x].0.iter().copied())
                    .collect(),
            )
        };
        let mut first1: HashMap<OriginWord, usize> = HashMap::new();
        let mut first2: HashMap<OriginWord, usize> = HashMap::new();
        for (k, chi) in arrangements.iter().enumerate() {
            let a = *first1.entry(concat(x1, chi)).or_insert(k);
            let b = *first2.entry(concat(x2, chi)).or_insert(k);
            if a != b {
                return Some(5);
            }
        }
        None
    }
}

/// All arrangements of all subsets of `0..n`.
fn arrangements(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for chi in &frontier {
            for x in 0..n {
                if !chi.contains(&x) {
                    let mut c: Vec<usize> = chi.clone();
                    c.push(x);
                    next.push(c);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `u1 ≡_S u2`, with influence computed on the machine's own transduction.
pub fn machine_equiv(
    m: &Ssrt,
    u1: &DataWord,
    u2: &DataWord,
    b: Bounds,
) -> Result<bool, AnalysisError> {
    let oracle = MachineOracle::new("machine", m.clone());
    let an = Analyzer::new(&oracle, b);
    machine_equiv_with(&an, m, u1, u2)
}

/// As [`machine_equiv`] with a caller-supplied analyzer over the machine's
/// transduction.
pub fn machine_equiv_with(
    an: &Analyzer,
    m: &Ssrt,
    u1: &DataWord,
    u2: &DataWord,
) -> Result<bool, AnalysisError> {
    let p1 = SProfile::new(an, m, u1)?;
    let p2 = SProfile::new(an, m, u2)?;
    Ok(p1.first_difference(&p2).is_none())
}

#[cfg(test)]
mod tests {
    use super::arrangements;

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangements(0).len(), 1);
        assert_eq!(arrangements(2).len(), 5);
        assert_eq!(arrangements(3).len(), 16);
    }
}

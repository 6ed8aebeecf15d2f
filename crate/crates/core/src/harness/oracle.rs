//! Plaintext answers to the trace queries, computed by direct set
//! intersection. Shares no code with the protocols.

use std::collections::{BTreeSet, HashSet};

use crate::algebra::Scalar;

/// `{ i in I : inputs[i] in { outputs[j] : j in J } }`
pub fn trace_in(
    inputs: &[Scalar],
    outputs: &[Scalar],
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let wanted: HashSet<&Scalar> = j_set.iter().map(|&j| &outputs[j]).collect();
    i_set.iter().copied().filter(|&i| wanted.contains(&inputs[i])).collect()
}

/// `{ j in J : outputs[j] in { inputs[i] : i in I } }`
pub fn trace_out(
    inputs: &[Scalar],
    outputs: &[Scalar],
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let wanted: HashSet<&Scalar> = i_set.iter().map(|&i| &inputs[i]).collect();
    j_set.iter().copied().filter(|&j| wanted.contains(&outputs[j])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[u64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from(x)).collect()
    }

    #[test]
    fn by_hand() {
        let inputs = s(&[10, 20, 30, 40]);
        let outputs = s(&[30, 10, 40, 20]);
        let i: BTreeSet<usize> = [0, 1].into();
        let j: BTreeSet<usize> = [0, 1].into();
        // outputs[0..2] = {30, 10}: only input 0 (value 10) is among them.
        assert_eq!(trace_in(&inputs, &outputs, &i, &j), [0].into());
        // inputs[0..2] = {10, 20}: only output 1 (value 10) is among them.
        assert_eq!(trace_out(&inputs, &outputs, &i, &j), [1].into());
        assert!(trace_in(&inputs, &outputs, &BTreeSet::new(), &j).is_empty());
    }
}

//! Majority voting over sampled answers (self-consistency).

use alloc::collections::BTreeMap;

use crate::answer::NormalizedAnswer;

/// Pick the most frequent parsed answer from a batch of samples.
///
/// Samples that failed to parse (`None`) are excluded from the vote rather
/// than counted as a candidate. Ties break toward the lexicographically
/// smallest canonical value so the result never depends on sample order.
/// Returns `None` only when no sample parsed at all.
pub fn majority_vote(samples: &[Option<NormalizedAnswer>]) -> Option<NormalizedAnswer> {
    let mut counts: BTreeMap<&NormalizedAnswer, usize> = BTreeMap::new();
    for answer in samples.iter().flatten() {
        *counts.entry(answer).or_insert(0) += 1;
    }
    // BTreeMap iterates in ascending key order, so the first entry carrying
    // the maximum count is the lexicographically smallest winner.
    let mut winner: Option<(&NormalizedAnswer, usize)> = None;
    for (answer, count) in counts {
        match winner {
            Some((_, best)) if best >= count => {}
            _ => winner = Some((answer, count)),
        }
    }
    winner.map(|(answer, _)| answer.clone())
}

use super::SimError;
use crate::prob::JointPmf;

/// Robust typicality: `|freq(a) - p(a)| <= eps * p(a)` for every joint
/// symbol `a`, so symbols of zero mass must not occur at all.
///
/// `seqs[k]` is the sequence of the `k`-th coordinate of `p`.
pub fn typical(seqs: &[&[usize]], p: &JointPmf, eps: f64) -> Result<bool, SimError> {
    if seqs.len() != p.arity() {
        return Err(SimError::AlphabetMismatch(format!(
            "{} sequences for a pmf of arity {}",
            seqs.len(),
            p.arity()
        )));
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if n == 0 || seqs.iter().any(|s| s.len() != n) {
        return Err(SimError::AlphabetMismatch(
            "sequences must be non-empty and of equal length".into(),
        ));
    }
    let sizes = p.sizes();
    for (k, s) in seqs.iter().enumerate() {
        if let Some(&bad) = s.iter().find(|&&v| v >= sizes[k]) {
            return Err(SimError::AlphabetMismatch(format!(
                "symbol {bad} outside alphabet of size {} in coordinate {k}",
                sizes[k]
            )));
        }
    }
    let t = TypicalityTest::new(p);
    let mut counts = vec![0u32; p.len()];
    for i in 0..n {
        let sym: Vec<usize> = seqs.iter().map(|s| s[i]).collect();
        counts[p.encode(&sym)] += 1;
    }
    Ok(t.check_counts(&counts, n, eps))
}

/// Precomputed pmf for repeated typicality checks on `u8` sequences.
#[derive(Debug, Clone)]
pub(crate) struct TypicalityTest {
    strides: Vec<usize>,
    probs: Vec<f64>,
}

impl TypicalityTest {
    pub(crate) fn new(p: &JointPmf) -> Self {
        let sizes = p.sizes();
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        Self {
            strides,
            probs: p.probs().to_vec(),
        }
    }

    pub(crate) fn check_counts(&self, counts: &[u32], n: usize, eps: f64) -> bool {
        let n = n as f64;
        counts
            .iter()
            .zip(&self.probs)
            .all(|(&c, &p)| (f64::from(c) / n - p).abs() <= eps * p)
    }

    /// All sequences have the same length.
    pub(crate) fn check(&self, seqs: &[&[u8]], eps: f64) -> bool {
        let n = seqs[0].len();
        let mut counts = vec![0u32; self.probs.len()];
        for i in 0..n {
            let idx: usize = seqs
                .iter()
                .zip(&self.strides)
                .map(|(s, st)| usize::from(s[i]) * st)
                .sum();
            // A zero-mass symbol fails immediately.
            if self.probs[idx] == 0.0 {
                return false;
            }
            counts[idx] += 1;
        }
        self.check_counts(&counts, n, eps)
    }
}

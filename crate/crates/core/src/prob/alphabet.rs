use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ProbError;

/// A finite alphabet `{0, .., size-1}`, optionally with symbol names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, ProbError> {
        if size == 0 {
            return Err(ProbError::EmptyAlphabet);
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, ProbError> {
        if labels.is_empty() {
            return Err(ProbError::EmptyAlphabet);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(ProbError::BadLabels(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    /// Re-checks the invariants, for values that came through serde.
    pub fn validate(&self) -> Result<(), ProbError> {
        match &self.labels {
            None if self.size == 0 => Err(ProbError::EmptyAlphabet),
            None => Ok(()),
            Some(labels) => {
                if labels.len() != self.size {
                    return Err(ProbError::BadLabels(format!(
                        "{} labels for an alphabet of size {}",
                        labels.len(),
                        self.size
                    )));
                }
                Self::with_labels(labels.clone()).map(|_| ())
            }
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, symbol: usize) -> String {
        match &self.labels {
            Some(l) => l[symbol].clone(),
            None => symbol.to_string(),
        }
    }
}

/// An ordered set of distinct variable positions within a [`JointPmf`].
///
/// [`JointPmf`]: super::JointPmf
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarSet(Vec<usize>);

impl VarSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, ProbError> {
        let mut seen = HashSet::new();
        for &i in &indices {
            if !seen.insert(i) {
                return Err(ProbError::DuplicateIndex(i));
            }
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(index: usize) -> Self {
        Self(vec![index])
    }

    pub fn range(range: std::ops::Range<usize>) -> Self {
        Self(range.collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    /// Union preserving the order of `self` followed by new members of `other`.
    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = self.0.clone();
        for &i in &other.0 {
            if !out.contains(&i) {
                out.push(i);
            }
        }
        VarSet(out)
    }

    pub fn check_disjoint(&self, other: &VarSet) -> Result<(), ProbError> {
        match self.0.iter().find(|i| other.contains(**i)) {
            Some(&i) => Err(ProbError::OverlappingSets(i)),
            None => Ok(()),
        }
    }

    pub(crate) fn check_arity(&self, arity: usize) -> Result<(), ProbError> {
        match self.0.iter().find(|&&i| i >= arity) {
            Some(&index) => Err(ProbError::IndexOutOfRange { index, arity }),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for VarSet {
    /// Collects positions, silently dropping repeats.
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut out = Vec::new();
        for i in iter {
            if !out.contains(&i) {
                out.push(i);
            }
        }
        VarSet(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_invariants() {
        assert_eq!(Alphabet::new(0), Err(ProbError::EmptyAlphabet));
        assert!(Alphabet::with_labels(vec!["a".into(), "a".into()]).is_err());
        let a = Alphabet::with_labels(vec!["lo".into(), "hi".into()]).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.label(1), "hi");
        assert_eq!(Alphabet::new(3).unwrap().label(2), "2");
    }

    #[test]
    fn serde_alphabet_is_revalidated() {
        let bad = Alphabet {
            size: 3,
            labels: Some(vec!["a".into()]),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn varset_rejects_duplicates_and_overlap() {
        assert_eq!(VarSet::new(vec![0, 0]), Err(ProbError::DuplicateIndex(0)));
        let a = VarSet::new(vec![0, 2]).unwrap();
        let b = VarSet::new(vec![2, 3]).unwrap();
        assert_eq!(a.check_disjoint(&b), Err(ProbError::OverlappingSets(2)));
        assert_eq!(a.union(&b).indices(), &[0, 2, 3]);
        assert!(a.check_arity(2).is_err());
    }
}

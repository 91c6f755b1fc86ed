use super::{xlog2x, Alphabet, ProbError, VarSet, NORMALIZATION_TOL};

/// Default cap on the number of tensor entries (2^24).
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 24;

/// Dense joint probability mass function over a product of finite alphabets.
///
/// Entries are stored row-major: the last coordinate varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabets: Vec<Alphabet>,
    probs: Vec<f64>,
    strides: Vec<usize>,
}

fn checked_len(alphabets: &[Alphabet], limit: usize) -> Result<usize, ProbError> {
    let mut required: u128 = 1;
    for a in alphabets {
        required = required.saturating_mul(a.size() as u128);
    }
    if required > limit as u128 {
        return Err(ProbError::TooLarge { required, limit });
    }
    Ok(required as usize)
}

pub(crate) fn checked_product_len(alphabets: &[Alphabet]) -> Result<usize, ProbError> {
    checked_len(alphabets, DEFAULT_MAX_ENTRIES)
}

pub(crate) fn strides_for(sizes: impl DoubleEndedIterator<Item = usize>) -> Vec<usize> {
    let mut strides: Vec<usize> = Vec::new();
    let mut acc = 1;
    for s in sizes.rev() {
        strides.push(acc);
        acc *= s;
    }
    strides.reverse();
    strides
}

impl JointPmf {
    /// Validated constructor: entries must be finite, nonnegative and sum to
    /// one within `1e-12`.
    pub fn new(alphabets: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self, ProbError> {
        Self::with_limit(alphabets, probs, DEFAULT_MAX_ENTRIES)
    }

    pub fn with_limit(
        alphabets: Vec<Alphabet>,
        probs: Vec<f64>,
        limit: usize,
    ) -> Result<Self, ProbError> {
        let expected = checked_len(&alphabets, limit)?;
        if probs.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                actual: probs.len(),
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ProbError::BadProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized(total));
        }
        Ok(Self::from_parts(alphabets, probs))
    }

    /// Builds a pmf from already-validated parts (derived distributions).
    pub(crate) fn from_parts(alphabets: Vec<Alphabet>, probs: Vec<f64>) -> Self {
        let strides = strides_for(alphabets.iter().map(Alphabet::size));
        debug_assert_eq!(
            probs.len(),
            alphabets.iter().map(Alphabet::size).product::<usize>()
        );
        Self {
            alphabets,
            probs,
            strides,
        }
    }

    /// Product of independent marginals, in the given order.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self, ProbError> {
        let alphabets = marginals
            .iter()
            .map(|m| Alphabet::new(m.len()))
            .collect::<Result<Vec<_>, _>>()?;
        let len = checked_len(&alphabets, DEFAULT_MAX_ENTRIES)?;
        let mut probs = vec![1.0; len];
        let strides = strides_for(alphabets.iter().map(Alphabet::size));
        for (k, m) in marginals.iter().enumerate() {
            for (idx, p) in probs.iter_mut().enumerate() {
                *p *= m[(idx / strides[k]) % m.len()];
            }
        }
        // Validate once so malformed marginals are reported.
        Self::new(alphabets, probs)
    }

    pub fn uniform(sizes: &[usize]) -> Result<Self, ProbError> {
        let marginals: Vec<Vec<f64>> = sizes
            .iter()
            .map(|&s| vec![1.0 / s.max(1) as f64; s])
            .collect();
        Self::product(&marginals)
    }

    pub fn point_mass(sizes: &[usize], at: &[usize]) -> Result<Self, ProbError> {
        let alphabets = sizes
            .iter()
            .map(|&s| Alphabet::new(s))
            .collect::<Result<Vec<_>, _>>()?;
        let len = checked_len(&alphabets, DEFAULT_MAX_ENTRIES)?;
        let mut probs = vec![0.0; len];
        let strides = strides_for(sizes.iter().copied());
        let idx: usize = at.iter().zip(&strides).map(|(a, s)| a * s).sum();
        probs[idx] = 1.0;
        Self::new(alphabets, probs)
    }

    pub fn arity(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Alphabet::size).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Symbol of coordinate `var` in flat entry `index`.
    #[inline]
    pub fn coord(&self, index: usize, var: usize) -> usize {
        (index / self.strides[var]) % self.alphabets[var].size()
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        (0..self.arity()).map(|k| self.coord(index, k)).collect()
    }

    pub fn encode(&self, symbols: &[usize]) -> usize {
        symbols.iter().zip(&self.strides).map(|(s, st)| s * st).sum()
    }

    pub fn prob_of(&self, symbols: &[usize]) -> f64 {
        self.probs[self.encode(symbols)]
    }

    /// Marginal pmf of the variables in `set`, coordinates in the set's order.
    pub fn marginal(&self, set: &VarSet) -> Result<JointPmf, ProbError> {
        set.check_arity(self.arity())?;
        let alphabets: Vec<Alphabet> = set
            .indices()
            .iter()
            .map(|&i| self.alphabets[i].clone())
            .collect();
        let probs = self.marginal_probs(set.indices());
        Ok(JointPmf::from_parts(alphabets, probs))
    }

    fn marginal_probs(&self, vars: &[usize]) -> Vec<f64> {
        let out_strides = strides_for(vars.iter().map(|&v| self.alphabets[v].size()));
        let out_len: usize = vars.iter().map(|&v| self.alphabets[v].size()).product();
        let mut out = vec![0.0; out_len];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let j: usize = vars
                .iter()
                .zip(&out_strides)
                .map(|(&v, &st)| self.coord(idx, v) * st)
                .sum();
            out[j] += p;
        }
        out
    }

    /// `H(X_S)` in bits. The empty set has entropy 0.
    pub fn entropy(&self, set: &VarSet) -> Result<f64, ProbError> {
        set.check_arity(self.arity())?;
        if set.is_empty() {
            return Ok(0.0);
        }
        let mut vars = set.indices().to_vec();
        vars.sort_unstable();
        let h = -self.marginal_probs(&vars).into_iter().map(xlog2x).sum::<f64>();
        Ok(h.max(0.0))
    }

    /// `H(X_S | X_C)`.
    pub fn conditional_entropy(&self, target: &VarSet, cond: &VarSet) -> Result<f64, ProbError> {
        let joint = self.entropy(&target.union(cond))?;
        let c = self.entropy(cond)?;
        Ok((joint - c).max(0.0))
    }

    /// `I(X_S; X_T | X_C)` in bits, clamped at 0. `C` may be empty.
    pub fn cond_mutual_info(&self, s: &VarSet, t: &VarSet, c: &VarSet) -> Result<f64, ProbError> {
        for set in [s, t, c] {
            set.check_arity(self.arity())?;
        }
        s.check_disjoint(t)?;
        s.check_disjoint(c)?;
        t.check_disjoint(c)?;
        if s.is_empty() || t.is_empty() {
            return Ok(0.0);
        }
        let sc = self.entropy(&s.union(c))?;
        let tc = self.entropy(&t.union(c))?;
        let stc = self.entropy(&s.union(t).union(c))?;
        let hc = self.entropy(c)?;
        Ok((sc + tc - stc - hc).max(0.0))
    }

    pub fn mutual_info(&self, s: &VarSet, t: &VarSet) -> Result<f64, ProbError> {
        self.cond_mutual_info(s, t, &VarSet::empty())
    }

    /// `A - B - C` holds when `I(A; C | B) <= tol`.
    pub fn is_markov(&self, a: &VarSet, b: &VarSet, c: &VarSet, tol: f64) -> Result<bool, ProbError> {
        Ok(self.cond_mutual_info(a, c, b)? <= tol)
    }

    /// `sum_k H(X_{S_k}) - H(X_{S_1 .. S_K})`; zero iff the groups are independent.
    pub fn total_correlation(&self, groups: &[VarSet]) -> Result<f64, ProbError> {
        let mut all = VarSet::empty();
        let mut sum = 0.0;
        for g in groups {
            all.check_disjoint(g)?;
            sum += self.entropy(g)?;
            all = all.union(g);
        }
        Ok((sum - self.entropy(&all)?).max(0.0))
    }

    /// `H(target | cond) <= tol`, i.e. the target is a function of `cond`.
    pub fn is_decodable(&self, target: &VarSet, cond: &VarSet, tol: f64) -> Result<bool, ProbError> {
        Ok(self.conditional_entropy(target, cond)? <= tol)
    }
}

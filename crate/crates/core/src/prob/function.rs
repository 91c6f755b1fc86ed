use super::{checked_product_len, strides_for, Alphabet, JointPmf, ProbError};

/// The function `f: X_1 x .. x X_L -> F` to be computed, as a full lookup
/// table in row-major order over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    domain: Vec<Alphabet>,
    codomain: Alphabet,
    table: Vec<usize>,
}

impl FunctionSpec {
    pub fn new(domain: Vec<Alphabet>, codomain: Alphabet, table: Vec<usize>) -> Result<Self, ProbError> {
        let expected = checked_product_len(&domain)?;
        if table.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                actual: table.len(),
            });
        }
        if let Some((index, &value)) = table
            .iter()
            .enumerate()
            .find(|(_, &v)| v >= codomain.size())
        {
            return Err(ProbError::OutsideCodomain {
                index,
                value,
                size: codomain.size(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            table,
        })
    }

    /// Tabulates `f` over the product of `domain_sizes`.
    pub fn from_fn(
        domain_sizes: &[usize],
        codomain_size: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self, ProbError> {
        let domain = domain_sizes
            .iter()
            .map(|&s| Alphabet::new(s))
            .collect::<Result<Vec<_>, _>>()?;
        let len = checked_product_len(&domain)?;
        let strides = strides_for(domain_sizes.iter().copied());
        let mut x = vec![0; domain_sizes.len()];
        let table = (0..len)
            .map(|i| {
                for (k, s) in x.iter_mut().enumerate() {
                    *s = (i / strides[k]) % domain_sizes[k];
                }
                f(&x)
            })
            .collect();
        Self::new(domain, Alphabet::new(codomain_size)?, table)
    }

    pub fn domain(&self) -> &[Alphabet] {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn eval_index(&self, flat: usize) -> usize {
        self.table[flat]
    }

    pub fn eval(&self, x: &[usize]) -> usize {
        let mut idx = 0;
        for (s, a) in x.iter().zip(&self.domain) {
            idx = idx * a.size() + s;
        }
        self.table[idx]
    }

    pub fn is_constant(&self) -> bool {
        self.table.windows(2).all(|w| w[0] == w[1])
    }
}

impl JointPmf {
    /// Appends the coordinate `F = f(X_L)`, where `X_L` are the trailing
    /// `f.arity()` coordinates of this pmf.
    pub fn append_function(&self, f: &FunctionSpec) -> Result<JointPmf, ProbError> {
        let arity = self.arity();
        if f.arity() > arity {
            return Err(ProbError::AlphabetMismatch(format!(
                "function takes {} inputs, pmf has {arity} coordinates",
                f.arity()
            )));
        }
        let first_x = arity - f.arity();
        for (k, a) in f.domain().iter().enumerate() {
            if self.alphabets()[first_x + k].size() != a.size() {
                return Err(ProbError::AlphabetMismatch(format!(
                    "function input {k} has {} symbols, pmf coordinate {} has {}",
                    a.size(),
                    first_x + k,
                    self.alphabets()[first_x + k].size()
                )));
            }
        }
        let mut alphabets = self.alphabets().to_vec();
        alphabets.push(f.codomain().clone());
        checked_product_len(&alphabets)?;

        let fsize = f.codomain().size();
        // The X block is the low-order part of the flat index.
        let x_len: usize = f.domain().iter().map(Alphabet::size).product();
        let mut probs = vec![0.0; self.len() * fsize];
        for (i, &p) in self.probs().iter().enumerate() {
            if p > 0.0 {
                probs[i * fsize + f.eval_index(i % x_len)] = p;
            }
        }
        Ok(JointPmf::from_parts(alphabets, probs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Channel, VarSet};

    fn xor() -> FunctionSpec {
        FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap()
    }

    #[test]
    fn table_validation() {
        let d = vec![Alphabet::new(2).unwrap()];
        assert!(FunctionSpec::new(d.clone(), Alphabet::new(2).unwrap(), vec![0]).is_err());
        assert!(matches!(
            FunctionSpec::new(d, Alphabet::new(2).unwrap(), vec![0, 2]),
            Err(ProbError::OutsideCodomain { index: 1, .. })
        ));
        assert_eq!(xor().eval(&[1, 0]), 1);
        assert_eq!(xor().eval(&[1, 1]), 0);
    }

    #[test]
    fn xor_output_is_uniform() {
        let p = JointPmf::uniform(&[2, 2]).unwrap().append_function(&xor()).unwrap();
        assert!((p.entropy(&VarSet::single(2)).unwrap() - 1.0).abs() < 1e-12);
        let h = p
            .conditional_entropy(&VarSet::single(2), &VarSet::range(0..2))
            .unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn constant_and_identity_functions() {
        let p = JointPmf::new(
            vec![Alphabet::new(3).unwrap()],
            vec![0.2, 0.3, 0.5],
        )
        .unwrap();
        let c = FunctionSpec::from_fn(&[3], 1, |_| 0).unwrap();
        assert!(c.is_constant());
        let pc = p.append_function(&c).unwrap();
        assert_eq!(pc.entropy(&VarSet::single(1)).unwrap(), 0.0);

        let id = FunctionSpec::from_fn(&[3], 3, |x| x[0]).unwrap();
        let pi = p.append_function(&id).unwrap();
        let i = pi.mutual_info(&VarSet::single(1), &VarSet::single(0)).unwrap();
        let h = p.entropy(&VarSet::single(0)).unwrap();
        assert!((i - h).abs() < 1e-12);
    }

    #[test]
    fn decodability_examples() {
        let px = JointPmf::uniform(&[4]).unwrap();
        let parity = FunctionSpec::from_fn(&[4], 2, |x| x[0] % 2).unwrap();
        // layout (U, X, F)
        let check = |ch: Channel| {
            px.extend_with_channels(&[ch])
                .unwrap()
                .append_function(&parity)
                .unwrap()
                .is_decodable(&VarSet::single(2), &VarSet::single(0), 1e-9)
                .unwrap()
        };
        assert!(check(Channel::identity(4).unwrap()));
        assert!(check(Channel::deterministic(&[0, 1, 0, 1], 2).unwrap()));
        assert!(!check(Channel::constant(4).unwrap()));
        assert!(!check(Channel::deterministic(&[0, 0, 1, 1], 2).unwrap()));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let p = JointPmf::uniform(&[3]).unwrap();
        assert!(matches!(
            p.append_function(&xor()),
            Err(ProbError::AlphabetMismatch(_))
        ));
    }
}

use super::{checked_product_len, Alphabet, JointPmf, ProbError, NORMALIZATION_TOL};

/// A discrete memoryless channel `p(u | x)`, stored as a row-stochastic
/// matrix with one row per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    matrix: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        let input = Alphabet::new(rows.len())?;
        let width = rows.first().map_or(0, Vec::len);
        let output = Alphabet::new(width)?;
        let mut matrix = Vec::with_capacity(rows.len() * width);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(ProbError::ShapeMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(ProbError::BadProbability {
                        index: r * width + c,
                        value: v,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(ProbError::NotStochastic { row: r, sum });
            }
            matrix.extend_from_slice(row);
        }
        Ok(Self {
            input,
            output,
            matrix,
        })
    }

    pub fn identity(size: usize) -> Result<Self, ProbError> {
        Self::deterministic(&(0..size).collect::<Vec<_>>(), size)
    }

    /// Single-symbol output: `U` carries no information about `X`.
    pub fn constant(input_size: usize) -> Result<Self, ProbError> {
        Self::deterministic(&vec![0; input_size], 1)
    }

    /// `u = map[x]` over an output alphabet of `output_size` symbols.
    pub fn deterministic(map: &[usize], output_size: usize) -> Result<Self, ProbError> {
        let rows = map
            .iter()
            .enumerate()
            .map(|(x, &u)| {
                if u >= output_size {
                    return Err(ProbError::OutsideCodomain {
                        index: x,
                        value: u,
                        size: output_size,
                    });
                }
                let mut row = vec![0.0; output_size];
                row[u] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn binary_symmetric(crossover: f64) -> Result<Self, ProbError> {
        Self::new(vec![
            vec![1.0 - crossover, crossover],
            vec![crossover, 1.0 - crossover],
        ])
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    #[inline]
    pub fn prob(&self, x: usize, u: usize) -> f64 {
        self.matrix[x * self.output.size() + u]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let w = self.output.size();
        &self.matrix[x * w..(x + 1) * w]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.input.size()).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.matrix.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

impl JointPmf {
    /// Extends `p(x_1..x_L)` to `p(u_1..u_L, x_1..x_L) = p(x) prod_l p(u_l | x_l)`.
    ///
    /// The output places all `U` coordinates first, then the `X` coordinates
    /// in their original order.
    pub fn extend_with_channels(&self, channels: &[Channel]) -> Result<JointPmf, ProbError> {
        if channels.len() != self.arity() {
            return Err(ProbError::AlphabetMismatch(format!(
                "{} channels for {} input variables",
                channels.len(),
                self.arity()
            )));
        }
        for (l, (ch, a)) in channels.iter().zip(self.alphabets()).enumerate() {
            if ch.input().size() != a.size() {
                return Err(ProbError::AlphabetMismatch(format!(
                    "channel {l} expects {} input symbols, variable has {}",
                    ch.input().size(),
                    a.size()
                )));
            }
        }
        let mut alphabets: Vec<Alphabet> = channels.iter().map(|c| c.output().clone()).collect();
        alphabets.extend(self.alphabets().iter().cloned());
        checked_product_len(&alphabets)?;

        let u_sizes: Vec<usize> = channels.iter().map(|c| c.output().size()).collect();
        let u_len: usize = u_sizes.iter().product();
        let x_len = self.len();
        let mut probs = vec![0.0; u_len * x_len];
        let mut u = vec![0usize; u_sizes.len()];
        for (xi, &px) in self.probs().iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            let x = self.decode(xi);
            u.iter_mut().for_each(|s| *s = 0);
            for ui in 0..u_len {
                let w: f64 = channels
                    .iter()
                    .enumerate()
                    .map(|(l, ch)| ch.prob(x[l], u[l]))
                    .product();
                probs[ui * x_len + xi] = px * w;
                // odometer, last coordinate fastest
                for k in (0..u.len()).rev() {
                    u[k] += 1;
                    if u[k] < u_sizes[k] {
                        break;
                    }
                    u[k] = 0;
                }
            }
        }
        Ok(JointPmf::from_parts(alphabets, probs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::VarSet;

    #[test]
    fn rows_must_be_stochastic() {
        assert!(matches!(
            Channel::new(vec![vec![0.5, 0.4], vec![0.0, 1.0]]),
            Err(ProbError::NotStochastic { row: 0, .. })
        ));
        assert!(Channel::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(Channel::deterministic(&[0, 2], 2).is_err());
    }

    #[test]
    fn identity_extension() {
        let p = JointPmf::new(
            vec![Alphabet::new(2).unwrap(), Alphabet::new(3).unwrap()],
            vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1],
        )
        .unwrap();
        let ch = [Channel::identity(2).unwrap(), Channel::identity(3).unwrap()];
        let ext = p.extend_with_channels(&ch).unwrap();
        assert_eq!(ext.sizes(), vec![2, 3, 2, 3]);
        for idx in 0..ext.len() {
            let s = ext.decode(idx);
            let expected = if s[0] == s[2] && s[1] == s[3] {
                p.prob_of(&s[2..])
            } else {
                0.0
            };
            assert_eq!(ext.probs()[idx], expected);
        }
    }

    #[test]
    fn constant_channels_carry_nothing() {
        let p = JointPmf::new(
            vec![Alphabet::new(2).unwrap(), Alphabet::new(2).unwrap()],
            vec![0.4, 0.1, 0.1, 0.4],
        )
        .unwrap();
        let ch = [Channel::constant(2).unwrap(), Channel::constant(2).unwrap()];
        let ext = p.extend_with_channels(&ch).unwrap();
        let i = ext
            .mutual_info(&VarSet::range(0..2), &VarSet::range(2..4))
            .unwrap();
        assert_eq!(i, 0.0);
    }

    #[test]
    fn bsc_mutual_information() {
        let p = JointPmf::uniform(&[2]).unwrap();
        let ext = p
            .extend_with_channels(&[Channel::binary_symmetric(0.1).unwrap()])
            .unwrap();
        let i = ext.mutual_info(&VarSet::single(0), &VarSet::single(1)).unwrap();
        let h2 = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
        assert!((i - (1.0 - h2)).abs() < 1e-12);
        assert!((i - 0.531004).abs() < 1e-6);
    }

    #[test]
    fn mismatched_channel_rejected() {
        let p = JointPmf::uniform(&[2, 3]).unwrap();
        let ch = [Channel::identity(2).unwrap(), Channel::identity(2).unwrap()];
        assert!(matches!(
            p.extend_with_channels(&ch),
            Err(ProbError::AlphabetMismatch(_))
        ));
    }
}

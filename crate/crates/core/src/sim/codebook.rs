use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CodebookKind, SchemeParams, SimError};

/// Codewords of one user, stored flat (`N * n` symbols), with `B` bins of
/// `N / B` consecutive indices each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCodebook {
    pub alphabet: usize,
    pub n: usize,
    pub bins: usize,
    words: Vec<u8>,
}

impl UserCodebook {
    /// `words` holds the codewords back to back, each `n` symbols long.
    pub fn from_words(alphabet: usize, n: usize, bins: usize, words: Vec<u8>) -> Result<Self, SimError> {
        let count = if n == 0 { 0 } else { words.len() / n };
        if n == 0 || words.len() % n != 0 || count == 0 || bins == 0 || count % bins != 0 {
            return Err(SimError::InvalidParams(format!(
                "{} symbols do not form codewords of length {n} in {bins} equal bins",
                words.len()
            )));
        }
        if words.iter().any(|&s| usize::from(s) >= alphabet) {
            return Err(SimError::InvalidParams(format!("symbol outside alphabet of size {alphabet}")));
        }
        Ok(Self {
            alphabet,
            n,
            bins,
            words,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, omega: usize) -> &[u8] {
        &self.words[omega * self.n..(omega + 1) * self.n]
    }

    pub fn bin_size(&self) -> usize {
        self.len() / self.bins
    }

    pub fn bin_of(&self, omega: usize) -> usize {
        omega / self.bin_size()
    }

    pub fn bin_members(&self, bin: usize) -> std::ops::Range<usize> {
        let s = self.bin_size();
        bin * s..(bin + 1) * s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub users: Vec<UserCodebook>,
}

/// Draws `N_l` sequences i.i.d. from `p_u_marginals[l]`, or lists every
/// sequence for [`CodebookKind::Exhaustive`].
///
/// Codeword `omega` of user `l` comes from its own ChaCha stream
/// `(l << 40) | omega` under `master_seed`, so the codebook does not depend
/// on generation order.
pub fn build_codebook(p_u_marginals: &[Vec<f64>], params: &SchemeParams) -> Result<Codebook, SimError> {
    params.validate()?;
    if p_u_marginals.len() != params.users() {
        return Err(SimError::InvalidParams(format!(
            "{} marginals for {} users",
            p_u_marginals.len(),
            params.users()
        )));
    }
    let n = params.n;
    let mut users = Vec::with_capacity(p_u_marginals.len());
    for (l, pu) in p_u_marginals.iter().enumerate() {
        let size = pu.len();
        if size == 0 || size > 256 {
            return Err(SimError::InvalidParams(format!(
                "user {}: auxiliary alphabet of size {size} not in 1..=256",
                l + 1
            )));
        }
        let count = params.codewords[l] as usize;
        let words = match params.codebook {
            CodebookKind::Random => {
                let dist = WeightedIndex::new(pu).map_err(|e| {
                    SimError::InvalidParams(format!("user {}: bad marginal: {e}", l + 1))
                })?;
                let mut words = Vec::with_capacity(count * n);
                for omega in 0..count {
                    let mut rng = ChaCha8Rng::seed_from_u64(params.master_seed);
                    rng.set_stream(((l as u64) << 40) | omega as u64);
                    words.extend((0..n).map(|_| dist.sample(&mut rng) as u8));
                }
                words
            }
            CodebookKind::Exhaustive => {
                let total = (size as u128).checked_pow(n as u32);
                if total != Some(count as u128) {
                    return Err(SimError::InvalidParams(format!(
                        "user {}: an exhaustive codebook needs N = {size}^{n} codewords, got {count}",
                        l + 1
                    )));
                }
                let mut words = Vec::with_capacity(count * n);
                let mut cur = vec![0u8; n];
                for _ in 0..count {
                    words.extend_from_slice(&cur);
                    for i in (0..n).rev() {
                        cur[i] += 1;
                        if usize::from(cur[i]) < size {
                            break;
                        }
                        cur[i] = 0;
                    }
                }
                words
            }
        };
        users.push(UserCodebook {
            alphabet: size,
            n,
            bins: params.bins[l] as usize,
            words,
        });
    }
    Ok(Codebook { users })
}

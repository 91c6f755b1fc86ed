use super::codebook::{build_codebook, Codebook};
use super::typical::TypicalityTest;
use super::{SchemeParams, SimError};
use crate::prob::{Channel, FunctionSpec, JointPmf, VarSet};
use crate::regions::RegionError;

/// Conditional law of a user's bin index given its input sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum BinLaw {
    /// Bins holding typical-matching codewords, with mass proportional to
    /// the number of matches in each (a uniform pick among matches).
    Matched(Vec<(usize, f64)>),
    /// No match: uniform over this many bins.
    Uniform(usize),
}

impl BinLaw {
    pub fn prob(&self, bin: usize) -> f64 {
        match self {
            BinLaw::Matched(v) => v.iter().find(|(b, _)| *b == bin).map_or(0.0, |(_, p)| *p),
            BinLaw::Uniform(b) => {
                if bin < *b {
                    1.0 / *b as f64
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, BinLaw::Uniform(_))
    }

    /// Entropy in bits.
    pub fn entropy(&self) -> f64 {
        match self {
            BinLaw::Matched(v) => -v.iter().map(|(_, p)| crate::prob::xlog2x(*p)).sum::<f64>(),
            BinLaw::Uniform(b) => (*b as f64).log2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Recovered codeword indices and the symbolwise function estimate.
    Decoded { omegas: Vec<usize>, output: Vec<usize> },
    /// No candidate at this 0-based stage.
    NoCandidate { stage: usize },
    /// More than one candidate at this 0-based stage.
    Ambiguous { stage: usize },
}

/// A fixed codebook together with the typicality tests and the table
/// `F~(u_L)` the encoders and decoder need.
#[derive(Debug, Clone)]
pub struct Scheme {
    params: SchemeParams,
    codebook: Codebook,
    p_x: JointPmf,
    x_sizes: Vec<usize>,
    f_size: usize,
    /// Test against `p_{X_l U_l}`, coordinates `(x, u)`.
    enc_tests: Vec<TypicalityTest>,
    /// Test against `p_{U_1..U_l}` for stage `l`.
    dec_tests: Vec<TypicalityTest>,
    ftilde: Vec<usize>,
    u_strides: Vec<usize>,
}

impl Scheme {
    /// Builds the codebook from the auxiliary marginals and `params`.
    pub fn new(
        p_x: &JointPmf,
        channels: &[Channel],
        f: &FunctionSpec,
        params: &SchemeParams,
    ) -> Result<Self, SimError> {
        let ext = Self::extended(p_x, channels, params)?;
        let l = p_x.arity();
        let marginals = (0..l)
            .map(|u| Ok(ext.marginal(&VarSet::single(u))?.probs().to_vec()))
            .collect::<Result<Vec<_>, SimError>>()?;
        let codebook = build_codebook(&marginals, params)?;
        Self::assemble(p_x, &ext, f, params, codebook)
    }

    /// Uses a caller-supplied codebook, e.g. one with repeated codewords.
    pub fn with_codebook(
        p_x: &JointPmf,
        channels: &[Channel],
        f: &FunctionSpec,
        params: &SchemeParams,
        codebook: Codebook,
    ) -> Result<Self, SimError> {
        let ext = Self::extended(p_x, channels, params)?;
        let ok = codebook.users.len() == p_x.arity()
            && codebook.users.iter().enumerate().all(|(l, u)| {
                u.n == params.n
                    && u.len() as u64 == params.codewords[l]
                    && u.bins as u64 == params.bins[l]
                    && u.alphabet == channels[l].output().size()
            });
        if !ok {
            return Err(SimError::InvalidParams("codebook does not match the parameters".into()));
        }
        Self::assemble(p_x, &ext, f, params, codebook)
    }

    fn extended(p_x: &JointPmf, channels: &[Channel], params: &SchemeParams) -> Result<JointPmf, SimError> {
        params.validate()?;
        if params.users() != p_x.arity() {
            return Err(SimError::InvalidParams(format!(
                "parameters for {} users, inputs over {}",
                params.users(),
                p_x.arity()
            )));
        }
        if p_x.sizes().into_iter().chain(channels.iter().map(|c| c.output().size())).any(|s| s > 256) {
            return Err(SimError::InvalidParams("alphabets larger than 256 symbols".into()));
        }
        Ok(p_x.extend_with_channels(channels)?)
    }

    fn assemble(
        p_x: &JointPmf,
        ext: &JointPmf,
        f: &FunctionSpec,
        params: &SchemeParams,
        codebook: Codebook,
    ) -> Result<Self, SimError> {
        let l = p_x.arity();
        let f_size = f.codomain().size();
        if (f_size as f64).powi(params.n as i32) >= 2f64.powi(63) {
            return Err(SimError::InvalidParams(format!(
                "|F|^n = {f_size}^{} does not fit in 63 bits",
                params.n
            )));
        }
        let enc_tests = (0..l)
            .map(|u| Ok(TypicalityTest::new(&ext.marginal(&VarSet::new(vec![l + u, u])?)?)))
            .collect::<Result<Vec<_>, SimError>>()?;
        let dec_tests = (0..l)
            .map(|u| Ok(TypicalityTest::new(&ext.marginal(&VarSet::range(0..u + 1))?)))
            .collect::<Result<Vec<_>, SimError>>()?;

        let u_sizes: Vec<usize> = ext.sizes()[..l].to_vec();
        let mut u_strides = vec![1; l];
        for k in (0..l.saturating_sub(1)).rev() {
            u_strides[k] = u_strides[k + 1] * u_sizes[k + 1];
        }
        let u_len: usize = u_sizes.iter().product();
        // Zero-mass u tuples default to the first codomain symbol.
        let mut ftilde = vec![0; u_len];
        let mut seen = vec![false; u_len];
        for (idx, &p) in ext.probs().iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let sym = ext.decode(idx);
            let uf: usize = sym[..l].iter().zip(&u_strides).map(|(a, b)| a * b).sum();
            let v = f.eval(&sym[l..]);
            if seen[uf] && ftilde[uf] != v {
                return Err(RegionError::Precondition(
                    "F is not a function of U_L: two inputs with different values share an auxiliary tuple"
                        .into(),
                )
                .into());
            }
            seen[uf] = true;
            ftilde[uf] = v;
        }
        Ok(Self {
            params: params.clone(),
            codebook,
            p_x: p_x.clone(),
            x_sizes: p_x.sizes(),
            f_size,
            enc_tests,
            dec_tests,
            ftilde,
            u_strides,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn p_x(&self) -> &JointPmf {
        &self.p_x
    }

    pub fn users(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    pub fn f_size(&self) -> usize {
        self.f_size
    }

    /// Exact law of `M_l` given `x_l^n`: a uniform choice among codewords
    /// jointly typical with `x_l^n` at `eps_0`, reported by bin.
    pub fn encoder_distribution(&self, l: usize, x: &[u8]) -> BinLaw {
        let cb = &self.codebook.users[l];
        let eps = self.params.encoder_eps();
        let mut counts: Vec<(usize, u32)> = Vec::new();
        let mut total = 0u32;
        for omega in 0..cb.len() {
            if self.enc_tests[l].check(&[x, cb.word(omega)], eps) {
                let b = cb.bin_of(omega);
                match counts.last_mut() {
                    Some((lb, c)) if *lb == b => *c += 1,
                    _ => counts.push((b, 1)),
                }
                total += 1;
            }
        }
        if total == 0 {
            return BinLaw::Uniform(cb.bins);
        }
        BinLaw::Matched(
            counts
                .into_iter()
                .map(|(b, c)| (b, f64::from(c) / f64::from(total)))
                .collect(),
        )
    }

    /// Codeword indices in bin `bin` of user `l` that are jointly typical
    /// at `eps` with the already decoded codewords `prev` of users `0..l`.
    pub fn candidates(&self, l: usize, prev: &[usize], bin: usize, eps: f64) -> Vec<usize> {
        let cb = &self.codebook.users[l];
        let mut seqs: Vec<&[u8]> = prev
            .iter()
            .enumerate()
            .map(|(k, &w)| self.codebook.users[k].word(w))
            .collect();
        seqs.push(&[]);
        cb.bin_members(bin)
            .filter(|&omega| {
                seqs[l] = cb.word(omega);
                self.dec_tests[l].check(&seqs, eps)
            })
            .collect()
    }

    /// Stage `l` of successive decoding at `eps_L`.
    pub(crate) fn decode_stage(&self, l: usize, prev: &[usize], bin: usize) -> Result<usize, DecodeOutcome> {
        let c = self.candidates(l, prev, bin, self.params.decoder_eps());
        match c.len() {
            1 => Ok(c[0]),
            0 => Err(DecodeOutcome::NoCandidate { stage: l }),
            _ => Err(DecodeOutcome::Ambiguous { stage: l }),
        }
    }

    pub fn decode(&self, bins: &[usize]) -> DecodeOutcome {
        let mut omegas = Vec::with_capacity(bins.len());
        for (l, &b) in bins.iter().enumerate() {
            match self.decode_stage(l, &omegas, b) {
                Ok(w) => omegas.push(w),
                Err(e) => return e,
            }
        }
        let output = self.estimate(&omegas);
        DecodeOutcome::Decoded { omegas, output }
    }

    /// `F~` applied symbolwise to the codewords `omegas`.
    pub fn estimate(&self, omegas: &[usize]) -> Vec<usize> {
        (0..self.params.n)
            .map(|i| {
                let uf: usize = omegas
                    .iter()
                    .enumerate()
                    .map(|(l, &w)| usize::from(self.codebook.users[l].word(w)[i]) * self.u_strides[l])
                    .sum();
                self.ftilde[uf]
            })
            .collect()
    }

    /// Base-`|F|` index of a function sequence, first symbol most significant.
    pub(crate) fn output_index(&self, seq: impl IntoIterator<Item = usize>) -> u64 {
        seq.into_iter()
            .fold(0u64, |acc, v| acc * self.f_size as u64 + v as u64)
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::mixture::{mixture_entropy, Component, LawTable};
use super::scheme::{BinLaw, DecodeOutcome, Scheme};
use super::{SchemeParams, SimError};
use crate::prob::{Channel, FunctionSpec, JointPmf};
use crate::regions::{CollusionFamily, UserSet};

const NO_CANDIDATE: u64 = u64::MAX;
const AMBIGUOUS: u64 = u64::MAX - 1;
/// Work is split into chunks of this many items regardless of thread count,
/// and partial sums are combined in chunk order.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `P[no codeword of user l is typical with X_l^n]` per user.
    pub encoder_failure: Vec<f64>,
    /// Bin tuples on which some decoding stage found no candidate.
    pub decode_no_candidate: u64,
    /// Bin tuples on which some decoding stage found several candidates.
    pub decode_ambiguous: u64,
    /// `prod_l B_l`.
    pub bin_tuples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub exact_error_prob: f64,
    /// `I(X_L^n; M_L | F^n) / n`.
    pub leakage_fusion: f64,
    /// `I(X_{A^c}^n; M_L | X_A^n) / n` per collusion set, in family order.
    pub leakage_colluders: Vec<(UserSet, f64)>,
    pub diagnostics: Diagnostics,
}

/// Base-`size` digits of `idx`, most significant first.
fn digits(mut idx: usize, size: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for d in out.iter_mut().rev() {
        *d = (idx % size) as u8;
        idx /= size;
    }
    out
}

/// Deterministic parallel sum of `f` over `0..len`.
fn chunked_sum(len: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunks: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f).sum::<f64>())
        .collect();
    chunks.iter().sum()
}

/// `|X_L|^n * prod_l N_l`, saturating.
pub fn required_budget(x_joint: usize, params: &SchemeParams) -> u128 {
    let mut r = (x_joint as u128).saturating_pow(params.n as u32);
    for &c in &params.codewords {
        r = r.saturating_mul(u128::from(c));
    }
    r
}

/// Builds the scheme for `params` and evaluates it exactly.
pub fn exact_evaluate(
    p_x: &JointPmf,
    channels: &[Channel],
    f: &FunctionSpec,
    family: &CollusionFamily,
    params: &SchemeParams,
    budget: u128,
) -> Result<SimResult, SimError> {
    params.validate()?;
    let required = required_budget(p_x.len(), params);
    if required > budget {
        return Err(SimError::Budget {
            required,
            limit: budget,
        });
    }
    let scheme = Scheme::new(p_x, channels, f, params)?;
    scheme.evaluate(f, family, budget)
}

impl Scheme {
    /// Exact error probability and leakages of this fixed codebook.
    pub fn evaluate(&self, f: &FunctionSpec, family: &CollusionFamily, budget: u128) -> Result<SimResult, SimError> {
        let p = self.params();
        let l = self.users();
        let n = p.n;
        let required = required_budget(self.p_x().len(), p);
        if required > budget {
            return Err(SimError::Budget {
                required,
                limit: budget,
            });
        }
        if family.users() != l {
            return Err(SimError::InvalidParams(format!(
                "collusion family over {} users, scheme over {l}",
                family.users()
            )));
        }
        let x_sizes = self.x_sizes().to_vec();
        let bins: Vec<usize> = p.bins.iter().map(|&b| b as usize).collect();

        // Encoder laws and their input-sequence probabilities per user.
        let p_x = self.p_x();
        let mut laws: Vec<Vec<BinLaw>> = Vec::with_capacity(l);
        let mut seq_probs: Vec<Vec<f64>> = Vec::with_capacity(l);
        for u in 0..l {
            let marg = p_x.marginal(&crate::prob::VarSet::single(u))?;
            let count = x_sizes[u].pow(n as u32);
            let per: Vec<(BinLaw, f64)> = (0..count)
                .into_par_iter()
                .map(|xi| {
                    let seq = digits(xi, x_sizes[u], n);
                    let pr = seq.iter().map(|&s| marg.probs()[usize::from(s)]).product();
                    (self.encoder_distribution(u, &seq), pr)
                })
                .collect();
            let (lw, pr): (Vec<_>, Vec<_>) = per.into_iter().unzip();
            laws.push(lw);
            seq_probs.push(pr);
        }
        let encoder_failure = (0..l)
            .map(|u| {
                laws[u]
                    .iter()
                    .zip(&seq_probs[u])
                    .filter(|(law, _)| law.is_failure())
                    .fold(0.0, |acc, (_, pr)| acc + pr)
            })
            .collect();

        let (table, no_cand, ambiguous) = self.decode_table(&bins);
        let bin_tuples = table.len() as u64;
        let mut bin_strides = vec![1usize; l];
        for k in (0..l - 1).rev() {
            bin_strides[k] = bin_strides[k + 1] * bins[k + 1];
        }

        // Joint input sequences: per position one joint symbol of p_x.
        let x_joint = p_x.len();
        let total_x = x_joint.pow(n as u32);
        let sym_coords: Vec<Vec<usize>> = (0..x_joint).map(|s| p_x.decode(s)).collect();
        let sym_f: Vec<usize> = sym_coords.iter().map(|c| f.eval(c)).collect();
        let seq_of = |xi: usize| -> (f64, Vec<usize>, u64) {
            let d = digits(xi, x_joint, n);
            let pr: f64 = d.iter().map(|&s| p_x.probs()[usize::from(s)]).product();
            let ids = (0..l)
                .map(|u| {
                    d.iter()
                        .fold(0usize, |acc, &s| acc * x_sizes[u] + sym_coords[usize::from(s)][u])
                })
                .collect();
            let phi = self.output_index(d.iter().map(|&s| sym_f[usize::from(s)]));
            (pr, ids, phi)
        };

        // For users whose encoder failed the bin is uniform, so only the
        // number of their bin choices yielding each output matters.
        let patterns: BTreeSet<u32> = (0..total_x)
            .filter_map(|xi| {
                let (pr, ids, _) = seq_of(xi);
                (pr > 0.0).then(|| {
                    (0..l)
                        .filter(|&u| laws[u][ids[u]].is_failure())
                        .fold(0u32, |acc, u| acc | (1 << u))
                })
            })
            .filter(|&v| v != 0)
            .collect();
        let counts: BTreeMap<u32, HashMap<(usize, u64), u32>> = patterns
            .iter()
            .map(|&v| {
                let mut c: HashMap<(usize, u64), u32> = HashMap::new();
                for (idx, &out) in table.iter().enumerate() {
                    let free: usize = (0..l)
                        .filter(|u| v & (1 << u) != 0)
                        .map(|u| (idx / bin_strides[u]) % bins[u] * bin_strides[u])
                        .sum();
                    *c.entry((idx - free, out)).or_insert(0) += 1;
                }
                (v, c)
            })
            .collect();
        let correct = chunked_sum(total_x, |xi| {
            let (pr, ids, phi) = seq_of(xi);
            if pr == 0.0 {
                return 0.0;
            }
            let mut pattern = 0u32;
            let mut spread = 1.0;
            let mut supports: Vec<&[(usize, f64)]> = Vec::with_capacity(l);
            for u in 0..l {
                match &laws[u][ids[u]] {
                    BinLaw::Matched(v) => supports.push(v),
                    BinLaw::Uniform(b) => {
                        pattern |= 1 << u;
                        spread /= *b as f64;
                        supports.push(&[(0, 1.0)]);
                    }
                }
            }
            let mut acc = 0.0;
            let mut stack = vec![(0usize, 0usize, 1.0f64)];
            while let Some((depth, key, w)) = stack.pop() {
                if depth == l {
                    let hits = if pattern == 0 {
                        f64::from(u8::from(table[key] == phi))
                    } else {
                        f64::from(counts[&pattern].get(&(key, phi)).copied().unwrap_or(0)) * spread
                    };
                    acc += w * hits;
                    continue;
                }
                for &(m, q) in supports[depth] {
                    stack.push((depth + 1, key + m * bin_strides[depth], w * q));
                }
            }
            pr * acc
        });
        let exact_error_prob = (1.0 - correct).clamp(0.0, 1.0);

        // H(M | X) = sum_l sum_{x_l} p(x_l) H(M_l | x_l).
        let h_m_given_x: f64 = (0..l)
            .map(|u| {
                laws[u]
                    .iter()
                    .zip(&seq_probs[u])
                    .map(|(law, pr)| pr * law.entropy())
                    .sum::<f64>()
            })
            .sum();
        let law_table = LawTable {
            laws: &laws,
            bins: &bins,
        };
        let conditional_entropy = |key: &dyn Fn(&[usize], u64) -> u64| -> f64 {
            let mut groups: BTreeMap<u64, Vec<Component>> = BTreeMap::new();
            for xi in 0..total_x {
                let (pr, ids, phi) = seq_of(xi);
                if pr > 0.0 {
                    groups.entry(key(&ids, phi)).or_default().push((pr, ids));
                }
            }
            let groups: Vec<Vec<Component>> = groups.into_values().collect();
            let parts: Vec<f64> = groups
                .par_iter()
                .map(|comps| {
                    let mass: f64 = comps.iter().map(|c| c.0).sum();
                    let normalized: Vec<Component> =
                        comps.iter().map(|(w, ids)| (w / mass, ids.clone())).collect();
                    mass * mixture_entropy(&normalized, &law_table)
                })
                .collect();
            parts.iter().sum()
        };

        let h_m_given_f = conditional_entropy(&|_, phi| phi);
        let leakage_fusion = ((h_m_given_f - h_m_given_x) / n as f64).max(0.0);
        let leakage_colluders = family
            .sets()
            .iter()
            .map(|&a| {
                let members: Vec<usize> = a.iter().collect();
                let h = conditional_entropy(&|ids, _| {
                    members
                        .iter()
                        .fold(0u64, |acc, &u| acc * x_sizes[u].pow(n as u32) as u64 + ids[u] as u64)
                });
                (a, ((h - h_m_given_x) / n as f64).max(0.0))
            })
            .collect();

        Ok(SimResult {
            exact_error_prob,
            leakage_fusion,
            leakage_colluders,
            diagnostics: Diagnostics {
                encoder_failure,
                decode_no_candidate: no_cand,
                decode_ambiguous: ambiguous,
                bin_tuples,
            },
        })
    }

    /// Decoder output index for every bin tuple (last user fastest), with
    /// counts of no-candidate and ambiguous tuples.
    fn decode_table(&self, bins: &[usize]) -> (Vec<u64>, u64, u64) {
        let l = bins.len();
        let tail: usize = bins[1..].iter().product();
        let blocks: Vec<(Vec<u64>, u64, u64)> = (0..bins[0])
            .into_par_iter()
            .map(|m0| {
                let mut out = Vec::with_capacity(tail);
                let mut counts = (0u64, 0u64);
                let mut prefix = Vec::with_capacity(l);
                self.fill(bins, m0, 0, &mut prefix, &mut out, &mut counts);
                (out, counts.0, counts.1)
            })
            .collect();
        let mut table = Vec::with_capacity(bins[0] * tail);
        let (mut none, mut amb) = (0, 0);
        for (t, a, b) in blocks {
            table.extend(t);
            none += a;
            amb += b;
        }
        (table, none, amb)
    }

    fn fill(
        &self,
        bins: &[usize],
        m: usize,
        stage: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<u64>,
        counts: &mut (u64, u64),
    ) {
        let rest: usize = bins[stage + 1..].iter().product();
        match self.decode_stage(stage, prefix, m) {
            Ok(w) => {
                prefix.push(w);
                if stage + 1 == bins.len() {
                    out.push(self.output_index(self.estimate(prefix)));
                } else {
                    for next in 0..bins[stage + 1] {
                        self.fill(bins, next, stage + 1, prefix, out, counts);
                    }
                }
                prefix.pop();
            }
            Err(e) => {
                let code = match e {
                    DecodeOutcome::Ambiguous { .. } => {
                        counts.1 += rest as u64;
                        AMBIGUOUS
                    }
                    _ => {
                        counts.0 += rest as u64;
                        NO_CANDIDATE
                    }
                };
                out.extend(std::iter::repeat_n(code, rest));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::CodebookKind;

    fn xor() -> FunctionSpec {
        FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap()
    }

    fn ids() -> Vec<Channel> {
        vec![Channel::identity(2).unwrap(), Channel::identity(2).unwrap()]
    }

    fn fam() -> CollusionFamily {
        CollusionFamily::from_lists(2, &[vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn single_bin_leaks_nothing() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let p = SchemeParams {
            n: 3,
            codewords: vec![6, 6],
            bins: vec![1, 1],
            epsilons: vec![0.3, 0.6, 0.9],
            master_seed: 5,
            codebook: CodebookKind::Random,
        };
        let r = exact_evaluate(&px, &ids(), &xor(), &fam(), &p, 1 << 20).unwrap();
        assert!(r.leakage_fusion.abs() < 1e-12);
        assert!(r.leakage_colluders.iter().all(|(_, v)| v.abs() < 1e-12));
    }

    #[test]
    fn exhaustive_identity_codebook() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let n = 3;
        let p = SchemeParams {
            n,
            codewords: vec![8, 8],
            bins: vec![8, 8],
            // Loose enough that every sequence is typical.
            epsilons: vec![1.0, 2.0, 3.0],
            master_seed: 0,
            codebook: CodebookKind::Exhaustive,
        };
        let r = exact_evaluate(&px, &ids(), &xor(), &fam(), &p, 1 << 20).unwrap();
        assert_eq!(r.exact_error_prob, 0.0);
        // M reveals X, so the leakage is H(X_L | F) = 1 bit per symbol.
        assert!((r.leakage_fusion - 1.0).abs() < 1e-9);
        // Colluder 1 learns X_2 entirely: H(X_2) = 1.
        assert!(r.leakage_colluders.iter().all(|(_, v)| (v - 1.0).abs() < 1e-9));
        assert_eq!(r.diagnostics.encoder_failure, vec![0.0, 0.0]);
    }

    #[test]
    fn budget_refusal_states_requirement() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let p = SchemeParams {
            n: 4,
            codewords: vec![16, 16],
            bins: vec![16, 16],
            epsilons: vec![0.1, 0.2, 0.3],
            master_seed: 0,
            codebook: CodebookKind::Random,
        };
        match exact_evaluate(&px, &ids(), &xor(), &fam(), &p, 1000) {
            Err(SimError::Budget { required, limit }) => {
                assert_eq!(required, 256 * 256);
                assert_eq!(limit, 1000);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chunked_sum_is_ordered() {
        let a = chunked_sum(1000, |i| 1.0 / (i as f64 + 1.0));
        let b: f64 = (0..1000usize.div_ceil(CHUNK))
            .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(1000)).map(|i| 1.0 / (i as f64 + 1.0)).sum::<f64>())
            .sum();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

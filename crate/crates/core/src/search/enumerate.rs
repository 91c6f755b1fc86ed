use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use super::{SearchConfig, SearchError};
use crate::prob::{Channel, FunctionSpec, JointPmf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelTag {
    Deterministic,
    QuantizedStochastic,
}

/// One auxiliary channel per contributing user. In the designated-receiver
/// variant the receiver is omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTuple {
    pub channels: Vec<Channel>,
    pub tag: ChannelTag,
}

#[derive(Debug, Clone)]
pub struct ChannelEnumeration {
    pub tuples: Vec<ChannelTuple>,
    /// Set when any cap in the config stopped enumeration early.
    pub truncated: bool,
    /// Candidate tuples examined (decodable or not).
    pub examined: usize,
}

/// A per-user candidate channel with its row-confusability relation.
#[derive(Debug, Clone)]
struct Candidate {
    channel: Channel,
    deterministic: bool,
    /// `confusable[a * n + b]`: rows `a` and `b` share an output symbol.
    confusable: Vec<bool>,
}

impl Candidate {
    fn from_columns(cols: &[Vec<u32>], n: usize, q: u32) -> Result<Self, SearchError> {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|x| cols.iter().map(|c| f64::from(c[x]) / f64::from(q)).collect())
            .collect();
        let channel = Channel::new(rows)?;
        let deterministic = cols.iter().all(|c| c.iter().all(|&v| v == 0 || v == q));
        let mut confusable = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                confusable[a * n + b] = cols.iter().any(|c| c[a] > 0 && c[b] > 0);
            }
        }
        Ok(Self {
            channel,
            deterministic,
            confusable,
        })
    }
}

/// Drops unused outputs and orders columns so relabelings of `U` coincide.
fn canonical(mut cols: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    cols.retain(|c| c.iter().any(|&v| v > 0));
    cols.sort_by(|a, b| b.cmp(a));
    cols
}

/// Compositions of `q` into `k` non-negative parts, in lexicographic order.
fn compositions(q: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![q]];
    }
    (0..=q)
        .flat_map(|first| {
            compositions(q - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Candidate channels for one input alphabet of size `n`, with `|U| <= n`.
fn user_candidates(n: usize, cfg: &SearchConfig) -> Result<(Vec<Candidate>, bool), SearchError> {
    let q = cfg.quanta()?;
    let row_choices: Vec<Vec<u32>> = if q == 1 {
        (0..n)
            .map(|u| (0..n).map(|k| u32::from(k == u)).collect())
            .collect()
    } else {
        compositions(q, n)
    };
    let mut raw = (0..n).map(|_| row_choices.iter()).multi_cartesian_product();
    // Keyed by canonical form when deduplicating, so output order does not
    // depend on the raw scan order.
    let mut unique = BTreeMap::new();
    let mut out = Vec::new();
    let mut truncated = false;
    let mut examined = 0usize;
    loop {
        if examined == cfg.max_tuples {
            truncated = raw.next().is_some();
            break;
        }
        let Some(rows) = raw.next() else { break };
        examined += 1;
        let cols: Vec<Vec<u32>> = (0..n).map(|k| rows.iter().map(|r| r[k]).collect()).collect();
        if cfg.dedupe {
            let key = canonical(cols);
            if !unique.contains_key(&key) {
                let c = Candidate::from_columns(&key, n, q)?;
                unique.insert(key, c);
            }
        } else {
            out.push(Candidate::from_columns(&cols, n, q)?);
        }
    }
    if cfg.dedupe {
        out = unique.into_values().collect();
    }
    Ok((out, truncated))
}

/// Enumerates auxiliary channel tuples that make `F` exactly decodable.
///
/// With `receiver = Some(l0)` the receiver's input is available to the
/// decoder and no channel is enumerated for it.
pub fn enumerate_channels(
    p_x: &JointPmf,
    f: &FunctionSpec,
    cfg: &SearchConfig,
    receiver: Option<usize>,
) -> Result<ChannelEnumeration, SearchError> {
    cfg.validate()?;
    let sizes = p_x.sizes();
    let l = sizes.len();
    if f.arity() != l || f.domain().iter().map(|a| a.size()).ne(sizes.iter().copied()) {
        return Err(SearchError::DimensionMismatch(
            "function domain does not match the input alphabets".into(),
        ));
    }
    if let Some(r) = receiver {
        if r >= l {
            return Err(SearchError::DimensionMismatch(format!("receiver {r} outside 0..{l}")));
        }
    }

    let mut truncated = false;
    let mut per_user: Vec<Vec<Candidate>> = Vec::with_capacity(l);
    for (u, &n) in sizes.iter().enumerate() {
        if Some(u) == receiver {
            // The decoder sees X_{l0} itself.
            let id = Candidate::from_columns(
                &(0..n).map(|k| (0..n).map(|x| u32::from(x == k)).collect()).collect::<Vec<_>>(),
                n,
                1,
            )?;
            per_user.push(vec![id]);
            continue;
        }
        let (c, t) = user_candidates(n, cfg)?;
        truncated |= t;
        per_user.push(c);
    }

    // Pairs of positive-mass inputs with different function values.
    let support: Vec<usize> = (0..p_x.len()).filter(|&i| p_x.probs()[i] > 0.0).collect();
    let decoded: Vec<Vec<usize>> = support.iter().map(|&i| p_x.decode(i)).collect();
    let mut pairs = Vec::new();
    for a in 0..support.len() {
        for b in a + 1..support.len() {
            if f.eval_index(support[a]) != f.eval_index(support[b]) {
                pairs.push((a, b));
            }
        }
    }

    let mut tuples = Vec::new();
    let mut examined = 0usize;
    let mut it = per_user.iter().map(|c| c.iter()).multi_cartesian_product();
    loop {
        if examined == cfg.max_tuples {
            truncated |= it.next().is_some();
            break;
        }
        let Some(tuple) = it.next() else { break };
        examined += 1;
        // Exact decodability: every confusable pair is separated by some user.
        let ok = pairs.iter().all(|&(a, b)| {
            (0..l).any(|u| {
                let n = sizes[u];
                !tuple[u].confusable[decoded[a][u] * n + decoded[b][u]]
            })
        });
        if !ok {
            continue;
        }
        let contributing: Vec<&Candidate> = tuple
            .iter()
            .enumerate()
            .filter(|(u, _)| Some(*u) != receiver)
            .map(|(_, c)| *c)
            .collect();
        let tag = if contributing.iter().all(|c| c.deterministic) {
            ChannelTag::Deterministic
        } else {
            ChannelTag::QuantizedStochastic
        };
        tuples.push(ChannelTuple {
            channels: contributing.iter().map(|c| c.channel.clone()).collect(),
            tag,
        });
    }
    Ok(ChannelEnumeration {
        tuples,
        truncated,
        examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::AuxDistribution;
    use crate::search::SearchMode;

    fn xor() -> FunctionSpec {
        FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap()
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(8, 2).len(), 9);
        assert_eq!(compositions(8, 3).len(), 45);
        assert!(compositions(4, 3).iter().all(|c| c.iter().sum::<u32>() == 4));
    }

    #[test]
    fn deterministic_candidates_are_partitions() {
        let cfg = SearchConfig::default();
        // Bell numbers: set partitions of 1..=4 elements.
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15)] {
            let (c, t) = user_candidates(n, &cfg).unwrap();
            assert!(!t);
            assert_eq!(c.len(), bell);
            assert!(c.iter().all(|c| c.deterministic && c.channel.output().size() <= n));
        }
        let raw = SearchConfig {
            dedupe: false,
            ..cfg
        };
        assert_eq!(user_candidates(3, &raw).unwrap().0.len(), 27);
    }

    #[test]
    fn xor_tuples() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let e = enumerate_channels(&px, &xor(), &SearchConfig::default(), None).unwrap();
        assert_eq!(e.tuples.len(), 1);
        let id = Channel::identity(2).unwrap();
        assert_eq!(e.tuples[0].channels, vec![id.clone(), id]);

        let raw = SearchConfig {
            dedupe: false,
            ..SearchConfig::default()
        };
        let e = enumerate_channels(&px, &xor(), &raw, None).unwrap();
        // Both users must be injective relabelings of a bit.
        assert_eq!(e.tuples.len(), 4);
        assert_eq!(e.examined, 16);
    }

    #[test]
    fn constant_function_admits_constant_channels() {
        let px = JointPmf::uniform(&[3]).unwrap();
        let f = FunctionSpec::from_fn(&[3], 1, |_| 0).unwrap();
        let e = enumerate_channels(&px, &f, &SearchConfig::default(), None).unwrap();
        assert_eq!(e.tuples.len(), 5);
        assert!(e.tuples.iter().any(|t| t.channels[0] == Channel::constant(3).unwrap()));
    }

    #[test]
    fn parity_includes_mod_two_map() {
        let px = JointPmf::uniform(&[4]).unwrap();
        let f = FunctionSpec::from_fn(&[4], 2, |x| x[0] % 2).unwrap();
        let e = enumerate_channels(&px, &f, &SearchConfig::default(), None).unwrap();
        let m2 = Channel::deterministic(&[0, 1, 0, 1], 2).unwrap();
        assert!(e.tuples.iter().any(|t| t.channels[0] == m2));
    }

    #[test]
    fn fast_check_agrees_with_entropy_check() {
        let px = JointPmf::product(&[vec![0.5, 0.3, 0.2], vec![0.6, 0.4]]).unwrap();
        let f = FunctionSpec::from_fn(&[3, 2], 3, |x| (x[0] + x[1]) % 3).unwrap();
        let cfg = SearchConfig {
            mode: SearchMode::Grid,
            grid_step: 0.5,
            dedupe: false,
            max_tuples: 1_000_000,
        };
        let all = {
            let (a, _) = user_candidates(3, &cfg).unwrap();
            let (b, _) = user_candidates(2, &cfg).unwrap();
            (a, b)
        };
        let e = enumerate_channels(&px, &f, &cfg, None).unwrap();
        let mut accepted = 0;
        for a in &all.0 {
            for b in &all.1 {
                let ch = [a.channel.clone(), b.channel.clone()];
                let d = AuxDistribution::from_channels(&px, &ch, &f).unwrap();
                if d.check_decodable(1e-12).is_ok() {
                    accepted += 1;
                    assert!(e.tuples.iter().any(|t| t.channels == ch));
                }
            }
        }
        assert_eq!(accepted, e.tuples.len());
    }

    #[test]
    fn truncation_is_flagged() {
        let px = JointPmf::uniform(&[3, 3]).unwrap();
        let f = FunctionSpec::from_fn(&[3, 3], 1, |_| 0).unwrap();
        let cfg = SearchConfig {
            max_tuples: 7,
            ..SearchConfig::default()
        };
        let e = enumerate_channels(&px, &f, &cfg, None).unwrap();
        assert!(e.truncated);
        assert_eq!(e.examined, 7);
    }

    #[test]
    fn designated_receiver_skips_its_channel() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let e = enumerate_channels(&px, &xor(), &SearchConfig::default(), Some(1)).unwrap();
        assert_eq!(e.tuples.len(), 1);
        assert_eq!(e.tuples[0].channels, vec![Channel::identity(2).unwrap()]);
    }

    #[test]
    fn invalid_configs() {
        for step in [0.0, 0.6, 0.3] {
            let cfg = SearchConfig {
                mode: SearchMode::Grid,
                grid_step: step,
                ..SearchConfig::default()
            };
            assert!(cfg.validate().is_err(), "{step}");
        }
    }
}

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::scheme::{BinLaw, DecodeOutcome, Scheme};
use super::SimError;
use crate::prob::FunctionSpec;

const TRIALS_PER_CHUNK: u64 = 256;
const WILSON_Z: f64 = 1.959964;

/// Monte-Carlo error probability with a 95% Wilson score interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub errors: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

fn wilson(errors: u64, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let p = errors as f64 / t;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Samples inputs and encoder choices for block lengths too large to
/// enumerate. Trials are split into fixed chunks, each with its own
/// ChaCha stream under `seed`, so the result ignores the thread count.
pub fn estimate_error(scheme: &Scheme, f: &FunctionSpec, trials: u64, seed: u64) -> Result<ErrorEstimate, SimError> {
    if trials == 0 {
        return Err(SimError::InvalidParams("trials must be positive".into()));
    }
    let p_x = scheme.p_x();
    let inputs = WeightedIndex::new(p_x.probs())
        .map_err(|e| SimError::InvalidParams(format!("bad input pmf: {e}")))?;
    let coords: Vec<Vec<usize>> = (0..p_x.len()).map(|s| p_x.decode(s)).collect();
    let fvals: Vec<usize> = coords.iter().map(|c| f.eval(c)).collect();
    let n = scheme.params().n;
    let l = scheme.users();

    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((1 << 62) | c);
            let count = TRIALS_PER_CHUNK.min(trials - c * TRIALS_PER_CHUNK);
            let mut errs = 0u64;
            for _ in 0..count {
                let joint: Vec<usize> = (0..n).map(|_| inputs.sample(&mut rng)).collect();
                let bins: Vec<usize> = (0..l)
                    .map(|u| {
                        let x: Vec<u8> = joint.iter().map(|&s| coords[s][u] as u8).collect();
                        match scheme.encoder_distribution(u, &x) {
                            BinLaw::Uniform(b) => rng.random_range(0..b),
                            BinLaw::Matched(v) => {
                                let w = WeightedIndex::new(v.iter().map(|(_, p)| *p))
                                    .expect("matched law has positive mass");
                                v[w.sample(&mut rng)].0
                            }
                        }
                    })
                    .collect();
                let ok = match scheme.decode(&bins) {
                    DecodeOutcome::Decoded { output, .. } => {
                        output.iter().zip(&joint).all(|(&o, &s)| o == fvals[s])
                    }
                    _ => false,
                };
                errs += u64::from(!ok);
            }
            errs
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let (wilson_low, wilson_high) = wilson(errors, trials);
    Ok(ErrorEstimate {
        trials,
        errors,
        estimate: errors as f64 / trials as f64,
        wilson_low,
        wilson_high,
    })
}

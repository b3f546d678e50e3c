//! Families of swap specs used for exhaustive and randomized verification.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::MAX_DENSE_QUBITS;
use crate::error::{Error, Result};
use crate::label::{enumerate_basis, enumerate_sghz, GhzLabel};
use crate::swap::SwapSpec;

/// All 16 ordered pairs of Bell states.
pub fn bell_pairs() -> Vec<SwapSpec> {
    let bell = enumerate_basis(2).expect("m = 2 is valid");
    bell.iter()
        .flat_map(|&a| bell.iter().map(move |&b| (a, b)))
        .map(|(a, b)| SwapSpec::half_cut(vec![a, b]).expect("Bell pair is a valid spec"))
        .collect()
}

/// Every half-cut spec whose `h`-th state ranges over all SGHZ labels of
/// size `sizes[h]`.
pub fn sghz_products(sizes: &[usize]) -> Result<Vec<SwapSpec>> {
    if sizes.len() < 2 {
        return Err(Error::InvalidArgument("need at least two states".into()));
    }
    let total: usize = sizes.iter().sum();
    if total > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit {
            qubits: total,
            max: MAX_DENSE_QUBITS,
        });
    }
    let families = sizes
        .iter()
        .map(|&m| {
            Ok(enumerate_sghz(m)?
                .into_iter()
                .map(|s| s.label())
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<Vec<GhzLabel>>>>()?;
    let mut combos: Vec<Vec<GhzLabel>> = vec![Vec::new()];
    for family in &families {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                family.iter().map(move |&l| {
                    let mut next = prefix.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    combos.into_iter().map(SwapSpec::half_cut).collect()
}

/// All ordered SGHZ pairs of sizes `m1` and `m2`.
pub fn sghz_pairs(m1: usize, m2: usize) -> Result<Vec<SwapSpec>> {
    sghz_products(&[m1, m2])
}

/// `n` states of `m` qubits each, all SGHZ label combinations.
pub fn sghz_uniform(n: usize, m: usize) -> Result<Vec<SwapSpec>> {
    sghz_products(&vec![m; n])
}

/// Draw one SGHZ label of size `m` uniformly.
pub fn random_sghz<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<GhzLabel> {
    let family = enumerate_sghz(m)?;
    Ok(family
        .choose(rng)
        .expect("SGHZ family is never empty")
        .label())
}

/// `count` random half-cut SGHZ specs with 2 to 4 states of size 2 or 4 and
/// at most `max_qubits` qubits in total.
pub fn random_specs(count: usize, seed: u64, max_qubits: usize) -> Result<Vec<SwapSpec>> {
    if max_qubits < 4 {
        return Err(Error::InvalidArgument(
            "random specs need room for at least 4 qubits".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=4);
        let sizes: Vec<usize> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { 2 } else { 4 })
            .collect();
        if sizes.iter().sum::<usize>() > max_qubits {
            continue;
        }
        let states = sizes
            .iter()
            .map(|&m| random_sghz(m, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        out.push(SwapSpec::half_cut(states)?);
    }
    Ok(out)
}

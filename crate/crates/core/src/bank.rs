//! Deterministic families of test functions for probes and lower-bound searches.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::CharacterSystem;
use crate::error::Result;
use crate::field::{CosetIndex, FqElem, LocalField};
use crate::function::SampledFunction;
use crate::weights::power_function;

#[derive(Debug, Clone)]
pub struct BankEntry {
    pub label: String,
    pub f: SampledFunction,
}

/// Random complex cell values with dyadic entries in [-1, 1]; exact in binary64.
pub fn random_function(field: &LocalField, k: u32, seed: u64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = field.cells(k)?;
    let values = (0..n)
        .map(|_| {
            Complex64::new(
                rng.random_range(-64i32..=64) as f64 / 64.0,
                rng.random_range(-64i32..=64) as f64 / 64.0,
            )
        })
        .collect();
    SampledFunction::new(field, k, values)
}

/// Real random cell values with dyadic entries in [-1, 1].
pub fn random_real_function(field: &LocalField, k: u32, seed: u64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = field.cells(k)?;
    let values = (0..n)
        .map(|_| rng.random_range(-64i32..=64) as f64 / 64.0)
        .collect();
    SampledFunction::from_real(field, k, values)
}

/// Characters, ball indicators, power functions and seeded random functions at `base`.
///
/// Members are built at level `base` and lifted to `level`, so the same bank can be
/// compared across resolutions.
pub fn test_bank(
    field: &LocalField,
    base: u32,
    level: u32,
    seed: u64,
    n_random: usize,
) -> Result<Vec<BankEntry>> {
    let mut out = Vec::new();
    let cs = CharacterSystem::new(field, base)?;
    let n_chars = cs.size().min(8);
    for n in 1..n_chars {
        let vals = (0..cs.size()).map(|j| cs.value(n, j)).collect::<Result<_>>()?;
        out.push(BankEntry {
            label: format!("chi_{n}"),
            f: SampledFunction::new(field, base, vals)?,
        });
    }
    for j in 0..=base {
        let zero = CosetIndex::new(field, vec![FqElem::ZERO; j as usize])?;
        out.push(BankEntry {
            label: format!("1_P^{j}"),
            f: SampledFunction::indicator(field, base, &zero)?,
        });
        if j >= 1 {
            let mut word = vec![FqElem::ZERO; j as usize];
            word[j as usize - 1] = FqElem::ONE;
            out.push(BankEntry {
                label: format!("1_(pi^{}+P^{j})", j - 1),
                f: SampledFunction::indicator(field, base, &CosetIndex::new(field, word)?)?,
            });
        }
    }
    for alpha in [-0.5, 0.5, 1.0] {
        out.push(BankEntry {
            label: format!("|x|^{alpha}"),
            f: power_function(field, alpha, base)?,
        });
    }
    for i in 0..n_random {
        out.push(BankEntry {
            label: format!("random_{i}"),
            f: random_function(field, base, seed.wrapping_add(i as u64))?,
        });
    }
    out.into_iter()
        .map(|e| {
            Ok(BankEntry {
                label: e.label,
                f: e.f.lift(level)?,
            })
        })
        .collect()
}

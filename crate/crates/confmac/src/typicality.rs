//! Typed sequences and typical sets, with exact small-instance
//! computations: the atypical mass by dynamic programming over type
//! classes, and conditionally typical set cardinalities by enumeration.
//!
//! Exactness is guarded by explicit instance-size limits; larger
//! instances are rejected rather than silently approximated.

use crate::error::{Error, Result};
use crate::prob::{Distribution, Kernel, ZERO_MASS};

/// Empirical symbol counts of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVector {
    pub counts: Vec<u64>,
    pub n: u64,
}

/// Counts symbol occurrences; symbols outside the alphabet are an error.
pub fn empirical_type(word: &[u8], alphabet: usize) -> Result<TypeVector> {
    let mut counts = vec![0u64; alphabet];
    for (pos, &s) in word.iter().enumerate() {
        if s as usize >= alphabet {
            return Err(Error::Domain(format!(
                "symbol {s} at position {pos} outside alphabet of size {alphabet}"
            )));
        }
        counts[s as usize] += 1;
    }
    Ok(TypeVector { counts, n: word.len() as u64 })
}

/// A typical-set specification: reference distribution, slack, length.
#[derive(Debug, Clone)]
pub struct TypicalSpec {
    pub p: Distribution,
    pub delta: f64,
    pub n: usize,
}

/// Whether the word's type is within `delta` of `p` in every coordinate
/// and puts no mass where `p` has none. The comparison is `<=`, so exact
/// boundary deviations count as typical.
pub fn is_typical(word: &[u8], spec: &TypicalSpec) -> Result<bool> {
    if word.len() != spec.n {
        return Err(Error::Config(format!(
            "word length {} does not match spec length {}",
            word.len(),
            spec.n
        )));
    }
    let t = empirical_type(word, spec.p.len())?;
    Ok(type_is_typical(&t.counts, spec))
}

fn type_is_typical(counts: &[u64], spec: &TypicalSpec) -> bool {
    let n = spec.n as f64;
    for (s, &c) in counts.iter().enumerate() {
        let p = spec.p.mass(s);
        if p <= ZERO_MASS {
            if c > 0 {
                return false;
            }
        } else if (c as f64 - n * p).abs() > spec.delta * n + 1e-9 {
            return false;
        }
    }
    true
}

/// Instance-size guards for the exact computations.
const MAX_EXACT_ALPHABET: usize = 5;
const MAX_EXACT_N: usize = 60;

/// Exact probability that an i.i.d. word falls outside the typical set,
/// by multinomial summation over all non-typical type classes.
/// Guarded to alphabets of at most 5 symbols and lengths up to 60.
pub fn atypical_mass_exact(spec: &TypicalSpec) -> Result<f64> {
    let k = spec.p.len();
    if k > MAX_EXACT_ALPHABET || spec.n > MAX_EXACT_N {
        return Err(Error::Capacity(format!(
            "exact atypical mass limited to alphabet <= {MAX_EXACT_ALPHABET}, n <= {MAX_EXACT_N}; got {k}, {}",
            spec.n
        )));
    }
    // ln-factorial table
    let mut lnfact = vec![0.0f64; spec.n + 1];
    for i in 1..=spec.n {
        lnfact[i] = lnfact[i - 1] + (i as f64).ln();
    }
    let mut mass = 0.0;
    let mut counts = vec![0u64; k];
    // lexicographic enumeration of compositions of n into k parts
    fn walk(
        idx: usize,
        remaining: u64,
        counts: &mut Vec<u64>,
        spec: &TypicalSpec,
        lnfact: &[f64],
        mass: &mut f64,
    ) {
        if idx == counts.len() - 1 {
            counts[idx] = remaining;
            if !type_is_typical(counts, spec) {
                let mut lp = lnfact[spec.n];
                let mut possible = true;
                for (s, &c) in counts.iter().enumerate() {
                    let p = spec.p.mass(s);
                    if c > 0 {
                        if p <= ZERO_MASS {
                            possible = false;
                            break;
                        }
                        lp -= lnfact[c as usize];
                        lp += c as f64 * p.ln();
                    }
                }
                if possible {
                    *mass += lp.exp();
                }
            }
            return;
        }
        for c in 0..=remaining {
            counts[idx] = c;
            walk(idx + 1, remaining - c, counts, spec, lnfact, mass);
        }
    }
    walk(0, spec.n as u64, &mut counts, spec, &lnfact, &mut mass);
    Ok(mass.min(1.0))
}

const MAX_ENUM_ALPHABET: usize = 3;
const MAX_ENUM_N: usize = 12;

/// Exact cardinality of the union over a kernel list of the sets of
/// output words jointly typical with `x_word` (each kernel contributes
/// the words whose pair type is within `delta` of `type(x) * W`).
/// A single-element list gives one conditionally typical set.
/// Guarded to alphabets of at most 3 symbols and lengths up to 12.
pub fn enumerate_conditionally_typical(
    x_word: &[u8],
    kernels: &[Kernel],
    delta: f64,
) -> Result<u64> {
    if kernels.is_empty() {
        return Err(Error::Config("at least one kernel required".into()));
    }
    let n = x_word.len();
    let nx = kernels[0].input_len();
    let ny = kernels[0].output_len();
    if kernels.iter().any(|k| k.input_len() != nx || k.output_len() != ny) {
        return Err(Error::Config("kernels must share alphabets".into()));
    }
    if nx > MAX_ENUM_ALPHABET || ny > MAX_ENUM_ALPHABET || n > MAX_ENUM_N {
        return Err(Error::Capacity(format!(
            "enumeration limited to alphabets <= {MAX_ENUM_ALPHABET}, n <= {MAX_ENUM_N}"
        )));
    }
    let x_type = empirical_type(x_word, nx)?;
    // reference pair laws q_W(a, b) = type_x(a) W(b | a)
    let refs: Vec<Vec<f64>> = kernels
        .iter()
        .map(|w| {
            let mut q = vec![0.0; nx * ny];
            for a in 0..nx {
                let pa = x_type.counts[a] as f64 / n as f64;
                for b in 0..ny {
                    q[a * ny + b] = pa * w.row(a).mass(b);
                }
            }
            q
        })
        .collect();
    let slack = delta * n as f64 + 1e-9;
    let mut count = 0u64;
    let mut y = vec![0u8; n];
    let mut pair_counts = vec![0u64; nx * ny];
    loop {
        pair_counts.iter_mut().for_each(|c| *c = 0);
        for pos in 0..n {
            pair_counts[x_word[pos] as usize * ny + y[pos] as usize] += 1;
        }
        let typical_for_any = refs.iter().any(|q| {
            pair_counts.iter().zip(q.iter()).all(|(&c, &p)| {
                if p <= ZERO_MASS {
                    c == 0
                } else {
                    (c as f64 - n as f64 * p).abs() <= slack
                }
            })
        });
        if typical_for_any {
            count += 1;
        }
        // next word in odometer order
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(count);
            }
            y[pos] += 1;
            if (y[pos] as usize) < ny {
                break;
            }
            y[pos] = 0;
            pos += 1;
        }
    }
}

/// Conditional entropy `H(W | p)` in bits.
pub fn conditional_entropy(w: &Kernel, p: &Distribution) -> f64 {
    (0..w.input_len()).map(|a| p.mass(a) * w.row(a).entropy()).sum()
}

//! Random half-lattice codebooks, the joint-typicality decoder, the
//! conference-derived code, and Monte Carlo error estimation.
//!
//! Codebooks and trials draw from counter-based substreams of one master
//! seed, so parallel and serial runs produce identical results.

use crate::channel::CompoundChannel;
use crate::conference::{split_message, ConferencePlan};
use crate::error::{Error, Result};
use crate::policy::InputPolicy;
use crate::prob::ZERO_MASS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Typicality slack and the CSIT cell structure the decoder unions over.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    pub delta: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { delta: 0.05 }
    }
}

/// A sampled half-lattice codebook: cloud centers `u[i]`, sender-1 words
/// `x[cell1][i][j]` and sender-2 words `y[cell2][i][k]`.
///
/// Sender words are indexed by the CSIT cell of their own side only; the
/// cell lists come from the policy's kernel indexing.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub n: usize,
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    pub u_words: Vec<Vec<u8>>,
    pub x_words: Vec<Vec<Vec<Vec<u8>>>>,
    pub y_words: Vec<Vec<Vec<Vec<u8>>>>,
    pub policy: InputPolicy,
    pub seed: u64,
}

fn substream(seed: u64, purpose: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) ^ index);
    rng
}

/// Draws a codebook: `u[i]` i.i.d. from `p0`, then for every sender-1
/// kernel variant `x[i][j]` conditionally i.i.d. from `p1(.|u[i])`, and
/// symmetrically for sender 2. Deterministic given the seed.
pub fn sample_codebook(
    policy: &InputPolicy,
    n: usize,
    m0: usize,
    m1: usize,
    m2: usize,
    seed: u64,
) -> Codebook {
    assert!(m0 >= 1 && m1 >= 1 && m2 >= 1 && n >= 1);
    let mut rng = substream(seed, 0, 0);
    let u_words: Vec<Vec<u8>> = (0..m0)
        .map(|_| (0..n).map(|_| policy.p0.sample_with(rng.gen()) as u8).collect())
        .collect();
    let x_words: Vec<Vec<Vec<Vec<u8>>>> = policy
        .kernels1()
        .iter()
        .map(|kernel| {
            (0..m0)
                .map(|i| {
                    (0..m1)
                        .map(|_| {
                            (0..n)
                                .map(|pos| {
                                    kernel.row(u_words[i][pos] as usize).sample_with(rng.gen())
                                        as u8
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let y_words: Vec<Vec<Vec<Vec<u8>>>> = policy
        .kernels2()
        .iter()
        .map(|kernel| {
            (0..m0)
                .map(|i| {
                    (0..m2)
                        .map(|_| {
                            (0..n)
                                .map(|pos| {
                                    kernel.row(u_words[i][pos] as usize).sample_with(rng.gen())
                                        as u8
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Codebook { n, m0, m1, m2, u_words, x_words, y_words, policy: policy.clone(), seed }
}

impl Codebook {
    fn x_cell(&self, tau1: usize, tau2: usize) -> usize {
        match self.policy.class {
            crate::policy::PolicyClass::P1 | crate::policy::PolicyClass::P3 => tau1,
            _ => tau1 * self.policy.num_t2() + tau2,
        }
    }

    fn y_cell(&self, tau1: usize, tau2: usize) -> usize {
        match self.policy.class {
            crate::policy::PolicyClass::P1 | crate::policy::PolicyClass::P4 => tau2,
            _ => tau1 * self.policy.num_t2() + tau2,
        }
    }

    pub fn x_word(&self, i: usize, j: usize, tau1: usize, tau2: usize) -> &[u8] {
        &self.x_words[self.x_cell(tau1, tau2)][i][j]
    }

    pub fn y_word(&self, i: usize, k: usize, tau1: usize, tau2: usize) -> &[u8] {
        &self.y_words[self.y_cell(tau1, tau2)][i][k]
    }
}

/// Reference joint laws `p_W(u, x, y, z)` per `(joint cell, state)`,
/// flattened for the typicality tests.
pub struct DecoderTables {
    cells: Vec<(usize, usize, Vec<usize>)>,
    /// One table per (cell index, state-in-cell index).
    tables: Vec<Vec<Vec<f64>>>,
    nu: usize,
    nx: usize,
    ny: usize,
    nz: usize,
    delta: f64,
}

/// Precomputes the reference laws the decoder tests against.
pub fn decoder_tables(
    policy: &InputPolicy,
    channel: &CompoundChannel,
    cfg: &DecoderConfig,
) -> Result<DecoderTables> {
    policy.validate_for(channel)?;
    let (nu, nx, ny, nz) =
        (policy.u_size, channel.x_len(), channel.y_len(), channel.z_len());
    let cells = channel.nonempty_joint_cells();
    let mut tables = Vec::with_capacity(cells.len());
    for (t1, t2, states) in &cells {
        let k1 = policy.kernel1(*t1, *t2);
        let k2 = policy.kernel2(*t1, *t2);
        let mut per_state = Vec::with_capacity(states.len());
        for &s in states {
            let w = channel.state(s);
            let mut table = vec![0.0; nu * nx * ny * nz];
            for u in 0..nu {
                for x in 0..nx {
                    for y in 0..ny {
                        for z in 0..nz {
                            table[((u * nx + x) * ny + y) * nz + z] = policy.p0.mass(u)
                                * k1.row(u).mass(x)
                                * k2.row(u).mass(y)
                                * w.w(x, y, z);
                        }
                    }
                }
            }
            per_state.push(table);
        }
        tables.push(per_state);
    }
    Ok(DecoderTables { cells, tables, nu, nx, ny, nz, delta: cfg.delta })
}

impl DecoderTables {
    /// Whether the quadruple of words is jointly delta-typical for at
    /// least one state of the given cell.
    fn typical_in_cell(
        &self,
        cell_idx: usize,
        u: &[u8],
        x: &[u8],
        y: &[u8],
        z: &[u8],
        counts: &mut [u32],
    ) -> bool {
        counts.iter_mut().for_each(|c| *c = 0);
        let n = z.len();
        for pos in 0..n {
            let idx = ((u[pos] as usize * self.nx + x[pos] as usize) * self.ny
                + y[pos] as usize)
                * self.nz
                + z[pos] as usize;
            counts[idx] += 1;
        }
        let nf = n as f64;
        let slack = self.delta * nf + 1e-9;
        'state: for table in &self.tables[cell_idx] {
            for (idx, &p) in table.iter().enumerate() {
                let c = counts[idx] as f64;
                if p <= ZERO_MASS {
                    if counts[idx] > 0 {
                        continue 'state;
                    }
                } else if (c - nf * p).abs() > slack {
                    continue 'state;
                }
            }
            return true;
        }
        false
    }
}

/// Joint-typicality decoder: returns the message triple `(i, j, k)` iff
/// some CSIT cell makes its quadruple typical for one of the cell's
/// states and no other triple is typical for any cell; `None` otherwise.
pub fn typicality_decode(
    codebook: &Codebook,
    z: &[u8],
    tables: &DecoderTables,
) -> Option<(usize, usize, usize)> {
    if z.len() != codebook.n {
        return None;
    }
    let mut counts = vec![0u32; tables.nu * tables.nx * tables.ny * tables.nz];
    let mut hit: Option<(usize, usize, usize)> = None;
    for i in 0..codebook.m0 {
        for j in 0..codebook.m1 {
            for k in 0..codebook.m2 {
                let mut typical = false;
                for (ci, (t1, t2, _)) in tables.cells.iter().enumerate() {
                    let x = codebook.x_word(i, j, *t1, *t2);
                    let y = codebook.y_word(i, k, *t1, *t2);
                    if tables.typical_in_cell(ci, &codebook.u_words[i], x, y, z, &mut counts) {
                        typical = true;
                        break;
                    }
                }
                if typical {
                    if hit.is_some() {
                        return None; // second hit: uniqueness clause fails
                    }
                    hit = Some((i, j, k));
                }
            }
        }
    }
    hit
}

/// A conference-derived code: every message pair is routed through the
/// one-shot conference onto a common-message codebook whose cloud centers
/// carry the coarse pair `(i1, i2)`.
pub struct ConfCode {
    pub plan: ConferencePlan,
    pub codebook: Codebook,
}

impl ConfCode {
    /// Checks that the plan's layout matches the codebook sizes.
    pub fn new(plan: ConferencePlan, codebook: Codebook) -> Result<Self> {
        if (plan.mu1 * plan.mu2) as usize > codebook.m0 {
            return Err(Error::InfeasiblePlan(format!(
                "coarse pairs {} exceed cloud centers {}",
                plan.mu1 * plan.mu2,
                codebook.m0
            )));
        }
        if plan.m1_cm as usize > codebook.m1 || plan.m2_cm as usize > codebook.m2 {
            return Err(Error::InfeasiblePlan(
                "fine parts exceed private codebook sizes".into(),
            ));
        }
        Ok(Self { plan, codebook })
    }

    /// Common-message triple `(i, j', k')` (0-based) encoding the pair
    /// `(j, k)` (1-based).
    pub fn cm_triple(&self, j: u64, k: u64) -> Result<(usize, usize, usize)> {
        let (i1, jp) = split_message(j, self.plan.mu1, self.plan.xi1)?;
        let (i2, kp) = split_message(k, self.plan.mu2, self.plan.xi2)?;
        let i = (i1 - 1) * self.plan.mu2 + (i2 - 1);
        Ok((i as usize, (jp - 1) as usize, (kp - 1) as usize))
    }

    pub fn x_word(&self, j: u64, k: u64, tau1: usize, tau2: usize) -> Result<&[u8]> {
        let (i, jp, _) = self.cm_triple(j, k)?;
        Ok(self.codebook.x_word(i, jp, tau1, tau2))
    }

    pub fn y_word(&self, j: u64, k: u64, tau1: usize, tau2: usize) -> Result<&[u8]> {
        let (i, _, kp) = self.cm_triple(j, k)?;
        Ok(self.codebook.y_word(i, kp, tau1, tau2))
    }

    /// Exhaustive consistency audit: message/CSIT pairs with the same
    /// conference output use the same codeword (both senders).
    pub fn consistency_audit(&self) -> Result<()> {
        let p = &self.plan;
        let t1s = self.codebook.policy.num_t1();
        let t2s = self.codebook.policy.num_t2();
        for tau1 in 0..t1s {
            for tau2 in 0..t2s {
                for j in 1..=p.m1 {
                    let (_i1, _) = split_message(j, p.mu1, p.xi1)?;
                    for k in 1..=p.m2 {
                        for kp in 1..=p.m2 {
                            let same_g2 = split_message(k, p.mu2, p.xi2)?.0
                                == split_message(kp, p.mu2, p.xi2)?.0;
                            if same_g2
                                && self.x_word(j, k, tau1, tau2)?
                                    != self.x_word(j, kp, tau1, tau2)?
                            {
                                return Err(Error::InfeasiblePlan(format!(
                                    "x codeword differs across k = {k}, {kp} with equal conference output"
                                )));
                            }
                        }
                    }
                }
                for k in 1..=p.m2 {
                    for j in 1..=p.m1 {
                        for jp in 1..=p.m1 {
                            let same_g1 = split_message(j, p.mu1, p.xi1)?.0
                                == split_message(jp, p.mu1, p.xi1)?.0;
                            if same_g1
                                && self.y_word(j, k, tau1, tau2)?
                                    != self.y_word(jp, k, tau1, tau2)?
                            {
                                return Err(Error::InfeasiblePlan(format!(
                                    "y codeword differs across j = {j}, {jp} with equal conference output"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Monte Carlo estimate of one state's average error probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub state: String,
    pub n: usize,
    pub trials: usize,
    pub error: f64,
    /// 95% Wilson-interval half-width.
    pub ci95: f64,
    pub delta: f64,
    pub seed: u64,
}

/// Wilson score interval half-width at 95%.
fn wilson_half_width(errors: usize, trials: usize) -> f64 {
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n)
}

/// Simulates transmission of uniformly drawn message pairs through one
/// channel state and decodes with the joint-typicality decoder. A trial
/// counts as an error when decoding fails or returns any wrong triple.
pub fn simulate_error(
    code: &ConfCode,
    channel: &CompoundChannel,
    state_idx: usize,
    trials: usize,
    seed: u64,
    cfg: &DecoderConfig,
) -> Result<ErrorReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial required".into()));
    }
    if state_idx >= channel.num_states() {
        return Err(Error::Domain(format!("no state {state_idx}")));
    }
    let tables = decoder_tables(&code.codebook.policy, channel, cfg)?;
    let tau1 = channel.t1_of(state_idx);
    let tau2 = channel.t2_of(state_idx);
    let w = channel.state(state_idx);
    let n = code.codebook.n;
    let errors: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, 1, t as u64 + 1);
            let j = rng.gen_range(1..=code.plan.m1);
            let k = rng.gen_range(1..=code.plan.m2);
            let x = code.x_word(j, k, tau1, tau2).expect("message in range");
            let y = code.y_word(j, k, tau1, tau2).expect("message in range");
            let mut z = vec![0u8; n];
            for pos in 0..n {
                let row = w.row(x[pos] as usize, y[pos] as usize);
                let mut acc = 0.0;
                let r: f64 = rng.gen();
                let mut sym = row.len() - 1;
                for (zi, &pz) in row.iter().enumerate() {
                    acc += pz;
                    if r < acc {
                        sym = zi;
                        break;
                    }
                }
                z[pos] = sym as u8;
            }
            let expect = code.cm_triple(j, k).expect("message in range");
            match typicality_decode(&code.codebook, &z, &tables) {
                Some(triple) if triple == expect => 0usize,
                _ => 1usize,
            }
        })
        .sum();
    Ok(ErrorReport {
        state: channel.state(state_idx).name().to_string(),
        n,
        trials,
        error: errors as f64 / trials as f64,
        ci95: wilson_half_width(errors, trials),
        delta: cfg.delta,
        seed,
    })
}

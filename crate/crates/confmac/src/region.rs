//! Capacity-region computation by max-min optimization over input
//! policies: support-function sampling for the common-message and
//! conferencing regions, the full-cooperation sum capacity, and the
//! cooperation thresholds derived from it.
//!
//! Every optimization is a multi-start Nelder-Mead search over
//! unconstrained parameter vectors mapped onto the policy simplices by
//! exponentiation and normalization. Restart initial points come from
//! per-(direction, restart) random substreams of the master seed, so
//! results are bit-identical for a fixed seed regardless of how many
//! worker threads run the restarts.

use crate::channel::CompoundChannel;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NmOptions};
use crate::policy::{InputPolicy, PolicyClass};
use crate::polytope::{min_bounds, polytope_cm, polytope_conf, required_class};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionMode {
    Cm,
    Conf,
}

/// Optimizer configuration. Defaults follow the artifact conventions:
/// 128 quarter-circle directions (CONF) or 256 octant directions (CM),
/// 64 restarts, 2000 iterations, objective tolerance 1e-7.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionConfig {
    pub mode: RegionMode,
    pub c1: f64,
    pub c2: f64,
    pub dirs: usize,
    pub restarts: usize,
    /// Auxiliary alphabet size; defaults to `min(|X||Y|+2, |Z|+3)`.
    pub u_size: Option<usize>,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    /// Extra warm-start policies, e.g. the best policy of a coarser run.
    #[serde(skip)]
    pub extra_inits: Vec<InputPolicy>,
}

impl RegionConfig {
    pub fn conf(c1: f64, c2: f64, seed: u64) -> Self {
        Self {
            mode: RegionMode::Conf,
            c1,
            c2,
            dirs: 128,
            restarts: 64,
            u_size: None,
            seed,
            max_iters: 2000,
            tol: 1e-7,
            extra_inits: Vec::new(),
        }
    }

    pub fn cm(seed: u64) -> Self {
        Self { mode: RegionMode::Cm, dirs: 256, ..Self::conf(0.0, 0.0, seed) }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_dirs(mut self, dirs: usize) -> Self {
        self.dirs = dirs;
        self
    }

    pub fn with_u_size(mut self, u: usize) -> Self {
        self.u_size = Some(u);
        self
    }

    fn resolved_u(&self, c: &CompoundChannel) -> usize {
        self.u_size
            .unwrap_or_else(|| InputPolicy::u_cardinality_bound(c.x_len(), c.y_len(), c.z_len()))
    }
}

/// A sampled description of a capacity region: support values over a fixed
/// direction set plus the rate points and policies that achieved them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateRegion {
    pub dimension: usize,
    /// `(direction, support value)` pairs, in canonical direction order.
    pub support_samples: Vec<(Vec<f64>, f64)>,
    /// `(rate vector, best policy)` per direction.
    pub achieved_points: Vec<(Vec<f64>, InputPolicy)>,
    pub metadata: RegionMeta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionMeta {
    pub channel_hash: u64,
    pub mode: RegionMode,
    pub c1: f64,
    pub c2: f64,
    pub dirs: usize,
    pub restarts: usize,
    pub u_size: usize,
    pub seed: u64,
    /// Per direction: how many restarts ended within 1e-6 of the winner.
    pub restart_agreement: Vec<usize>,
}

impl RateRegion {
    /// Inner-certificate check: every achieved point must lie in its own
    /// recomputed polytope, and no achieved point may beat the recorded
    /// support sample in its direction.
    pub fn validate(&self, channel: &CompoundChannel, c1: f64, c2: f64) -> Result<()> {
        for ((dir, value), (point, policy)) in
            self.support_samples.iter().zip(self.achieved_points.iter())
        {
            let poly = match self.metadata.mode {
                RegionMode::Conf => polytope_conf(policy, channel, c1, c2)?,
                RegionMode::Cm => polytope_cm(policy, channel)?,
            };
            if !poly.contains(point, 1e-9) {
                return Err(Error::Config(format!(
                    "achieved point {point:?} outside its recomputed polytope"
                )));
            }
            let inner: f64 = dir.iter().zip(point.iter()).map(|(g, r)| g * r).sum();
            if inner > value + 1e-9 {
                return Err(Error::Config(format!(
                    "achieved point beats support sample: {inner} > {value}"
                )));
            }
        }
        // every achieved point inside every sampled half-space
        for (dir, value) in &self.support_samples {
            for (point, _) in &self.achieved_points {
                let inner: f64 = dir.iter().zip(point.iter()).map(|(g, r)| g * r).sum();
                if inner > value + 1e-9 {
                    return Err(Error::Config(format!(
                        "achieved point {point:?} outside half-space ({dir:?}, {value})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Support value for the direction closest to `dir` (exact match for
    /// canonical directions).
    pub fn support_in(&self, dir: &[f64]) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for (d, v) in &self.support_samples {
            let dist: f64 = d.iter().zip(dir.iter()).map(|(a, b)| (a - b).powi(2)).sum();
            if dist < best.0 {
                best = (dist, *v);
            }
        }
        best.1
    }
}

/// Largest per-direction absolute support difference between two regions
/// sampled on the same direction set.
pub fn hausdorff_over_samples(a: &RateRegion, b: &RateRegion) -> f64 {
    a.support_samples
        .iter()
        .zip(b.support_samples.iter())
        .map(|((_, va), (_, vb))| (va - vb).abs())
        .fold(0.0, f64::max)
}

/// `dirs` directions spanning the nonnegative quarter circle, endpoints
/// included.
pub fn conf_directions(dirs: usize) -> Vec<Vec<f64>> {
    assert!(dirs >= 2);
    (0..dirs)
        .map(|i| {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (dirs - 1) as f64;
            vec![theta.cos(), theta.sin()]
        })
        .collect()
}

/// Low-discrepancy directions on the nonnegative sphere octant via a
/// Halton (2, 3) sequence in (height, azimuth).
pub fn cm_directions(dirs: usize) -> Vec<Vec<f64>> {
    fn halton(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    (0..dirs)
        .map(|i| {
            let z = halton(i + 1, 2);
            let phi = std::f64::consts::FRAC_PI_2 * halton(i + 1, 3);
            let r = (1.0 - z * z).max(0.0).sqrt();
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn substream(seed: u64, purpose: u64, a: u64, b: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 40) ^ (a << 20) ^ b);
    rng
}

/// Shared machinery for one multi-start maximization over policies.
struct PolicySearch<'a> {
    channel: &'a CompoundChannel,
    class: PolicyClass,
    u_size: usize,
    restarts: usize,
    seed: u64,
    nm: NmOptions,
    extra_inits: Vec<Vec<f64>>,
}

struct SearchOutcome {
    value: f64,
    policy: InputPolicy,
    params: Vec<f64>,
    agreement: usize,
}

impl<'a> PolicySearch<'a> {
    fn param_count(&self) -> usize {
        InputPolicy::param_count(
            self.class,
            self.u_size,
            self.channel.x_len(),
            self.channel.y_len(),
            self.channel.num_t1(),
            self.channel.num_t2(),
        )
    }

    fn policy_of(&self, params: &[f64]) -> InputPolicy {
        InputPolicy::from_params(
            params,
            self.class,
            self.u_size,
            self.channel.x_len(),
            self.channel.y_len(),
            self.channel.num_t1(),
            self.channel.num_t2(),
        )
    }

    /// Maximizes `objective` over policies; deterministic for fixed seed.
    /// `purpose`/`task` index the random substreams.
    fn maximize<F>(&self, objective: F, purpose: u64, task: u64, warm: &[Vec<f64>]) -> SearchOutcome
    where
        F: Fn(&InputPolicy) -> f64 + Sync,
    {
        let dim = self.param_count();
        let inits: Vec<Vec<f64>> = (0..self.restarts)
            .map(|r| {
                if r == 0 {
                    vec![0.0; dim]
                } else if r - 1 < warm.len() {
                    warm[r - 1].clone()
                } else if r - 1 < warm.len() + self.extra_inits.len() {
                    self.extra_inits[r - 1 - warm.len()].clone()
                } else {
                    let mut rng = substream(self.seed, purpose, task, r as u64);
                    (0..dim).map(|_| rng.sample::<f64, _>(rand_distr_standard()) * 2.0).collect()
                }
            })
            .collect();
        let results: Vec<(f64, Vec<f64>)> = inits
            .par_iter()
            .map(|x0| {
                let f = |params: &[f64]| -objective(&self.policy_of(params));
                let (x, fx) = nelder_mead(f, x0, &self.nm);
                (-fx, x)
            })
            .collect();
        let mut best = 0usize;
        for i in 1..results.len() {
            if results[i].0 > results[best].0 {
                best = i;
            }
        }
        let agreement = results.iter().filter(|(v, _)| *v >= results[best].0 - 1e-6).count();
        SearchOutcome {
            value: results[best].0,
            policy: self.policy_of(&results[best].1),
            params: results[best].1.clone(),
            agreement,
        }
    }
}

// Standard normal via Box-Muller on the ChaCha stream; avoids depending on
// rand_distr for one distribution.
fn rand_distr_standard() -> impl rand::distributions::Distribution<f64> {
    struct StdNormal;
    impl rand::distributions::Distribution<f64> for StdNormal {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }
    StdNormal
}

/// Samples the capacity region: for every direction, a multi-start search
/// maximizes the per-policy polytope support.
pub fn optimize_region(channel: &CompoundChannel, cfg: &RegionConfig) -> Result<RateRegion> {
    if channel.num_states() == 0 {
        return Err(Error::Domain("channel has no states".into()));
    }
    let class = match cfg.mode {
        RegionMode::Cm => PolicyClass::P1,
        RegionMode::Conf => required_class(cfg.c1, cfg.c2),
    };
    let u_size = cfg.resolved_u(channel);
    let directions = match cfg.mode {
        RegionMode::Cm => cm_directions(cfg.dirs),
        RegionMode::Conf => conf_directions(cfg.dirs),
    };
    let search = PolicySearch {
        channel,
        class,
        u_size,
        restarts: cfg.restarts,
        seed: cfg.seed,
        nm: NmOptions { max_iters: cfg.max_iters, tol: cfg.tol, step: 0.5 },
        extra_inits: cfg
            .extra_inits
            .iter()
            .filter(|p| {
                p.class == class
                    && p.u_size == u_size
                    && p.num_t1() == channel.num_t1()
                    && p.num_t2() == channel.num_t2()
            })
            .map(|p| p.to_params(channel.x_len(), channel.y_len()))
            .collect(),
    };

    let mut support_samples = Vec::with_capacity(directions.len());
    let mut achieved_points = Vec::with_capacity(directions.len());
    let mut restart_agreement = Vec::with_capacity(directions.len());
    let mut prev_best: Option<Vec<f64>> = None;

    for (di, dir) in directions.iter().enumerate() {
        let objective = |p: &InputPolicy| -> f64 {
            let poly = match cfg.mode {
                RegionMode::Conf => polytope_conf(p, channel, cfg.c1, cfg.c2),
                RegionMode::Cm => polytope_cm(p, channel),
            };
            match poly {
                Ok(poly) => poly.support(dir).unwrap_or(f64::NEG_INFINITY),
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let warm: Vec<Vec<f64>> = prev_best.iter().cloned().collect();
        let out = search.maximize(objective, 0, di as u64, &warm);
        let poly = match cfg.mode {
            RegionMode::Conf => polytope_conf(&out.policy, channel, cfg.c1, cfg.c2)?,
            RegionMode::Cm => polytope_cm(&out.policy, channel)?,
        };
        let point = poly.argmax(dir)?;
        support_samples.push((dir.clone(), out.value));
        achieved_points.push((point, out.policy));
        restart_agreement.push(out.agreement);
        prev_best = Some(out.params);
    }

    // every achieved point is a certified inner point, so each support
    // sample can be raised to the best inner value in its direction; this
    // keeps all points inside all sampled half-spaces
    for (dir, value) in support_samples.iter_mut() {
        for (point, _) in &achieved_points {
            let inner: f64 = dir.iter().zip(point.iter()).map(|(g, r)| g * r).sum();
            if inner > *value {
                *value = inner;
            }
        }
    }

    Ok(RateRegion {
        dimension: directions[0].len(),
        support_samples,
        achieved_points,
        metadata: RegionMeta {
            channel_hash: channel.hash(),
            mode: cfg.mode,
            c1: cfg.c1,
            c2: cfg.c2,
            dirs: cfg.dirs,
            restarts: cfg.restarts,
            u_size,
            seed: cfg.seed,
            restart_agreement,
        },
    })
}

/// Full-cooperation sum capacity: the largest over policies of the
/// smallest over states of `I(Z; X,Y)`. Equals the `(1,1)`-direction
/// support of the conferencing region at very large capacities.
pub fn sum_capacity_full_coop(
    channel: &CompoundChannel,
    cfg: &RegionConfig,
) -> Result<(f64, InputPolicy)> {
    let search = PolicySearch {
        channel,
        class: PolicyClass::P2,
        u_size: cfg.resolved_u(channel),
        restarts: cfg.restarts,
        seed: cfg.seed,
        nm: NmOptions { max_iters: cfg.max_iters, tol: cfg.tol, step: 0.5 },
        extra_inits: Vec::new(),
    };
    let out = search.maximize(
        |p| min_bounds(p, channel).map(|(_, _, _, d)| d).unwrap_or(f64::NEG_INFINITY),
        1,
        0,
        &[],
    );
    Ok((out.value, out.policy))
}

/// Both terms of the minimal-cooperation-sum computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinConfReport {
    /// Full-cooperation sum capacity.
    pub c_inf: f64,
    /// Largest `min I(Z;X,Y|U)` over near-maximizing policies.
    pub constrained_conditional: f64,
    /// `c_inf - constrained_conditional`: the smallest `C1 + C2` that
    /// recovers the full-cooperation sum capacity.
    pub value: f64,
    /// Whether the reported maximizer met the membership tolerance.
    pub feasible: bool,
}

/// Tolerance for membership in the maximizer set of the sum capacity.
pub const EPSILON_M: f64 = 1e-4;

/// Minimal total conferencing capacity recovering the full-cooperation sum
/// capacity: a penalty-constrained multi-start search over policies whose
/// `min I(Z;X,Y)` is within [`EPSILON_M`] of the sum capacity, maximizing
/// `min I(Z;X,Y|U)`.
pub fn min_conf_sum(channel: &CompoundChannel, cfg: &RegionConfig) -> Result<MinConfReport> {
    let (c_inf, best_policy) = sum_capacity_full_coop(channel, cfg)?;
    let search = PolicySearch {
        channel,
        class: PolicyClass::P2,
        u_size: cfg.resolved_u(channel),
        restarts: cfg.restarts,
        seed: cfg.seed ^ 0x5eed_c0de,
        nm: NmOptions { max_iters: cfg.max_iters, tol: cfg.tol, step: 0.5 },
        extra_inits: Vec::new(),
    };
    let threshold = c_inf - EPSILON_M;
    let mut warm = vec![best_policy.to_params(channel.x_len(), channel.y_len())];
    let mut candidates: Vec<(f64, f64)> = Vec::new(); // (min_c, min_d)
    let mut weight = 10.0;
    for stage in 0..5 {
        let objective = |p: &InputPolicy| -> f64 {
            match min_bounds(p, channel) {
                Ok((_, _, c, d)) => c - weight * (threshold - d).max(0.0),
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let out = search.maximize(objective, 2 + stage as u64, 0, &warm);
        let (_, _, c, d) = min_bounds(&out.policy, channel)?;
        candidates.push((c, d));
        warm = vec![out.params];
        weight *= 10.0;
    }
    // the sum-capacity policy itself is always a feasible candidate
    {
        let (_, _, c, d) = min_bounds(&best_policy, channel)?;
        candidates.push((c, d));
    }
    let feasible: Vec<&(f64, f64)> =
        candidates.iter().filter(|(_, d)| *d >= threshold).collect();
    let (constrained, ok) = match feasible.iter().map(|(c, _)| *c).fold(None, |m: Option<f64>, c| {
        Some(m.map_or(c, |x| x.max(c)))
    }) {
        Some(c) => (c, true),
        None => (candidates.iter().map(|(c, _)| *c).fold(0.0, f64::max), false),
    };
    Ok(MinConfReport {
        c_inf,
        constrained_conditional: constrained,
        value: (c_inf - constrained).max(0.0),
        feasible: ok,
    })
}

/// Both terms of each threshold difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdsReport {
    pub c_inf: f64,
    /// Best `min I(Z;X|Y,U)` over policies.
    pub best_conditional_1: f64,
    /// Best `min I(Z;Y|X,U)` over policies.
    pub best_conditional_2: f64,
    pub threshold_1: f64,
    pub threshold_2: f64,
}

/// Sufficient per-user conferencing capacities for the full-cooperation
/// region: `C_inf` minus the best `min I(Z;X|Y,U)` and `min I(Z;Y|X,U)`
/// over all policies, clamped at zero.
pub fn full_region_thresholds(
    channel: &CompoundChannel,
    cfg: &RegionConfig,
) -> Result<ThresholdsReport> {
    let (c_inf, _) = sum_capacity_full_coop(channel, cfg)?;
    let search = PolicySearch {
        channel,
        class: PolicyClass::P2,
        u_size: cfg.resolved_u(channel),
        restarts: cfg.restarts,
        seed: cfg.seed ^ 0x7472_6573,
        nm: NmOptions { max_iters: cfg.max_iters, tol: cfg.tol, step: 0.5 },
        extra_inits: Vec::new(),
    };
    let best_a = search
        .maximize(
            |p| min_bounds(p, channel).map(|(a, _, _, _)| a).unwrap_or(f64::NEG_INFINITY),
            10,
            0,
            &[],
        )
        .value;
    let best_b = search
        .maximize(
            |p| min_bounds(p, channel).map(|(_, b, _, _)| b).unwrap_or(f64::NEG_INFINITY),
            11,
            0,
            &[],
        )
        .value;
    Ok(ThresholdsReport {
        c_inf,
        best_conditional_1: best_a,
        best_conditional_2: best_b,
        threshold_1: (c_inf - best_a).max(0.0),
        threshold_2: (c_inf - best_b).max(0.0),
    })
}

/// Best policy for the total-throughput direction of the conferencing
/// region at capacities `(c1, c2)`: maximizes `min(c + c1 + c2, d)`.
pub fn best_sum_policy(channel: &CompoundChannel, cfg: &RegionConfig) -> Result<(f64, InputPolicy)> {
    let class = required_class(cfg.c1, cfg.c2);
    let search = PolicySearch {
        channel,
        class,
        u_size: cfg.resolved_u(channel),
        restarts: cfg.restarts,
        seed: cfg.seed,
        nm: NmOptions { max_iters: cfg.max_iters, tol: cfg.tol, step: 0.5 },
        extra_inits: Vec::new(),
    };
    let out = search.maximize(
        |p| match min_bounds(p, channel) {
            Ok((_, _, c, d)) => (c + cfg.c1 + cfg.c2).min(d),
            Err(_) => f64::NEG_INFINITY,
        },
        12,
        0,
        &[],
    );
    Ok((out.value, out.policy))
}

/// Support gap certifying strict inclusion: the largest, over the sampled
/// directions, of `h_intersection(d) - h_inner(d)` where the intersection
/// of the regions `a` and `b` is computed exactly from their half-space
/// descriptions. All three regions must share the 2-D direction set.
pub fn intersection_gap(inner: &RateRegion, a: &RateRegion, b: &RateRegion) -> f64 {
    assert_eq!(inner.dimension, 2);
    // half-planes dir . R <= v from both outer regions, plus nonnegativity
    let mut planes: Vec<(f64, f64, f64)> = Vec::new();
    for (d, v) in a.support_samples.iter().chain(b.support_samples.iter()) {
        planes.push((d[0], d[1], *v));
    }
    planes.push((-1.0, 0.0, 0.0));
    planes.push((0.0, -1.0, 0.0));
    // candidate vertices: all pairwise line intersections
    let mut vertices: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for i in 0..planes.len() {
        for j in (i + 1)..planes.len() {
            let (a1, b1, c1) = planes[i];
            let (a2, b2, c2) = planes[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if planes.iter().all(|&(pa, pb, pc)| pa * x + pb * y <= pc + 1e-9) {
                vertices.push((x, y));
            }
        }
    }
    let mut gap: f64 = 0.0;
    for (d, v_inner) in &inner.support_samples {
        let h_cap = vertices
            .iter()
            .map(|&(x, y)| d[0] * x + d[1] * y)
            .fold(0.0, f64::max);
        gap = gap.max(h_cap - v_inner);
    }
    gap
}

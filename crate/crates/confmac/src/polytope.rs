//! Per-policy rate polytopes and their exact support functions.
//!
//! The common-message polytope lives in `(R0, R1, R2)`, the conferencing
//! polytope in `(R1, R2)`. Bounds are already minimized over all channel
//! states consistent with the CSIT cells; identical constraint normals
//! across states make that intersection an entrywise minimum.

use crate::channel::CompoundChannel;
use crate::error::{Error, Result};
use crate::policy::{InputPolicy, PolicyClass};
use crate::prob::build_joint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RatePolytope {
    /// `R1 <= a`, `R2 <= b`, `R1+R2 <= c`, `R0+R1+R2 <= d`, rates >= 0.
    Cm { a: f64, b: f64, c: f64, d: f64 },
    /// `R1 <= r1`, `R2 <= r2`, `R1+R2 <= sum`, rates >= 0.
    Conf { r1: f64, r2: f64, sum: f64 },
}

/// The four per-policy information bounds, minimized over all states in
/// nonempty joint CSIT cells.
pub fn min_bounds(policy: &InputPolicy, channel: &CompoundChannel) -> Result<(f64, f64, f64, f64)> {
    policy.validate_for(channel)?;
    let cells = channel.nonempty_joint_cells();
    if cells.is_empty() {
        return Err(Error::Domain("channel has no states".into()));
    }
    let mut best = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for (t1, t2, states) in cells {
        let k1 = policy.kernel1(t1, t2);
        let k2 = policy.kernel2(t1, t2);
        for s in states {
            let joint = build_joint(&policy.p0, k1, k2, channel.state(s))?;
            let (a, b, c, d) = joint.rate_bounds();
            best.0 = best.0.min(a);
            best.1 = best.1.min(b);
            best.2 = best.2.min(c);
            best.3 = best.3.min(d);
        }
    }
    Ok(best)
}

/// Common-message polytope of a class-P1 policy.
pub fn polytope_cm(policy: &InputPolicy, channel: &CompoundChannel) -> Result<RatePolytope> {
    if policy.class != PolicyClass::P1 {
        return Err(Error::Config(format!(
            "common-message region takes a P1 policy, got {:?}",
            policy.class
        )));
    }
    let (a, b, c, d) = min_bounds(policy, channel)?;
    Ok(RatePolytope::Cm { a, b, c, d })
}

/// Conferencing polytope for capacities `(c1, c2)`.
///
/// The policy class must match the capacity pattern: P2 when both are
/// positive, P3 when `c2 = 0`, P4 when `c1 = 0`, and P1 when both vanish.
pub fn polytope_conf(
    policy: &InputPolicy,
    channel: &CompoundChannel,
    c1: f64,
    c2: f64,
) -> Result<RatePolytope> {
    if c1 < 0.0 || c2 < 0.0 {
        return Err(Error::Domain("conferencing capacities must be nonnegative".into()));
    }
    let required = required_class(c1, c2);
    if policy.class != required {
        return Err(Error::Config(format!(
            "capacities ({c1}, {c2}) require class {required:?}, got {:?}",
            policy.class
        )));
    }
    let (a, b, c, d) = min_bounds(policy, channel)?;
    Ok(RatePolytope::Conf {
        r1: a + c1,
        r2: b + c2,
        sum: (c + c1 + c2).min(d),
    })
}

/// Policy class mandated by the capacity pattern.
pub fn required_class(c1: f64, c2: f64) -> PolicyClass {
    match (c1 > 0.0, c2 > 0.0) {
        (true, true) => PolicyClass::P2,
        (true, false) => PolicyClass::P3,
        (false, true) => PolicyClass::P4,
        (false, false) => PolicyClass::P1,
    }
}

/// Vertices of the pentagon `{R >= 0, R1 <= r1, R2 <= r2, R1+R2 <= sum}`.
fn pentagon_vertices(r1: f64, r2: f64, sum: f64) -> Vec<[f64; 2]> {
    let mut v = vec![[0.0, 0.0], [r1.min(sum), 0.0], [0.0, r2.min(sum)]];
    if r1 + r2 > sum {
        if sum - r1 >= 0.0 && sum - r1 <= r2 {
            v.push([r1, sum - r1]);
        }
        if sum - r2 >= 0.0 && sum - r2 <= r1 {
            v.push([sum - r2, r2]);
        }
    } else {
        v.push([r1, r2]);
    }
    v
}

impl RatePolytope {
    pub fn dimension(&self) -> usize {
        match self {
            RatePolytope::Cm { .. } => 3,
            RatePolytope::Conf { .. } => 2,
        }
    }

    /// Exact support value `max dir . R` over the polytope, by vertex
    /// enumeration. Directions must be nonnegative and not all zero.
    pub fn support(&self, dir: &[f64]) -> Result<f64> {
        if dir.len() != self.dimension() {
            return Err(Error::Config(format!(
                "direction has {} components, polytope dimension is {}",
                dir.len(),
                self.dimension()
            )));
        }
        if dir.iter().any(|&g| g < 0.0) || dir.iter().all(|&g| g == 0.0) {
            return Err(Error::Domain("direction must be nonnegative and nonzero".into()));
        }
        Ok(match *self {
            RatePolytope::Conf { r1, r2, sum } => pentagon_vertices(r1, r2, sum)
                .iter()
                .map(|v| dir[0] * v[0] + dir[1] * v[1])
                .fold(0.0, f64::max),
            RatePolytope::Cm { a, b, c, d } => {
                // R0 appears only in R0 + R1 + R2 <= d, so for g0 >= 0 the
                // optimum sets R0 = d - R1 - R2 over the (R1, R2) pentagon
                // with sum bound min(c, d); the private direction becomes
                // (g1 - g0, g2 - g0), possibly negative, plus the origin.
                let (g0, g1, g2) = (dir[0], dir[1], dir[2]);
                let mut best = 0.0f64;
                for v in pentagon_vertices(a, b, c.min(d)) {
                    let with_r0 = g0 * (d - v[0] - v[1]) + g1 * v[0] + g2 * v[1];
                    let without = g1 * v[0] + g2 * v[1];
                    best = best.max(with_r0).max(without);
                }
                best
            }
        })
    }

    /// A point of the polytope attaining the support value in `dir`.
    pub fn argmax(&self, dir: &[f64]) -> Result<Vec<f64>> {
        match *self {
            RatePolytope::Conf { r1, r2, sum } => {
                let verts = pentagon_vertices(r1, r2, sum);
                let best = verts
                    .iter()
                    .max_by(|u, v| {
                        let a = dir[0] * u[0] + dir[1] * u[1];
                        let b = dir[0] * v[0] + dir[1] * v[1];
                        a.partial_cmp(&b).unwrap()
                    })
                    .unwrap();
                Ok(best.to_vec())
            }
            RatePolytope::Cm { a, b, c, d } => {
                let (g0, g1, g2) = (dir[0], dir[1], dir[2]);
                let mut best = (f64::NEG_INFINITY, vec![0.0; 3]);
                for v in pentagon_vertices(a, b, c.min(d)) {
                    for r0 in [0.0, d - v[0] - v[1]] {
                        let val = g0 * r0 + g1 * v[0] + g2 * v[1];
                        if val > best.0 {
                            best = (val, vec![r0, v[0], v[1]]);
                        }
                    }
                }
                Ok(best.1)
            }
        }
    }

    /// Whether a rate vector lies inside the polytope within `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        if point.iter().any(|&r| r < -tol) {
            return false;
        }
        match *self {
            RatePolytope::Conf { r1, r2, sum } => {
                point.len() == 2
                    && point[0] <= r1 + tol
                    && point[1] <= r2 + tol
                    && point[0] + point[1] <= sum + tol
            }
            RatePolytope::Cm { a, b, c, d } => {
                point.len() == 3
                    && point[1] <= a + tol
                    && point[2] <= b + tol
                    && point[1] + point[2] <= c + tol
                    && point[0] + point[1] + point[2] <= d + tol
            }
        }
    }
}

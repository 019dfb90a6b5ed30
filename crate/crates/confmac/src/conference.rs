//! One-shot conference construction: message splitting into coarse and
//! fine parts, conference alphabet sizing, the induced conferencing MAC
//! with its exact rate-constraint audits, and iterative Willems
//! conferencing schemes.
//!
//! Messages are 1-based throughout, matching the `[1, M]` index sets of
//! the construction.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which of the rate cases produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanCase {
    /// Both target rates at or below the conferencing capacities: the
    /// conference shares the messages completely.
    Case1,
    /// Both rates above the capacities: coarse parts are shared, fine
    /// parts ride on the private codebooks.
    Case2,
    /// Rate 1 capped by `C1` only.
    Case3a,
    /// Rate 2 capped by `C2` only.
    Case3b,
}

/// Integer layout of a one-shot conference at blocklength `n`.
///
/// `V` are the conference alphabet factors, `mu` the coarse part sizes
/// shared through the conference, `xi` the fine part sizes carried by the
/// private parts of the underlying common-message code of sizes
/// `(m0_cm, m1_cm, m2_cm)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConferencePlan {
    pub n: u64,
    pub m1: u64,
    pub m2: u64,
    pub v1: u64,
    pub v2: u64,
    pub mu1: u64,
    pub mu2: u64,
    pub xi1: u64,
    pub xi2: u64,
    pub m0_cm: u64,
    pub m1_cm: u64,
    pub m2_cm: u64,
    pub t1_count: u64,
    pub t2_count: u64,
    pub c1: f64,
    pub c2: f64,
    pub case: PlanCase,
}

/// Writes `l in [1, m]` uniquely as `l = (i - 1) xi + l'` with
/// `i in [1, mu]`. When `xi = 0` (only allowed with `mu = 1`) the split is
/// the identity `(1, l)`.
pub fn split_message(l: u64, mu: u64, xi: u64) -> Result<(u64, u64)> {
    if l == 0 {
        return Err(Error::Domain("messages are 1-based".into()));
    }
    if mu == 0 {
        return Err(Error::Domain("mu must be at least 1".into()));
    }
    if xi == 0 {
        if mu != 1 {
            return Err(Error::Domain("xi = 0 requires mu = 1".into()));
        }
        return Ok((1, l));
    }
    let i = ((l - 1) / xi + 1).min(mu);
    let lp = l - (i - 1) * xi;
    Ok((i, lp))
}

/// Inverse of [`split_message`].
pub fn merge_message(i: u64, lp: u64, xi: u64) -> u64 {
    (i - 1) * xi + lp
}

/// Conference output of sender `side` (1 or 2) for message `l` with CSIT
/// cell `tau`: the coarse index paired with the sender's own CSIT.
pub fn conference_value(plan: &ConferencePlan, side: u8, l: u64, tau: u64) -> Result<(u64, u64)> {
    let (m, mu, xi, t_count) = match side {
        1 => (plan.m1, plan.mu1, plan.xi1, plan.t1_count),
        2 => (plan.m2, plan.mu2, plan.xi2, plan.t2_count),
        _ => return Err(Error::Config("side must be 1 or 2".into())),
    };
    if l == 0 || l > m {
        return Err(Error::Domain(format!("message {l} outside [1, {m}]")));
    }
    if tau >= t_count {
        return Err(Error::Domain(format!("CSIT cell {tau} outside [0, {t_count})")));
    }
    let (i, _) = split_message(l, mu, xi)?;
    Ok((i, tau))
}

fn pow2_floor(bits: f64) -> u64 {
    if bits < 0.0 {
        return 0;
    }
    // floor(2^bits) with care near integer exponents
    let v = bits.exp2();
    (v + 1e-9).floor() as u64
}

/// Builds the one-shot conference layout for target rates `(r1, r2)` and
/// capacities `(c1, c2)` around a common-message code of the given sizes.
///
/// All the construction's integer constraints are verified exactly;
/// violations are reported by name rather than silently absorbed.
#[allow(clippy::too_many_arguments)]
pub fn build_plan(
    n: u64,
    r1: f64,
    r2: f64,
    c1: f64,
    c2: f64,
    t1_count: u64,
    t2_count: u64,
    cm_sizes: (u64, u64, u64),
) -> Result<ConferencePlan> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be positive".into()));
    }
    if r1 < 0.0 || r2 < 0.0 || c1 < 0.0 || c2 < 0.0 {
        return Err(Error::Domain("rates and capacities must be nonnegative".into()));
    }
    let (m0_cm, m1_cm, m2_cm) = cm_sizes;
    if m0_cm == 0 || m1_cm == 0 || m2_cm == 0 {
        return Err(Error::Domain("common-message code sizes must be at least 1".into()));
    }
    // desk-scale guard: message counts beyond 2^40 overflow the integer
    // layout and could never be simulated anyway
    let nf = n as f64;
    if nf * r1.min(c1).max(r2.min(c2)) > 40.0
        || m0_cm > 1 << 40
        || m1_cm > 1 << 40
        || m2_cm > 1 << 40
    {
        return Err(Error::Capacity(format!(
            "conference plan sizes exceed 2^40 at n = {n}; reduce rates or blocklength"
        )));
    }
    let rt1 = r1.min(c1);
    let _rt2 = r2.min(c2);
    let case = match (r1 <= c1, r2 <= c2) {
        (true, true) => PlanCase::Case1,
        (false, false) => PlanCase::Case2,
        (false, true) => PlanCase::Case3a,
        (true, false) => PlanCase::Case3b,
    };

    // conference alphabet factors: V1 from the first rate, V2 sized so the
    // coarse product tracks the common-message count exactly
    let q1 = pow2_floor(nf * rt1) / t1_count;
    let q2 = if q1 == 0 { 0 } else { m0_cm / q1 };
    let v1 = q1 * t1_count;
    let v2 = q2 * t2_count;
    for (nu, v, t, c) in [(1u8, v1, t1_count, c1), (2, v2, t2_count, c2)] {
        if v < t || v == 0 {
            return Err(Error::BlocklengthTooSmall {
                detail: format!("no admissible V{nu} (need |T{nu}| <= V{nu} <= 2^(n C{nu}))"),
                min_feasible: None,
            });
        }
        if (v as f64).log2() > nf * c + 1e-9 {
            return Err(Error::InfeasiblePlan(format!(
                "conference alphabet constraint violated: log2(V{nu}) = {} > n C{nu} = {}",
                (v as f64).log2(),
                nf * c
            )));
        }
    }

    // per-user coarse/fine layout
    let lay = |q: u64, m_cm: u64, nu: u8| -> Result<(u64, u64, u64)> {
        // returns (m, mu, xi)
        if q == 1 {
            // degenerate conference: everything rides on the private part
            return Ok((m_cm, 1, 0));
        }
        if m_cm == 1 {
            return Ok((q, q, 1));
        }
        let mu = q;
        let xi = m_cm;
        // largest m with floor((m-1)/(mu-1)) = xi whose last chunk still
        // fits in [1, xi]
        let m = ((xi + 1) * (mu - 1)).min(mu * xi);
        if m < xi * (mu - 1) + 1 {
            return Err(Error::InfeasiblePlan(format!(
                "no message count for user {nu} with mu = {mu}, xi = {xi}"
            )));
        }
        Ok((m, mu, xi))
    };
    let (m1, mu1, xi1) = lay(q1, m1_cm, 1)?;
    let (m2, mu2, xi2) = lay(q2, m2_cm, 2)?;

    let plan = ConferencePlan {
        n,
        m1,
        m2,
        v1,
        v2,
        mu1,
        mu2,
        xi1,
        xi2,
        m0_cm,
        m1_cm,
        m2_cm,
        t1_count,
        t2_count,
        c1,
        c2,
        case,
    };
    verify_plan(&plan)?;
    Ok(plan)
}

/// Derives common-message code sizes from the target rates and builds the
/// plan: coarse parts near `2^{n min(R, C)}`, fine parts near
/// `2^{n (R - C)^+}`.
pub fn plan_for_rates(
    n: u64,
    r1: f64,
    r2: f64,
    c1: f64,
    c2: f64,
    t1_count: u64,
    t2_count: u64,
) -> Result<ConferencePlan> {
    let nf = n as f64;
    let rt1 = r1.min(c1);
    let rt2 = r2.min(c2);
    let q1 = pow2_floor(nf * rt1) / t1_count;
    let q2 = pow2_floor(nf * rt2) / t2_count;
    if q1 == 0 || q2 == 0 {
        return Err(Error::BlocklengthTooSmall {
            detail: format!("coarse conference parts empty at n = {n}"),
            min_feasible: None,
        });
    }
    let m0_cm = q1 * q2;
    let m1_cm = pow2_floor(nf * (r1 - rt1)).max(1);
    let m2_cm = pow2_floor(nf * (r2 - rt2)).max(1);
    build_plan(n, r1, r2, c1, c2, t1_count, t2_count, (m0_cm, m1_cm, m2_cm))
}

/// Checks every invariant of a plan: the conference cardinality and
/// capacity constraints, the coarse/fine recombination identities, the
/// coarse-product window around the common-message count, and the rate
/// accounting chain.
pub fn verify_plan(p: &ConferencePlan) -> Result<()> {
    let nf = p.n as f64;
    let fail = |what: &str| Err(Error::InfeasiblePlan(format!("plan violates {what}: {p:?}")));
    // mu = min(V/|T|, M)
    if p.mu1 != (p.v1 / p.t1_count).min(p.m1) || p.mu2 != (p.v2 / p.t2_count).min(p.m2) {
        return fail("mu = min(V / |T|, M)");
    }
    // xi from the two-case formula
    let xi_formula = |m: u64, mu: u64| if mu >= 2 { (m - 1) / (mu - 1) } else { 0 };
    if p.xi1 != xi_formula(p.m1, p.mu1) || p.xi2 != xi_formula(p.m2, p.mu2) {
        return fail("xi formula");
    }
    // fine parts must index the private common-message codebooks
    if p.mu1 >= 2 && p.xi1 != p.m1_cm {
        return fail("xi1 = m1_cm");
    }
    if p.mu2 >= 2 && p.xi2 != p.m2_cm {
        return fail("xi2 = m2_cm");
    }
    if p.mu1 == 1 && p.m1 != p.m1_cm {
        return fail("m1 = m1_cm in the degenerate split");
    }
    if p.mu2 == 1 && p.m2 != p.m2_cm {
        return fail("m2 = m2_cm in the degenerate split");
    }
    // last chunks must fit inside the private codebooks
    if p.mu1 >= 2 && p.m1 > p.mu1 * p.xi1 {
        return fail("last chunk of message set 1 exceeds xi1");
    }
    if p.mu2 >= 2 && p.m2 > p.mu2 * p.xi2 {
        return fail("last chunk of message set 2 exceeds xi2");
    }
    // conference cardinality within capacity
    if (p.mu1 * p.t1_count) as f64 > p.v1 as f64 * (1.0 + 1e-12)
        || (p.mu2 * p.t2_count) as f64 > p.v2 as f64 * (1.0 + 1e-12)
    {
        return fail("mu |T| <= V");
    }
    if ((p.mu1 * p.t1_count) as f64).log2() > nf * p.c1 + 1e-9
        || ((p.mu2 * p.t2_count) as f64).log2() > nf * p.c2 + 1e-9
    {
        return fail("(1/n) log2(mu |T|) <= C");
    }
    // coarse product window
    let coarse = p.mu1 * p.mu2;
    if coarse > p.m0_cm || (p.m0_cm as f64) > (2 * p.t1_count * p.t2_count * coarse) as f64 {
        return fail("m0_cm / (2 |T1| |T2|) <= mu1 mu2 <= m0_cm");
    }
    // rate accounting chain
    let lhs = ((p.m1 * p.m2) as f64).log2();
    let rhs = ((p.m0_cm as f64 * p.m1_cm as f64 * p.m2_cm as f64).log2())
        - ((2 * p.t1_count * p.t2_count) as f64).log2();
    if lhs < rhs - 1e-9 {
        return fail("log2(M1 M2) >= log2(M0 M1_cm M2_cm) - log2(2 |T1| |T2|)");
    }
    Ok(())
}

/// Materialized conferencing MAC table for exhaustive audits of small
/// plans.
pub struct ConferencingMac {
    plan: ConferencePlan,
}

impl ConferencingMac {
    pub fn new(plan: &ConferencePlan) -> Self {
        Self { plan: plan.clone() }
    }

    /// Output `((i1, tau1), (i2, tau2))` for a message pair and CSIT pair.
    pub fn output(&self, j: u64, k: u64, tau1: u64, tau2: u64) -> Result<((u64, u64), (u64, u64))> {
        Ok((
            conference_value(&self.plan, 1, j, tau1)?,
            conference_value(&self.plan, 2, k, tau2)?,
        ))
    }

    /// Verifies both slice-rank constraints exactly: for every fixed
    /// `(j, tau1)` the number of distinct outputs over `(k, tau2)` is at
    /// most `2^{n C2}`, and symmetrically.
    pub fn audit_slice_ranks(&self) -> Result<()> {
        let p = &self.plan;
        let nf = p.n as f64;
        for j in 1..=p.m1 {
            for tau1 in 0..p.t1_count {
                let mut outs: Vec<((u64, u64), (u64, u64))> = Vec::new();
                for k in 1..=p.m2 {
                    for tau2 in 0..p.t2_count {
                        let o = self.output(j, k, tau1, tau2)?;
                        if !outs.contains(&o) {
                            outs.push(o);
                        }
                    }
                }
                if (outs.len() as f64).log2() > nf * p.c2 + 1e-9 {
                    return Err(Error::InfeasiblePlan(format!(
                        "slice rank over (k, tau2) is {} > 2^(n C2) at (j={j}, tau1={tau1})",
                        outs.len()
                    )));
                }
            }
        }
        for k in 1..=p.m2 {
            for tau2 in 0..p.t2_count {
                let mut outs: Vec<((u64, u64), (u64, u64))> = Vec::new();
                for j in 1..=p.m1 {
                    for tau1 in 0..p.t1_count {
                        let o = self.output(j, k, tau1, tau2)?;
                        if !outs.contains(&o) {
                            outs.push(o);
                        }
                    }
                }
                if (outs.len() as f64).log2() > nf * p.c1 + 1e-9 {
                    return Err(Error::InfeasiblePlan(format!(
                        "slice rank over (j, tau1) is {} > 2^(n C1) at (k={k}, tau2={tau2})",
                        outs.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Entropy in bits of the conference output under uniform independent
    /// message/CSIT pairs; bounded by `n (C1 + C2)`.
    pub fn output_entropy_uniform(&self) -> f64 {
        let p = &self.plan;
        let side = |m: u64, mu: u64, xi: u64, t: u64| -> f64 {
            // distribution of the coarse index under a uniform message
            let mut h = 0.0;
            for i in 1..=mu {
                let count = if xi == 0 {
                    m
                } else if i < mu {
                    xi
                } else {
                    m - (mu - 1) * xi
                };
                if count > 0 {
                    let q = count as f64 / m as f64;
                    h -= q * q.log2();
                }
            }
            h + (t as f64).log2()
        };
        side(p.m1, p.mu1, p.xi1, p.t1_count) + side(p.m2, p.mu2, p.xi2, p.t2_count)
    }
}

/// One table `h_{nu,i}` of a Willems conferencing scheme: a map from
/// `(message, csit, previous outputs of the other sender)` to `[1, V_{nu,i}]`,
/// stored flat in mixed radix.
#[derive(Debug, Clone)]
pub struct HTable {
    /// Output alphabet size of this round.
    pub out_size: u64,
    /// Radices: message count, CSIT count, then the other side's factors
    /// for rounds `1..i`.
    pub radices: Vec<u64>,
    pub table: Vec<u64>,
}

impl HTable {
    pub fn new(out_size: u64, radices: Vec<u64>, table: Vec<u64>) -> Result<Self> {
        let size: u64 = radices.iter().product();
        if table.len() as u64 != size {
            return Err(Error::Config(format!(
                "h-table has {} entries, radices require {size}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v == 0 || v > out_size) {
            return Err(Error::Config("h-table value outside output alphabet".into()));
        }
        Ok(Self { out_size, radices, table })
    }

    /// Looks up with 1-based coordinates.
    fn get(&self, coords: &[u64]) -> u64 {
        debug_assert_eq!(coords.len(), self.radices.len());
        let mut idx = 0u64;
        for (c, r) in coords.iter().zip(self.radices.iter()) {
            debug_assert!(*c >= 1 && *c <= *r);
            idx = idx * r + (c - 1);
        }
        self.table[idx as usize]
    }
}

/// An `I`-round Willems conferencing scheme between two senders.
pub struct WillemsScheme {
    pub v1_factors: Vec<u64>,
    pub v2_factors: Vec<u64>,
    pub h1: Vec<HTable>,
    pub h2: Vec<HTable>,
    pub m1: u64,
    pub m2: u64,
    pub t1_count: u64,
    pub t2_count: u64,
}

impl WillemsScheme {
    pub fn validate(&self) -> Result<()> {
        if self.v1_factors.len() != self.v2_factors.len()
            || self.h1.len() != self.v1_factors.len()
            || self.h2.len() != self.v2_factors.len()
        {
            return Err(Error::Config("factor lists and h-tables must have equal rounds".into()));
        }
        for (i, (h, &v)) in self.h1.iter().zip(self.v1_factors.iter()).enumerate() {
            let mut expect = vec![self.m1, self.t1_count];
            expect.extend_from_slice(&self.v2_factors[..i]);
            if h.radices != expect || h.out_size != v {
                return Err(Error::Config(format!("h1 table {i} has inconsistent shape")));
            }
        }
        for (i, (h, &v)) in self.h2.iter().zip(self.v2_factors.iter()).enumerate() {
            let mut expect = vec![self.m2, self.t2_count];
            expect.extend_from_slice(&self.v1_factors[..i]);
            if h.radices != expect || h.out_size != v {
                return Err(Error::Config(format!("h2 table {i} has inconsistent shape")));
            }
        }
        Ok(())
    }

    /// Runs the conference rounds: each round's output depends only on the
    /// sender's own message and CSIT plus the other sender's earlier
    /// outputs. Returns the two output tuples `(g1, g2)`.
    pub fn iterate(&self, l1: u64, l2: u64, tau1: u64, tau2: u64) -> Result<(Vec<u64>, Vec<u64>)> {
        self.validate()?;
        if l1 == 0 || l1 > self.m1 || l2 == 0 || l2 > self.m2 {
            return Err(Error::Domain("message outside range".into()));
        }
        if tau1 >= self.t1_count || tau2 >= self.t2_count {
            return Err(Error::Domain("CSIT cell outside range".into()));
        }
        let rounds = self.h1.len();
        let mut out1: Vec<u64> = Vec::with_capacity(rounds);
        let mut out2: Vec<u64> = Vec::with_capacity(rounds);
        for i in 0..rounds {
            let mut c1 = vec![l1, tau1 + 1];
            c1.extend_from_slice(&out2[..i]);
            let mut c2 = vec![l2, tau2 + 1];
            c2.extend_from_slice(&out1[..i]);
            // both rounds read only outputs from strictly earlier rounds
            out1.push(self.h1[i].get(&c1));
            out2.push(self.h2[i].get(&c2));
        }
        Ok((out1, out2))
    }
}

//! Input policies: a time-sharing distribution over the auxiliary alphabet
//! plus per-CSIT-cell conditional input kernels.
//!
//! The four classes differ only in how kernels are indexed:
//! `P1` indexes sender 1 kernels by tau1 and sender 2 kernels by tau2,
//! `P2` indexes both by the joint cell (tau1, tau2), `P3` keeps sender 1
//! independent of tau2, and `P4` keeps sender 2 independent of tau1.

use crate::channel::CompoundChannel;
use crate::error::{Error, Result};
use crate::prob::{Distribution, Kernel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyClass {
    P1,
    P2,
    P3,
    P4,
}

impl PolicyClass {
    /// Number of sender-1 kernels for `t1 x t2` CSIT cells.
    pub fn kernels1_len(self, t1: usize, t2: usize) -> usize {
        match self {
            PolicyClass::P1 | PolicyClass::P3 => t1,
            PolicyClass::P2 | PolicyClass::P4 => t1 * t2,
        }
    }

    /// Number of sender-2 kernels for `t1 x t2` CSIT cells.
    pub fn kernels2_len(self, t1: usize, t2: usize) -> usize {
        match self {
            PolicyClass::P1 | PolicyClass::P4 => t2,
            PolicyClass::P2 | PolicyClass::P3 => t1 * t2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputPolicy {
    pub class: PolicyClass,
    pub u_size: usize,
    num_t1: usize,
    num_t2: usize,
    pub p0: Distribution,
    kernels1: Vec<Kernel>,
    kernels2: Vec<Kernel>,
}

impl InputPolicy {
    pub fn new(
        class: PolicyClass,
        num_t1: usize,
        num_t2: usize,
        p0: Distribution,
        kernels1: Vec<Kernel>,
        kernels2: Vec<Kernel>,
    ) -> Result<Self> {
        if kernels1.len() != class.kernels1_len(num_t1, num_t2)
            || kernels2.len() != class.kernels2_len(num_t1, num_t2)
        {
            return Err(Error::Config(format!(
                "class {class:?} over {num_t1} x {num_t2} cells needs {} / {} kernels, got {} / {}",
                class.kernels1_len(num_t1, num_t2),
                class.kernels2_len(num_t1, num_t2),
                kernels1.len(),
                kernels2.len()
            )));
        }
        let u = p0.len();
        if kernels1.iter().chain(kernels2.iter()).any(|k| k.input_len() != u) {
            return Err(Error::Config("kernel input alphabet must equal |U|".into()));
        }
        Ok(Self { class, u_size: u, num_t1, num_t2, p0, kernels1, kernels2 })
    }

    /// The cardinality bound `min(|X||Y| + 2, |Z| + 3)` on the auxiliary
    /// alphabet.
    pub fn u_cardinality_bound(nx: usize, ny: usize, nz: usize) -> usize {
        (nx * ny + 2).min(nz + 3)
    }

    pub fn num_t1(&self) -> usize {
        self.num_t1
    }

    pub fn num_t2(&self) -> usize {
        self.num_t2
    }

    /// Sender-1 kernel active in joint cell `(tau1, tau2)`.
    pub fn kernel1(&self, tau1: usize, tau2: usize) -> &Kernel {
        match self.class {
            PolicyClass::P1 | PolicyClass::P3 => &self.kernels1[tau1],
            PolicyClass::P2 | PolicyClass::P4 => &self.kernels1[tau1 * self.num_t2 + tau2],
        }
    }

    /// Sender-2 kernel active in joint cell `(tau1, tau2)`.
    pub fn kernel2(&self, tau1: usize, tau2: usize) -> &Kernel {
        match self.class {
            PolicyClass::P1 | PolicyClass::P4 => &self.kernels2[tau2],
            PolicyClass::P2 | PolicyClass::P3 => &self.kernels2[tau1 * self.num_t2 + tau2],
        }
    }

    pub fn kernels1(&self) -> &[Kernel] {
        &self.kernels1
    }

    pub fn kernels2(&self) -> &[Kernel] {
        &self.kernels2
    }

    /// Checks alphabet and cell-count compatibility with a channel.
    pub fn validate_for(&self, c: &CompoundChannel) -> Result<()> {
        if self.num_t1 != c.num_t1() || self.num_t2 != c.num_t2() {
            return Err(Error::Config(format!(
                "policy indexed over {} x {} cells, channel has {} x {}",
                self.num_t1,
                self.num_t2,
                c.num_t1(),
                c.num_t2()
            )));
        }
        if self.kernels1.iter().any(|k| k.output_len() != c.x_len())
            || self.kernels2.iter().any(|k| k.output_len() != c.y_len())
        {
            return Err(Error::Config("kernel output alphabets do not match channel".into()));
        }
        let bound = Self::u_cardinality_bound(c.x_len(), c.y_len(), c.z_len());
        if self.u_size > bound {
            return Err(Error::Config(format!(
                "auxiliary alphabet size {} exceeds the cardinality bound {bound}",
                self.u_size
            )));
        }
        Ok(())
    }

    /// Number of unconstrained parameters for [`InputPolicy::from_params`].
    pub fn param_count(
        class: PolicyClass,
        u_size: usize,
        nx: usize,
        ny: usize,
        num_t1: usize,
        num_t2: usize,
    ) -> usize {
        u_size
            + class.kernels1_len(num_t1, num_t2) * u_size * nx
            + class.kernels2_len(num_t1, num_t2) * u_size * ny
    }

    /// Maps an unconstrained real vector onto the policy simplices by
    /// exponentiation and normalization, row by row.
    pub fn from_params(
        params: &[f64],
        class: PolicyClass,
        u_size: usize,
        nx: usize,
        ny: usize,
        num_t1: usize,
        num_t2: usize,
    ) -> Self {
        let expected = Self::param_count(class, u_size, nx, ny, num_t1, num_t2);
        assert_eq!(params.len(), expected, "parameter vector length");
        let softmax = |chunk: &[f64]| -> Vec<f64> {
            let m = chunk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = chunk.iter().map(|&v| (v - m).exp()).collect();
            let s: f64 = e.iter().sum();
            e.iter().map(|&v| v / s).collect()
        };
        let mut at = 0;
        let p0 = Distribution::new(softmax(&params[at..at + u_size])).unwrap();
        at += u_size;
        let take_kernel = |width: usize, at: &mut usize| {
            let rows: Vec<Vec<f64>> = (0..u_size)
                .map(|_| {
                    let row = softmax(&params[*at..*at + width]);
                    *at += width;
                    row
                })
                .collect();
            Kernel::from_rows(rows).unwrap()
        };
        let k1: Vec<Kernel> = (0..class.kernels1_len(num_t1, num_t2))
            .map(|_| take_kernel(nx, &mut at))
            .collect();
        let k2: Vec<Kernel> = (0..class.kernels2_len(num_t1, num_t2))
            .map(|_| take_kernel(ny, &mut at))
            .collect();
        Self::new(class, num_t1, num_t2, p0, k1, k2).unwrap()
    }

    /// Approximate inverse of [`InputPolicy::from_params`]: log-masses with
    /// zeros floored, usable as a warm-start parameter vector.
    pub fn to_params(&self, nx: usize, ny: usize) -> Vec<f64> {
        let logs = |d: &Distribution| -> Vec<f64> {
            d.masses().iter().map(|&m| m.max(1e-12).ln()).collect()
        };
        let mut out = logs(&self.p0);
        for k in &self.kernels1 {
            for u in 0..self.u_size {
                out.extend(logs(k.row(u)));
            }
        }
        for k in &self.kernels2 {
            for u in 0..self.u_size {
                out.extend(logs(k.row(u)));
            }
        }
        debug_assert_eq!(
            out.len(),
            Self::param_count(self.class, self.u_size, nx, ny, self.num_t1, self.num_t2)
        );
        out
    }
}

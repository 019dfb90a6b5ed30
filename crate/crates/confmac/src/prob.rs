//! Finite-alphabet probability objects and information measures.
//!
//! Everything here works in bits (base-2 logarithms) and treats masses
//! below [`ZERO_MASS`] as exact zeros, so `0 log 0 = 0` throughout.
//! Mutual information is computed from marginal-table entropies rather
//! than a KL form; tiny negative results from cancellation are clamped
//! to zero.

use crate::channel::Channel;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Masses below this are treated as exact zeros before taking logs.
pub const ZERO_MASS: f64 = 1e-15;

/// Entropy of a slice of nonnegative masses, in bits.
pub fn entropy_of(masses: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in masses {
        if p > ZERO_MASS {
            h -= p * p.log2();
        }
    }
    h
}

/// A probability distribution over a finite alphabet `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    masses: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and normalization (1e-12 tolerance).
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Config("distribution over empty alphabet".into()));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m >= -1e-12) || !m.is_finite() {
                return Err(Error::Config(format!("mass at symbol {i} is {m}")));
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("masses sum to {sum}, expected 1")));
        }
        let masses = masses.iter().map(|&m| m.max(0.0)).collect();
        Ok(Self { masses })
    }

    pub fn uniform(len: usize) -> Self {
        Self { masses: vec![1.0 / len as f64; len] }
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut masses = vec![0.0; len];
        masses[at] = 1.0;
        Self { masses }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Shannon entropy in bits; lies in `[0, log2(len)]`.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.masses)
    }

    /// Draws one symbol by inverse CDF from a uniform variate in `[0,1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &m) in self.masses.iter().enumerate() {
            acc += m;
            if u < acc {
                return i;
            }
        }
        self.masses.len() - 1
    }
}

/// A stochastic matrix: one [`Distribution`] over the output alphabet per
/// input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    rows: Vec<Distribution>,
}

impl Kernel {
    pub fn new(rows: Vec<Distribution>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Config("kernel with no rows".into()));
        }
        let out = rows[0].len();
        if rows.iter().any(|r| r.len() != out) {
            return Err(Error::Config("kernel rows have unequal output alphabets".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Distribution::new).collect::<Result<_>>()?)
    }

    pub fn input_len(&self) -> usize {
        self.rows.len()
    }

    pub fn output_len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &Distribution {
        &self.rows[i]
    }
}

/// One of the four joint variables `U, X, Y, Z`, combined into sets as a
/// bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarSet(u8);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);
    pub const U: VarSet = VarSet(1);
    pub const X: VarSet = VarSet(2);
    pub const Y: VarSet = VarSet(4);
    pub const Z: VarSet = VarSet(8);

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersects(self, other: VarSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn contains(self, v: VarSet) -> bool {
        self.0 & v.0 == v.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// The product-form joint distribution
/// `p(u,x,y,z) = p0(u) p1(x|u) p2(y|u) W(z|x,y)` on `U x X x Y x Z`.
///
/// X and Y are conditionally independent given U by construction, and
/// `U -> (X,Y) -> Z` is a Markov chain.
#[derive(Debug, Clone)]
pub struct JointUxyz {
    mass: Vec<f64>,
    nu: usize,
    nx: usize,
    ny: usize,
    nz: usize,
}

/// Builds the product-form joint from a time-sharing distribution, two
/// conditional input kernels and a channel state.
pub fn build_joint(p0: &Distribution, p1: &Kernel, p2: &Kernel, w: &Channel) -> Result<JointUxyz> {
    let nu = p0.len();
    if p1.input_len() != nu || p2.input_len() != nu {
        return Err(Error::Config(format!(
            "kernel input alphabets ({}, {}) do not match |U| = {nu}",
            p1.input_len(),
            p2.input_len()
        )));
    }
    let (nx, ny, nz) = (w.x_len(), w.y_len(), w.z_len());
    if p1.output_len() != nx || p2.output_len() != ny {
        return Err(Error::Config(format!(
            "kernel output alphabets ({}, {}) do not match channel inputs ({nx}, {ny})",
            p1.output_len(),
            p2.output_len()
        )));
    }
    let mut mass = vec![0.0; nu * nx * ny * nz];
    let mut idx = 0;
    for u in 0..nu {
        let pu = p0.mass(u);
        for x in 0..nx {
            let px = p1.row(u).mass(x);
            for y in 0..ny {
                let pxy = pu * px * p2.row(u).mass(y);
                for z in 0..nz {
                    mass[idx] = pxy * w.w(x, y, z);
                    idx += 1;
                }
            }
        }
    }
    Ok(JointUxyz { mass, nu, nx, ny, nz })
}

impl JointUxyz {
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.nu, self.nx, self.ny, self.nz)
    }

    pub fn mass(&self, u: usize, x: usize, y: usize, z: usize) -> f64 {
        self.mass[((u * self.nx + x) * self.ny + y) * self.nz + z]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn var_len(&self, v: VarSet) -> usize {
        match v {
            VarSet::U => self.nu,
            VarSet::X => self.nx,
            VarSet::Y => self.ny,
            VarSet::Z => self.nz,
            _ => unreachable!(),
        }
    }

    fn set_len(&self, vars: VarSet) -> usize {
        let mut n = 1;
        for v in [VarSet::U, VarSet::X, VarSet::Y, VarSet::Z] {
            if vars.contains(v) {
                n *= self.var_len(v);
            }
        }
        n
    }

    /// Entropy in bits of the marginal over `vars`.
    pub fn marginal_entropy(&self, vars: VarSet) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        let mut table = vec![0.0; self.set_len(vars)];
        let mut idx = 0;
        for u in 0..self.nu {
            for x in 0..self.nx {
                for y in 0..self.ny {
                    for z in 0..self.nz {
                        let mut key = 0;
                        if vars.contains(VarSet::U) {
                            key = key * self.nu + u;
                        }
                        if vars.contains(VarSet::X) {
                            key = key * self.nx + x;
                        }
                        if vars.contains(VarSet::Y) {
                            key = key * self.ny + y;
                        }
                        if vars.contains(VarSet::Z) {
                            key = key * self.nz + z;
                        }
                        table[key] += self.mass[idx];
                        idx += 1;
                    }
                }
            }
        }
        entropy_of(&table)
    }

    /// Conditional mutual information `I(targets; predictors | conditioning)`
    /// in bits, computed as
    /// `H(T,C) - H(C) - H(T,P,C) + H(P,C)` and clamped at zero.
    pub fn mutual_information(
        &self,
        targets: VarSet,
        predictors: VarSet,
        conditioning: VarSet,
    ) -> Result<f64> {
        if targets.is_empty() || predictors.is_empty() {
            return Err(Error::Config("empty target or predictor set".into()));
        }
        if targets.intersects(predictors)
            || targets.intersects(conditioning)
            || predictors.intersects(conditioning)
        {
            return Err(Error::Config("variable sets must be disjoint".into()));
        }
        let i = self.marginal_entropy(targets.union(conditioning))
            - self.marginal_entropy(conditioning)
            - self.marginal_entropy(targets.union(predictors).union(conditioning))
            + self.marginal_entropy(predictors.union(conditioning));
        Ok(if i > -1e-12 { i.max(0.0) } else { i })
    }

    /// The four rate bounds used by every region in one pass:
    /// `(I(Z;X|Y,U), I(Z;Y|X,U), I(Z;X,Y|U), I(Z;X,Y))`.
    pub fn rate_bounds(&self) -> (f64, f64, f64, f64) {
        let (nu, nx, ny, nz) = (self.nu, self.nx, self.ny, self.nz);
        let mut t_full = 0.0; // H(U,X,Y,Z) accumulator below
        let mut h_xyz = vec![0.0; nx * ny * nz];
        let mut h_zyu = vec![0.0; nz * ny * nu];
        let mut h_zxu = vec![0.0; nz * nx * nu];
        let mut h_xyu = vec![0.0; nx * ny * nu];
        let mut h_zu = vec![0.0; nz * nu];
        let mut h_z = vec![0.0; nz];
        let mut h_u = vec![0.0; nu];
        let mut idx = 0;
        for u in 0..nu {
            for x in 0..nx {
                for y in 0..ny {
                    for z in 0..nz {
                        let m = self.mass[idx];
                        idx += 1;
                        if m > ZERO_MASS {
                            t_full -= m * m.log2();
                        }
                        h_xyz[(x * ny + y) * nz + z] += m;
                        h_zyu[(z * ny + y) * nu + u] += m;
                        h_zxu[(z * nx + x) * nu + u] += m;
                        h_xyu[(x * ny + y) * nu + u] += m;
                        h_zu[z * nu + u] += m;
                        h_z[z] += m;
                        h_u[u] += m;
                    }
                }
            }
        }
        let e_xyz = entropy_of(&h_xyz);
        let e_zyu = entropy_of(&h_zyu);
        let e_zxu = entropy_of(&h_zxu);
        let e_xyu = entropy_of(&h_xyu);
        let e_zu = entropy_of(&h_zu);
        let e_z = entropy_of(&h_z);
        let e_u = entropy_of(&h_u);
        // H(XY) from the xyz table
        let mut xy = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    xy[x * ny + y] += h_xyz[(x * ny + y) * nz + z];
                }
            }
        }
        let e_xy = entropy_of(&xy);
        // H(YU), H(XU) from the zyu / zxu tables
        let mut yu = vec![0.0; ny * nu];
        let mut xu = vec![0.0; nx * nu];
        for z in 0..nz {
            for y in 0..ny {
                for u in 0..nu {
                    yu[y * nu + u] += h_zyu[(z * ny + y) * nu + u];
                }
            }
            for x in 0..nx {
                for u in 0..nu {
                    xu[x * nu + u] += h_zxu[(z * nx + x) * nu + u];
                }
            }
        }
        let e_yu = entropy_of(&yu);
        let e_xu = entropy_of(&xu);
        let clamp = |v: f64| if v > -1e-12 { v.max(0.0) } else { v };
        let a = clamp(e_zyu - e_yu - t_full + e_xyu);
        let b = clamp(e_zxu - e_xu - t_full + e_xyu);
        let c = clamp(e_zu - e_u - t_full + e_xyu);
        let d = clamp(e_z + e_xy - e_xyz);
        (a, b, c, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Channel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// Direct-summation entropy oracle, independent of `entropy_of`.
    fn entropy_oracle(masses: &[f64]) -> f64 {
        masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln() / std::f64::consts::LN_2)
            .sum()
    }

    fn identity_on_x() -> Channel {
        // z = x regardless of y
        Channel::new(
            "z=x",
            vec![
                vec![vec![1.0, 0.0], vec![1.0, 0.0]],
                vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            ],
        )
        .unwrap()
    }

    fn noiseless_pair() -> Channel {
        // z = 2x + y over a 4-letter output
        let mut m = vec![vec![vec![0.0; 4]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                m[x][y][2 * x + y] = 1.0;
            }
        }
        Channel::new("z=(x,y)", m).unwrap()
    }

    fn paper_w1() -> Channel {
        Channel::new(
            "W1",
            vec![
                vec![vec![0.9, 0.1], vec![0.4, 0.6]],
                vec![vec![0.6, 0.4], vec![0.0, 1.0]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn entropy_point_mass_is_zero() {
        assert_eq!(Distribution::new(vec![1.0, 0.0]).unwrap().entropy(), 0.0);
    }

    #[test]
    fn entropy_uniform_binary_is_one() {
        assert_eq!(Distribution::new(vec![0.5, 0.5]).unwrap().entropy(), 1.0);
    }

    #[test]
    fn entropy_skewed_binary_matches_oracle() {
        let d = Distribution::new(vec![0.9, 0.1]).unwrap();
        // frozen from the direct-summation oracle
        assert!((d.entropy() - 0.4689955935892812).abs() < 1e-14);
        assert!((d.entropy() - entropy_oracle(&[0.9, 0.1])).abs() < 1e-13);
    }

    #[test]
    fn distribution_rejects_bad_masses() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn build_joint_uniform_through_identity() {
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &identity_on_x()).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((j.mass(0, x, y, x) - 0.25).abs() < 1e-15);
                assert_eq!(j.mass(0, x, y, 1 - x), 0.0);
            }
        }
        assert!((j.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn build_joint_paper_channel_entry() {
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &paper_w1()).unwrap();
        assert!((j.mass(0, 0, 0, 0) - 0.225).abs() < 1e-15);
        assert!((j.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn build_joint_rejects_dimension_mismatch() {
        let p0 = Distribution::uniform(2);
        let k1 = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap(); // |U| = 1, mismatch
        let k2 = Kernel::from_rows(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        assert!(build_joint(&p0, &k1, &k2, &identity_on_x()).is_err());
    }

    #[test]
    fn mi_zero_when_z_independent() {
        // channel output ignores both inputs
        let w = Channel::new(
            "noise",
            vec![
                vec![vec![0.5, 0.5], vec![0.5, 0.5]],
                vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            ],
        )
        .unwrap();
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &w).unwrap();
        let i = j
            .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::EMPTY)
            .unwrap();
        assert!(i.abs() < 1e-12);
    }

    #[test]
    fn mi_two_bits_for_noiseless_pair() {
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &noiseless_pair()).unwrap();
        let i = j
            .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::EMPTY)
            .unwrap();
        assert!((i - 2.0).abs() < 1e-12);
    }

    /// 16-entry enumeration oracle for I(Z;X,Y) on a |U|=1 joint, written
    /// independently of the marginal-table path.
    fn mi_xy_z_oracle(j: &JointUxyz) -> f64 {
        let (_, nx, ny, nz) = j.dims();
        let mut pz = vec![0.0; nz];
        let mut pxy = vec![0.0; nx * ny];
        let mut h_joint = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let m = j.mass(0, x, y, z);
                    pz[z] += m;
                    pxy[x * ny + y] += m;
                    if m > 0.0 {
                        h_joint -= m * m.log2();
                    }
                }
            }
        }
        entropy_oracle(&pz) + entropy_oracle(&pxy) - h_joint
    }

    #[test]
    fn mi_paper_channel_matches_enumeration_oracle() {
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &paper_w1()).unwrap();
        let i = j
            .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::EMPTY)
            .unwrap();
        assert!((i - mi_xy_z_oracle(&j)).abs() < 1e-12);
        // frozen from the oracle
        assert!((i - 0.39547168341815553).abs() < 1e-12);
    }

    #[test]
    fn mi_rejects_overlapping_sets() {
        let p0 = Distribution::point_mass(1, 0);
        let k = Kernel::from_rows(vec![vec![0.5, 0.5]]).unwrap();
        let j = build_joint(&p0, &k, &k, &identity_on_x()).unwrap();
        assert!(j.mutual_information(VarSet::Z, VarSet::Z, VarSet::EMPTY).is_err());
        assert!(j
            .mutual_information(VarSet::Z, VarSet::X, VarSet::X.union(VarSet::U))
            .is_err());
    }

    fn random_joint(rng: &mut ChaCha12Rng, nu: usize) -> JointUxyz {
        let p0 = {
            let mut v: Vec<f64> = (0..nu).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            Distribution::new(v).unwrap()
        };
        let rand_kernel = |rng: &mut ChaCha12Rng, out: usize| {
            let rows = (0..nu)
                .map(|_| {
                    let mut v: Vec<f64> = (0..out).map(|_| rng.gen::<f64>() + 1e-3).collect();
                    let s: f64 = v.iter().sum();
                    v.iter_mut().for_each(|x| *x /= s);
                    v
                })
                .collect();
            Kernel::from_rows(rows).unwrap()
        };
        let k1 = rand_kernel(rng, 2);
        let k2 = rand_kernel(rng, 2);
        let mut m = vec![vec![vec![0.0; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                let p: f64 = rng.gen();
                m[x][y] = vec![p, 1.0 - p];
            }
        }
        let w = Channel::new("rand", m).unwrap();
        build_joint(&p0, &k1, &k2, &w).unwrap()
    }

    #[test]
    fn chain_rule_identity_on_random_joints() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let j = random_joint(&mut rng, 3);
            let lhs = j
                .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::U)
                .unwrap();
            let rhs = j.mutual_information(VarSet::Z, VarSet::X, VarSet::U).unwrap()
                + j.mutual_information(VarSet::Z, VarSet::Y, VarSet::X.union(VarSet::U)).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "chain rule violated: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn conditional_independence_reduction() {
        // I(Z;X|Y,U) = I(Z,Y;X|U) because X and Y are independent given U
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..50 {
            let j = random_joint(&mut rng, 2);
            let lhs = j
                .mutual_information(VarSet::Z, VarSet::X, VarSet::Y.union(VarSet::U))
                .unwrap();
            let rhs = j
                .mutual_information(VarSet::Z.union(VarSet::Y), VarSet::X, VarSet::U)
                .unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn markov_chain_makes_u_redundant() {
        // I(Z;U,X,Y) = I(Z;X,Y) since U - (X,Y) - Z
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..50 {
            let j = random_joint(&mut rng, 3);
            let lhs = j
                .mutual_information(
                    VarSet::Z,
                    VarSet::U.union(VarSet::X).union(VarSet::Y),
                    VarSet::EMPTY,
                )
                .unwrap();
            let rhs = j
                .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::EMPTY)
                .unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn mi_nonnegative_and_alphabet_bounded() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..50 {
            let j = random_joint(&mut rng, 2);
            let i = j
                .mutual_information(VarSet::Z, VarSet::X.union(VarSet::Y), VarSet::EMPTY)
                .unwrap();
            assert!(i >= 0.0);
            assert!(i <= 1.0 + 1e-12); // |Z| = 2
            assert!(i <= 2.0 + 1e-12); // |X||Y| = 4
        }
    }

    #[test]
    fn rate_bounds_agree_with_mutual_information() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..30 {
            let j = random_joint(&mut rng, 3);
            let (a, b, c, d) = j.rate_bounds();
            let yu = VarSet::Y.union(VarSet::U);
            let xu = VarSet::X.union(VarSet::U);
            let xy = VarSet::X.union(VarSet::Y);
            assert!((a - j.mutual_information(VarSet::Z, VarSet::X, yu).unwrap()).abs() < 1e-11);
            assert!((b - j.mutual_information(VarSet::Z, VarSet::Y, xu).unwrap()).abs() < 1e-11);
            assert!((c - j.mutual_information(VarSet::Z, xy, VarSet::U).unwrap()).abs() < 1e-11);
            assert!((d - j.mutual_information(VarSet::Z, xy, VarSet::EMPTY).unwrap()).abs() < 1e-11);
        }
    }
}

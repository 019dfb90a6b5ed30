//! Compound multiple-access channel model: finite state sets with CSIT
//! partitions, JSON (de)serialization, and the grid quantization map used
//! to reduce large state families to a finite set.
//!
//! File format:
//! `{ "X":int, "Y":int, "Z":int, "states":[ {"name":str, "matrix":[[[p]]], "t1":str, "t2":str} ] }`
//! with `matrix[x][y][z]` and a row-sum validation tolerance of 1e-9.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Row-sum validation tolerance for channel files.
const ROW_SUM_TOL: f64 = 1e-9;

/// One compound-channel state: a stochastic transition matrix indexed
/// `(x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    name: String,
    matrix: Vec<f64>,
    nx: usize,
    ny: usize,
    nz: usize,
}

impl Channel {
    pub fn new(name: &str, matrix: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let nx = matrix.len();
        if nx == 0 {
            return Err(Error::Validation(format!("state {name}: empty matrix")));
        }
        let ny = matrix[0].len();
        if ny == 0 || matrix.iter().any(|r| r.len() != ny) {
            return Err(Error::Validation(format!("state {name}: ragged y dimension")));
        }
        let nz = matrix[0][0].len();
        let mut flat = Vec::with_capacity(nx * ny * nz);
        for (x, plane) in matrix.iter().enumerate() {
            for (y, row) in plane.iter().enumerate() {
                if row.len() != nz {
                    return Err(Error::Validation(format!(
                        "state {name}: row (x={x}, y={y}) has {} entries, expected {nz}",
                        row.len()
                    )));
                }
                let mut sum = 0.0;
                for (z, &p) in row.iter().enumerate() {
                    if !(p >= -1e-12) || !p.is_finite() {
                        return Err(Error::Validation(format!(
                            "state {name}: entry (x={x}, y={y}, z={z}) is {p}"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::Validation(format!(
                        "state {name}: row (x={x}, y={y}) sums to {sum}, expected 1"
                    )));
                }
                flat.extend(row.iter().map(|&p| p.max(0.0)));
            }
        }
        Ok(Self { name: name.to_string(), matrix: flat, nx, ny, nz })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x_len(&self) -> usize {
        self.nx
    }

    pub fn y_len(&self) -> usize {
        self.ny
    }

    pub fn z_len(&self) -> usize {
        self.nz
    }

    /// Transition probability W(z | x, y).
    pub fn w(&self, x: usize, y: usize, z: usize) -> f64 {
        self.matrix[(x * self.ny + y) * self.nz + z]
    }

    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let base = (x * self.ny + y) * self.nz;
        &self.matrix[base..base + self.nz]
    }

    fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.nx)
            .map(|x| (0..self.ny).map(|y| self.row(x, y).to_vec()).collect())
            .collect()
    }
}

/// A compound MAC: a finite list of states plus the CSIT cell label of each
/// state for both transmitters. CSIR labels are carried as metadata only;
/// the decoder implemented in this crate does not use them.
#[derive(Debug, Clone)]
pub struct CompoundChannel {
    states: Vec<Channel>,
    t1_of: Vec<usize>,
    t2_of: Vec<usize>,
    t1_labels: Vec<String>,
    t2_labels: Vec<String>,
    csir_of: Option<Vec<String>>,
    nx: usize,
    ny: usize,
    nz: usize,
}

impl CompoundChannel {
    /// Builds a compound channel from states and per-state CSIT labels.
    /// Cell indices follow first appearance order of the labels.
    pub fn from_states(
        states: Vec<Channel>,
        t1: Vec<String>,
        t2: Vec<String>,
        csir: Option<Vec<String>>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Domain("compound channel with no states".into()));
        }
        if t1.len() != states.len() || t2.len() != states.len() {
            return Err(Error::Validation("one CSIT label per state required".into()));
        }
        if let Some(ref r) = csir {
            if r.len() != states.len() {
                return Err(Error::Validation("one CSIR label per state required".into()));
            }
        }
        let (nx, ny, nz) = (states[0].x_len(), states[0].y_len(), states[0].z_len());
        for s in &states {
            if (s.x_len(), s.y_len(), s.z_len()) != (nx, ny, nz) {
                return Err(Error::Validation(format!(
                    "state {} has alphabet sizes ({}, {}, {}), expected ({nx}, {ny}, {nz})",
                    s.name(),
                    s.x_len(),
                    s.y_len(),
                    s.z_len()
                )));
            }
        }
        let index = |labels: &[String]| {
            let mut names: Vec<String> = Vec::new();
            let mut of = Vec::with_capacity(labels.len());
            for l in labels {
                let i = match names.iter().position(|n| n == l) {
                    Some(i) => i,
                    None => {
                        names.push(l.clone());
                        names.len() - 1
                    }
                };
                of.push(i);
            }
            (names, of)
        };
        let (t1_labels, t1_of) = index(&t1);
        let (t2_labels, t2_of) = index(&t2);
        Ok(Self { states, t1_of, t2_of, t1_labels, t2_labels, csir_of: csir, nx, ny, nz })
    }

    /// Convenience constructor with trivial CSIT (a single cell per side).
    pub fn no_csit(states: Vec<Channel>) -> Result<Self> {
        let n = states.len();
        Self::from_states(states, vec!["*".into(); n], vec!["*".into(); n], None)
    }

    /// Full CSIT: each state is its own cell on both sides.
    pub fn full_csit(states: Vec<Channel>) -> Result<Self> {
        let labels: Vec<String> = states.iter().map(|s| s.name().to_string()).collect();
        Self::from_states(states, labels.clone(), labels, None)
    }

    pub fn states(&self) -> &[Channel] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Channel {
        &self.states[i]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn x_len(&self) -> usize {
        self.nx
    }

    pub fn y_len(&self) -> usize {
        self.ny
    }

    pub fn z_len(&self) -> usize {
        self.nz
    }

    pub fn num_t1(&self) -> usize {
        self.t1_labels.len()
    }

    pub fn num_t2(&self) -> usize {
        self.t2_labels.len()
    }

    pub fn t1_of(&self, state: usize) -> usize {
        self.t1_of[state]
    }

    pub fn t2_of(&self, state: usize) -> usize {
        self.t2_of[state]
    }

    pub fn t1_labels(&self) -> &[String] {
        &self.t1_labels
    }

    pub fn t2_labels(&self) -> &[String] {
        &self.t2_labels
    }

    pub fn csir_labels(&self) -> Option<&[String]> {
        self.csir_of.as_deref()
    }

    /// States in the joint CSIT cell `(tau1, tau2)`, by cell index.
    pub fn joint_cell(&self, tau1: usize, tau2: usize) -> Result<Vec<usize>> {
        if tau1 >= self.num_t1() || tau2 >= self.num_t2() {
            return Err(Error::Config(format!(
                "unknown CSIT cell ({tau1}, {tau2}); have {} x {}",
                self.num_t1(),
                self.num_t2()
            )));
        }
        Ok((0..self.states.len())
            .filter(|&s| self.t1_of[s] == tau1 && self.t2_of[s] == tau2)
            .collect())
    }

    /// States in the joint cell identified by labels.
    pub fn joint_cell_by_label(&self, tau1: &str, tau2: &str) -> Result<Vec<usize>> {
        let i1 = self
            .t1_labels
            .iter()
            .position(|l| l == tau1)
            .ok_or_else(|| Error::Config(format!("unknown t1 label {tau1:?}")))?;
        let i2 = self
            .t2_labels
            .iter()
            .position(|l| l == tau2)
            .ok_or_else(|| Error::Config(format!("unknown t2 label {tau2:?}")))?;
        self.joint_cell(i1, i2)
    }

    /// Joint cells with no state. Permitted, but callers may want to warn.
    pub fn empty_joint_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t1 in 0..self.num_t1() {
            for t2 in 0..self.num_t2() {
                if !(0..self.states.len()).any(|s| self.t1_of[s] == t1 && self.t2_of[s] == t2) {
                    out.push((t1, t2));
                }
            }
        }
        out
    }

    /// All nonempty joint cells with their state lists.
    pub fn nonempty_joint_cells(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for t1 in 0..self.num_t1() {
            for t2 in 0..self.num_t2() {
                let states = self.joint_cell(t1, t2).unwrap();
                if !states.is_empty() {
                    out.push((t1, t2, states));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ChannelFile =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("bad channel file: {e}")))?;
        file.into_channel()
    }

    pub fn serialize(&self) -> String {
        let file = ChannelFile {
            x: self.nx,
            y: self.ny,
            z: self.nz,
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| StateEntry {
                    name: s.name().to_string(),
                    matrix: s.to_nested(),
                    t1: self.t1_labels[self.t1_of[i]].clone(),
                    t2: self.t2_labels[self.t2_of[i]].clone(),
                    r: self.csir_of.as_ref().map(|r| r[i].clone()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("channel serialization cannot fail")
    }

    /// FNV-1a hash of the canonical serialization, for output metadata.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.serialize().as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    #[serde(rename = "X")]
    x: usize,
    #[serde(rename = "Y")]
    y: usize,
    #[serde(rename = "Z")]
    z: usize,
    states: Vec<StateEntry>,
}

#[derive(Serialize, Deserialize)]
struct StateEntry {
    name: String,
    matrix: Vec<Vec<Vec<f64>>>,
    t1: String,
    t2: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<String>,
}

impl ChannelFile {
    fn into_channel(self) -> Result<CompoundChannel> {
        let mut states = Vec::with_capacity(self.states.len());
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        let mut r = Vec::new();
        let has_r = self.states.iter().any(|s| s.r.is_some());
        for entry in self.states {
            let ch = Channel::new(&entry.name, entry.matrix)?;
            if (ch.x_len(), ch.y_len(), ch.z_len()) != (self.x, self.y, self.z) {
                return Err(Error::Validation(format!(
                    "state {}: matrix shape ({}, {}, {}) does not match declared ({}, {}, {})",
                    entry.name,
                    ch.x_len(),
                    ch.y_len(),
                    ch.z_len(),
                    self.x,
                    self.y,
                    self.z
                )));
            }
            states.push(ch);
            t1.push(entry.t1);
            t2.push(entry.t2);
            r.push(entry.r.unwrap_or_default());
        }
        CompoundChannel::from_states(states, t1, t2, if has_r { Some(r) } else { None })
    }
}

/// Result of quantizing a compound channel onto the grid of multiples of
/// `1 / (2 N |T1| |T2|)`.
///
/// Grid channels carry the joint CSIT cell of their originals as a tag, so
/// images of different cells stay disjoint even when the matrices coincide.
#[derive(Debug, Clone)]
pub struct QuantizationResult {
    pub grid_channels: Vec<Channel>,
    /// Joint CSIT cell `(tau1, tau2)` of each grid channel.
    pub cell_tags: Vec<(usize, usize)>,
    /// Original state index -> grid channel index.
    pub assignment: Vec<usize>,
    pub n_param: u64,
    /// `exp(2 |Z|^2 / N)`: every original entry is at most this factor
    /// times the quantized entry.
    pub domination_factor: f64,
    /// Largest per-entry deviation observed, at most `|Z| / N`.
    pub max_deviation: f64,
}

/// Quantizes every state onto the grid. Requires `N > 2 |Z|`.
///
/// Each entry is rounded down to the grid, the leftover grid steps are
/// assigned by largest remainder among entries with positive original mass,
/// and single steps are moved from the row maximum wherever the domination
/// inequality would otherwise fail. Both approximation inequalities are then
/// verified on every entry; failure is an error, never a silent result.
pub fn quantize(c: &CompoundChannel, n_param: u64) -> Result<QuantizationResult> {
    let nz = c.z_len();
    if n_param <= 2 * nz as u64 {
        return Err(Error::Domain(format!(
            "quantization needs N > 2|Z| = {}, got {n_param}",
            2 * nz
        )));
    }
    let steps_total = 2 * n_param * c.num_t1() as u64 * c.num_t2() as u64;
    let grid = 1.0 / steps_total as f64;
    let factor = (2.0 * (nz * nz) as f64 / n_param as f64).exp();
    let dev_bound = nz as f64 / n_param as f64;

    let mut grid_channels: Vec<Channel> = Vec::new();
    let mut cell_tags: Vec<(usize, usize)> = Vec::new();
    let mut keys: Vec<Vec<u64>> = Vec::new();
    let mut assignment = Vec::with_capacity(c.num_states());
    let mut max_dev: f64 = 0.0;

    for (si, state) in c.states().iter().enumerate() {
        let tag = (c.t1_of(si), c.t2_of(si));
        let mut steps: Vec<u64> = Vec::with_capacity(c.x_len() * c.y_len() * nz);
        for x in 0..c.x_len() {
            for y in 0..c.y_len() {
                let row = state.row(x, y);
                let mut base: Vec<u64> = Vec::with_capacity(nz);
                let mut rem: Vec<(usize, f64)> = Vec::new();
                for (z, &w) in row.iter().enumerate() {
                    let exact = w * steps_total as f64;
                    let b = (exact + 1e-9).floor() as u64;
                    base.push(b);
                    if w > 0.0 {
                        rem.push((z, exact - b as f64));
                    }
                }
                let assigned: u64 = base.iter().sum();
                let mut deficit = steps_total.saturating_sub(assigned);
                // largest remainder first, lowest z on ties
                rem.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                let mut k = 0;
                while deficit > 0 {
                    if rem.is_empty() {
                        return Err(Error::QuantizationInfeasible(format!(
                            "state {}: row (x={x}, y={y}) has no positive entry to absorb grid mass",
                            state.name()
                        )));
                    }
                    base[rem[k % rem.len()].0] += 1;
                    k += 1;
                    deficit -= 1;
                }
                // domination fixups: move one step at a time from the row max
                for _ in 0..steps_total {
                    let viol = (0..nz).find(|&z| {
                        row[z] > 0.0 && row[z] > factor * (base[z] as f64 * grid) * (1.0 + 1e-12)
                    });
                    let Some(z_bad) = viol else { break };
                    let donor = (0..nz)
                        .filter(|&z| z != z_bad && base[z] > 0)
                        .max_by(|&a, &b| base[a].cmp(&base[b]))
                        .ok_or_else(|| {
                            Error::QuantizationInfeasible(format!(
                                "state {}: row (x={x}, y={y}) cannot satisfy domination at z={z_bad}",
                                state.name()
                            ))
                        })?;
                    base[donor] -= 1;
                    base[z_bad] += 1;
                }
                // verify both inequalities on this row
                for z in 0..nz {
                    let f = base[z] as f64 * grid;
                    let dev = (row[z] - f).abs();
                    if dev > dev_bound + 1e-12 {
                        return Err(Error::QuantizationInfeasible(format!(
                            "state {}: entry (x={x}, y={y}, z={z}) deviates by {dev}, bound {dev_bound}",
                            state.name()
                        )));
                    }
                    if row[z] > factor * f * (1.0 + 1e-12) + 1e-15 {
                        return Err(Error::QuantizationInfeasible(format!(
                            "state {}: entry (x={x}, y={y}, z={z}) violates domination: {} > {factor} * {f}",
                            state.name(),
                            row[z]
                        )));
                    }
                    max_dev = max_dev.max(dev);
                }
                debug_assert_eq!(base.iter().sum::<u64>(), steps_total);
                steps.extend(base);
            }
        }
        // dedup within the same joint cell only
        let existing = (0..grid_channels.len())
            .find(|&g| cell_tags[g] == tag && keys[g] == steps);
        let gi = match existing {
            Some(g) => g,
            None => {
                let nested: Vec<Vec<Vec<f64>>> = (0..c.x_len())
                    .map(|x| {
                        (0..c.y_len())
                            .map(|y| {
                                (0..nz)
                                    .map(|z| {
                                        steps[(x * c.y_len() + y) * nz + z] as f64 * grid
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                let name = format!("{}_grid", state.name());
                grid_channels.push(Channel::new(&name, nested)?);
                cell_tags.push(tag);
                keys.push(steps);
                grid_channels.len() - 1
            }
        };
        assignment.push(gi);
    }

    Ok(QuantizationResult {
        grid_channels,
        cell_tags,
        assignment,
        n_param,
        domination_factor: factor,
        max_deviation: max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn two_state_channel() -> CompoundChannel {
        let w1 = Channel::new(
            "W1",
            vec![
                vec![vec![0.9, 0.1], vec![0.4, 0.6]],
                vec![vec![0.6, 0.4], vec![0.0, 1.0]],
            ],
        )
        .unwrap();
        let w2 = Channel::new(
            "W2",
            vec![
                vec![vec![0.9, 0.1], vec![0.6, 0.4]],
                vec![vec![0.4, 0.6], vec![0.0, 1.0]],
            ],
        )
        .unwrap();
        CompoundChannel::no_csit(vec![w1, w2]).unwrap()
    }

    #[test]
    fn joint_cell_single_state_trivial() {
        let w = Channel::new("w", vec![vec![vec![1.0, 0.0]]]).unwrap();
        let c = CompoundChannel::no_csit(vec![w]).unwrap();
        assert_eq!(c.joint_cell(0, 0).unwrap(), vec![0]);
    }

    #[test]
    fn joint_cell_splits_on_t1() {
        let w1 = Channel::new("a", vec![vec![vec![1.0, 0.0]]]).unwrap();
        let w2 = Channel::new("b", vec![vec![vec![0.0, 1.0]]]).unwrap();
        let c = CompoundChannel::from_states(
            vec![w1, w2],
            vec!["cell_a".into(), "cell_b".into()],
            vec!["*".into(), "*".into()],
            None,
        )
        .unwrap();
        assert_eq!(c.joint_cell_by_label("cell_a", "*").unwrap(), vec![0]);
        assert_eq!(c.joint_cell_by_label("cell_b", "*").unwrap(), vec![1]);
        assert!(c.joint_cell_by_label("nope", "*").is_err());
        // cells partition the state list
        let mut all: Vec<usize> = Vec::new();
        for t1 in 0..c.num_t1() {
            for t2 in 0..c.num_t2() {
                all.extend(c.joint_cell(t1, t2).unwrap());
            }
        }
        all.sort();
        assert_eq!(all, vec![0, 1]);
    }

    #[test]
    fn joint_cell_paper_channel_no_csit() {
        let c = two_state_channel();
        assert_eq!(c.joint_cell(0, 0).unwrap(), vec![0, 1]);
        assert!(c.empty_joint_cells().is_empty());
    }

    #[test]
    fn parse_serialize_round_trip() {
        let c = two_state_channel();
        let text = c.serialize();
        let c2 = CompoundChannel::parse(&text).unwrap();
        assert_eq!(c2.serialize(), text);
        assert_eq!(c2.num_states(), 2);
        assert_eq!(c2.state(0).w(0, 0, 0), 0.9);
        assert_eq!(c2.state(1).w(0, 1, 0), 0.6);
    }

    #[test]
    fn parse_rejects_bad_row_sum_naming_row() {
        let text = r#"{ "X":1, "Y":1, "Z":2,
            "states":[ {"name":"bad", "matrix":[[[0.5, 0.4]]], "t1":"*", "t2":"*"} ] }"#;
        let err = CompoundChannel::parse(text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("x=0") && msg.contains("y=0"), "got: {msg}");
    }

    #[test]
    fn parse_rejects_inconsistent_alphabets() {
        let text = r#"{ "X":2, "Y":1, "Z":2,
            "states":[ {"name":"w", "matrix":[[[1.0, 0.0]]], "t1":"*", "t2":"*"} ] }"#;
        assert!(CompoundChannel::parse(text).is_err());
    }

    #[test]
    fn quantize_fixed_point_on_grid() {
        // entries already multiples of 1/(2N): f(W) = W
        let w = Channel::new("grid", vec![vec![vec![0.75, 0.25]]]).unwrap();
        let c = CompoundChannel::no_csit(vec![w]).unwrap();
        let q = quantize(&c, 8).unwrap();
        assert_eq!(q.grid_channels.len(), 1);
        assert_eq!(q.grid_channels[0].w(0, 0, 0), 0.75);
        assert!(q.max_deviation < 1e-12);
    }

    #[test]
    fn quantize_rejects_small_n() {
        let c = two_state_channel();
        assert!(matches!(quantize(&c, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn quantize_random_channels_satisfy_both_inequalities() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for trial in 0..60 {
            let mut states = Vec::new();
            for s in 0..2 {
                let mut m = vec![vec![vec![0.0; 2]; 2]; 2];
                for x in 0..2 {
                    for y in 0..2 {
                        let p: f64 = rng.gen();
                        // occasionally force an exact zero
                        let p = if rng.gen::<f64>() < 0.2 { 0.0 } else { p };
                        m[x][y] = vec![p, 1.0 - p];
                    }
                }
                states.push(Channel::new(&format!("s{s}"), m).unwrap());
            }
            let c = CompoundChannel::no_csit(states).unwrap();
            for &n in &[10u64, 50] {
                let q = quantize(&c, n).expect("quantization feasible");
                let steps_total = 2 * n;
                // exhaustive entry check is the oracle
                for (si, state) in c.states().iter().enumerate() {
                    let g = &q.grid_channels[q.assignment[si]];
                    for x in 0..2 {
                        for y in 0..2 {
                            let mut row_steps = 0u64;
                            for z in 0..2 {
                                let w = state.w(x, y, z);
                                let f = g.w(x, y, z);
                                assert!(
                                    (w - f).abs() <= 2.0 / n as f64 + 1e-12,
                                    "trial {trial}: deviation bound failed"
                                );
                                assert!(
                                    w <= q.domination_factor * f + 1e-12,
                                    "trial {trial}: domination failed: {w} > {} * {f}",
                                    q.domination_factor
                                );
                                let steps = (f * steps_total as f64).round();
                                assert!(
                                    (f - steps / steps_total as f64).abs() < 1e-12,
                                    "entry not on grid"
                                );
                                row_steps += steps as u64;
                            }
                            assert_eq!(row_steps, steps_total, "row does not sum to 1 on grid");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quantize_keeps_cells_disjoint_by_tagging() {
        // identical matrices in different CSIT cells stay distinct grid channels
        let w = vec![vec![vec![0.3, 0.7]]];
        let s1 = Channel::new("a", w.clone()).unwrap();
        let s2 = Channel::new("b", w).unwrap();
        let c = CompoundChannel::from_states(
            vec![s1, s2],
            vec!["p".into(), "q".into()],
            vec!["*".into(), "*".into()],
            None,
        )
        .unwrap();
        let q = quantize(&c, 10).unwrap();
        assert_eq!(q.grid_channels.len(), 2);
        assert_ne!(q.cell_tags[0], q.cell_tags[1]);
    }

    #[test]
    fn grid_cardinality_bound_tiny_enumeration() {
        // |X| = |Y| = 1, |Z| = 2: rows on the grid of multiples of 1/(2N)
        // are (k, 2N - k) for k = 0..=2N, i.e. 2N + 1 channels, and the
        // bound is (2N + 1)^{|X||Y||Z|} = (2N + 1)^2.
        let n = 3u64;
        let total = 2 * n;
        let mut count = 0u64;
        for k in 0..=total {
            let _row = [k as f64 / total as f64, (total - k) as f64 / total as f64];
            count += 1;
        }
        assert!(count <= (2 * n + 1).pow(2));
        assert_eq!(count, 2 * n + 1);
    }
}

//! Region-level invariants: cooperation monotonicity, CSIT refinement,
//! saturation, inner-certificate consistency, and oracle checks for the
//! cooperation-budget quantities.

use confmac::channel::{Channel, CompoundChannel};
use confmac::policy::{InputPolicy, PolicyClass};
use confmac::region::{
    full_region_thresholds, min_conf_sum, optimize_region, sum_capacity_full_coop, RegionConfig,
};

fn two_state_channel() -> CompoundChannel {
    let w1 = Channel::new(
        "A",
        vec![
            vec![vec![0.85, 0.15], vec![0.3, 0.7]],
            vec![vec![0.5, 0.5], vec![0.1, 0.9]],
        ],
    )
    .unwrap();
    let w2 = Channel::new(
        "B",
        vec![
            vec![vec![0.7, 0.3], vec![0.45, 0.55]],
            vec![vec![0.25, 0.75], vec![0.05, 0.95]],
        ],
    )
    .unwrap();
    CompoundChannel::no_csit(vec![w1, w2]).unwrap()
}

fn cfg(c1: f64, c2: f64, seed: u64) -> RegionConfig {
    RegionConfig::conf(c1, c2, seed).with_dirs(16).with_restarts(24).with_u_size(3)
}

#[test]
fn more_cooperation_never_shrinks_the_region() {
    let ch = two_state_channel();
    let lo = optimize_region(&ch, &cfg(0.1, 0.05, 7)).unwrap();
    let mut hi_cfg = cfg(0.2, 0.1, 7);
    hi_cfg.extra_inits = lo.achieved_points.iter().map(|(_, p)| p.clone()).collect();
    let hi = optimize_region(&ch, &hi_cfg).unwrap();
    for ((d, v_lo), (_, v_hi)) in lo.support_samples.iter().zip(hi.support_samples.iter()) {
        assert!(
            *v_lo <= v_hi + 1e-6,
            "support shrank at direction {d:?}: {v_lo} > {v_hi}"
        );
    }
}

#[test]
fn csit_refinement_never_shrinks_the_region() {
    let states = two_state_channel().states().to_vec();
    let trivial = CompoundChannel::no_csit(states.clone()).unwrap();
    let full = CompoundChannel::full_csit(states).unwrap();
    let r_trivial = optimize_region(&trivial, &cfg(0.15, 0.15, 9)).unwrap();
    // lift each trivial-CSIT policy to the refined partition by
    // replicating its kernels across all joint cells
    let lift = |p: &InputPolicy| {
        InputPolicy::new(
            PolicyClass::P2,
            full.num_t1(),
            full.num_t2(),
            p.p0.clone(),
            vec![p.kernels1()[0].clone(); full.num_t1() * full.num_t2()],
            vec![p.kernels2()[0].clone(); full.num_t1() * full.num_t2()],
        )
        .unwrap()
    };
    let mut full_cfg = cfg(0.15, 0.15, 9);
    full_cfg.extra_inits = r_trivial.achieved_points.iter().map(|(_, p)| lift(p)).collect();
    let r_full = optimize_region(&full, &full_cfg).unwrap();
    for ((d, v_t), (_, v_f)) in
        r_trivial.support_samples.iter().zip(r_full.support_samples.iter())
    {
        assert!(
            *v_t <= v_f + 1e-6,
            "refining CSIT shrank support at {d:?}: {v_t} > {v_f}"
        );
    }
}

#[test]
fn saturation_beyond_alphabet_capacity() {
    // for C above log2(|X||Y||U|) + log2(|T1||T2|) the region stops growing
    let ch = two_state_channel();
    let c_sat = ((2.0f64 * 2.0 * 3.0).log2() + 1.0f64.log2()).ceil(); // = 4
    let a = optimize_region(&ch, &cfg(c_sat, c_sat, 13)).unwrap();
    let b = optimize_region(&ch, &cfg(c_sat + 1.0, c_sat + 1.0, 13)).unwrap();
    for ((d, va), (_, vb)) in a.support_samples.iter().zip(b.support_samples.iter()) {
        assert!(
            (va - vb).abs() <= 1e-6,
            "saturated region changed at {d:?}: {va} vs {vb}"
        );
    }
}

#[test]
fn achieved_points_carry_inner_certificates() {
    let ch = two_state_channel();
    let region = optimize_region(&ch, &cfg(0.1, 0.2, 15)).unwrap();
    region.validate(&ch, 0.1, 0.2).unwrap();
    // outer >= inner on every sampled direction
    for ((d, v), (point, _)) in
        region.support_samples.iter().zip(region.achieved_points.iter())
    {
        let inner: f64 = d.iter().zip(point.iter()).map(|(g, r)| g * r).sum();
        assert!(inner <= v + 1e-9);
    }
}

fn clean_channel() -> CompoundChannel {
    let mut m = vec![vec![vec![0.0; 4]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            m[x][y][2 * x + y] = 1.0;
        }
    }
    CompoundChannel::no_csit(vec![Channel::new("clean", m).unwrap()]).unwrap()
}

fn z_equals_x_channel() -> CompoundChannel {
    let m = vec![
        vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        vec![vec![0.0, 1.0], vec![0.0, 1.0]],
    ];
    CompoundChannel::no_csit(vec![Channel::new("z=x", m).unwrap()]).unwrap()
}

#[test]
fn sum_capacity_matches_joint_input_grid_oracle() {
    // full cooperation admits any joint input distribution on X x Y, so a
    // 0.01-resolution grid over the 3-simplex lower-bounds the optimum to
    // within the grid's modulus of continuity
    let channel = CompoundChannel::parse(confmac::cli::PAPER_EXAMPLE_JSON).unwrap();
    let (c_inf, _) =
        sum_capacity_full_coop(&channel, &RegionConfig::conf(0.0, 0.0, 3).with_restarts(32))
            .unwrap();
    let h = |v: &[f64]| -> f64 {
        v.iter().filter(|&&p| p > 1e-15).map(|&p| -p * p.log2()).sum()
    };
    let mut oracle = 0.0f64;
    let res = 100u32;
    for i in 0..=res {
        for j in 0..=res - i {
            for k in 0..=res - i - j {
                let q = [
                    i as f64 / res as f64,
                    j as f64 / res as f64,
                    k as f64 / res as f64,
                    (res - i - j - k) as f64 / res as f64,
                ];
                let mut min_i = f64::INFINITY;
                for s in 0..2 {
                    let w = channel.state(s);
                    let mut joint = [0.0f64; 8];
                    let mut z_marg = [0.0f64; 2];
                    for x in 0..2 {
                        for y in 0..2 {
                            for z in 0..2 {
                                let m = q[x * 2 + y] * w.w(x, y, z);
                                joint[(x * 2 + y) * 2 + z] = m;
                                z_marg[z] += m;
                            }
                        }
                    }
                    min_i = min_i.min(h(&q) + h(&z_marg) - h(&joint));
                }
                oracle = oracle.max(min_i);
            }
        }
    }
    assert!(
        (c_inf - oracle).abs() < 0.003,
        "optimizer {c_inf} vs grid oracle {oracle}"
    );
}

#[test]
fn minconf_is_zero_when_no_cooperation_needed() {
    let cfg = RegionConfig::conf(0.0, 0.0, 5).with_restarts(16);
    // clean parallel channel: the sum-capacity policy already carries all
    // information in the private parts
    let rep = min_conf_sum(&clean_channel(), &cfg).unwrap();
    assert!((rep.c_inf - 2.0).abs() < 1e-6);
    assert!(rep.value < 1e-4, "minconf = {}", rep.value);
    // single state, output copies x only
    let rep = min_conf_sum(&z_equals_x_channel(), &cfg).unwrap();
    assert!((rep.c_inf - 1.0).abs() < 1e-6);
    assert!(rep.value < 1e-4, "minconf = {}", rep.value);
}

#[test]
fn thresholds_trivial_values() {
    let cfg = RegionConfig::conf(0.0, 0.0, 6).with_restarts(16);
    // clean parallel channel: C_inf = 2, best conditional terms are 1 each
    let rep = full_region_thresholds(&clean_channel(), &cfg).unwrap();
    assert!((rep.threshold_1 - 1.0).abs() < 1e-5, "{rep:?}");
    assert!((rep.threshold_2 - 1.0).abs() < 1e-5, "{rep:?}");
    // z = x: sender 2 contributes nothing, so its threshold is all of C_inf
    let rep = full_region_thresholds(&z_equals_x_channel(), &cfg).unwrap();
    assert!(rep.best_conditional_2.abs() < 1e-9, "{rep:?}");
    assert!((rep.threshold_2 - rep.c_inf).abs() < 1e-9, "{rep:?}");
}

#[test]
fn common_message_region_of_clean_channel() {
    // z = (x, y): common rate alone reaches 2 bits, each private rate 1
    let clean = {
        let mut m = vec![vec![vec![0.0; 4]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                m[x][y][2 * x + y] = 1.0;
            }
        }
        CompoundChannel::no_csit(vec![Channel::new("clean", m).unwrap()]).unwrap()
    };
    let mut cfg = RegionConfig::cm(27).with_dirs(32).with_restarts(12);
    cfg.u_size = Some(2);
    let region = optimize_region(&clean, &cfg).unwrap();
    region.validate(&clean, 0.0, 0.0).unwrap();
    assert_eq!(region.dimension, 3);
    // ideal region: R1 <= 1, R2 <= 1, R0 + R1 + R2 <= 2; compare every
    // sampled support against the exact vertex maximum
    let vertices: [[f64; 3]; 7] = [
        [2.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [1.0, 0.0, 1.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0],
    ];
    for (d, v) in &region.support_samples {
        let ideal = vertices
            .iter()
            .map(|r| d[0] * r[0] + d[1] * r[1] + d[2] * r[2])
            .fold(0.0, f64::max);
        assert!(
            (v - ideal).abs() < 1e-6,
            "direction {d:?}: computed {v}, ideal {ideal}"
        );
    }
    let best_r1 = region
        .achieved_points
        .iter()
        .map(|(p, _)| p[1])
        .fold(0.0, f64::max);
    assert!(best_r1 <= 1.0 + 1e-9);
}

#[test]
fn region_csv_round_trips_through_a_parser() {
    // the CSV written by the CLI is parseable and reproduces the samples
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_confmac");
    let tmp = std::env::temp_dir().join(format!("confmac_csv_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let channel_file = tmp.join("channel.json");
    std::fs::write(&channel_file, confmac::cli::PAPER_EXAMPLE_JSON).unwrap();
    let out = tmp.join("region.csv");
    let status = Command::new(bin)
        .args([
            "region",
            "--channel",
            channel_file.to_str().unwrap(),
            "--dirs",
            "8",
            "--restarts",
            "4",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = 0;
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("dir_") {
            continue;
        }
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 3);
        let norm = (fields[0] * fields[0] + fields[1] * fields[1]).sqrt();
        assert!((norm - 1.0).abs() < 1e-9);
        assert!(fields[2] >= 0.0);
        rows += 1;
    }
    assert_eq!(rows, 8);
    std::fs::remove_dir_all(&tmp).ok();
}

//! Derivative-free simplex search (Nelder-Mead) used by the region
//! optimizer. Minimizes; callers negate to maximize.

/// Stopping and shape parameters for one local search.
#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    pub max_iters: usize,
    /// Stop when the simplex objective spread falls below this.
    pub tol: f64,
    /// Initial simplex step per coordinate.
    pub step: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { max_iters: 2000, tol: 1e-7, step: 0.5 }
    }
}

/// Runs Nelder-Mead from `x0`, returning the best point and value ever
/// evaluated (including the initial simplex).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NmOptions,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let alpha = 1.0;
    let gamma = 2.0;
    let rho = 0.5;
    let sigma = 0.5;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        simplex.push(p);
    }
    let mut scores: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut best = {
        let i = argmin(&scores);
        (simplex[i].clone(), scores[i])
    };

    for _ in 0..opts.max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best_i = order[0];
        let worst_i = order[dim];
        let second_worst_i = order[dim - 1];

        if (scores[worst_i] - scores[best_i]).abs() < opts.tol {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for d in 0..dim {
                centroid[d] += simplex[i][d];
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let reflect: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + alpha * (centroid[d] - simplex[worst_i][d]))
            .collect();
        let fr = f(&reflect);
        track(&mut best, &reflect, fr);

        if fr < scores[second_worst_i] && fr >= scores[best_i] {
            simplex[worst_i] = reflect;
            scores[worst_i] = fr;
            continue;
        }
        if fr < scores[best_i] {
            let expand: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + gamma * (reflect[d] - centroid[d]))
                .collect();
            let fe = f(&expand);
            track(&mut best, &expand, fe);
            if fe < fr {
                simplex[worst_i] = expand;
                scores[worst_i] = fe;
            } else {
                simplex[worst_i] = reflect;
                scores[worst_i] = fr;
            }
            continue;
        }
        let contract: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + rho * (simplex[worst_i][d] - centroid[d]))
            .collect();
        let fc = f(&contract);
        track(&mut best, &contract, fc);
        if fc < scores[worst_i] {
            simplex[worst_i] = contract;
            scores[worst_i] = fc;
            continue;
        }
        for &i in order.iter().skip(1) {
            let shrunk: Vec<f64> = (0..dim)
                .map(|d| simplex[order[0]][d] + sigma * (simplex[i][d] - simplex[order[0]][d]))
                .collect();
            let fs = f(&shrunk);
            track(&mut best, &shrunk, fs);
            simplex[i] = shrunk;
            scores[i] = fs;
        }
    }
    best
}

fn track(best: &mut (Vec<f64>, f64), x: &[f64], fx: f64) {
    if fx < best.1 {
        best.0 = x.to_vec();
        best.1 = fx;
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut i = 0;
    for k in 1..v.len() {
        if v[k] < v[i] {
            i = k;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let f = |x: &[f64]| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2);
        let (x, fx) = nelder_mead(f, &[0.0, 0.0], &NmOptions::default());
        assert!(fx < 1e-6);
        assert!((x[0] - 2.0).abs() < 1e-3 && (x[1] + 1.0).abs() < 1e-3);
    }

    #[test]
    fn handles_piecewise_min_objective() {
        let f = |x: &[f64]| -((x[0]).min(1.0 - x[0])); // max at 0.5
        let (x, fx) = nelder_mead(f, &[0.1], &NmOptions::default());
        assert!((x[0] - 0.5).abs() < 1e-4);
        assert!((fx + 0.5).abs() < 1e-6);
    }

    #[test]
    fn best_ever_includes_initial_point() {
        // objective increasing away from origin: best must be the start
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let (_, fx) = nelder_mead(f, &[0.0, 0.0, 0.0], &NmOptions { max_iters: 0, tol: 1e-9, step: 0.5 });
        assert_eq!(fx, 0.0);
    }
}

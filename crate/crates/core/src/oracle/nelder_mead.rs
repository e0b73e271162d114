//! Nelder–Mead simplex minimization with dimension-adaptive coefficients.

pub struct NelderMead {
    pub initial_step: f64,
    pub diameter_tol: f64,
    pub max_evals: usize,
}

pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

impl NelderMead {
    /// Minimizes `f` from `start`. Once the simplex collapses it is rebuilt
    /// around the incumbent, and the search stops when a rebuilt simplex
    /// brings no improvement or the evaluation budget runs out.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, start: &[f64]) -> Minimum {
        let mut evals = 0usize;
        let mut best_x = start.to_vec();
        let mut best = f(start);
        evals += 1;
        let mut step = self.initial_step;
        loop {
            let (x, v, used) = self.run(
                &mut f,
                &best_x,
                best,
                step,
                self.max_evals.saturating_sub(evals),
            );
            evals += used;
            let improved = v < best - 1e-15 * best.abs().max(1e-300);
            if v <= best {
                best = v;
                best_x = x;
            }
            if !improved || evals + 2 * start.len() + 2 >= self.max_evals {
                break;
            }
            step = (step * 0.5).max(1e-6);
        }
        Minimum {
            x: best_x,
            value: best,
            evaluations: evals,
        }
    }

    fn run<F: FnMut(&[f64]) -> f64>(
        &self,
        f: &mut F,
        start: &[f64],
        f_start: f64,
        step: f64,
        budget: usize,
    ) -> (Vec<f64>, f64, usize) {
        let n = start.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
        let mut evals = 0usize;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((start.to_vec(), f_start));
        for i in 0..n {
            if evals >= budget {
                break;
            }
            let mut x = start.to_vec();
            x[i] += step;
            let v = f(&x);
            evals += 1;
            simplex.push((x, v));
        }
        if simplex.len() < n + 1 {
            let (x, v) = simplex
                .into_iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("start");
            return (x, v, evals);
        }
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        while evals < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if diameter < self.diameter_tol {
                break;
            }
            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let (worst, f_worst) = simplex[n].clone();
            let f_best = simplex[0].1;
            let f_second = simplex[n - 1].1;
            let along = |t: f64, out: &mut Vec<f64>| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&worst) {
                    *o = c + t * (c - w);
                }
            };
            along(alpha, &mut trial);
            let f_r = f(&trial);
            evals += 1;
            if f_r < f_best {
                let reflected = trial.clone();
                along(beta, &mut trial);
                let f_e = f(&trial);
                evals += 1;
                simplex[n] = if f_e < f_r {
                    (trial.clone(), f_e)
                } else {
                    (reflected, f_r)
                };
                continue;
            }
            if f_r < f_second {
                simplex[n] = (trial.clone(), f_r);
                continue;
            }
            let (t, f_ref) = if f_r < f_worst {
                (gamma, f_r)
            } else {
                (-gamma, f_worst)
            };
            along(t, &mut trial);
            let f_c = f(&trial);
            evals += 1;
            if f_c <= f_ref {
                simplex[n] = (trial.clone(), f_c);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, v) in simplex[1..].iter_mut() {
                if evals >= budget {
                    break;
                }
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + delta * (*xi - bi);
                }
                *v = f(x);
                evals += 1;
            }
        }
        let (x, v) = simplex
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        (x, v, evals)
    }
}

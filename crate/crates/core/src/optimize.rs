//! Derivative-free minimization (Nelder–Mead) used for maximum-likelihood fits.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Absolute tolerance on the spread of objective values across the simplex.
    pub f_tol: f64,
    /// Tolerance on the simplex diameter.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            f_tol: 1e-10,
            x_tol: 1e-12,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl NelderMead {
    /// Minimize `f` from `x0` with initial simplex edge lengths `step`.
    ///
    /// Non-finite objective values are treated as `+inf`, so infeasible
    /// regions simply repel the simplex.
    pub fn minimize<F>(&self, f: F, x0: &[f64], step: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = x0.len();
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += step[i];
            simplex.push(p);
        }
        let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut iterations = 0;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (spread.is_finite() && spread <= self.f_tol) || diameter <= self.x_tol {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = along(alpha);
            let fr = eval(&reflected);
            if fr < values[0] {
                let expanded = along(gamma);
                let fe = eval(&expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[n] {
                let c = along(rho);
                let fc = eval(&c);
                (c, fc)
            } else {
                let c = along(-rho);
                let fc = eval(&c);
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
                continue;
            }
            // shrink towards the best vertex
            for i in 1..=n {
                let shrunk: Vec<f64> = simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, p)| b + sigma * (p - b))
                    .collect();
                values[i] = eval(&shrunk);
                simplex[i] = shrunk;
            }
        }
        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap_or(0);
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
        }
    }

    /// Minimize, then restart from the optimum with a fresh simplex until the
    /// objective stops improving. Restarts undo premature simplex collapse.
    pub fn minimize_with_restarts<F>(&self, f: F, x0: &[f64], step: &[f64], restarts: usize) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut best = self.minimize(&f, x0, step);
        for round in 0..restarts {
            let scale = 0.1f64.powi(round as i32 + 1);
            let local: Vec<f64> = step
                .iter()
                .zip(&best.x)
                .map(|(s, x)| (s * scale).max(1e-8 * x.abs().max(1.0)))
                .collect();
            let next = self.minimize(&f, &best.x, &local);
            let improved = next.value < best.value - self.f_tol;
            if next.value <= best.value {
                best = Minimum {
                    iterations: best.iterations + next.iterations,
                    ..next
                };
            }
            if !improved {
                break;
            }
        }
        best
    }
}

//! Quasi-Newton minimizer with an Armijo backtracking line search.

/// Stopping and line-search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Stop once an accepted step changes the objective by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Step-length reduction per backtrack.
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { tolerance: 1e-7, max_iterations: 1000, armijo: 1e-4, shrink: 0.5, max_backtracks: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective after each accepted step, starting with the initial point.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f(x, k)`, where `k` is the iteration index (the objective may
/// change between iterations, e.g. a ramped penalty). `grad` must be the
/// gradient of the same objective. `on_step` sees every accepted point.
///
/// A change of the objective at fixed `x` between iterations restarts the
/// convergence test for that iteration.
pub fn minimize(
    x0: &[f64],
    options: &BfgsOptions,
    mut f: impl FnMut(&[f64], usize) -> f64,
    mut grad: impl FnMut(&[f64], usize) -> Vec<f64>,
    mut on_step: impl FnMut(usize, &[f64], f64),
) -> BfgsOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x, 0);
    let mut g = grad(&x, 0);
    let mut trace = vec![fx];
    on_step(0, &x, fx);
    // inverse Hessian approximation, row-major
    let identity = |scale: f64| {
        let mut m = vec![0.0; n * n];
        (0..n).for_each(|i| m[i * n + i] = scale);
        m
    };
    let mut hinv = identity(1.0);
    let mut scaled = false;
    let mut converged = n == 0;
    let mut k = 0;
    while !converged && k < options.max_iterations {
        let mut objective_moved = false;
        if k > 0 {
            let refreshed = f(&x, k);
            if refreshed != fx {
                fx = refreshed;
                g = grad(&x, k);
                objective_moved = true;
            }
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hinv = identity(1.0);
            scaled = false;
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        if slope == 0.0 {
            converged = true;
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..options.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            let ft = f(&trial, k);
            if ft <= fx + options.armijo * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= options.shrink;
        }
        let Some((x_new, f_new)) = accepted else {
            // no descent along a descent direction: stationary to working precision
            converged = dot(&g, &g).sqrt() < 1e-5;
            break;
        };
        let g_new = grad(&x_new, k);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if !scaled {
                hinv = identity(sy / dot(&y, &y));
                scaled = true;
            }
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            let r = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -r * (s[i] * hy[j] + hy[i] * s[j]) + (r * r * yhy + r) * s[i] * s[j];
                }
            }
        }
        let delta = f_new - fx;
        x = x_new;
        fx = f_new;
        g = g_new;
        k += 1;
        trace.push(fx);
        on_step(k, &x, fx);
        if delta.abs() < options.tolerance && !objective_moved {
            converged = true;
        }
    }
    BfgsOutcome { x, value: fx, trace, iterations: k, converged }
}

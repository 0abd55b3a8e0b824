//! Differential evolution with Latin-hypercube initialization, a fixed
//! evaluation budget, and an optional bounded quasi-Newton polish.
//!
//! The generation loop is best/1/bin: mutation around the current best with
//! a scale factor dithered once per generation, binomial crossover with one
//! forced coordinate, greedy one-to-one selection, and trials replacing
//! their parents as soon as they win (so improved individuals serve as
//! donors within the same generation). No convergence test is applied; the
//! DE phase always spends exactly `NP * (max_iter + 1)` evaluations, where
//! `NP = pop * d` and the initial population accounts for the `+ 1`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::test_functions::{BoxDomain, ObjectiveFunction};

/// Differential-evolution settings.
///
/// `pop` is a population multiplier: the actual population holds
/// `pop * d` individuals for a `d`-dimensional problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DEConfig {
    pub pop: usize,
    pub max_iter: usize,
    pub polish: bool,
    /// Per-generation dither interval for the mutation scale factor.
    pub mutation_range: (f64, f64),
    pub crossover_prob: f64,
    pub seed: u64,
}

impl DEConfig {
    /// Settings with the conventional strategy constants: scale factor
    /// dithered in `[0.5, 1.0)` and crossover probability `0.7`.
    pub fn new(pop: usize, max_iter: usize, polish: bool, seed: u64) -> Self {
        Self {
            pop,
            max_iter,
            polish,
            mutation_range: (0.5, 1.0),
            crossover_prob: 0.7,
            seed,
        }
    }

    pub fn population_size(&self, dim: usize) -> usize {
        self.pop * dim
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.pop == 0 || self.max_iter == 0 {
            return Err(Error::InvalidConfig(format!(
                "pop and max_iter must be positive, got pop={} max_iter={}",
                self.pop, self.max_iter
            )));
        }
        if self.population_size(dim) < 4 {
            return Err(Error::InvalidConfig(format!(
                "population {} (pop={} x d={}) is too small for best/1 mutation; need at least 4",
                self.population_size(dim),
                self.pop,
                dim
            )));
        }
        let (lo, hi) = self.mutation_range;
        if !(lo > 0.0 && hi < 2.0 && lo <= hi) {
            return Err(Error::InvalidConfig(format!(
                "mutation range ({lo}, {hi}) must lie within (0, 2)"
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::InvalidConfig(format!(
                "crossover probability {} must lie in [0, 1]",
                self.crossover_prob
            )));
        }
        Ok(())
    }
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub de_evals: u64,
    pub polish_evals: u64,
    pub total_evals: u64,
    pub seed_used: u64,
}

/// Latin-hypercube sample of `n` points in `domain`.
///
/// Each axis is split into `n` equal strata holding exactly one coordinate,
/// uniformly jittered within its stratum; the stratum order is permuted
/// independently per dimension.
pub fn latin_hypercube<R: Rng + ?Sized>(n: usize, domain: &BoxDomain, rng: &mut R) -> Vec<Vec<f64>> {
    let d = domain.dim();
    let mut points = vec![vec![0.0f64; d]; n];
    for j in 0..d {
        let lo = domain.lower()[j];
        let width = (domain.upper()[j] - lo) / n as f64;
        let mut coords: Vec<f64> = (0..n)
            .map(|k| lo + (k as f64 + rng.random::<f64>()) * width)
            .collect();
        coords.shuffle(rng);
        for (point, c) in points.iter_mut().zip(coords) {
            point[j] = c;
        }
    }
    points
}

/// Minimizes `objective` by differential evolution under a fixed budget,
/// optionally followed by a quasi-Newton polish of the best point.
///
/// Deterministic: identical config (including seed) yields a bit-identical
/// [`RunRecord`]. The polish result is kept only when it improves the DE
/// best.
pub fn de_minimize(objective: &mut ObjectiveFunction, config: &DEConfig) -> Result<RunRecord> {
    let domain = objective.domain().clone();
    let d = domain.dim();
    config.validate(d)?;
    let np = config.population_size(d);
    let start_count = objective.eval_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut population = latin_hypercube(np, &domain, &mut rng);
    let mut energies: Vec<f64> = population.iter().map(|x| objective.evaluate(x)).collect();
    let mut best = argmin(&energies);

    for _ in 0..config.max_iter {
        let scale = dither(config.mutation_range, &mut rng);
        for cand in 0..np {
            let (r0, r1) = two_distinct_donors(np, cand, &mut rng);
            let jrand = rng.random_range(0..d);
            let mut trial: Vec<f64> = (0..d)
                .map(|j| {
                    if j == jrand || rng.random::<f64>() < config.crossover_prob {
                        population[best][j] + scale * (population[r0][j] - population[r1][j])
                    } else {
                        population[cand][j]
                    }
                })
                .collect();
            // Repair: resample violating coordinates uniformly within bounds.
            for (j, t) in trial.iter_mut().enumerate() {
                if *t < domain.lower()[j] || *t > domain.upper()[j] {
                    *t = rng.random_range(domain.lower()[j]..domain.upper()[j]);
                }
            }
            let energy = objective.evaluate(&trial);
            if energy < energies[cand] {
                population[cand] = trial;
                energies[cand] = energy;
                if energy < energies[best] {
                    best = cand;
                }
            }
        }
    }

    let de_evals = objective.eval_count() - start_count;
    debug_assert_eq!(de_evals, (np * (config.max_iter + 1)) as u64);

    let mut best_x = population[best].clone();
    let mut best_f = energies[best];
    let mut polish_evals = 0;
    if config.polish {
        let before = objective.eval_count();
        let polished = quasi_newton_polish(objective, &best_x)?;
        polish_evals = objective.eval_count() - before;
        if polished.f < best_f {
            best_x = polished.x;
            best_f = polished.f;
        }
    }

    Ok(RunRecord {
        best_x,
        best_f,
        de_evals,
        polish_evals,
        total_evals: de_evals + polish_evals,
        seed_used: config.seed,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn dither((lo, hi): (f64, f64), rng: &mut impl Rng) -> f64 {
    if lo < hi {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn two_distinct_donors(np: usize, cand: usize, rng: &mut impl Rng) -> (usize, usize) {
    let r0 = loop {
        let r = rng.random_range(0..np);
        if r != cand {
            break r;
        }
    };
    let r1 = loop {
        let r = rng.random_range(0..np);
        if r != cand && r != r0 {
            break r;
        }
    };
    (r0, r1)
}

/// Result of [`quasi_newton_polish`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolishResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// Objective calls consumed, finite-difference probes included.
    pub evals: u64,
}

const POLISH_MAX_ITER: usize = 100;
const POLISH_GRAD_TOL: f64 = 1e-8;
const FD_STEP_REL: f64 = 1e-8;
// Relative function-decrease floor below which further iterations are noise
// for a forward-difference gradient.
const POLISH_F_TOL_REL: f64 = 2.22e-9;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 25;

/// Forward-difference gradient with per-coordinate step
/// `FD_STEP_REL * (1 + |x_i|)`, clamped probes staying inside the box.
pub fn forward_diff_gradient(
    objective: &mut ObjectiveFunction,
    x: &[f64],
    fx: f64,
) -> Vec<f64> {
    let domain = objective.domain().clone();
    (0..x.len())
        .map(|i| {
            let h = FD_STEP_REL * (1.0 + x[i].abs());
            // Probe backwards if a forward step would leave the box.
            let h = if x[i] + h > domain.upper()[i] { -h } else { h };
            let mut probe = x.to_vec();
            probe[i] += h;
            (objective.evaluate(&probe) - fx) / h
        })
        .collect()
}

/// Bounded quasi-Newton descent (BFGS inverse-Hessian update, backtracking
/// line search, iterates clamped to the box) from `x0`.
///
/// Stops when the finite-difference gradient norm falls below `1e-8`, after
/// 100 iterations, or when progress drops below the resolution a
/// forward-difference gradient supports. Every objective call, probe or
/// line-search trial, is counted in `evals`.
pub fn quasi_newton_polish(
    objective: &mut ObjectiveFunction,
    x0: &[f64],
) -> Result<PolishResult> {
    let domain = objective.domain().clone();
    let d = domain.dim();
    if x0.len() != d {
        return Err(Error::InvalidArgument(format!(
            "start point has dimension {}, domain has {}",
            x0.len(),
            d
        )));
    }
    if !domain.contains(x0) {
        return Err(Error::OutOfDomain(format!(
            "polish start {x0:?} outside the domain"
        )));
    }

    let start = objective.eval_count();
    let mut x = x0.to_vec();
    let mut fx = objective.evaluate(&x);
    let mut grad = forward_diff_gradient(objective, &x, fx);

    // Inverse-Hessian approximation, row-major d x d.
    let mut h_inv = identity(d);

    for iter in 0..POLISH_MAX_ITER {
        if norm(&grad) < POLISH_GRAD_TOL {
            break;
        }

        let mut direction = neg_mat_vec(&h_inv, &grad);
        if dot(&direction, &grad) >= 0.0 {
            // Curvature information went bad; restart from steepest descent.
            h_inv = identity(d);
            direction = grad.iter().map(|g| -g).collect();
        }

        // Backtracking line search on the clamped step. Armijo decides; a
        // merely-improving point is kept as a fallback in case clamping
        // spoils the sufficient-decrease test everywhere.
        let mut alpha = 1.0;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        let mut fallback: Option<(Vec<f64>, f64)> = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut x_new: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + alpha * di)
                .collect();
            domain.clamp(&mut x_new);
            if x_new == x {
                alpha *= 0.5;
                continue;
            }
            let f_new = objective.evaluate(&x_new);
            let step_dot_grad: f64 = x_new
                .iter()
                .zip(&x)
                .zip(&grad)
                .map(|((n, o), g)| (n - o) * g)
                .sum();
            if f_new <= fx + ARMIJO_C1 * step_dot_grad {
                accepted = Some((x_new, f_new));
                break;
            }
            if f_new < fx && fallback.as_ref().is_none_or(|(_, fb)| f_new < *fb) {
                fallback = Some((x_new, f_new));
            }
            alpha *= 0.5;
        }

        let Some((x_new, f_new)) = accepted.or(fallback) else {
            if iter == 0 {
                // Nothing improved from the start point: already converged
                // or a pathological start; report it unchanged.
                return Ok(PolishResult {
                    x: x0.to_vec(),
                    f: fx,
                    evals: objective.eval_count() - start,
                });
            }
            break;
        };

        let f_drop = fx - f_new;
        let grad_new = forward_diff_gradient(objective, &x_new, f_new);

        // BFGS update of the inverse Hessian.
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(n, o)| n - o).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(n, o)| n - o).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            bfgs_update(&mut h_inv, &s, &y, sy);
        }

        x = x_new;
        fx = f_new;
        grad = grad_new;

        if f_drop <= POLISH_F_TOL_REL * fx.abs().max(1.0) {
            break;
        }
    }

    Ok(PolishResult {
        x,
        f: fx,
        evals: objective.eval_count() - start,
    })
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

fn neg_mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d)
        .map(|i| -(0..d).map(|j| m[i * d + j] * v[j]).sum::<f64>())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T with rho = 1/(s.y).
fn bfgs_update(h_inv: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let d = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|j| h_inv[i * d + j] * y[j]).sum())
        .collect();
    let yhy = dot(y, &hy);
    for i in 0..d {
        for j in 0..d {
            h_inv[i * d + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

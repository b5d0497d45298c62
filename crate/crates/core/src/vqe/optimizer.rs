use std::fmt;

use crate::error::Result;

/// Function being minimised. `value` returns an evaluation id plus the value; the optimiser
/// reports ids of points it moves to through `accept`.
pub trait Objective {
    fn value(&mut self, x: &[f64]) -> Result<(usize, f64)>;
    fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>>;
    fn accept(&mut self, id: usize);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    GradientTolerance,
    ZeroGradient,
    Stagnation,
    LineSearchFailed,
    MaxEvaluations,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::GradientTolerance => "gradient tolerance",
            Termination::ZeroGradient => "zero gradient at start",
            Termination::Stagnation => "stagnation",
            Termination::LineSearchFailed => "line search failed",
            Termination::MaxEvaluations => "max evaluations",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub termination: Termination,
    pub evaluations: usize,
}

/// Adaptive Nelder–Mead simplex.
#[derive(Debug, Clone)]
pub struct NelderMead {
    pub initial_step: f64,
    /// Converged when the spread of simplex values is below `ftol` and its
    /// diameter below `xtol`.
    pub ftol: f64,
    pub xtol: f64,
    pub max_evaluations: usize,
    /// Iterations without an improvement larger than `ftol` before giving up.
    pub stall_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 0.2,
            ftol: 1e-9,
            xtol: 1e-6,
            max_evaluations: 5000,
            stall_iterations: 200,
        }
    }
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
    id: usize,
}

impl NelderMead {
    pub fn minimize(&self, obj: &mut dyn Objective, x0: &[f64]) -> Result<OptimResult> {
        let n = x0.len();
        let mut evals = 0usize;
        let eval = |obj: &mut dyn Objective, x: Vec<f64>, evals: &mut usize| -> Result<Vertex> {
            *evals += 1;
            let (id, f) = obj.value(&x)?;
            Ok(Vertex { x, f, id })
        };

        let first = eval(obj, x0.to_vec(), &mut evals)?;
        obj.accept(first.id);
        if n == 0 {
            return Ok(OptimResult {
                x: first.x,
                f: first.f,
                termination: Termination::Converged,
                evaluations: 1,
            });
        }
        let mut simplex = vec![first];
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            simplex.push(eval(obj, x, &mut evals)?);
        }
        if simplex.iter().all(|v| v.f == simplex[0].f) {
            log::warn!(
                "flat initial simplex: the cost does not change around the starting point; \
                 try a random initialization"
            );
        }

        let nf = n as f64;
        let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
        let (rho, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf.max(2.0));
        let mut best = f64::INFINITY;
        let mut stall = 0usize;

        let termination = loop {
            simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
            if simplex[0].f < best {
                if best - simplex[0].f > self.ftol {
                    stall = 0;
                } else {
                    stall += 1;
                }
                best = simplex[0].f;
                obj.accept(simplex[0].id);
            } else {
                stall += 1;
            }
            let spread = simplex[n].f - simplex[0].f;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.x.iter().zip(&simplex[0].x).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.ftol && diameter <= self.xtol {
                break Termination::Converged;
            }
            if evals >= self.max_evaluations {
                break Termination::MaxEvaluations;
            }
            if stall >= self.stall_iterations {
                break Termination::Stagnation;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v.x[j]).sum::<f64>() / nf)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].x)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let r = eval(obj, along(alpha), &mut evals)?;
            if r.f < simplex[0].f {
                let e = eval(obj, along(alpha * gamma), &mut evals)?;
                simplex[n] = if e.f < r.f { e } else { r };
            } else if r.f < simplex[n - 1].f {
                simplex[n] = r;
            } else {
                let outside = r.f < simplex[n].f;
                let c = eval(
                    obj,
                    along(if outside { alpha * rho } else { -rho }),
                    &mut evals,
                )?;
                let limit = if outside { r.f } else { simplex[n].f };
                if c.f <= limit {
                    simplex[n] = c;
                } else {
                    let x_best = simplex[0].x.clone();
                    for v in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = x_best
                            .iter()
                            .zip(&v.x)
                            .map(|(b, xi)| b + sigma * (xi - b))
                            .collect();
                        *v = eval(obj, x, &mut evals)?;
                    }
                }
            }
        };
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        let v = simplex.swap_remove(0);
        Ok(OptimResult {
            x: v.x,
            f: v.f,
            termination,
            evaluations: evals,
        })
    }
}

/// Quasi-Newton with a dense inverse-Hessian BFGS update and backtracking Armijo search.
#[derive(Debug, Clone)]
pub struct Bfgs {
    /// Converged after `patience` consecutive accepted steps changing the value by less.
    pub ftol: f64,
    pub patience: usize,
    pub gtol: f64,
    pub max_evaluations: usize,
    /// Sufficient-decrease constant of the strong Wolfe conditions.
    pub armijo: f64,
    /// Curvature constant of the strong Wolfe conditions.
    pub curvature: f64,
    /// Trial points per line search.
    pub max_line_search: usize,
}

impl Default for Bfgs {
    fn default() -> Self {
        Self {
            ftol: 1e-9,
            patience: 5,
            gtol: 1e-7,
            max_evaluations: 5000,
            armijo: 1e-4,
            curvature: 0.9,
            max_line_search: 60,
        }
    }
}

enum SearchOutcome {
    Found(usize, Vec<f64>, f64, Vec<f64>),
    Failed,
    Budget,
}

/// Strong Wolfe line search with safeguarded quadratic interpolation in the zoom phase.
struct LineSearch<'a> {
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    slope0: f64,
    c1: f64,
    c2: f64,
    budget: usize,
    max_evaluations: usize,
}

struct Probe {
    step: f64,
    id: usize,
    x: Vec<f64>,
    f: f64,
    g: Option<Vec<f64>>,
    slope: f64,
}

impl LineSearch<'_> {
    fn probe(
        &self,
        obj: &mut dyn Objective,
        step: f64,
        evals: &mut usize,
    ) -> Result<Option<Probe>> {
        if *evals >= self.max_evaluations {
            return Ok(None);
        }
        let x: Vec<f64> = self
            .x
            .iter()
            .zip(self.d)
            .map(|(a, b)| a + step * b)
            .collect();
        let (id, f) = obj.value(&x)?;
        *evals += 1;
        Ok(Some(Probe {
            step,
            id,
            x,
            f,
            g: None,
            slope: f64::NAN,
        }))
    }

    fn differentiate(&self, obj: &mut dyn Objective, p: &mut Probe) -> Result<()> {
        let g = obj.gradient(&p.x)?;
        p.slope = dot(&g, self.d);
        p.g = Some(g);
        Ok(())
    }

    fn sufficient(&self, p: &Probe) -> bool {
        p.f <= self.f0 + self.c1 * p.step * self.slope0
    }

    fn curvature_ok(&self, p: &Probe) -> bool {
        p.slope.abs() <= -self.c2 * self.slope0
    }

    fn found(p: Probe) -> SearchOutcome {
        SearchOutcome::Found(p.id, p.x, p.f, p.g.expect("gradient evaluated"))
    }

    fn run(
        &self,
        obj: &mut dyn Objective,
        first_step: f64,
        evals: &mut usize,
    ) -> Result<SearchOutcome> {
        let mut prev = Probe {
            step: 0.0,
            id: usize::MAX,
            x: self.x.to_vec(),
            f: self.f0,
            g: None,
            slope: self.slope0,
        };
        let mut step = first_step;
        for i in 0..self.budget {
            let Some(mut cur) = self.probe(obj, step, evals)? else {
                return Ok(SearchOutcome::Budget);
            };
            if !cur.f.is_finite() {
                return Err(crate::error::VqeError::numerical(
                    "non-finite cost in line search",
                ));
            }
            if !self.sufficient(&cur) || (i > 0 && cur.f >= prev.f) {
                return self.zoom(obj, prev, cur, evals);
            }
            self.differentiate(obj, &mut cur)?;
            if self.curvature_ok(&cur) {
                return Ok(Self::found(cur));
            }
            if cur.slope >= 0.0 {
                return self.zoom(obj, cur, prev, evals);
            }
            step = cur.step * 2.0;
            prev = cur;
        }
        Ok(SearchOutcome::Failed)
    }

    /// `lo` satisfies sufficient decrease and has the lower value; the minimiser lies between.
    fn zoom(
        &self,
        obj: &mut dyn Objective,
        mut lo: Probe,
        mut hi: Probe,
        evals: &mut usize,
    ) -> Result<SearchOutcome> {
        for _ in 0..self.budget {
            let width = hi.step - lo.step;
            let denom = 2.0 * (hi.f - lo.f - lo.slope * width);
            let mut step = if denom > 0.0 && lo.slope.is_finite() {
                lo.step - lo.slope * width * width / denom
            } else {
                lo.step + 0.5 * width
            };
            let (a, b) = (lo.step.min(hi.step), lo.step.max(hi.step));
            let margin = 0.1 * (b - a);
            step = step.clamp(a + margin, b - margin);
            if (b - a) < 1e-14 * b.abs().max(1.0) {
                break;
            }
            let Some(mut cur) = self.probe(obj, step, evals)? else {
                return Ok(SearchOutcome::Budget);
            };
            if !cur.f.is_finite() {
                return Err(crate::error::VqeError::numerical(
                    "non-finite cost in line search",
                ));
            }
            if !self.sufficient(&cur) || cur.f >= lo.f {
                hi = cur;
                continue;
            }
            self.differentiate(obj, &mut cur)?;
            if self.curvature_ok(&cur) {
                return Ok(Self::found(cur));
            }
            if cur.slope * (hi.step - lo.step) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
        // accept the best decrease even without the curvature condition
        if lo.step > 0.0 {
            if lo.g.is_none() {
                self.differentiate(obj, &mut lo)?;
            }
            return Ok(Self::found(lo));
        }
        Ok(SearchOutcome::Failed)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Bfgs {
    pub fn minimize(&self, obj: &mut dyn Objective, x0: &[f64]) -> Result<OptimResult> {
        let n = x0.len();
        let mut x = x0.to_vec();
        let (id, mut f) = obj.value(&x)?;
        obj.accept(id);
        let mut evals = 1usize;
        let mut g = obj.gradient(&x)?;
        let done = |x: Vec<f64>, f: f64, t: Termination, evals: usize| OptimResult {
            x,
            f,
            termination: t,
            evaluations: evals,
        };
        if n == 0 {
            return Ok(done(x, f, Termination::Converged, evals));
        }
        if norm(&g) == 0.0 {
            log::warn!("gradient vanishes at the starting point; try a random initialization");
            return Ok(done(x, f, Termination::ZeroGradient, evals));
        }

        let identity = |n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect()
        };
        let mut h_inv = identity(n);
        let mut first = true;
        let mut quiet = 0usize;

        loop {
            if norm(&g) < self.gtol {
                return Ok(done(x, f, Termination::GradientTolerance, evals));
            }
            let mut d: Vec<f64> = h_inv.iter().map(|row| -dot(row, &g)).collect();
            let mut slope = dot(&d, &g);
            if slope >= 0.0 {
                h_inv = identity(n);
                d = g.iter().map(|v| -v).collect();
                slope = dot(&d, &g);
            }
            let step = if first {
                (1.0 / norm(&g)).min(1.0)
            } else {
                1.0
            };
            let search = LineSearch {
                x: &x,
                d: &d,
                f0: f,
                slope0: slope,
                c1: self.armijo,
                c2: self.curvature,
                budget: self.max_line_search,
                max_evaluations: self.max_evaluations,
            };
            let (id, x_new, f_new, g_new) = match search.run(obj, step, &mut evals)? {
                SearchOutcome::Found(id, x, f, g) => (id, x, f, g),
                SearchOutcome::Failed => {
                    return Ok(done(x, f, Termination::LineSearchFailed, evals));
                }
                SearchOutcome::Budget => return Ok(done(x, f, Termination::MaxEvaluations, evals)),
            };
            obj.accept(id);
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
                if first {
                    let scale = sy / dot(&y, &y);
                    h_inv.iter_mut().flatten().for_each(|v| *v *= scale);
                }
                // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
                let rho = 1.0 / sy;
                let hy: Vec<f64> = h_inv.iter().map(|row| dot(row, &y)).collect();
                let yhy = dot(&y, &hy);
                for i in 0..n {
                    for j in 0..n {
                        h_inv[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                            + (rho * rho * yhy + rho) * s[i] * s[j];
                    }
                }
            }
            first = false;
            let change = (f - f_new).abs();
            x = x_new;
            f = f_new;
            g = g_new;
            if change < self.ftol {
                quiet += 1;
                if quiet >= self.patience {
                    return Ok(done(x, f, Termination::Converged, evals));
                }
            } else {
                quiet = 0;
            }
        }
    }
}

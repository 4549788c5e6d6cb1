//! Projected-gradient ascent of `F(Q_fwd, Q_rev)` over CPTP reverse channels.
//!
//! The variable is the input-first Choi operator `C` of `R: B → A` on
//! `B ⊗ A`, with `Q_rev = (√τ ⊗ 1) Cᵀ (√τ ⊗ 1)`. Feasibility is restored
//! after every step by a Dykstra projection onto `{C ≥ 0} ∩ {Tr_A C = 1_B}`.
//! The closed-form solution is never used here.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fidelity::fidelity;
use crate::matcore::{
    check_square, frobenius, herm_eig, hermitian_part, identity, kron, partial_trace, spectral_fn,
    sqrtm, transpose_basis, ComplexMatrix, Subsystem,
};
use crate::random::{random_channel, seeded};
use crate::retrodiction::RetrodictionProblem;

/// Weight of the maximally mixed state mixed into `Q_rev` before evaluation.
const RANK_GUARD: f64 = 1e-12;
const PROJECTION_TOL: f64 = 1e-13;
const MAX_PROJECTION_ITERS: usize = 20_000;
const MAX_BACKTRACKS: usize = 60;
const ARMIJO: f64 = 1e-4;
/// Fidelity evaluations are only good to roundoff; steps losing less than
/// this still count as ascent.
const ASCENT_SLACK: f64 = 1e-13;
/// Iterations with total gain below `fid_tol` before giving up.
const STALL_WINDOW: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub fid_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub step_init: f64,
    pub backtrack_factor: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 5000,
            grad_tol: 1e-9,
            fid_tol: 1e-12,
            restarts: 5,
            seed: 0,
            step_init: 0.1,
            backtrack_factor: 0.5,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::ParseError {
        line,
        message: format!("bad value `{value}` for `{key}`"),
    })
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("fid_tol", self.fid_tol),
            ("step_init", self.step_init),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::invalid(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            )));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::invalid("restarts and max_iters must be at least 1"));
        }
        Ok(())
    }

    /// Overrides fields from `key = value` lines; `#` starts a comment.
    pub fn apply_options(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::ParseError {
                    line,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "max_iters" => self.max_iters = parse_value(line, key, value)?,
                "grad_tol" => self.grad_tol = parse_value(line, key, value)?,
                "fid_tol" => self.fid_tol = parse_value(line, key, value)?,
                "restarts" => self.restarts = parse_value(line, key, value)?,
                "seed" => self.seed = parse_value(line, key, value)?,
                "step_init" => self.step_init = parse_value(line, key, value)?,
                "backtrack_factor" => self.backtrack_factor = parse_value(line, key, value)?,
                other => {
                    return Err(Error::ParseError {
                        line,
                        message: format!("unknown option `{other}`"),
                    })
                }
            }
        }
        self.validate()
    }

    pub fn from_options_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut config = OptimizerConfig::default();
        config.apply_options(&std::fs::read_to_string(path)?)?;
        Ok(config)
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub choi: ComplexMatrix,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖C − Π(C + G)‖_F`.
    pub gradient_mapping: f64,
    /// Fidelity after each accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizerResult {
    /// Input-first Choi operator on `B ⊗ A`.
    pub best_choi: ComplexMatrix,
    pub best_fidelity: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub per_restart_fidelities: Vec<f64>,
    pub restarts: Vec<RestartOutcome>,
}

pub fn choi_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::invalid(format!(
            "Choi operators have shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(frobenius(&(a - b)))
}

fn project_psd(c: &ComplexMatrix) -> Result<ComplexMatrix> {
    spectral_fn(c, |x| x.max(0.0), 0.0)
}

fn project_tp(c: &ComplexMatrix, d_b: usize, d_a: usize) -> Result<ComplexMatrix> {
    let marginal = partial_trace(c, (d_b, d_a), Subsystem::First)?;
    let fix = (identity(d_b) - marginal).scale(1.0 / d_a as f64);
    Ok(c + kron(&fix, &identity(d_a)))
}

fn tp_residual(c: &ComplexMatrix, d_b: usize, d_a: usize) -> Result<f64> {
    Ok(frobenius(&(partial_trace(c, (d_b, d_a), Subsystem::First)? - identity(d_b))))
}

/// Euclidean projection onto the input-first Choi operators of CPTP maps
/// `B → A`, by Dykstra's alternating projections.
pub fn project_cptp(
    c: &ComplexMatrix,
    d_b: usize,
    d_a: usize,
    tol: f64,
    max_proj_iters: usize,
) -> Result<ComplexMatrix> {
    let n = check_square(c, "Choi operator")?;
    if n != d_b * d_a {
        return Err(Error::invalid(format!("Choi operator is {n}x{n}, expected {}", d_b * d_a)));
    }
    let mut x = hermitian_part(c);
    let mut p = ComplexMatrix::zeros(n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    let mut min_eig = f64::NEG_INFINITY;
    for _ in 0..max_proj_iters {
        let y = project_psd(&(&x + &p))?;
        p = &x + &p - &y;
        let next = project_tp(&(&y + &q), d_b, d_a)?;
        q = &y + &q - &next;
        let change = frobenius(&(&next - &x));
        x = next;
        min_eig = herm_eig(&x)?.min();
        if min_eig >= -tol && change <= tol.max(1e-15 * frobenius(&x)) {
            return Ok(x);
        }
    }
    Err(Error::ProjectionStall {
        iters: max_proj_iters,
        tp_residual: tp_residual(&x, d_b, d_a)?,
        min_eig,
    })
}

/// Objective and gradient for one problem, with the rank guard applied.
struct Objective<'a> {
    q_fwd: &'a ComplexMatrix,
    side: ComplexMatrix,
    d_b: usize,
    d_a: usize,
}

impl<'a> Objective<'a> {
    fn new(problem: &'a RetrodictionProblem) -> Result<Self> {
        let d_b = problem.forward().d_out();
        let d_a = problem.forward().d_in();
        Ok(Objective {
            q_fwd: problem.forward_process(),
            side: kron(&sqrtm(problem.reference().matrix())?, &identity(d_a)),
            d_b,
            d_a,
        })
    }

    fn q_rev(&self, c: &ComplexMatrix) -> ComplexMatrix {
        let n = self.d_b * self.d_a;
        let q = hermitian_part(&(&self.side * transpose_basis(c) * &self.side));
        q.scale(1.0 - RANK_GUARD) + identity(n).scale(RANK_GUARD / n as f64)
    }

    fn value(&self, c: &ComplexMatrix) -> Result<f64> {
        fidelity(self.q_fwd, &self.q_rev(c))
    }

    /// `((√τ ⊗ 1) ½Δ (√τ ⊗ 1))ᵀ`, the gradient of `F` with respect to `C`.
    fn gradient(&self, c: &ComplexMatrix) -> Result<ComplexMatrix> {
        let sigma = self.q_rev(c);
        let eig = herm_eig(&sigma)?;
        let floor = 1e-300_f64.max(1e-16 * eig.max());
        let root = eig.recompose(&eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect::<Vec<_>>());
        let inv_root = eig.recompose(&eig.eigenvalues.iter().map(|l| 1.0 / l.max(floor).sqrt()).collect::<Vec<_>>());
        let middle = spectral_fn(&(&root * self.q_fwd * &root), |x| x.max(0.0).sqrt(), 0.0)?;
        let delta = hermitian_part(&(&inv_root * middle * &inv_root));
        Ok(transpose_basis(&(&self.side * delta * &self.side)).scale(0.5))
    }
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn run_restart(obj: &Objective, start: ComplexMatrix, config: &OptimizerConfig) -> Result<RestartOutcome> {
    let project = |m: &ComplexMatrix| {
        let tol = PROJECTION_TOL * frobenius(m).max(1.0);
        project_cptp(m, obj.d_b, obj.d_a, tol, MAX_PROJECTION_ITERS)
    };
    // Projected-gradient residual `‖C − Π(C + tG)‖ / t`, with `t ≤ 1` keeping
    // the step within the feasible set's diameter.
    let diameter = 2.0 * obj.d_b as f64;
    let residual = |c: &ComplexMatrix, g: &ComplexMatrix| -> Result<f64> {
        let t = (diameter / frobenius(g).max(f64::MIN_POSITIVE)).min(1.0);
        Ok(frobenius(&(c - project(&(c + g.scale(t)))?)) / t)
    };
    let mut c = project(&start)?;
    let mut f = obj.value(&c)?;
    let mut g = obj.gradient(&c)?;
    let mut history = vec![f];
    let mut step = config.step_init;
    let mut gradient_mapping = residual(&c, &g)?;
    let mut iterations = 0;
    while iterations < config.max_iters && gradient_mapping > config.grad_tol {
        iterations += 1;
        let mut accepted = None;
        let mut trial_step = step.min(2.0 * diameter / frobenius(&g).max(f64::MIN_POSITIVE));
        for _ in 0..MAX_BACKTRACKS {
            let trial = project(&(&c + g.scale(trial_step)))?;
            let f_trial = obj.value(&trial)?;
            if f_trial >= f + ARMIJO * inner(&g, &(&trial - &c)) - ASCENT_SLACK {
                accepted = Some((trial, f_trial));
                break;
            }
            trial_step *= config.backtrack_factor;
        }
        let Some((next, f_next)) = accepted else {
            break;
        };
        let g_next = obj.gradient(&next)?;
        // Barzilai–Borwein step for the next trial.
        let s = &next - &c;
        let y = &g_next - &g;
        let sy = inner(&s, &y).abs();
        step = if sy > 0.0 {
            (inner(&s, &s) / sy).clamp(1e-8, 1e8)
        } else {
            config.step_init
        };
        c = next;
        f = f_next;
        g = g_next;
        history.push(f);
        gradient_mapping = residual(&c, &g)?;
        if history.len() > STALL_WINDOW && f - history[history.len() - 1 - STALL_WINDOW] < config.fid_tol {
            break;
        }
    }
    Ok(RestartOutcome {
        choi: c,
        fidelity: f,
        iterations,
        converged: gradient_mapping <= config.grad_tol,
        gradient_mapping,
        history,
    })
}

/// Maximizes the process fidelity from `config.restarts` starting points:
/// the maximally depolarizing channel first, then seeded random channels.
pub fn maximize_fidelity(problem: &RetrodictionProblem, config: &OptimizerConfig) -> Result<OptimizerResult> {
    config.validate()?;
    let obj = Objective::new(problem)?;
    let (d_b, d_a) = (obj.d_b, obj.d_a);
    let mut rng = seeded(config.seed);
    let mut restarts = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        let start = if r == 0 {
            identity(d_b * d_a).scale(1.0 / d_a as f64)
        } else {
            random_channel(d_b, d_a, &mut rng).choi_input_first()
        };
        let outcome = run_restart(&obj, start, config)?;
        log::debug!(
            "restart {r}: F = {:.15}, {} iterations, gradient mapping {:e}",
            outcome.fidelity,
            outcome.iterations,
            outcome.gradient_mapping
        );
        restarts.push(outcome);
    }
    let best = restarts
        .iter()
        .enumerate()
        .fold(0, |best, (i, o)| if o.fidelity > restarts[best].fidelity { i } else { best });
    Ok(OptimizerResult {
        best_choi: restarts[best].choi.clone(),
        best_fidelity: restarts[best].fidelity,
        iterations_used: restarts.iter().map(|o| o.iterations).sum(),
        converged: restarts[best].converged,
        per_restart_fidelities: restarts.iter().map(|o| o.fidelity).collect(),
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{cptp_report, DensityMatrix, QuantumChannel};
    use crate::matcore::min_eigenvalue;
    use crate::random::{random_density, random_hermitian};
    use crate::retrodiction::{optimal_reverse, reverse_choi_closed_form};

    fn random_problem(seed: u64) -> RetrodictionProblem {
        let mut rng = seeded(seed);
        let e = random_channel(2, 2, &mut rng);
        let g = DensityMatrix::new(random_density(2, &mut rng)).unwrap();
        let t = DensityMatrix::new(random_density(2, &mut rng)).unwrap();
        RetrodictionProblem::new(e, g, t).unwrap()
    }

    #[test]
    fn projection_fixed_point() {
        let ch = random_channel(2, 3, &mut seeded(90));
        let c = ch.choi_input_first();
        let p = project_cptp(&c, 2, 3, 1e-13, 1000).unwrap();
        assert!(choi_distance(&p, &c).unwrap() < 1e-12);
    }

    #[test]
    fn projection_of_zero_is_depolarizing() {
        let p = project_cptp(&ComplexMatrix::zeros(6, 6), 2, 3, 1e-13, 1000).unwrap();
        assert!(frobenius(&(p - identity(6).scale(1.0 / 3.0))) < 1e-12);
    }

    #[test]
    fn projection_near_feasible() {
        let mut rng = seeded(91);
        let c = random_channel(2, 2, &mut rng).choi_input_first();
        let noise = random_hermitian(4, &mut rng);
        let noisy = &c + noise.scale(1e-3 / frobenius(&noise));
        let p = project_cptp(&noisy, 2, 2, 1e-13, 5000).unwrap();
        assert!(choi_distance(&p, &noisy).unwrap() < 2e-3);
        let rep = cptp_report(&swap_to_internal(&p, 2, 2), 2, 2, 1e-10).unwrap();
        assert!(rep.accepted, "{rep:?}");
    }

    fn swap_to_internal(c: &ComplexMatrix, d_b: usize, d_a: usize) -> ComplexMatrix {
        crate::matcore::swap_subsystems(c, (d_b, d_a)).unwrap()
    }

    #[test]
    fn projection_lands_in_feasible_set() {
        let mut rng = seeded(92);
        for _ in 0..10 {
            let h = random_hermitian(6, &mut rng);
            let p = project_cptp(&h, 3, 2, 1e-12, 20_000).unwrap();
            assert!(min_eigenvalue(&p).unwrap() >= -1e-12);
            assert!(tp_residual(&p, 3, 2).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn projection_stall_is_reported() {
        let h = random_hermitian(4, &mut seeded(93)).scale(10.0);
        assert!(matches!(
            project_cptp(&h, 2, 2, 1e-15, 1),
            Err(Error::ProjectionStall { iters: 1, .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let id = QuantumChannel::identity(2);
        let dep = QuantumChannel::erase_to(2, &DensityMatrix::maximally_mixed(2));
        assert_eq!(choi_distance(id.choi(), id.choi()).unwrap(), 0.0);
        assert!(choi_distance(id.choi(), dep.choi()).unwrap() > 0.0);
        assert!(choi_distance(id.choi(), &identity(3)).is_err());
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = random_problem(94);
        let obj = Objective::new(&p).unwrap();
        let c = random_channel(2, 2, &mut seeded(95)).choi_input_first();
        let g = obj.gradient(&c).unwrap();
        let dir = random_hermitian(4, &mut seeded(96));
        let h = 1e-6;
        let fd = (obj.value(&(&c + dir.scale(h))).unwrap() - obj.value(&(&c - dir.scale(h))).unwrap()) / (2.0 * h);
        assert!((fd - inner(&g, &dir)).abs() < 1e-7, "{fd} vs {}", inner(&g, &dir));
    }

    #[test]
    fn perfect_case_reaches_one() {
        let mut rng = seeded(97);
        let e = random_channel(2, 2, &mut rng);
        let g = DensityMatrix::new(random_density(2, &mut rng)).unwrap();
        let out = DensityMatrix::new(hermitian_part(&e.apply(g.matrix()).unwrap())).unwrap();
        let p = RetrodictionProblem::new(e, g, out).unwrap();
        let config = OptimizerConfig {
            restarts: 2,
            ..OptimizerConfig::default()
        };
        let res = maximize_fidelity(&p, &config).unwrap();
        assert!(res.best_fidelity >= 1.0 - 1e-6, "{}", res.best_fidelity);
    }

    #[test]
    fn agrees_with_closed_form() {
        for seed in 0..3 {
            let p = random_problem(200 + seed);
            let sol = optimal_reverse(&p).unwrap();
            let config = OptimizerConfig {
                restarts: 2,
                seed,
                ..OptimizerConfig::default()
            };
            let res = maximize_fidelity(&p, &config).unwrap();
            assert!(res.best_fidelity <= sol.fidelity_value + 1e-7);
            for r in res.restarts.iter().filter(|r| r.converged) {
                assert!((r.fidelity - sol.fidelity_value).abs() < 1e-5);
                let closed = reverse_choi_closed_form(&p, &sol.d_operator).unwrap();
                assert!(choi_distance(&r.choi, &closed).unwrap() < 1e-4);
            }
            assert!(res.converged, "seed {seed}: {:?}", res.restarts.iter().map(|r| r.gradient_mapping).collect::<Vec<_>>());
        }
    }

    #[test]
    fn history_is_monotone_and_iterates_feasible() {
        let p = random_problem(98);
        let config = OptimizerConfig {
            restarts: 2,
            max_iters: 300,
            ..OptimizerConfig::default()
        };
        let res = maximize_fidelity(&p, &config).unwrap();
        for r in &res.restarts {
            assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
            let rep = cptp_report(&swap_to_internal(&r.choi, 2, 2), 2, 2, 1e-8).unwrap();
            assert!(rep.accepted);
        }
        assert!(res.per_restart_fidelities.iter().all(|&f| res.best_fidelity >= f - 1e-12));
    }

    #[test]
    fn options_file() {
        let mut config = OptimizerConfig::default();
        config
            .apply_options("# tuned\nmax_iters = 100\n\ngrad_tol=1e-7  # looser\nseed = 9\n")
            .unwrap();
        assert_eq!(config.max_iters, 100);
        assert_eq!(config.grad_tol, 1e-7);
        assert_eq!(config.seed, 9);
        assert_eq!(config.restarts, 5);
        let mut c = OptimizerConfig::default();
        assert!(matches!(c.apply_options("restarts = 2\nspeed = 3\n"), Err(Error::ParseError { line: 2, .. })));
        let mut c = OptimizerConfig::default();
        assert!(matches!(c.apply_options("restarts = two\n"), Err(Error::ParseError { line: 1, .. })));
        let mut c = OptimizerConfig::default();
        assert!(c.apply_options("restarts = 0\n").is_err());
    }
}

//! Concave quadratic maximization under convex quadratic constraints.
//!
//! Solves
//!
//! ```text
//!     maximize   Re{b^H x} - x^H A x
//!     subject to x^H Q_i x <= c_i          (at most two constraints)
//!                |x_m| <= cap_m            (optional)
//! ```
//!
//! Without caps the Lagrangian maximizer is available in closed form,
//! `x(λ) = (A + Σ λ_i Q_i)^+ b / 2`, and the multipliers are found by nested
//! bisection (inner multiplier per outer multiplier). The dual value at the
//! final multipliers is an upper bound on the optimum.
//!
//! With caps the problem is solved by accelerated projected gradient ascent.
//! The projection onto `{|x_m| <= cap_m} ∩ {x^H V x <= c}` is exact for a
//! diagonal `V`: each element keeps its phase and takes magnitude
//! `min(|x_m| / (1 + ρ v_m), cap_m)`, with `ρ` found by bisection. The
//! Frank-Wolfe gap at the returned point bounds the distance to the optimum.

use super::bisect::{feasible_edge, grow_until_feasible};
use super::linalg::{c64, quad_form, CMatrix, CVector, HermEigen, ZERO};
use super::NumericsError;

/// Relative PSD slack accepted for `A` and every `Q_i`.
const PSD_TOL: f64 = 1e-10;
const MULTIPLIER_REL_TOL: f64 = 1e-14;
const MULTIPLIER_START: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 160;

#[derive(Debug, Clone)]
pub struct QuadConstraint {
    pub q: CMatrix,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct QcqpProblem {
    pub linear: CVector,
    pub quad: CMatrix,
    pub constraints: Vec<QuadConstraint>,
    pub caps: Option<Vec<f64>>,
}

impl QcqpProblem {
    pub fn new(linear: CVector, quad: CMatrix) -> Self {
        Self {
            linear,
            quad,
            constraints: Vec::new(),
            caps: None,
        }
    }

    pub fn with_constraint(mut self, q: CMatrix, bound: f64) -> Self {
        self.constraints.push(QuadConstraint { q, bound });
        self
    }

    pub fn with_caps(mut self, caps: Vec<f64>) -> Self {
        self.caps = Some(caps);
        self
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &CVector) -> f64 {
        self.linear.dotc(x).re - quad_form(&self.quad, x)
    }

    /// Largest relative constraint violation of `x` (0 when feasible).
    pub fn max_violation(&self, x: &CVector) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let v = quad_form(&c.q, x) - c.bound;
            worst = worst.max(v / c.bound.max(f64::MIN_POSITIVE));
        }
        if let Some(caps) = &self.caps {
            for (z, &cap) in x.iter().zip(caps) {
                worst = worst.max((z.norm() - cap) / cap.max(f64::MIN_POSITIVE));
            }
        }
        worst.max(0.0)
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let n = self.dim();
        let square = |m: &CMatrix| m.nrows() == n && m.ncols() == n;
        if !square(&self.quad) {
            return Err(NumericsError::DimensionMismatch { expected: n, actual: self.quad.nrows() });
        }
        for c in &self.constraints {
            if !square(&c.q) {
                return Err(NumericsError::DimensionMismatch { expected: n, actual: c.q.nrows() });
            }
            if !(c.bound >= 0.0) {
                return Err(NumericsError::Infeasible { bound: c.bound });
            }
        }
        if let Some(caps) = &self.caps {
            if caps.len() != n {
                return Err(NumericsError::DimensionMismatch { expected: n, actual: caps.len() });
            }
            if caps.iter().any(|&c| !(c >= 0.0)) {
                return Err(NumericsError::InvalidArgument("magnitude caps must be nonnegative"));
            }
        }
        for m in std::iter::once(&self.quad).chain(self.constraints.iter().map(|c| &c.q)) {
            if n > 0 {
                let e = HermEigen::new(m);
                if e.min() < -PSD_TOL * e.max().abs().max(1.0) {
                    return Err(NumericsError::NotPsd { min_eigenvalue: e.min() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QcqpOptions {
    /// KKT residual target.
    pub tol: f64,
    /// Relative constraint slack accepted on output.
    pub slack_tol: f64,
    /// Iteration cap for the projected-gradient path.
    pub max_iter: usize,
}

impl Default for QcqpOptions {
    fn default() -> Self {
        Self { tol: 1e-7, slack_tol: 1e-8, max_iter: 50_000 }
    }
}

#[derive(Debug, Clone)]
pub struct QcqpSolution {
    pub x: CVector,
    pub objective: f64,
    /// Certified upper bound on the optimal value.
    pub upper_bound: f64,
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// Scaled copy of the problem with `||A||_F = 1` and unit-norm constraint
/// matrices; `x` is unchanged by this scaling.
struct Scaled {
    a: CMatrix,
    b: CVector,
    cons: Vec<(CMatrix, f64, bool)>,
    obj_scale: f64,
    cons_scale: Vec<f64>,
}

impl Scaled {
    fn new(p: &QcqpProblem) -> Self {
        let mut na = p.quad.norm();
        if !(na > 0.0) {
            na = p.linear.norm().max(f64::MIN_POSITIVE);
        }
        let a = super::linalg::hermitian_part(&p.quad).unscale(na);
        let b = p.linear.unscale(na);
        let mut cons = Vec::new();
        let mut cons_scale = Vec::new();
        for c in &p.constraints {
            let nq = c.q.norm();
            if nq > 0.0 {
                let q = super::linalg::hermitian_part(&c.q).unscale(nq);
                let n = q.nrows() as f64;
                let tr = q.trace().re / n;
                let identity_like = (&q - CMatrix::identity(q.nrows(), q.ncols()).scale(tr)).norm() <= 1e-12;
                cons.push((q, c.bound / nq, identity_like));
                cons_scale.push(nq);
            } else {
                cons_scale.push(0.0);
            }
        }
        Self { a, b, cons, obj_scale: na, cons_scale }
    }

    fn objective(&self, x: &CVector) -> f64 {
        self.b.dotc(x).re - quad_form(&self.a, x)
    }
}

/// Pseudo-inverse solve `M^+ b / 2` in an eigenbasis; `None` when `b` has a
/// component along a null direction of `M` (unbounded Lagrangian).
fn half_solve(eig: &HermEigen, coords: &CVector, shift: f64, bnorm: f64) -> Option<CVector> {
    let n = eig.values.len();
    let dmax = eig.max().abs() + shift.abs();
    let floor = 1e-13 * dmax.max(f64::MIN_POSITIVE);
    let mut out = CVector::zeros(n);
    for i in 0..n {
        let d = eig.values[i] + shift;
        if d > floor {
            out[i] = coords[i] / (2.0 * d);
        } else if coords[i].norm() > 1e-11 * bnorm {
            return None;
        }
    }
    Some(eig.lift(&out))
}

struct DualRoute<'a> {
    s: &'a Scaled,
    bnorm: f64,
    evals: usize,
}

impl DualRoute<'_> {
    /// Maximizer of the Lagrangian for multipliers `lams` (same order as the
    /// scaled constraints).
    fn x_of(&mut self, lams: &[f64]) -> Option<CVector> {
        self.evals += 1;
        let mut m = self.s.a.clone();
        for ((q, _, _), &l) in self.s.cons.iter().zip(lams) {
            if l != 0.0 {
                m += q.scale(l);
            }
        }
        let eig = HermEigen::new(&m);
        let coords = eig.project(&self.s.b);
        half_solve(&eig, &coords, 0.0, self.bnorm)
    }

    fn violation(&self, idx: usize, x: &Option<CVector>) -> f64 {
        match x {
            Some(x) => {
                let (q, c, _) = &self.s.cons[idx];
                quad_form(q, x) - c
            }
            None => f64::INFINITY,
        }
    }

    /// Optimal multiplier for constraint `inner` with the other multipliers
    /// held fixed in `lams`.
    fn solve_inner(&mut self, inner: usize, lams: &mut Vec<f64>) -> Option<CVector> {
        let identity_like = self.s.cons[inner].2;
        if identity_like {
            // One eigendecomposition serves every inner multiplier.
            let mut base = self.s.a.clone();
            for (j, ((q, _, _), &l)) in self.s.cons.iter().zip(lams.iter()).enumerate() {
                if j != inner && l != 0.0 {
                    base += q.scale(l);
                }
            }
            let (q, c, _) = &self.s.cons[inner];
            let qscale = q[(0, 0)].re;
            let eig = HermEigen::new(&base);
            let coords = eig.project(&self.s.b);
            let bnorm = self.bnorm;
            self.evals += 1;
            // ||x||^2 as a function of the shift, computed in the eigenbasis.
            let norm_at = |lam: f64| -> f64 {
                let shift = lam * qscale;
                let dmax = eig.max().abs() + shift.abs();
                let floor = 1e-13 * dmax.max(f64::MIN_POSITIVE);
                let mut s = 0.0;
                for i in 0..coords.len() {
                    let d = eig.values[i] + shift;
                    if d > floor {
                        s += coords[i].norm_sqr() / (4.0 * d * d);
                    } else if coords[i].norm() > 1e-11 * bnorm {
                        return f64::INFINITY;
                    }
                }
                s * qscale - c
            };
            let lam = if norm_at(0.0) <= 0.0 {
                0.0
            } else {
                let hi = grow_until_feasible(norm_at, MULTIPLIER_START, MAX_DOUBLINGS)?;
                let lo = if hi > MULTIPLIER_START { hi / 2.0 } else { 0.0 };
                feasible_edge(norm_at, lo, hi, MULTIPLIER_REL_TOL, 400)
            };
            lams[inner] = lam;
            return half_solve(&eig, &coords, lam * qscale, bnorm);
        }

        lams[inner] = 0.0;
        let x0 = self.x_of(lams);
        if self.violation(inner, &x0) <= 0.0 {
            return x0;
        }
        let mut trial = lams.clone();
        let mut g = |lam: f64, this: &mut Self| {
            trial[inner] = lam;
            let x = this.x_of(&trial);
            this.violation(inner, &x)
        };
        let mut x_hi = MULTIPLIER_START;
        let mut found = false;
        for _ in 0..MAX_DOUBLINGS {
            if g(x_hi, self) <= 0.0 {
                found = true;
                break;
            }
            x_hi *= 2.0;
        }
        if !found {
            return None;
        }
        let lo = if x_hi > MULTIPLIER_START { x_hi / 2.0 } else { 0.0 };
        let (mut a, mut b) = (lo, x_hi);
        for _ in 0..400 {
            if b - a <= MULTIPLIER_REL_TOL * b {
                break;
            }
            let mid = 0.5 * (a + b);
            if g(mid, self) <= 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        lams[inner] = b;
        self.x_of(lams)
    }

    /// Full multiplier search over up to two constraints.
    fn solve(&mut self) -> Option<(CVector, Vec<f64>)> {
        let ncons = self.s.cons.len();
        let mut lams = vec![0.0; ncons];
        match ncons {
            0 => self.x_of(&lams).map(|x| (x, lams)),
            1 => self.solve_inner(0, &mut lams).map(|x| (x, lams)),
            _ => {
                // Identity-like constraint goes inside (cheap inner loop).
                let inner = self.s.cons.iter().position(|c| c.2).unwrap_or(0);
                let outer = if inner == 0 { 1 } else { 0 };
                let g = |lam: f64, this: &mut Self| -> (f64, Option<CVector>, Vec<f64>) {
                    let mut l = vec![0.0; ncons];
                    l[outer] = lam;
                    let x = this.solve_inner(inner, &mut l);
                    (this.violation(outer, &x), x, l)
                };
                let (v0, x0, l0) = g(0.0, self);
                if v0 <= 0.0 {
                    return x0.map(|x| (x, l0));
                }
                let mut hi = MULTIPLIER_START;
                let mut best = None;
                for _ in 0..MAX_DOUBLINGS {
                    let (v, x, l) = g(hi, self);
                    if v <= 0.0 {
                        best = x.map(|x| (x, l));
                        break;
                    }
                    hi *= 2.0;
                }
                best.as_ref()?;
                let (mut a, mut b) = (if hi > MULTIPLIER_START { hi / 2.0 } else { 0.0 }, hi);
                for _ in 0..400 {
                    if b - a <= MULTIPLIER_REL_TOL * b {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    let (v, x, l) = g(mid, self);
                    if v <= 0.0 {
                        b = mid;
                        if let Some(x) = x {
                            best = Some((x, l));
                        }
                    } else {
                        a = mid;
                    }
                }
                best
            }
        }
    }
}

/// Maximizes `Re{b^H x} - x^H A x` subject to the problem's constraints.
pub fn solve_concave_qcqp(p: &QcqpProblem, opts: &QcqpOptions) -> Result<QcqpSolution, NumericsError> {
    p.validate()?;
    let n = p.dim();
    if n == 0 {
        return Ok(QcqpSolution {
            x: CVector::zeros(0),
            objective: 0.0,
            upper_bound: 0.0,
            multipliers: vec![0.0; p.constraints.len()],
            kkt_residual: 0.0,
            iterations: 0,
        });
    }
    let scaled = Scaled::new(p);
    let bnorm = scaled.b.norm();
    if scaled.cons.len() > 2 {
        return Err(NumericsError::Unsupported("at most two quadratic constraints"));
    }
    if p.caps.is_some() {
        return solve_with_caps(p, &scaled, opts);
    }

    let mut route = DualRoute { s: &scaled, bnorm, evals: 0 };
    let (mut x, lams) = match route.solve() {
        Some(v) => v,
        None => return Err(NumericsError::Unbounded),
    };
    repair_feasibility(p, &mut x, opts.slack_tol);

    let fx = scaled.objective(&x);
    let mut m = scaled.a.clone();
    let mut dual = fx;
    let mut compl: f64 = 0.0;
    for ((q, c, _), &l) in scaled.cons.iter().zip(&lams) {
        m += q.scale(l);
        let slack = c - quad_form(q, &x);
        dual += l * slack;
        compl += (l * slack).abs();
    }
    let stat = (scaled.b.scale(0.5) - &m * &x).norm() / (0.5 * bnorm).max(f64::MIN_POSITIVE);
    let kkt = stat.max(compl / fx.abs().max(1e-300));
    let iterations = route.evals;
    // Unscale multipliers back to the caller's units.
    let mut multipliers = Vec::with_capacity(p.constraints.len());
    let mut k = 0;
    for &cs in &scaled.cons_scale {
        if cs > 0.0 {
            multipliers.push(lams[k] * scaled.obj_scale / cs);
            k += 1;
        } else {
            multipliers.push(0.0);
        }
    }
    let sol = QcqpSolution {
        objective: p.objective(&x),
        upper_bound: dual.max(fx) * scaled.obj_scale,
        x,
        multipliers,
        kkt_residual: kkt,
        iterations,
    };
    if kkt > opts.tol {
        return Err(NumericsError::MaxIterExceeded { kkt_residual: kkt, partial: Box::new(sol) });
    }
    Ok(sol)
}

/// Shrinks `x` toward the origin until every constraint holds; the origin is
/// always feasible so this terminates.
fn repair_feasibility(p: &QcqpProblem, x: &mut CVector, slack_tol: f64) {
    let mut factor: f64 = 1.0;
    for c in &p.constraints {
        let v = quad_form(&c.q, x);
        if v > c.bound * (1.0 + 0.1 * slack_tol) && v > 0.0 {
            factor = factor.min((c.bound / v).sqrt() * (1.0 - 0.1 * slack_tol));
        }
    }
    if let Some(caps) = &p.caps {
        for (z, &cap) in x.iter().zip(caps) {
            if z.norm() > cap {
                factor = factor.min(cap / z.norm());
            }
        }
    }
    if factor < 1.0 {
        *x *= c64(factor.max(0.0), 0.0);
    }
}

/// Element-wise phase-preserving clip: `|x_m| <- min(|x_m|, cap_m)`.
pub fn project_magnitude_caps(x: &CVector, caps: &[f64]) -> CVector {
    assert_eq!(x.len(), caps.len(), "caps must match vector length");
    CVector::from_iterator(
        x.len(),
        x.iter().zip(caps).map(|(&z, &cap)| {
            let r = z.norm();
            if r > cap {
                if r > 0.0 { z * (cap / r) } else { ZERO }
            } else {
                z
            }
        }),
    )
}

/// Diagonal weights and bound of the single constraint allowed next to caps.
struct DiagBall {
    weights: Vec<f64>,
    bound: f64,
}

fn caps_shrink(x: &CVector, caps: &[f64], w: &[f64], rho: f64) -> CVector {
    CVector::from_iterator(
        x.len(),
        x.iter().zip(caps).zip(w).map(|((&z, &cap), &wm)| {
            let r = z.norm();
            if r == 0.0 {
                return ZERO;
            }
            let m = (r / (1.0 + rho * wm)).min(cap);
            z * (m / r)
        }),
    )
}

fn weighted_norm(x: &CVector, w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(z, &wm)| wm * z.norm_sqr()).sum()
}

/// Exact Euclidean projection onto `{|x_m| <= cap_m} ∩ {Σ w_m |x_m|^2 <= c}`.
fn project_caps_ball(x: &CVector, caps: &[f64], ball: Option<&DiagBall>) -> CVector {
    match ball {
        None => project_magnitude_caps(x, caps),
        Some(b) => {
            let g = |rho: f64| weighted_norm(&caps_shrink(x, caps, &b.weights, rho), &b.weights) - b.bound;
            if g(0.0) <= 0.0 {
                return caps_shrink(x, caps, &b.weights, 0.0);
            }
            let hi = grow_until_feasible(g, MULTIPLIER_START, MAX_DOUBLINGS).unwrap_or(f64::MAX);
            let lo = if hi > MULTIPLIER_START { hi / 2.0 } else { 0.0 };
            let rho = feasible_edge(g, lo, hi, MULTIPLIER_REL_TOL, 400);
            caps_shrink(x, caps, &b.weights, rho)
        }
    }
}

/// Linear maximization oracle: `argmax Re{g^H z}` over the capped set.
fn lmo_caps_ball(g: &CVector, caps: &[f64], ball: Option<&DiagBall>) -> CVector {
    let at = |rho: f64| -> CVector {
        CVector::from_iterator(
            g.len(),
            g.iter().zip(caps).enumerate().map(|(m, (&z, &cap))| {
                let r = z.norm();
                if r == 0.0 {
                    return ZERO;
                }
                let mag = match ball {
                    Some(b) if rho > 0.0 && b.weights[m] > 0.0 => (r / (2.0 * rho * b.weights[m])).min(cap),
                    _ => cap,
                };
                z * (mag / r)
            }),
        )
    };
    match ball {
        None => at(0.0),
        Some(b) => {
            let viol = |rho: f64| weighted_norm(&at(rho), &b.weights) - b.bound;
            if viol(0.0) <= 0.0 {
                return at(0.0);
            }
            let hi = grow_until_feasible(viol, MULTIPLIER_START, MAX_DOUBLINGS).unwrap_or(f64::MAX);
            let lo = if hi > MULTIPLIER_START { hi / 2.0 } else { 0.0 };
            at(feasible_edge(viol, lo, hi, MULTIPLIER_REL_TOL, 400))
        }
    }
}

fn solve_with_caps(p: &QcqpProblem, s: &Scaled, opts: &QcqpOptions) -> Result<QcqpSolution, NumericsError> {
    let caps = p.caps.as_ref().expect("caps path");
    let n = p.dim();
    let ball = match s.cons.len() {
        0 => None,
        1 => {
            let (q, c, _) = &s.cons[0];
            let qn = q.norm();
            for i in 0..n {
                for j in 0..n {
                    if i != j && q[(i, j)].norm() > 1e-12 * qn {
                        return Err(NumericsError::Unsupported(
                            "magnitude caps combine only with a diagonal quadratic constraint",
                        ));
                    }
                }
            }
            Some(DiagBall { weights: (0..n).map(|i| q[(i, i)].re.max(0.0)).collect(), bound: *c })
        }
        _ => return Err(NumericsError::Unsupported("magnitude caps combine with at most one constraint")),
    };
    let ball = ball.as_ref();

    // The uncapped optimum is optimal here too whenever it respects the caps.
    let mut start = None;
    let bnorm = s.b.norm();
    let mut route = DualRoute { s, bnorm, evals: 0 };
    if let Some((x, _)) = route.solve() {
        if x.iter().zip(caps).all(|(z, &c)| z.norm() <= c * (1.0 + 1e-12)) {
            let uncapped = QcqpProblem { caps: None, ..p.clone() };
            if let Ok(sol) = solve_concave_qcqp(&uncapped, opts) {
                if p.max_violation(&sol.x) <= opts.slack_tol {
                    return Ok(sol);
                }
            }
        }
        start = Some(x);
    }

    let lip = HermEigen::new(&s.a).max();
    let grad = |x: &CVector| s.b.scale(0.5) - &s.a * x;
    let fw = |x: &CVector, g: &CVector| -> f64 {
        // Ascent direction of f in the real sense is 2 * g.
        let z = lmo_caps_ball(g, caps, ball);
        2.0 * g.dotc(&(z - x)).re
    };

    if !(lip > 0.0) {
        // Linear objective: the oracle itself is optimal.
        let x = lmo_caps_ball(&s.b, caps, ball);
        let f = p.objective(&x);
        return Ok(QcqpSolution {
            x,
            objective: f,
            upper_bound: f,
            multipliers: vec![0.0; p.constraints.len()],
            kkt_residual: 0.0,
            iterations: 1,
        });
    }

    let mut x = project_caps_ball(&start.unwrap_or_else(|| CVector::zeros(n)), caps, ball);
    let mut fx = s.objective(&x);
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let gscale = (0.5 * bnorm).max(f64::MIN_POSITIVE);
    let mut residual = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let gy = grad(&y);
        let x_new = project_caps_ball(&(&y + gy.unscale(lip)), caps, ball);
        let f_new = s.objective(&x_new);
        if f_new < fx {
            // Adaptive restart.
            y = x.clone();
            t = 1.0;
            continue;
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &x_new + (&x_new - &x).scale((t - 1.0) / t_new);
        t = t_new;
        x = x_new;
        fx = f_new;
        if it % 10 == 0 {
            let gx = grad(&x);
            let step = project_caps_ball(&(&x + gx.unscale(lip)), caps, ball);
            residual = (&x - step).norm() * lip / gscale;
            gap = fw(&x, &gx).max(0.0);
            if residual <= opts.tol && gap <= opts.tol * fx.abs().max(1e-300) {
                break;
            }
        }
    }
    let sol = QcqpSolution {
        objective: p.objective(&x),
        upper_bound: (fx + gap) * s.obj_scale,
        x,
        multipliers: Vec::new(),
        kkt_residual: residual,
        iterations,
    };
    if residual > opts.tol || gap > opts.tol * fx.abs().max(1e-300) {
        return Err(NumericsError::MaxIterExceeded { kkt_residual: residual, partial: Box::new(sol) });
    }
    Ok(sol)
}

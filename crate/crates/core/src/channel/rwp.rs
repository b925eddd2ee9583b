//! Random-waypoint distance law combined with Nakagami-m fading.
//!
//! The UE-to-transmitter distance follows the polynomial density
//! `f_r(r) = C Σ_n B_n r^{Υ_n} / D_U^{Υ_n+1}` on `[D_L, D_U]`, where `C`
//! normalizes the density on that interval. The channel power of an
//! `N_f`-entry Nakagami-m channel at distance `r` is `p_t r^{-α} g` with
//! `g ~ Gamma(N_f m, 1/m)`; its density has the closed form evaluated by
//! [`RwpNakagami::pdf`].

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use super::ChannelError;
use crate::numerics::adaptive_simpson;

/// Grid resolution of the inverse-CDF distance sampler.
const DISTANCE_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RwpParams {
    pub b: Vec<f64>,
    pub upsilon: Vec<f64>,
    /// Nakagami shape `m_N`.
    pub m_n: f64,
    pub alpha: f64,
    pub d_l: f64,
    pub d_u: f64,
    pub p_t: f64,
    /// Channel dimension `N_f`.
    pub n_f: usize,
}

impl RwpParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.b.len() != self.upsilon.len() || self.b.is_empty() {
            return Err(ChannelError::BadParams("B_n and Υ_n must have equal nonzero length".into()));
        }
        if !(self.d_l > 0.0 && self.d_u > self.d_l) {
            return Err(ChannelError::BadParams("need D_U > D_L > 0".into()));
        }
        if !(self.m_n >= 0.5) {
            return Err(ChannelError::BadParams("Nakagami shape must be at least 0.5".into()));
        }
        if !(self.alpha > 0.0 && self.p_t > 0.0) || self.n_f == 0 {
            return Err(ChannelError::BadParams("α, p_t and N_f must be positive".into()));
        }
        Ok(())
    }
}

/// The polynomial distance density on `[lo, hi]` with an inverse-CDF sampler.
#[derive(Debug, Clone)]
pub struct RwpDistance {
    b: Vec<f64>,
    upsilon: Vec<f64>,
    lo: f64,
    hi: f64,
    norm: f64,
    grid_r: Vec<f64>,
    grid_cdf: Vec<f64>,
}

impl RwpDistance {
    /// `lo` may be zero (distances measured from the center of a disc).
    pub fn new(b: &[f64], upsilon: &[f64], lo: f64, hi: f64) -> Result<Self, ChannelError> {
        if b.len() != upsilon.len() || b.is_empty() {
            return Err(ChannelError::BadParams("B_n and Υ_n must have equal nonzero length".into()));
        }
        if !(lo >= 0.0 && hi > lo) {
            return Err(ChannelError::BadParams("distance range must satisfy 0 <= lo < hi".into()));
        }
        let mut d = Self {
            b: b.to_vec(),
            upsilon: upsilon.to_vec(),
            lo,
            hi,
            norm: 1.0,
            grid_r: Vec::new(),
            grid_cdf: Vec::new(),
        };
        let mass = d.antiderivative(hi) - d.antiderivative(lo);
        if !(mass > 0.0) {
            return Err(ChannelError::BadParams("distance density has no positive mass".into()));
        }
        d.norm = 1.0 / mass;
        let grid_r: Vec<f64> = (0..=DISTANCE_GRID)
            .map(|i| lo + (hi - lo) * i as f64 / DISTANCE_GRID as f64)
            .collect();
        if grid_r.iter().any(|&r| d.pdf(r) < -1e-12) {
            return Err(ChannelError::BadParams("distance density is negative on its support".into()));
        }
        let base = d.antiderivative(lo);
        let mut grid_cdf: Vec<f64> = grid_r.iter().map(|&r| (d.antiderivative(r) - base) * d.norm).collect();
        // Guard the sampler against rounding wiggles.
        for i in 1..grid_cdf.len() {
            grid_cdf[i] = grid_cdf[i].max(grid_cdf[i - 1]);
        }
        d.grid_r = grid_r;
        d.grid_cdf = grid_cdf;
        Ok(d)
    }

    fn antiderivative(&self, r: f64) -> f64 {
        self.b
            .iter()
            .zip(&self.upsilon)
            .map(|(&b, &u)| b * (r / self.hi).powf(u + 1.0) / (u + 1.0))
            .sum()
    }

    /// Normalization constant `C`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r < self.lo || r > self.hi {
            return 0.0;
        }
        let s: f64 = self
            .b
            .iter()
            .zip(&self.upsilon)
            .map(|(&b, &u)| b * r.powf(u) / self.hi.powf(u + 1.0))
            .sum();
        self.norm * s
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.lo {
            return 0.0;
        }
        if r >= self.hi {
            return 1.0;
        }
        (self.antiderivative(r) - self.antiderivative(self.lo)) * self.norm
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let top = *self.grid_cdf.last().expect("grid");
        let target = u * top;
        let i = self.grid_cdf.partition_point(|&c| c < target).clamp(1, self.grid_cdf.len() - 1);
        let (c0, c1) = (self.grid_cdf[i - 1], self.grid_cdf[i]);
        let (r0, r1) = (self.grid_r[i - 1], self.grid_r[i]);
        if c1 > c0 {
            r0 + (r1 - r0) * (target - c0) / (c1 - c0)
        } else {
            r0
        }
    }
}

/// Channel-power law of an RWP-mobile UE under Nakagami-m fading.
#[derive(Debug, Clone)]
pub struct RwpNakagami {
    params: RwpParams,
    distance: RwpDistance,
    shape: f64,
    ln_gamma_shape: f64,
}

impl RwpNakagami {
    pub fn new(params: RwpParams) -> Result<Self, ChannelError> {
        params.validate()?;
        let distance = RwpDistance::new(&params.b, &params.upsilon, params.d_l, params.d_u)?;
        let shape = params.n_f as f64 * params.m_n;
        Ok(Self {
            ln_gamma_shape: ln_gamma(shape),
            shape,
            distance,
            params,
        })
    }

    pub fn params(&self) -> &RwpParams {
        &self.params
    }

    pub fn distance(&self) -> &RwpDistance {
        &self.distance
    }

    /// Density of the channel power `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || !x.is_finite() {
            return 0.0;
        }
        let p = &self.params;
        let (m, alpha) = (p.m_n, p.alpha);
        let s_u = m * x * p.d_u.powf(alpha) / p.p_t;
        let s_l = m * x * p.d_l.powf(alpha) / p.p_t;
        let ln_x = x.ln();
        let ln_ratio = m.ln() - p.p_t.ln();
        let mut total = 0.0;
        for (&b, &u) in p.b.iter().zip(&p.upsilon) {
            let e = (u + 1.0) / alpha;
            let a = e + self.shape;
            let diff = if s_l > a {
                gamma_ur(a, s_l) - gamma_ur(a, s_u)
            } else {
                gamma_lr(a, s_u) - gamma_lr(a, s_l)
            };
            if !(diff > 0.0) || b == 0.0 {
                continue;
            }
            let ln_mag = (self.distance.norm() * b.abs()).ln() - (u + 1.0) * p.d_u.ln() - e * ln_ratio
                - (e + 1.0) * ln_x
                + ln_gamma(a)
                + diff.ln()
                - alpha.ln()
                - self.ln_gamma_shape;
            total += b.signum() * ln_mag.exp();
        }
        total.max(0.0)
    }

    /// Integration window in `t = ln x` that holds all but a negligible
    /// fraction of the mass.
    fn log_support(&self) -> (f64, f64) {
        let p = &self.params;
        let lo = (p.p_t * p.d_u.powf(-p.alpha) / p.m_n).ln() - 60.0 / self.shape.min(1.0);
        let spread = self.shape + 20.0 * self.shape.sqrt() + 60.0;
        let hi = (p.p_t * p.d_l.powf(-p.alpha) / p.m_n * spread).ln();
        (lo, hi)
    }

    fn log_density(&self, t: f64) -> f64 {
        let x = t.exp();
        self.pdf(x) * x
    }

    /// Adaptive quadrature of the log-domain density over `[a, b]`, started
    /// from short panels so narrow peaks in a wide window are not skipped.
    fn integrate_log(&self, a: f64, b: f64) -> f64 {
        let panels = ((b - a) / 0.25).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                adaptive_simpson(&|t| self.log_density(t), lo, lo + h, 1e-13)
            })
            .sum()
    }

    /// `∫_0^∞ f(x) dx` by adaptive quadrature in `ln x`.
    pub fn total_mass(&self) -> f64 {
        let (lo, hi) = self.log_support();
        self.integrate_log(lo, hi)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_sorted(&[x])[0]
    }

    /// CDF at ascending points, integrating piecewise between them.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.log_support();
        let mut acc = 0.0;
        let mut t_prev = lo;
        xs.iter()
            .map(|&x| {
                if !(x > 0.0) {
                    return 0.0;
                }
                let t = x.ln().min(hi);
                if t > t_prev {
                    acc += self.integrate_log(t_prev, t);
                    t_prev = t;
                }
                acc
            })
            .collect()
    }

    /// Draws a channel power: RWP distance, then Gamma small-scale power.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = &self.params;
        let r = self.distance.sample(rng);
        let g = Gamma::new(self.shape, 1.0 / p.m_n).expect("valid gamma").sample(rng);
        p.p_t * r.powf(-p.alpha) * g
    }
}

/// Channel-power density at `x` for parameters `p`.
pub fn rwp_nakagami_pdf(x: f64, p: &RwpParams) -> Result<f64, ChannelError> {
    Ok(RwpNakagami::new(p.clone())?.pdf(x))
}

/// Kolmogorov-Smirnov distance between `law` and `n` Monte-Carlo draws.
pub fn ks_statistic<R: Rng + ?Sized>(law: &RwpNakagami, n: usize, rng: &mut R) -> f64 {
    let mut xs: Vec<f64> = (0..n).map(|_| law.sample(rng)).collect();
    xs.sort_by(f64::total_cmp);
    // Compare at a few thousand order statistics; between them the empirical
    // CDF moves by at most the probe spacing.
    let probes = 4000.min(n);
    let idx: Vec<usize> = (0..probes).map(|i| i * n / probes).collect();
    let points: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let cdf = law.cdf_sorted(&points);
    let mut d: f64 = 0.0;
    for (&i, &f) in idx.iter().zip(&cdf) {
        let below = i as f64 / n as f64;
        let above = (i + 1) as f64 / n as f64;
        d = d.max((f - below).abs()).max((f - above).abs());
    }
    d
}

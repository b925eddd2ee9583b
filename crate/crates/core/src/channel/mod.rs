//! Channel synthesis: geometry, path loss, Nakagami-m fading and the stream
//! of imperfect-CSI realizations.

mod rwp;

pub use rwp::{ks_statistic, rwp_nakagami_pdf, RwpDistance, RwpNakagami, RwpParams};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::config::ScenarioConfig;
use crate::numerics::{CMatrix, CVector};

pub type Point3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("distance {distance} m is below the 1 m reference distance")]
    BadDistance { distance: f64 },
    #[error("invalid channel parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub bs: Point3,
    pub ris: Point3,
    pub ue_center: Point3,
    pub ue_radius: f64,
    pub jammer_lo: Point3,
    pub jammer_hi: Point3,
    pub interferer_lo: Point3,
    pub interferer_hi: Point3,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            bs: [30.0, 0.0, 5.0],
            ris: [0.0, 40.0, 10.0],
            ue_center: [30.0, 150.0, 0.0],
            ue_radius: 20.0,
            jammer_lo: [40.0, 80.0, 0.0],
            jammer_hi: [60.0, 100.0, 0.0],
            interferer_lo: [-50.0, 200.0, 0.0],
            interferer_hi: [50.0, 220.0, 0.0],
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<(), String> {
        let pts = [
            self.bs,
            self.ris,
            self.ue_center,
            self.jammer_lo,
            self.jammer_hi,
            self.interferer_lo,
            self.interferer_hi,
        ];
        if pts.iter().flatten().any(|v| !v.is_finite()) {
            return Err("geometry coordinates must be finite".into());
        }
        if !(self.ue_radius > 0.0) {
            return Err("UE radius must be positive".into());
        }
        for (lo, hi, name) in [
            (self.jammer_lo, self.jammer_hi, "jammer"),
            (self.interferer_lo, self.interferer_hi, "interferer"),
        ] {
            if lo[0] >= hi[0] || lo[1] >= hi[1] || lo[2] > hi[2] {
                return Err(format!("{name} box must have positive horizontal extent"));
            }
        }
        Ok(())
    }
}

pub fn distance(a: &Point3, b: &Point3) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Linear power gain `10^{-PL/10}` with `PL = ζ0 + 10 α log10(d / 1 m)`.
pub fn path_loss_linear(d: f64, alpha: f64, zeta0_db: f64) -> Result<f64, ChannelError> {
    if !(d >= 1.0) {
        return Err(ChannelError::BadDistance { distance: d });
    }
    let pl_db = zeta0_db + 10.0 * alpha * d.log10();
    Ok(10f64.powf(-pl_db / 10.0))
}

/// Dimension counts of a channel set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub q: usize,
    pub b: usize,
    pub n_jam: usize,
}

impl Dims {
    pub fn of(cfg: &ScenarioConfig) -> Self {
        Self { n: cfg.n, m: cfg.m, k: cfg.k, q: cfg.q, b: cfg.b, n_jam: cfg.n_jam }
    }
}

/// Channels known at the BS: the legitimate links exactly, the adversarial
/// links as estimates.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub dims: Dims,
    /// `M × N`.
    pub g_br: CMatrix,
    pub h_bu: Vec<CVector>,
    pub h_ru: Vec<CVector>,
    /// Indexed `[q][k]`, length `N_Jam`.
    pub h_ju_est: Vec<Vec<CVector>>,
    /// Indexed `[q]`, `M × N_Jam`.
    pub g_jr_est: Vec<CMatrix>,
    /// Indexed `[b][k]`, length `N`.
    pub h_iu_est: Vec<Vec<CVector>>,
    pub ue_positions: Vec<Point3>,
    pub jammer_positions: Vec<Point3>,
    pub interferer_positions: Vec<Point3>,
}

/// One draw of the uncertain channels and adversarial transmit vectors.
#[derive(Debug, Clone)]
pub struct Realization {
    pub index: usize,
    pub h_ju: Vec<Vec<CVector>>,
    pub g_jr: Vec<CMatrix>,
    pub h_iu: Vec<Vec<CVector>>,
    /// Jamming vectors `[q][k]`, length `N_Jam`.
    pub z_j: Vec<Vec<CVector>>,
    /// Interference vectors `[b][k]`, length `N`.
    pub z_i: Vec<Vec<CVector>>,
}

impl Realization {
    /// The estimates themselves with zero adversarial power.
    pub fn quiet(cs: &ChannelSet) -> Self {
        let d = cs.dims;
        Self {
            index: 0,
            h_ju: cs.h_ju_est.clone(),
            g_jr: cs.g_jr_est.clone(),
            h_iu: cs.h_iu_est.clone(),
            z_j: vec![vec![CVector::zeros(d.n_jam); d.k]; d.q],
            z_i: vec![vec![CVector::zeros(d.n); d.k]; d.b],
        }
    }
}

/// Unit-mean Nakagami-m entry with uniform phase, scaled by `amp`.
fn fading_entry<R: Rng + ?Sized>(amp: f64, gamma: &Gamma<f64>, rng: &mut R) -> Complex64 {
    loop {
        let power = gamma.sample(rng);
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        if power > 0.0 {
            return Complex64::from_polar(amp * power.sqrt(), phase);
        }
    }
}

fn nakagami(m: f64) -> Gamma<f64> {
    Gamma::new(m, 1.0 / m).expect("Nakagami shape must be positive")
}

/// `rows × cols` matrix of i.i.d. entries with mean power `gain`.
pub fn fading_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, m: f64, rng: &mut R) -> CMatrix {
    let gamma = nakagami(m);
    let amp = gain.sqrt();
    let mut out = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            out[(r, c)] = fading_entry(amp, &gamma, rng);
        }
    }
    out
}

pub fn fading_vector<R: Rng + ?Sized>(len: usize, gain: f64, m: f64, rng: &mut R) -> CVector {
    let gamma = nakagami(m);
    let amp = gain.sqrt();
    CVector::from_iterator(len, (0..len).map(|_| fading_entry(amp, &gamma, rng)))
}

fn uniform_in_box<R: Rng + ?Sized>(lo: &Point3, hi: &Point3, rng: &mut R) -> Point3 {
    let mut p = [0.0; 3];
    for i in 0..3 {
        p[i] = if hi[i] > lo[i] { rng.random_range(lo[i]..hi[i]) } else { lo[i] };
    }
    p
}

fn gain(a: &Point3, b: &Point3, alpha: f64, zeta0_db: f64) -> f64 {
    // Geometry keeps every pair well beyond the reference distance; clamp so
    // user geometries with co-located nodes still get the reference gain.
    path_loss_linear(distance(a, b).max(1.0), alpha, zeta0_db).expect("clamped distance")
}

/// Draws node positions and every channel of one trial.
pub fn sample_static_channels<R: Rng + ?Sized>(
    g: &Geometry,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<ChannelSet, ChannelError> {
    let dims = Dims::of(cfg);
    let radial = RwpDistance::new(&cfg.rwp_b, &cfg.rwp_upsilon, 0.0, g.ue_radius)?;
    let ue_positions: Vec<Point3> = (0..dims.k)
        .map(|_| {
            let r = radial.sample(rng);
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            [g.ue_center[0] + r * phi.cos(), g.ue_center[1] + r * phi.sin(), g.ue_center[2]]
        })
        .collect();
    let jammer_positions: Vec<Point3> = (0..dims.q).map(|_| uniform_in_box(&g.jammer_lo, &g.jammer_hi, rng)).collect();
    let interferer_positions: Vec<Point3> =
        (0..dims.b).map(|_| uniform_in_box(&g.interferer_lo, &g.interferer_hi, rng)).collect();

    let (m, z0) = (cfg.nakagami_m, cfg.zeta0_db);
    let g_br = fading_matrix(dims.m, dims.n, gain(&g.bs, &g.ris, cfg.alpha_br, z0), m, rng);
    let h_bu = ue_positions
        .iter()
        .map(|u| fading_vector(dims.n, gain(&g.bs, u, cfg.alpha_bu, z0), m, rng))
        .collect();
    let h_ru = ue_positions
        .iter()
        .map(|u| fading_vector(dims.m, gain(&g.ris, u, cfg.alpha_ru, z0), m, rng))
        .collect();
    let h_ju_est = jammer_positions
        .iter()
        .map(|j| {
            ue_positions
                .iter()
                .map(|u| fading_vector(dims.n_jam, gain(j, u, cfg.alpha_ju, z0), m, rng))
                .collect()
        })
        .collect();
    let g_jr_est = jammer_positions
        .iter()
        .map(|j| fading_matrix(dims.m, dims.n_jam, gain(j, &g.ris, cfg.alpha_jr, z0), m, rng))
        .collect();
    let h_iu_est = interferer_positions
        .iter()
        .map(|i| {
            ue_positions
                .iter()
                .map(|u| fading_vector(dims.n, gain(i, u, cfg.alpha_iu, z0), m, rng))
                .collect()
        })
        .collect();
    Ok(ChannelSet {
        dims,
        g_br,
        h_bu,
        h_ru,
        h_ju_est,
        g_jr_est,
        h_iu_est,
        ue_positions,
        jammer_positions,
        interferer_positions,
    })
}

fn cn<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

fn mean_power<'a>(entries: impl Iterator<Item = &'a Complex64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for z in entries {
        s += z.norm_sqr();
        n += 1;
    }
    if n == 0 { 0.0 } else { s / n as f64 }
}

fn perturb_vector<R: Rng + ?Sized>(est: &CVector, e_mse: f64, rng: &mut R) -> CVector {
    let var = e_mse * mean_power(est.iter());
    if var == 0.0 {
        return est.clone();
    }
    CVector::from_iterator(est.len(), est.iter().map(|&h| h + cn(var, rng)))
}

fn perturb_matrix<R: Rng + ?Sized>(est: &CMatrix, e_mse: f64, rng: &mut R) -> CMatrix {
    let var = e_mse * mean_power(est.iter());
    if var == 0.0 {
        return est.clone();
    }
    let mut out = est.clone();
    for z in out.iter_mut() {
        *z += cn(var, rng);
    }
    out
}

/// `count` isotropic vectors of length `len` with total power `power`.
fn power_split<R: Rng + ?Sized>(count: usize, len: usize, power: f64, rng: &mut R) -> Vec<CVector> {
    let mut v: Vec<CVector> = (0..count)
        .map(|_| CVector::from_iterator(len, (0..len).map(|_| cn(1.0, rng))))
        .collect();
    let total: f64 = v.iter().map(|x| x.norm_squared()).sum();
    if total > 0.0 {
        let s = (power / total).sqrt();
        for x in &mut v {
            x.scale_mut(s);
        }
    }
    v
}

/// Draws realization `index`: estimation errors on every adversarial link and
/// fresh jamming/interference vectors.
pub fn sample_uncertain_realization<R: Rng + ?Sized>(
    cs: &ChannelSet,
    e_mse: f64,
    cfg: &ScenarioConfig,
    index: usize,
    rng: &mut R,
) -> Realization {
    assert!(e_mse >= 0.0, "e_mse must be nonnegative");
    let d = cs.dims;
    let h_ju = cs
        .h_ju_est
        .iter()
        .map(|row| row.iter().map(|h| perturb_vector(h, e_mse, rng)).collect())
        .collect();
    let g_jr = cs.g_jr_est.iter().map(|g| perturb_matrix(g, e_mse, rng)).collect();
    let h_iu = cs
        .h_iu_est
        .iter()
        .map(|row| row.iter().map(|h| perturb_vector(h, e_mse, rng)).collect())
        .collect();
    let z_j = (0..d.q).map(|_| power_split(d.k, d.n_jam, cfg.p_jam(), rng)).collect();
    let z_i = (0..d.b).map(|_| power_split(d.k, d.n, cfg.p_int(), rng)).collect();
    Realization { index, h_ju, g_jr, h_iu, z_j, z_i }
}

/// Random-stream purposes.
pub mod stream {
    pub const CHANNELS: u64 = 1;
    pub const OPTIMIZE: u64 = 2;
    pub const EVALUATE: u64 = 3;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG stream keyed by a master seed and a tag path such as
/// `[trial, purpose, realization]`.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut h = splitmix64(master);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t));
    }
    ChaCha8Rng::seed_from_u64(h)
}

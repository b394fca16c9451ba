//! Periodic Littlewood–Paley decomposition, Besov and Chemin–Lerner norms.
//!
//! `χ` is radial, equal to 1 on `|ξ| ≤ 3/4` and 0 on `|ξ| ≥ 4/3`, with the
//! C^∞ ramp `θ(1−t)/(θ(1−t)+θ(t))`, `θ(t) = e^{−1/t}`. The shell function
//! `φ(ξ) = χ(ξ/2) − χ(ξ)` is supported in `3/4 ≤ |ξ| ≤ 8/3`, and the blocks
//! telescope: `χ(β) + Σ_{q=0}^{Q} φ(2^{−q}β) = χ(2^{−Q−1}β)`, which is 1 on the
//! whole lattice once `2^{−Q−1}|β|_max ≤ 3/4`.
//!
//! Nonhomogeneous blocks are `q = −1` (multiplier `χ`, carries the mean) and
//! `q = 0..=Q`. The homogeneous-style flavor drops the mean and uses
//! `φ(2^{−q}·)` for every `q` down to the first shell that reaches `|β|_min`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectralGrid, Spectrum};

const INNER: f64 = 0.75;
const OUTER: f64 = 4.0 / 3.0;

fn theta(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial ball function `χ(|ξ|)`.
pub fn chi(r: f64) -> f64 {
    if r <= INNER {
        1.0
    } else if r >= OUTER {
        0.0
    } else {
        let t = (r - INNER) / (OUTER - INNER);
        let (a, b) = (theta(1.0 - t), theta(t));
        a / (a + b)
    }
}

/// Radial shell function `φ(|ξ|) = χ(|ξ|/2) − χ(|ξ|)`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Nonhomogeneous,
    Homogeneous,
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nonhomogeneous" => Ok(Flavor::Nonhomogeneous),
            "homogeneous" => Ok(Flavor::Homogeneous),
            other => Err(format!(
                "unknown flavor '{other}' (expected nonhomogeneous or homogeneous)"
            )),
        }
    }
}

/// Besov index `(s, p, r)`; `p` and `r` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub flavor: Flavor,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        Self::with_flavor(s, p, r, Flavor::Nonhomogeneous)
    }

    pub fn with_flavor(s: f64, p: f64, r: f64, flavor: Flavor) -> Result<Self> {
        let idx = BesovIndex { s, p, r, flavor };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() || !(self.p >= 1.0) || !(self.r >= 1.0) {
            return Err(Error::IndexConstraintViolated(format!(
                "need finite s and p, r >= 1 (got s = {}, p = {}, r = {})",
                self.s, self.p, self.r
            )));
        }
        Ok(())
    }
}

/// `(Σ a_i^r)^{1/r}`, or the supremum for `r = ∞`.
pub fn lr_sum(values: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        values.into_iter().map(|a| a.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Dyadic multipliers realized on one grid's lattice.
#[derive(Debug, Clone)]
pub struct DyadicFamily {
    grid: Arc<SpectralGrid>,
    q_max: i32,
    q_min_homogeneous: i32,
}

impl DyadicFamily {
    pub fn new(grid: &Arc<SpectralGrid>) -> Result<Self> {
        let beta_max = grid.max_wavenumber();
        let mut q_max = 0;
        while beta_max * 2f64.powi(-q_max - 1) > INNER {
            q_max += 1;
        }
        let beta_min = grid
            .modes()
            .iter()
            .map(|m| m.norm())
            .filter(|&b| b > 0.0)
            .fold(f64::INFINITY, f64::min);
        let mut q_lo = 0;
        while beta_min * 2f64.powi(-q_lo) < OUTER {
            q_lo -= 1;
        }
        let family = DyadicFamily {
            grid: Arc::clone(grid),
            q_max,
            q_min_homogeneous: q_lo,
        };
        let active = (0..=q_max)
            .filter(|&q| grid.modes().iter().any(|m| family.shell(q, m.norm()) > 0.0))
            .count();
        if active < 3 {
            return Err(Error::ResolutionTooSmall { active });
        }
        Ok(family)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Highest shell index `Q`.
    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn shells(&self, flavor: Flavor) -> RangeInclusive<i32> {
        match flavor {
            Flavor::Nonhomogeneous => -1..=self.q_max,
            Flavor::Homogeneous => self.q_min_homogeneous..=self.q_max,
        }
    }

    fn shell(&self, q: i32, r: f64) -> f64 {
        phi(r * 2f64.powi(-q))
    }

    /// Multiplier of block `q` at `|β| = r`.
    pub fn multiplier(&self, q: i32, flavor: Flavor, r: f64) -> f64 {
        match (flavor, q) {
            (Flavor::Nonhomogeneous, -1) => chi(r),
            (Flavor::Nonhomogeneous, q) if q < -1 => 0.0,
            _ => self.shell(q, r),
        }
    }

    fn check(&self, u: &ScalarField) -> Result<()> {
        if self.grid.same_as(u.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn filtered(&self, spec: &Spectrum, m: impl Fn(f64) -> f64) -> ScalarField {
        let coeffs: Vec<Complex64> = spec
            .coefficients()
            .iter()
            .zip(self.grid.modes())
            .map(|(c, mode)| c * m(mode.norm()))
            .collect();
        Spectrum::from_coefficients(&self.grid, coeffs)
            .expect("same grid")
            .inverse()
    }

    /// `Δ_q u` (nonhomogeneous numbering; `q = −1` is the `χ` block).
    pub fn block(&self, u: &ScalarField, q: i32) -> Result<ScalarField> {
        self.block_with(u, q, Flavor::Nonhomogeneous)
    }

    pub fn block_with(&self, u: &ScalarField, q: i32, flavor: Flavor) -> Result<ScalarField> {
        self.check(u)?;
        let spec = u.forward()?;
        Ok(self.filtered(&spec, |r| self.multiplier(q, flavor, r)))
    }

    /// All blocks of `u` in shell order.
    pub fn blocks(&self, u: &ScalarField, flavor: Flavor) -> Result<Vec<(i32, ScalarField)>> {
        self.check(u)?;
        let spec = u.forward()?;
        Ok(self.blocks_of(&spec, flavor))
    }

    fn blocks_of(&self, spec: &Spectrum, flavor: Flavor) -> Vec<(i32, ScalarField)> {
        self.shells(flavor)
            .map(|q| (q, self.filtered(spec, |r| self.multiplier(q, flavor, r))))
            .collect()
    }

    /// `S_q u = û_0 + Σ_{p ≤ q−1} Δ_p u`, the multiplier `χ(2^{−q}β)`.
    pub fn low_freq_cutoff(&self, u: &ScalarField, q: i32) -> Result<ScalarField> {
        self.check(u)?;
        let spec = u.forward()?;
        Ok(self.filtered(&spec, |r| chi(r * 2f64.powi(-q))))
    }

    /// `max_β |χ(β) + Σ_q φ(2^{−q}β) − 1|` over the lattice.
    pub fn partition_deviation(&self) -> f64 {
        self.grid
            .modes()
            .iter()
            .map(|m| {
                let r = m.norm();
                let total: f64 = self
                    .shells(Flavor::Nonhomogeneous)
                    .map(|q| self.multiplier(q, Flavor::Nonhomogeneous, r))
                    .sum();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|φ(2^{−q}β)φ(2^{−q'}β)|` over the lattice and shell pairs with `|q − q'| ≥ gap`,
    /// together with the largest `|χ(β)φ(2^{−q}β)|` for `q ≥ 1`.
    pub fn overlap(&self, gap: i32) -> f64 {
        let mut worst: f64 = 0.0;
        for m in self.grid.modes() {
            let r = m.norm();
            for q in 0..=self.q_max {
                for q2 in 0..=self.q_max {
                    if (q - q2).abs() >= gap {
                        worst = worst.max((self.shell(q, r) * self.shell(q2, r)).abs());
                    }
                }
                if q >= 1 {
                    worst = worst.max(chi(r) * self.shell(q, r));
                }
            }
        }
        worst
    }

    /// `(q, 2^{qs}‖Δ_q u‖_{L^p})` per block.
    pub fn besov_shells(&self, u: &ScalarField, idx: &BesovIndex) -> Result<Vec<(i32, f64)>> {
        idx.validate()?;
        Ok(self
            .blocks(u, idx.flavor)?
            .into_iter()
            .map(|(q, b)| (q, 2f64.powf(q as f64 * idx.s) * b.lp_norm(idx.p)))
            .collect())
    }

    pub fn besov_norm(&self, u: &ScalarField, idx: &BesovIndex) -> Result<f64> {
        Ok(lr_sum(self.besov_shells(u, idx)?.into_iter().map(|(_, a)| a), idx.r))
    }

    /// Besov norm of a vector field, with the pointwise Euclidean magnitude inside `L^p`.
    pub fn besov_norm_vector(&self, components: &[ScalarField], idx: &BesovIndex) -> Result<f64> {
        idx.validate()?;
        let blocks = components
            .iter()
            .map(|c| self.blocks(c, idx.flavor))
            .collect::<Result<Vec<_>>>()?;
        let shells = blocks[0].len();
        let mut mags = Vec::with_capacity(shells);
        for k in 0..shells {
            let q = blocks[0][k].0;
            let n = self.grid.len();
            let magnitude: Vec<f64> = (0..n)
                .map(|i| blocks.iter().map(|b| b[k].1.values()[i].powi(2)).sum::<f64>().sqrt())
                .collect();
            let f = ScalarField::new(&self.grid, magnitude)?;
            mags.push(2f64.powf(q as f64 * idx.s) * f.lp_norm(idx.p));
        }
        Ok(lr_sum(mags, idx.r))
    }
}

/// `(|T| Σ_β (1+|β|²)^s |û_β|²)^{1/2}`; equals the `L²` norm at `s = 0`.
pub fn sobolev_norm(u: &ScalarField, s: f64) -> Result<f64> {
    let spec = u.forward()?;
    let sum: f64 = spec
        .coefficients()
        .iter()
        .zip(u.grid().modes())
        .map(|(c, m)| (1.0 + m.norm().powi(2)).powf(s) * c.norm_sqr())
        .sum();
    Ok((u.grid().volume() * sum).sqrt())
}

/// Time `L^ρ` norm of a sampled scalar series, trapezoidal; `ρ = ∞` is the maximum.
pub fn time_norm(times: &[f64], values: &[f64], rho: f64) -> f64 {
    if rho.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let powered: Vec<f64> = values.iter().map(|v| v.powf(rho)).collect();
    crate::functionals::trapezoid(times, &powered).powf(1.0 / rho)
}

fn check_series(times: &[f64], fields: &[ScalarField]) -> Result<()> {
    if fields.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if times.len() != fields.len() {
        return Err(Error::InvalidField(format!(
            "{} times for {} snapshots",
            times.len(),
            fields.len()
        )));
    }
    Ok(())
}

fn check_time_exponent(rho: f64) -> Result<()> {
    if rho >= 1.0 {
        Ok(())
    } else {
        Err(Error::IndexConstraintViolated(format!(
            "time exponent {rho} must be >= 1"
        )))
    }
}

/// `‖u‖_{L̃^ρ_T(B^s_{p,r})}`: time norm per shell first, `ℓ^r` over shells second.
pub fn chemin_lerner_norm(
    family: &DyadicFamily,
    times: &[f64],
    fields: &[ScalarField],
    rho: f64,
    idx: &BesovIndex,
) -> Result<f64> {
    check_series(times, fields)?;
    check_time_exponent(rho)?;
    let per_time = fields
        .iter()
        .map(|f| family.besov_shells(f, idx))
        .collect::<Result<Vec<_>>>()?;
    let shells = per_time[0].len();
    let per_shell = (0..shells).map(|k| {
        let series: Vec<f64> = per_time.iter().map(|s| s[k].1).collect();
        time_norm(times, &series, rho)
    });
    Ok(lr_sum(per_shell, idx.r))
}

/// `‖u‖_{L^ρ_T(B^s_{p,r})}`: Besov norm per time first, time norm second.
pub fn iterated_norm(
    family: &DyadicFamily,
    times: &[f64],
    fields: &[ScalarField],
    rho: f64,
    idx: &BesovIndex,
) -> Result<f64> {
    check_series(times, fields)?;
    check_time_exponent(rho)?;
    let norms = fields
        .iter()
        .map(|f| family.besov_norm(f, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(time_norm(times, &norms, rho))
}

/// Empirical ratios `‖∇u‖_{B^{s−1}} / ‖u‖_{B^s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub evaluated: usize,
    /// Fields with vanishing gradient (mean only).
    pub excluded: usize,
}

pub fn verify_derivative_equivalence(
    family: &DyadicFamily,
    corpus: &[ScalarField],
    idx: &BesovIndex,
) -> Result<RatioReport> {
    let lower = BesovIndex { s: idx.s - 1.0, ..*idx };
    let mut report = RatioReport {
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        evaluated: 0,
        excluded: 0,
    };
    for u in corpus {
        let grad = u.gradient()?;
        let norm_u = family.besov_norm(u, idx)?;
        if grad.max_magnitude() <= 1e-14 * u.max_abs().max(1.0) {
            report.excluded += 1;
            continue;
        }
        let ratio = family.besov_norm_vector(grad.components(), &lower)? / norm_u;
        report.min_ratio = report.min_ratio.min(ratio);
        report.max_ratio = report.max_ratio.max(ratio);
        report.evaluated += 1;
    }
    Ok(report)
}

/// Worst observed constant of an inequality `lhs ≤ C·rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub worst_constant: f64,
    pub constants: Vec<f64>,
}

impl ConstantReport {
    fn from_constants(constants: Vec<f64>) -> Self {
        ConstantReport {
            worst_constant: constants.iter().copied().fold(0.0, f64::max),
            constants,
        }
    }
}

/// `‖u‖_{B^{s−N(1/p1−1/p2)}_{p2,r2}} ≤ C‖u‖_{B^s_{p1,r1}}`.
pub fn verify_embedding(
    family: &DyadicFamily,
    corpus: &[ScalarField],
    s: f64,
    (p1, r1): (f64, f64),
    (p2, r2): (f64, f64),
) -> Result<ConstantReport> {
    if p1 > p2 || r1 > r2 {
        return Err(Error::IndexConstraintViolated(format!(
            "embedding needs p1 <= p2 and r1 <= r2 (got p1 = {p1}, p2 = {p2}, r1 = {r1}, r2 = {r2})"
        )));
    }
    let n = family.grid().dim() as f64;
    let source = BesovIndex::new(s, p1, r1)?;
    let target = BesovIndex::new(s - n * (1.0 / p1 - 1.0 / p2), p2, r2)?;
    let constants = corpus
        .iter()
        .map(|u| Ok(family.besov_norm(u, &target)? / family.besov_norm(u, &source)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantReport::from_constants(constants))
}

/// `‖uv‖_B ≤ C(‖u‖_∞‖v‖_B + ‖v‖_∞‖u‖_B)` with the product dealiased.
pub fn verify_product_law(
    family: &DyadicFamily,
    pairs: &[(ScalarField, ScalarField)],
    idx: &BesovIndex,
) -> Result<ConstantReport> {
    let constants = pairs
        .iter()
        .map(|(u, v)| {
            let lhs = family.besov_norm(&u.product(v)?, idx)?;
            let rhs = u.max_abs() * family.besov_norm(v, idx)? + v.max_abs() * family.besov_norm(u, idx)?;
            Ok(lhs / rhs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantReport::from_constants(constants))
}

/// Time profile `g` of a separable heat forcing `f(t, x) = g(t)F(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TimeProfile {
    Constant,
    Exponential { rate: f64 },
    Cosine { omega: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Exponential { rate } => (-rate * t).exp(),
            TimeProfile::Cosine { omega } => (omega * t).cos(),
        }
    }

    /// `∫_0^t e^{−a(t−τ)} g(τ) dτ`.
    pub fn duhamel(&self, a: f64, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => {
                if a == 0.0 {
                    t
                } else {
                    -(-a * t).exp_m1() / a
                }
            }
            TimeProfile::Exponential { rate } => {
                if (a - rate).abs() <= 1e-12 * a.abs().max(1.0) {
                    t * (-a * t).exp()
                } else {
                    ((-rate * t).exp() - (-a * t).exp()) / (a - rate)
                }
            }
            TimeProfile::Cosine { omega } => {
                let (s, c) = (omega * t).sin_cos();
                (a * c + omega * s - a * (-a * t).exp()) / (a * a + omega * omega)
            }
        }
    }
}

/// Both sides of the heat estimate and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatReport {
    /// `‖u‖_{L̃^{ρ1}_T(B^{s+2/ρ1}_{p,r})}`.
    pub lhs: f64,
    /// `‖u0‖_{B^s_{p,r}}`.
    pub initial_norm: f64,
    /// `‖f‖_{L̃^{ρ2}_T(B^{s−2+2/ρ2}_{p,r})}`.
    pub forcing_norm: f64,
    /// `‖u0‖ + μ^{1/ρ2−1}‖f‖`.
    pub rhs: f64,
    pub constant: f64,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Quadrature on `[0, T]`: panels graded dyadically toward 0 plus a uniform
/// layer, so both `e^{−μ|β|²t}` at large `|β|` and oscillatory profiles resolve.
fn time_quadrature(t_end: f64) -> (Vec<f64>, Vec<f64>) {
    let mut breaks: Vec<f64> = (0..=40).map(|k| t_end * 2f64.powi(-k)).collect();
    breaks.extend((1..32).map(|j| t_end * j as f64 / 32.0));
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = gauss_legendre(8);
    let (mut nodes, mut weights) = (Vec::new(), Vec::new());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (x, wt) in &rule {
            nodes.push(0.5 * (a + b) + 0.5 * (b - a) * x);
            weights.push(0.5 * (b - a) * wt);
        }
    }
    (nodes, weights)
}

fn quad_time_norm(nodes: &[f64], weights: &[f64], values: &[f64], rho: f64, endpoints: [f64; 2]) -> f64 {
    if rho.is_infinite() {
        values.iter().chain(endpoints.iter()).copied().fold(0.0, f64::max)
    } else {
        let _ = nodes;
        values
            .iter()
            .zip(weights)
            .map(|(v, w)| w * v.powf(rho))
            .sum::<f64>()
            .powf(1.0 / rho)
    }
}

/// Solves `∂_t u − μΔu = g(t)F` exactly per mode and evaluates both sides of the
/// heat estimate.
#[allow(clippy::too_many_arguments)]
pub fn heat_regularity_check(
    family: &DyadicFamily,
    u0: &ScalarField,
    forcing: (&ScalarField, TimeProfile),
    mu: f64,
    idx: &BesovIndex,
    rho1: f64,
    rho2: f64,
    t_end: f64,
) -> Result<HeatReport> {
    if !(rho2 >= 1.0 && rho2 <= rho1) {
        return Err(Error::ExponentOrderViolated { rho1, rho2 });
    }
    idx.validate()?;
    let (f_space, profile) = forcing;
    let grid = family.grid();
    let u_hat = u0.forward()?;
    let f_hat = f_space.forward()?;
    let decay: Vec<f64> = grid.modes().iter().map(|m| mu * m.norm().powi(2)).collect();

    let (nodes, weights) = time_quadrature(t_end);
    let shells: Vec<i32> = family.shells(idx.flavor).collect();
    let block_norm = |spec: &Spectrum, q: i32| {
        family
            .filtered(spec, |r| family.multiplier(q, idx.flavor, r))
            .lp_norm(idx.p)
    };
    let solution = |t: f64| {
        let coeffs = u_hat
            .coefficients()
            .iter()
            .zip(f_hat.coefficients())
            .zip(&decay)
            .map(|((u, f), &a)| u * (-a * t).exp() + f * profile.duhamel(a, t))
            .collect();
        Spectrum::from_coefficients(grid, coeffs).expect("same grid")
    };

    let series = |spec_at: &dyn Fn(f64) -> Spectrum, rho: f64, weight_s: f64| -> f64 {
        let per_node: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&t| {
                let s = spec_at(t);
                shells.iter().map(|&q| block_norm(&s, q)).collect()
            })
            .collect();
        let ends: Vec<Vec<f64>> = [0.0, t_end]
            .iter()
            .map(|&t| {
                let s = spec_at(t);
                shells.iter().map(|&q| block_norm(&s, q)).collect()
            })
            .collect();
        let per_shell = shells.iter().enumerate().map(|(k, &q)| {
            let values: Vec<f64> = per_node.iter().map(|v| v[k]).collect();
            2f64.powf(q as f64 * weight_s) * quad_time_norm(&nodes, &weights, &values, rho, [ends[0][k], ends[1][k]])
        });
        lr_sum(per_shell, idx.r)
    };

    let lhs_s = idx.s + if rho1.is_infinite() { 0.0 } else { 2.0 / rho1 };
    let lhs = series(&solution, rho1, lhs_s);
    let forcing_spec = |t: f64| {
        let g = profile.value(t);
        let coeffs = f_hat.coefficients().iter().map(|c| c * g).collect();
        Spectrum::from_coefficients(grid, coeffs).expect("same grid")
    };
    let f_s = idx.s - 2.0 + if rho2.is_infinite() { 0.0 } else { 2.0 / rho2 };
    let forcing_norm = series(&forcing_spec, rho2, f_s);
    let initial_norm = family.besov_norm(u0, idx)?;
    let inv_rho2 = if rho2.is_infinite() { 0.0 } else { 1.0 / rho2 };
    let rhs = initial_norm + mu.powf(inv_rho2 - 1.0) * forcing_norm;
    Ok(HeatReport {
        lhs,
        initial_norm,
        forcing_norm,
        rhs,
        constant: lhs / rhs,
    })
}

/// Structural checks of the decomposition on one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub partition_deviation: f64,
    /// Largest multiplier product over shells at distance `≥ 2`.
    pub overlap: f64,
    /// Largest `|Δ_q Δ_{q'} u|` over `|q − q'| ≥ 2`.
    pub block_product: f64,
    /// `max |Σ_q Δ_q u − u|`.
    pub reconstruction: f64,
    /// `Σ_q ‖Δ_q u‖²_{L²} / ‖u − û_0‖²_{L²}`.
    pub orthogonality_ratio: f64,
}

pub fn structure_report(family: &DyadicFamily, u: &ScalarField) -> Result<StructureReport> {
    let blocks = family.blocks(u, Flavor::Nonhomogeneous)?;
    let mut sum = ScalarField::zeros(family.grid());
    for (_, b) in &blocks {
        sum = sum.add(b)?;
    }
    let reconstruction = sum.sub(u)?.max_abs();
    let spec = u.forward()?;
    let nh = Flavor::Nonhomogeneous;
    let mut block_product: f64 = 0.0;
    for (q, _) in &blocks {
        for (q2, _) in &blocks {
            if (q - q2).abs() >= 2 {
                let composed = family.filtered(&spec, |r| family.multiplier(*q, nh, r) * family.multiplier(*q2, nh, r));
                block_product = block_product.max(composed.max_abs());
            }
        }
    }
    let fluct = u.map(|x| x - u.mean());
    let homog = family.blocks(&fluct, Flavor::Homogeneous)?;
    let energy: f64 = homog.iter().map(|(_, b)| b.l2_norm().powi(2)).sum();
    let orthogonality_ratio = if fluct.max_abs() > 0.0 {
        energy / fluct.l2_norm().powi(2)
    } else {
        1.0
    };
    Ok(StructureReport {
        partition_deviation: family.partition_deviation(),
        overlap: family.overlap(2),
        block_product,
        reconstruction,
        orthogonality_ratio,
    })
}

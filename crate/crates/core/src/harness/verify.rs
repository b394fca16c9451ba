//! Identity and inequality suites over seeded corpora.
//!
//! Each suite returns named checks with a measured value and the bounds it
//! must respect. Checks are produced in a fixed order, so reports are stable.

use std::sync::Arc;

use serde::Serialize;

use crate::corpus::{random_density, random_smooth};
use crate::error::{Error, Result};
use crate::functionals::vacuum_identity_residual;
use crate::lp::{
    heat_regularity_check, structure_report, verify_derivative_equivalence, verify_embedding, verify_product_law,
    BesovIndex, DyadicFamily, Flavor, TimeProfile,
};
use crate::model::{korteweg_div_general, korteweg_div_special, ModelParams, PowerLaw};
use crate::spectral::{relative_l2, ScalarField, SpectralGrid};

pub const SUITES: &[&str] = &[
    "appendix",
    "pointwise",
    "bd-ibp",
    "lp-partition",
    "lp-structure",
    "norms",
    "heat",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Check {
    fn at_most(suite: &'static str, name: impl Into<String>, value: f64, upper: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            value,
            lower: None,
            upper: Some(upper),
        }
    }

    fn within(suite: &'static str, name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            value,
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite()
            && self.lower.is_none_or(|lo| self.value >= lo)
            && self.upper.is_none_or(|hi| self.value <= hi)
    }

    /// One line: `PASS suite/name value [bounds]`.
    pub fn line(&self) -> String {
        let bounds = match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => format!("in [{lo:e}, {hi:e}]"),
            (None, Some(hi)) => format!("<= {hi:e}"),
            (Some(lo), None) => format!(">= {lo:e}"),
            (None, None) => String::new(),
        };
        format!(
            "{} {}/{} {:e} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            bounds
        )
    }
}

/// Seeded densities with values in `[1, 3]`.
pub fn density_corpus(grid: &Arc<SpectralGrid>, count: usize) -> Vec<ScalarField> {
    (0..count as u64)
        .map(|s| random_density(grid, 1000 + s, 2.0, 1.0, 6))
        .collect()
}

/// Seeded smooth fields with varied spectral slopes, bandwidths and means.
pub fn field_corpus(grid: &Arc<SpectralGrid>, count: usize) -> Vec<ScalarField> {
    (0..count as u64)
        .map(|s| {
            let slope = 0.5 + 0.25 * (s % 9) as f64;
            let kmax = 4 + 3 * (s % 7) as usize;
            let mean = 0.5 * ((s % 3) as f64 - 1.0);
            random_smooth(grid, 2000 + s, slope, kmax).map(|x| x + mean)
        })
        .collect()
}

fn grid_1d(n: usize) -> Arc<SpectralGrid> {
    SpectralGrid::periodic_1d(n).expect("valid resolution")
}

fn grid_2d(n: usize) -> Arc<SpectralGrid> {
    SpectralGrid::periodic_2d(n, n).expect("valid resolution")
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Relative `L²` gap of `div K` with `κ(ρ) = κ/ρ` against `κ div(ρ∇∇ln ρ)`, worst over the corpus.
pub fn appendix_residual(corpus: &[ScalarField], kappa: f64) -> Result<f64> {
    let law = PowerLaw::inverse_density(kappa);
    let mut w: f64 = 0.0;
    for rho in corpus {
        let g = korteweg_div_general(rho, &law)?;
        let s = korteweg_div_special(rho, kappa)?;
        w = w.max(relative_l2(&g, &s)?);
    }
    Ok(w)
}

/// `max|Δρ − ρΔln ρ − |∇ρ|²/ρ| / max|Δρ|`.
pub fn laplacian_identity_residual(rho: &ScalarField) -> Result<f64> {
    let lap = rho.laplacian()?;
    let ln_lap = rho.map(f64::ln).laplacian()?;
    let grad_sq = rho.gradient()?.norm_squared();
    let mut rhs = ln_lap.mul(rho)?;
    rhs = rhs.add(&grad_sq.zip_map(rho, |g, s| g / s)?)?;
    Ok(lap.sub(&rhs)?.max_abs() / lap.max_abs())
}

/// Multiplier identity of the vacuum functional, sup-norm residual relative to its first term.
pub fn vacuum_identity_relative(rho: &ScalarField, params: &ModelParams, p: f64) -> Result<f64> {
    let res = vacuum_identity_residual(rho, params, p)?;
    let d = params.diffusivity();
    let scale = rho.laplacian()?.zip_map(rho, |l, s| d * l / s.powf(p))?.max_abs();
    Ok(res.max_abs() / scale)
}

/// `|∫div K·∇ln ρ + κ∫ρΣ(∂_ij ln ρ)²| / (κ∫ρΣ(∂_ij ln ρ)²)`.
pub fn bd_ibp_residual(rho: &ScalarField, kappa: f64) -> Result<f64> {
    let div_k = korteweg_div_special(rho, kappa)?;
    let ln = rho.map(f64::ln);
    let lhs = div_k.dot(&ln.gradient()?)?.integrate()?;
    let rhs = -kappa * ln.hessian()?.frobenius_squared().mul(rho)?.integrate()?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Residuals below this are roundoff and excluded from convergence-rate checks.
pub const CONVERGENCE_FLOOR: f64 = 1e-11;

/// Worst pointwise residual over the 1D density corpus at `n = 32, 64, 128, 256`.
pub fn pointwise_convergence(vacuum: bool) -> Result<Vec<(usize, f64)>> {
    let params = ModelParams::effective_v2(1.0, 1.0, 2.0)?;
    [32, 64, 128, 256]
        .into_iter()
        .map(|n| {
            let corpus = density_corpus(&grid_1d(n), 20);
            let r = corpus
                .iter()
                .map(|rho| {
                    if vacuum {
                        vacuum_identity_relative(rho, &params, 2.0)
                    } else {
                        laplacian_identity_residual(rho)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((n, worst(r)))
        })
        .collect()
}

fn appendix() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, grid) in [("T1 n=256", grid_1d(256)), ("T2 n=128", grid_2d(128))] {
        let r = appendix_residual(&density_corpus(&grid, 20), 1.0)?;
        out.push(Check::at_most(
            "appendix",
            format!("div K general vs special, {label}"),
            r,
            1e-8,
        ));
    }
    Ok(out)
}

fn pointwise() -> Result<Vec<Check>> {
    let params = ModelParams::effective_v2(1.0, 1.0, 2.0)?;
    let mut out = Vec::new();
    for (label, grid) in [("T1 n=256", grid_1d(256)), ("T2 n=128", grid_2d(128))] {
        let corpus = density_corpus(&grid, 20);
        let lap = worst(
            corpus
                .iter()
                .map(laplacian_identity_residual)
                .collect::<Result<Vec<_>>>()?,
        );
        out.push(Check::at_most(
            "pointwise",
            format!("Laplacian of ln rho, {label}"),
            lap,
            1e-8,
        ));
        let vac = worst(
            corpus
                .iter()
                .map(|r| vacuum_identity_relative(r, &params, 2.0))
                .collect::<Result<Vec<_>>>()?,
        );
        out.push(Check::at_most(
            "pointwise",
            format!("vacuum multiplier identity, {label}"),
            vac,
            1e-8,
        ));
    }
    for (label, seq) in [
        ("Laplacian of ln rho", pointwise_convergence(false)?),
        ("vacuum multiplier identity", pointwise_convergence(true)?),
    ] {
        for w in seq.windows(2) {
            let ((n0, r0), (n1, r1)) = (w[0], w[1]);
            if r1 > CONVERGENCE_FLOOR {
                out.push(Check::within(
                    "pointwise",
                    format!("{label} convergence {n0} -> {n1}"),
                    r0 / r1,
                    100.0,
                    f64::MAX,
                ));
            }
        }
    }
    Ok(out)
}

fn bd_ibp() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, grid) in [("T1 n=256", grid_1d(256)), ("T2 n=128", grid_2d(128))] {
        let r = worst(
            density_corpus(&grid, 20)
                .iter()
                .map(|rho| bd_ibp_residual(rho, 1.0))
                .collect::<Result<Vec<_>>>()?,
        );
        out.push(Check::at_most(
            "bd-ibp",
            format!("capillary integration by parts, {label}"),
            r,
            1e-7,
        ));
    }
    Ok(out)
}

fn lp_partition() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [16, 64, 256, 1024] {
        let fam = DyadicFamily::new(&grid_1d(n))?;
        out.push(Check::at_most(
            "lp-partition",
            format!("partition of unity, T1 n={n}"),
            fam.partition_deviation(),
            1e-12,
        ));
    }
    for n in [16, 64, 128] {
        let fam = DyadicFamily::new(&grid_2d(n))?;
        out.push(Check::at_most(
            "lp-partition",
            format!("partition of unity, T2 n={n}"),
            fam.partition_deviation(),
            1e-12,
        ));
    }
    Ok(out)
}

fn lp_structure() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, grid) in [("T1 n=256", grid_1d(256)), ("T2 n=64", grid_2d(64))] {
        let fam = DyadicFamily::new(&grid)?;
        let reports = field_corpus(&grid, 20)
            .iter()
            .map(|u| structure_report(&fam, u))
            .collect::<Result<Vec<_>>>()?;
        out.push(Check::at_most(
            "lp-structure",
            format!("shell overlap |q-q'|>=2, {label}"),
            fam.overlap(2),
            0.0,
        ));
        out.push(Check::at_most(
            "lp-structure",
            format!("Delta_q Delta_q' u, {label}"),
            worst(reports.iter().map(|r| r.block_product)),
            0.0,
        ));
        out.push(Check::at_most(
            "lp-structure",
            format!("reconstruction, {label}"),
            worst(reports.iter().map(|r| r.reconstruction)),
            1e-12,
        ));
        let ratios: Vec<f64> = reports.iter().map(|r| r.orthogonality_ratio).collect();
        out.push(Check::within(
            "lp-structure",
            format!("almost orthogonality min, {label}"),
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            1.0 / 3.0,
            3.0,
        ));
        out.push(Check::within(
            "lp-structure",
            format!("almost orthogonality max, {label}"),
            worst(ratios),
            1.0 / 3.0,
            3.0,
        ));
    }
    Ok(out)
}

/// Worst constants of the norm suite on one grid and corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstants {
    pub sobolev_min: f64,
    pub sobolev_max: f64,
    pub derivative_min: f64,
    pub derivative_max: f64,
    pub embedding: f64,
    pub product: f64,
}

pub fn norm_constants(grid: &Arc<SpectralGrid>, corpus: &[ScalarField]) -> Result<NormConstants> {
    let fam = DyadicFamily::new(grid)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for u in corpus {
        for s in [0.0, 1.0, 2.0] {
            let b = fam.besov_norm(u, &BesovIndex::new(s, 2.0, 2.0)?)?;
            let r = b / crate::lp::sobolev_norm(u, s)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let deriv = verify_derivative_equivalence(&fam, corpus, &BesovIndex::new(1.0, 2.0, 2.0)?)?;
    let emb = verify_embedding(&fam, corpus, 1.0, (2.0, 2.0), (f64::INFINITY, 2.0))?;
    let pairs: Vec<(ScalarField, ScalarField)> = corpus.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let prod = verify_product_law(&fam, &pairs, &BesovIndex::new(1.0, 2.0, 2.0)?)?;
    Ok(NormConstants {
        sobolev_min: lo,
        sobolev_max: hi,
        derivative_min: deriv.min_ratio,
        derivative_max: deriv.max_ratio,
        embedding: emb.worst_constant,
        product: prod.worst_constant,
    })
}

fn drift(a: f64, b: f64) -> f64 {
    (a / b).max(b / a)
}

fn norms() -> Result<Vec<Check>> {
    let s = "norms";
    let mut out = Vec::new();
    let g = grid_1d(128);
    let base = norm_constants(&g, &field_corpus(&g, 100))?;
    let half = norm_constants(&g, &field_corpus(&g, 50))?;
    let fine_grid = grid_1d(256);
    let fine = norm_constants(&fine_grid, &field_corpus(&fine_grid, 100))?;
    let g2 = grid_2d(32);
    let two = norm_constants(&g2, &field_corpus(&g2, 40))?;
    for (label, c) in [("T1 n=128", &base), ("T2 n=32", &two)] {
        out.push(Check::within(
            s,
            format!("Besov/Sobolev min, {label}"),
            c.sobolev_min,
            0.25,
            4.0,
        ));
        out.push(Check::within(
            s,
            format!("Besov/Sobolev max, {label}"),
            c.sobolev_max,
            0.25,
            4.0,
        ));
        out.push(Check::within(
            s,
            format!("derivative ratio min, {label}"),
            c.derivative_min,
            0.1,
            10.0,
        ));
        out.push(Check::within(
            s,
            format!("derivative ratio max, {label}"),
            c.derivative_max,
            0.1,
            10.0,
        ));
        out.push(Check::within(
            s,
            format!("embedding constant, {label}"),
            c.embedding,
            0.0,
            f64::MAX,
        ));
        out.push(Check::within(
            s,
            format!("product constant, {label}"),
            c.product,
            0.0,
            f64::MAX,
        ));
    }
    for (label, other) in [("corpus doubling", &half), ("resolution doubling", &fine)] {
        let d = [
            drift(base.derivative_min, other.derivative_min),
            drift(base.derivative_max, other.derivative_max),
            drift(base.embedding, other.embedding),
            drift(base.product, other.product),
        ];
        out.push(Check::within(
            s,
            format!("constant drift under {label}"),
            worst(d),
            1.0,
            2.0,
        ));
    }
    Ok(out)
}

/// Empirical heat constants for the three exponent pairs on one grid.
pub fn heat_constants(grid: &Arc<SpectralGrid>, seeds: std::ops::Range<u64>) -> Result<[f64; 3]> {
    let fam = DyadicFamily::new(grid)?;
    let idx = BesovIndex::new(0.5, 2.0, 2.0)?;
    let profiles = [
        TimeProfile::Constant,
        TimeProfile::Exponential { rate: 2.0 },
        TimeProfile::Cosine { omega: 5.0 },
    ];
    let mut worst_c = [0.0f64; 3];
    for seed in seeds {
        let u0 = random_smooth(grid, 3000 + seed, 1.0, 12);
        let f = random_smooth(grid, 4000 + seed, 0.5, 12);
        let prof = profiles[(seed % 3) as usize];
        for (k, (r1, r2)) in [(f64::INFINITY, f64::INFINITY), (1.0, 1.0), (2.0, 1.0)]
            .into_iter()
            .enumerate()
        {
            let rep = heat_regularity_check(&fam, &u0, (&f, prof), 0.7, &idx, r1, r2, 1.0)?;
            worst_c[k] = worst_c[k].max(rep.constant);
        }
    }
    Ok(worst_c)
}

/// Relative gap between the heat check and its closed form for `u0 = cos x`, `f = 0`, `ρ1 = 1`, `s = 0`.
pub fn heat_single_mode_gap(grid: &Arc<SpectralGrid>, mu: f64, t_end: f64) -> Result<f64> {
    let fam = DyadicFamily::new(grid)?;
    let idx = BesovIndex::new(0.0, 2.0, 2.0)?;
    let u0 = ScalarField::from_fn(grid, |x| x[0].cos());
    let zero = ScalarField::zeros(grid);
    let rep = heat_regularity_check(&fam, &u0, (&zero, TimeProfile::Constant), mu, &idx, 1.0, 1.0, t_end)?;
    let norm = u0.l2_norm();
    // ‖Δ_q e^{tμΔ}u0‖_{L²} = φ_q(1)e^{−μt}‖u0‖, so the time integral is explicit.
    let oracle = crate::lp::lr_sum(
        fam.shells(Flavor::Nonhomogeneous).map(|q| {
            2f64.powi(2 * q) * fam.multiplier(q, Flavor::Nonhomogeneous, 1.0) * norm * -(-mu * t_end).exp_m1() / mu
        }),
        2.0,
    );
    Ok((rep.lhs - oracle).abs() / oracle)
}

fn heat() -> Result<Vec<Check>> {
    let s = "heat";
    let mut out = Vec::new();
    let coarse = heat_constants(&grid_1d(64), 0..6)?;
    let fine = heat_constants(&grid_1d(128), 0..6)?;
    for (k, label) in ["(inf,inf)", "(1,1)", "(2,1)"].iter().enumerate() {
        out.push(Check::within(s, format!("constant {label}"), coarse[k], 0.0, f64::MAX));
        out.push(Check::within(
            s,
            format!("refinement drift {label}"),
            drift(coarse[k], fine[k]),
            1.0,
            2.0,
        ));
    }
    out.push(Check::at_most(
        s,
        "single-mode closed form",
        heat_single_mode_gap(&grid_1d(64), 0.8, 2.0)?,
        1e-10,
    ));
    Ok(out)
}

/// Runs one suite by name, or all of them for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "appendix" => appendix(),
        "pointwise" => pointwise(),
        "bd-ibp" => bd_ibp(),
        "lp-partition" => lp_partition(),
        "lp-structure" => lp_structure(),
        "norms" => norms(),
        "heat" => heat(),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s)?);
            }
            Ok(out)
        }
        other => Err(Error::ConstraintViolation(vec![format!(
            "unknown suite '{other}' (available: {}, all)",
            SUITES.join(", ")
        )])),
    }
}

//! Discrete calculus on the periodic torus `T^N`, `N = 1, 2`.
//!
//! Every derivative is a spectral multiplier (`iβ_j`, `-|β|^2`, `-β_iβ_j`)
//! with the Nyquist component zeroed. Quadrature is the rectangle rule,
//! which equals `|T^N| · û_0`. Nonlinear products are dealiased with the
//! 2/3 rule: modes with any `|k_j| > (n_j - 1) / 3` are dropped.

mod dump;
mod field;
mod grid;

pub use dump::{decode_dump, encode_dump, load_dump, save_dump, FieldDump, DUMP_MAGIC, DUMP_VERSION};
pub use field::{relative_l2, ScalarField, Spectrum, TensorField, VectorField};
pub use grid::{Mode, SpectralGrid, MIN_RESOLUTION};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::random_smooth;
    use std::f64::consts::PI;

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn grid_rejects_bad_resolutions() {
        assert!(SpectralGrid::periodic_1d(4).is_err());
        assert!(SpectralGrid::periodic_1d(24).is_err());
        assert!(SpectralGrid::new(&[8], &[0.0]).is_err());
        assert!(SpectralGrid::new(&[8, 8, 8], &[1.0; 3]).is_err());
        assert!(SpectralGrid::new(&[8], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn lattice_is_symmetric_away_from_nyquist() {
        let grid = SpectralGrid::periodic_2d(8, 16).unwrap();
        for m in grid.modes() {
            let neg = [-m.k[0], -m.k[1]];
            let nyq = m.k[0] == -4 || m.k[1] == -8;
            if !nyq {
                let j = grid.mode_index(&neg).unwrap();
                assert_eq!(grid.modes()[j].beta, [-m.beta[0], -m.beta[1]]);
            }
        }
        let nyq = grid.mode_index(&[4, 0]).unwrap();
        assert_eq!(grid.modes()[nyq].beta_deriv[0], 0.0);
    }

    #[test]
    fn constant_transforms_to_mean_only() {
        let grid = SpectralGrid::periodic_2d(8, 8).unwrap();
        let spec = ScalarField::constant(&grid, 3.0).forward().unwrap();
        assert!((spec.coefficients()[0].re - 3.0).abs() < 1e-15);
        assert!(spec.coefficients()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_has_half_amplitude_pair() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        let spec = ScalarField::from_fn(&grid, |x| x[0].cos()).forward().unwrap();
        for (i, c) in spec.coefficients().iter().enumerate() {
            let k = grid.modes()[i].k[0];
            let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-15 && c.im.abs() < 1e-15, "k = {k}: {c}");
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for (res, dim) in [(8, 1), (64, 1), (1024, 1), (16, 2), (64, 2)] {
            let grid = if dim == 1 {
                SpectralGrid::periodic_1d(res).unwrap()
            } else {
                SpectralGrid::periodic_2d(res, res).unwrap()
            };
            let f = random_smooth(&grid, 7, 1.5, res / 4);
            let back = f.forward().unwrap().inverse();
            assert!(max_diff(&f, &back) / f.max_abs() < 1e-13);
        }
    }

    #[test]
    fn non_finite_samples_rejected() {
        let grid = SpectralGrid::periodic_1d(8).unwrap();
        let mut f = ScalarField::zeros(&grid);
        f.values_mut()[3] = f64::NAN;
        assert!(matches!(f.forward(), Err(crate::Error::InvalidField(_))));
        assert!(f.gradient().is_err());
        assert!(f.integrate().is_err());
    }

    #[test]
    fn derivative_of_sine() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        let f = ScalarField::from_fn(&grid, |x| x[0].sin());
        let df = f.gradient().unwrap();
        let exact = ScalarField::from_fn(&grid, |x| x[0].cos());
        assert!(max_diff(df.component(0), &exact) < 1e-12);
        let lap = f.laplacian().unwrap();
        assert!(max_diff(&lap, &f.scale(-1.0)) < 1e-12);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let grid = SpectralGrid::periodic_2d(16, 16).unwrap();
        let f = ScalarField::constant(&grid, 2.5);
        assert!(f.gradient().unwrap().components().iter().all(|c| c.max_abs() == 0.0));
        assert_eq!(f.hessian().unwrap().max_abs(), 0.0);
    }

    // Fourth-order centered differences as an independent derivative oracle.
    fn fd4(values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        (0..n)
            .map(|i| {
                let at = |o: isize| values[(i as isize + o).rem_euclid(n as isize) as usize];
                (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_fourth_order_differences() {
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let grid = SpectralGrid::periodic_1d(n).unwrap();
            let f = ScalarField::from_fn(&grid, |x| x[0].sin().exp());
            let spectral = f.gradient().unwrap();
            let fd = fd4(f.values(), 2.0 * PI / n as f64);
            let err = spectral
                .component(0)
                .values()
                .iter()
                .zip(&fd)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            errs.push(err);
        }
        // O(h^4): halving h must cut the gap by ~16.
        assert!(errs[0] / errs[1] > 12.0 && errs[1] / errs[2] > 12.0, "{errs:?}");
        assert!(errs[2] < 1e-5);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        for grid in [
            SpectralGrid::periodic_1d(128).unwrap(),
            SpectralGrid::periodic_2d(32, 64).unwrap(),
        ] {
            let f = random_smooth(&grid, 3, 2.0, 40);
            let a = f.gradient().unwrap().divergence().unwrap();
            let b = f.laplacian().unwrap();
            assert!(a.sub(&b).unwrap().l2_norm() / b.l2_norm() < 1e-13);
        }
    }

    #[test]
    fn mixed_partials_commute() {
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        let f = random_smooth(&grid, 11, 2.0, 16);
        let h = f.hessian().unwrap();
        assert!(max_diff(h.get(0, 1), h.get(1, 0)) < 1e-12 * h.max_abs());
        let xy = f.partial(0).unwrap().partial(1).unwrap();
        assert!(max_diff(&xy, h.get(0, 1)) < 1e-12 * h.max_abs());
    }

    #[test]
    fn quadrature_examples() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        assert!((ScalarField::constant(&grid, 1.0).integrate().unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(ScalarField::from_fn(&grid, |x| x[0].sin()).integrate().unwrap().abs() < 1e-14);
        let s2 = ScalarField::from_fn(&grid, |x| x[0].sin().powi(2)).integrate().unwrap();
        // ∫_0^{2π} sin² = [x/2 − sin 2x / 4]_0^{2π} = π
        assert!((s2 - PI).abs() < 1e-13);
    }

    #[test]
    fn integration_by_parts_is_exact_for_band_limited_fields() {
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        let f = random_smooth(&grid, 1, 1.0, 5);
        let g = VectorField::new(vec![random_smooth(&grid, 2, 1.0, 5), random_smooth(&grid, 3, 1.0, 5)]).unwrap();
        let lhs = f
            .gradient()
            .unwrap()
            .dot(&g)
            .unwrap()
            .add(&f.mul(&g.divergence().unwrap()).unwrap())
            .unwrap();
        assert!(lhs.integrate().unwrap().abs() < 1e-12);
    }

    #[test]
    fn dealias_examples() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        // cutoff: |k| <= 21
        let low = ScalarField::from_fn(&grid, |x| (5.0 * x[0]).cos() + (21.0 * x[0]).sin());
        assert!(max_diff(&low.dealias().unwrap(), &low) < 1e-13);
        let high = ScalarField::from_fn(&grid, |x| (22.0 * x[0]).cos());
        assert!(high.dealias().unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn dealiased_product_matches_exact_convolution() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        // cos a cos b = ½cos(a−b) + ½cos(a+b). The retained band is |k| <= 21,
        // so the exact projection keeps only the difference mode. For (20, 20)
        // the sum 40 aliases to −24 on the grid, which must not leak back in.
        for (k1, k2) in [(15.0, 12.0), (20.0, 20.0), (21.0, 2.0)] {
            let a = ScalarField::from_fn(&grid, |x| (k1 * x[0]).cos());
            let b = ScalarField::from_fn(&grid, |x| (k2 * x[0]).cos());
            let sum_kept = k1 + k2 <= 21.0;
            let exact = ScalarField::from_fn(&grid, |x| {
                0.5 * ((k1 - k2) * x[0]).cos() + if sum_kept { 0.5 * ((k1 + k2) * x[0]).cos() } else { 0.0 }
            });
            assert!(max_diff(&a.product(&b).unwrap(), &exact) < 1e-13, "({k1}, {k2})");
        }
    }

    #[test]
    fn lp_norms() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        let f = ScalarField::from_fn(&grid, |x| x[0].cos());
        assert!((f.l2_norm() - PI.sqrt()).abs() < 1e-13);
        assert!((f.lp_norm(f64::INFINITY) - 1.0).abs() < 1e-15);
        let one = ScalarField::constant(&grid, 1.0);
        assert!((one.lp_norm(3.0) - (2.0 * PI).powf(1.0 / 3.0)).abs() < 1e-13);
    }
}

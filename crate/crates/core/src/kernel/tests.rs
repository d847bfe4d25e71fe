use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;

use super::*;

/// Composite Simpson rule, used as an independent oracle.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn forward(kernel: &Kernel, xi: f64, half_width: f64) -> f64 {
    let f = |x: f64| kernel.eval_space(x).unwrap() * (xi * x).cos();
    // split at 0 so the Poisson kink sits on a node
    INV_SQRT_2PI * 2.0 * simpson(f, 0.0, half_width, 200_000)
}

fn catalog() -> Vec<Kernel> {
    vec![
        Kernel::sinc(),
        Kernel::gaussian(1.0).unwrap(),
        Kernel::gaussian(0.3).unwrap(),
        Kernel::poisson(2.0).unwrap(),
        Kernel::inverse_multiquadric(2.5).unwrap(),
        Kernel::triangle_spectrum(),
        Kernel::dilated(Kernel::gaussian(1.0).unwrap(), 3.0).unwrap(),
        convolve(
            &Kernel::gaussian(4.0).unwrap(),
            &Kernel::triangle_spectrum(),
        ),
        convolve(&Kernel::poisson(1.0).unwrap(), &Kernel::triangle_spectrum()),
    ]
}

#[test]
fn space_examples() {
    assert_eq!(Kernel::gaussian(1.0).unwrap().eval_space(0.0).unwrap(), 1.0);
    assert_eq!(Kernel::sinc().eval_space(1.0).unwrap(), 0.0);
    let oracle = INV_SQRT_2PI
        * simpson(
            |xi| (2.0 * PI - xi.abs()).max(0.0),
            -2.0 * PI,
            2.0 * PI,
            4000,
        );
    let tri = Kernel::triangle_spectrum().eval_space(0.0).unwrap();
    assert!((tri - 4.0 * PI * PI / (2.0 * PI).sqrt()).abs() < 1e-12);
    assert!((tri - oracle).abs() < 1e-9);
}

#[test]
fn fourier_examples() {
    let p = Kernel::poisson(1.0).unwrap().eval_fourier(0.0).unwrap();
    assert!((p - (2.0 / PI).sqrt()).abs() < 1e-15);

    let g = Kernel::gaussian(1.0).unwrap();
    assert!((g.eval_fourier(0.0).unwrap() - 1.0 / SQRT_2).abs() < 1e-15);
    assert!((forward(&g, 0.0, 12.0) - 1.0 / SQRT_2).abs() < 1e-12);

    // Dirichlet integral: (2π)^{-1/2} ∫ sin(πx)/(πx) cos(ξx) dx = (2π)^{-1/2} on |ξ| < π
    let s = Kernel::sinc().eval_fourier(PI / 2.0).unwrap();
    assert!((s - INV_SQRT_2PI).abs() < 1e-15);
}

#[test]
fn inverse_multiquadric_origin_is_a_domain_error() {
    let k = Kernel::inverse_multiquadric(1.0).unwrap();
    assert!(matches!(k.eval_fourier(0.0), Err(Error::Domain(_))));
    // the total spectrum still has the removable limit √(π/2)
    assert!((k.spectrum(0.0) - (PI / 2.0).sqrt()).abs() < 1e-14);
    assert!(Kernel::inverse_multiquadric(0.9).is_err());
}

#[test]
fn inverse_multiquadric_matches_classical_pairs() {
    let one = Kernel::inverse_multiquadric(1.0).unwrap();
    let two = Kernel::inverse_multiquadric(2.0).unwrap();
    for &xi in &[0.1, 0.5, 1.0, PI, 7.0, 20.0] {
        let want1 = (PI / 2.0).sqrt() * (-xi).exp();
        let want2 = 0.5 * (PI / 2.0).sqrt() * (1.0 + xi) * (-xi).exp();
        assert!(
            (one.eval_fourier(xi).unwrap() / want1 - 1.0).abs() < 1e-12,
            "xi={xi}"
        );
        assert!(
            (two.eval_fourier(-xi).unwrap() / want2 - 1.0).abs() < 1e-12,
            "xi={xi}"
        );
    }
}

#[test]
fn forward_quadrature_matches_closed_forms() {
    let kernels = [
        (Kernel::gaussian(1.0).unwrap(), 12.0),
        (Kernel::gaussian(0.5).unwrap(), 16.0),
        (Kernel::poisson(1.0).unwrap(), 45.0),
        (Kernel::poisson(4.0).unwrap(), 12.0),
        (Kernel::inverse_multiquadric(3.0).unwrap(), 0.0),
    ];
    for (k, width) in kernels {
        for i in -8..=8 {
            let xi = i as f64 * PI / 2.0;
            let want = k.spectrum(xi);
            let got = if width > 0.0 {
                forward(&k, xi, width)
            } else {
                // (1+x²)^{-3}: substitute x = tan θ to reach infinity
                let f = |t: f64| {
                    let c = t.cos();
                    if c <= 0.0 {
                        0.0
                    } else {
                        c.powi(4) * (xi * t.tan()).cos()
                    }
                };
                INV_SQRT_2PI * 2.0 * simpson(f, 0.0, PI / 2.0, 400_000)
            };
            assert!(
                (got - want).abs() < 1e-8,
                "{} xi={xi}: {got} vs {want}",
                k.name()
            );
        }
    }
}

#[test]
fn triangle_regularity() {
    let r = regularity_report(&Kernel::triangle_spectrum(), 4, 1024).unwrap();
    assert!((r.delta - PI).abs() < 1e-12);
    assert!((r.c - 2.0).abs() < 1e-12);
    let sups = cell_sup_norms(&Kernel::triangle_spectrum(), 4, 1024).unwrap();
    assert!((sups[3] - PI).abs() < 1e-12 && (sups[5] - PI).abs() < 1e-12);
    assert!(sups[..3].iter().chain(&sups[6..]).all(|&s| s == 0.0));
    assert_eq!(r.tail_bound, 0.0);
    assert!(r.pass_a1 && r.pass_a2);
}

#[test]
fn poisson_cell_sups_follow_the_formula() {
    for &alpha in &[1.0, 2.0, 4.0] {
        let k = Kernel::poisson(alpha).unwrap();
        let sups = cell_sup_norms(&k, 8, 1024).unwrap();
        for j in -8i64..=8 {
            let m = (2 * j.abs() - 1) as f64;
            let want = if j == 0 {
                (2.0 / PI).sqrt() / alpha
            } else {
                (2.0 / PI).sqrt() * alpha / (alpha * alpha + m * m * PI * PI)
            };
            let got = sups[(j + 8) as usize];
            assert!((got / want - 1.0).abs() < 1e-10, "alpha={alpha} k={j}");
        }
        let r = regularity_report(&k, 8, 1024).unwrap();
        let delta = (2.0 / PI).sqrt() * alpha / (alpha * alpha + PI * PI);
        assert!((r.delta / delta - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sinc_regularity_uses_closed_cells() {
    let r = regularity_report(&Kernel::sinc(), 3, 1024).unwrap();
    assert!((r.delta - INV_SQRT_2PI).abs() < 1e-15);
    assert_eq!(r.c, 0.0);
    assert_eq!(r.amalgam_offcenter, 0.0);
    assert!(r.pass_a1 && r.pass_a2);
}

#[test]
fn report_invariants_and_field_names() {
    for k in catalog() {
        let r = regularity_report(&k, 4, 256).unwrap();
        assert!(r.amalgam_full >= r.amalgam_offcenter && r.amalgam_offcenter >= 0.0);
        assert_eq!(r.c, r.amalgam_offcenter / r.delta);
        if r.pass_a2 {
            assert!(r.delta > 0.0);
        }
    }
    let json = serde_json::to_value(regularity_report(&Kernel::sinc(), 1, 64).unwrap()).unwrap();
    let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "C",
            "amalgam_full",
            "amalgam_offcenter",
            "cells_used",
            "delta",
            "grid_points_per_cell",
            "pass_A1",
            "pass_A2",
            "tail_bound"
        ]
    );
}

#[test]
fn more_cells_never_shrink_the_amalgam() {
    for k in catalog() {
        let mut prev = 0.0;
        for cells in 1..6 {
            let r = regularity_report(&k, cells, 128).unwrap();
            assert!(r.amalgam_full >= prev);
            prev = r.amalgam_full;
        }
    }
}

#[test]
fn poisson_tail_envelope_bounds_the_remainder() {
    let k = Kernel::poisson(2.0).unwrap();
    let sups = cell_sup_norms(&k, 4000, 16).unwrap();
    for cells in [1usize, 8, 64, 256] {
        let rest: f64 = sups
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as i64 - 4000).unsigned_abs() as usize > cells)
            .map(|(_, s)| s)
            .sum();
        assert!(rest <= k.tail_bound(cells));
    }
    assert!(regularity_report(&k, 256, 1024).unwrap().pass_a2);
    assert!(!regularity_report(&k, 4, 1024).unwrap().pass_a2);
}

#[test]
fn gaussian_tail_is_tight() {
    let k = Kernel::gaussian(1.0).unwrap();
    let sups = cell_sup_norms(&k, 12, 64).unwrap();
    let rest: f64 = sups[..10].iter().chain(&sups[15..]).sum();
    let bound = k.tail_bound(2);
    assert!(rest <= bound * (1.0 + 1e-12) && bound <= rest * (1.0 + 1e-9));
}

#[test]
fn convolution_examples() {
    let tri = Kernel::triangle_spectrum();
    let tau = convolve(&Kernel::gaussian(3.0).unwrap(), &tri);
    assert_eq!(tau.support(), Support::Interval(2.0 * PI));
    let pt = convolve(&Kernel::poisson(1.0).unwrap(), &tri);
    assert!((pt.eval_fourier(0.0).unwrap() - (2.0 / PI).sqrt() * 2.0 * PI).abs() < 1e-13);

    for phi in [
        Kernel::gaussian(2.0).unwrap(),
        Kernel::poisson(3.0).unwrap(),
        Kernel::sinc(),
    ] {
        for psi in [tri.clone(), Kernel::gaussian(1.0).unwrap()] {
            let d = |k: &Kernel| regularity_report(k, 2, 256).unwrap().delta;
            assert!(d(&convolve(&phi, &psi)) >= d(&phi) * d(&psi) * (1.0 - 1e-14));
        }
    }
}

#[test]
fn spectrum_backed_space_evaluation() {
    // gaussian(a) * gaussian(b) has spectrum e^{-ξ²/4c}/(2√(ab)), 1/c = 1/a + 1/b
    let (a, b) = (1.0, 3.0);
    let tau = convolve(&Kernel::gaussian(a).unwrap(), &Kernel::gaussian(b).unwrap());
    let c = 1.0 / (1.0 / a + 1.0 / b);
    for &x in &[0.0, 0.4, 1.3, 3.0, 9.0] {
        let want = (2.0 * c).sqrt() / (2.0 * (a * b).sqrt()) * (-c * x * x).exp();
        assert!((tau.eval_space(x).unwrap() - want).abs() < 1e-13, "x={x}");
    }
    // triangle via its own spectrum
    let tt = convolve(&Kernel::triangle_spectrum(), &Kernel::sinc());
    for &x in &[0.0, 0.5, 2.25] {
        // spectrum (2π−|ξ|)/√(2π) on T
        let want = INV_SQRT_2PI
            * INV_SQRT_2PI
            * simpson(|xi| (2.0 * PI - xi.abs()) * (x * xi).cos(), -PI, PI, 20_000);
        assert!((tt.eval_space(x).unwrap() - want).abs() < 1e-10);
    }
}

#[test]
fn dilation_scales_both_domains() {
    let base = Kernel::poisson(1.5).unwrap();
    let d = Kernel::dilated(base.clone(), 2.5).unwrap();
    for &x in &[0.0, 0.3, -1.2] {
        assert_eq!(
            d.eval_space(x).unwrap(),
            2.5 * base.eval_space(2.5 * x).unwrap()
        );
        assert_eq!(d.spectrum(x * 7.0), base.spectrum(x * 7.0 / 2.5));
    }
    let dp = Kernel::dilated(base.clone(), 2.0).unwrap();
    let sups = cell_sup_norms(&dp, 40, 16).unwrap();
    let rest: f64 = sups[..35].iter().chain(&sups[46..]).sum();
    assert!(rest <= dp.tail_bound(5));
}

#[test]
fn cardinal_kernel_partitions_unity() {
    let base = Kernel::gaussian(1.0).unwrap();
    let l = Kernel::cardinal(base, 4).unwrap();
    for i in 0..64 {
        let xi = -PI + 2.0 * PI * i as f64 / 64.0;
        let s: f64 = (-4..=4).map(|k| l.spectrum(xi + 2.0 * PI * k as f64)).sum();
        assert!((s - INV_SQRT_2PI).abs() < 1e-14);
    }
    let ls = Kernel::cardinal(Kernel::sinc(), 1).unwrap();
    assert_eq!(ls.spectrum_limit(PI, Side::Below), INV_SQRT_2PI);
    assert_eq!(ls.spectrum_limit(PI, Side::Above), 0.0);
    assert!((ls.spectrum(PI) - 0.5 * INV_SQRT_2PI).abs() < 1e-16);
}

#[test]
fn multiquadric_is_spectrum_only() {
    let mq = Kernel::multiquadric(1.0).unwrap();
    assert!(mq.eval_space(0.0).is_err());
    assert!(mq.eval_fourier(0.0).is_err());
    // K_1 near zero: K_1(z) ≈ 1/z, so φ̂ ≈ √(2/π)/ξ²
    let xi = 1e-4;
    assert!((mq.spectrum(xi) * xi * xi / (2.0 / PI).sqrt() - 1.0).abs() < 1e-6);
    let r = regularity_report(&mq, 2, 64).unwrap();
    assert!(!r.pass_a2);
}

#[test]
fn spec_parsing() {
    let k = KernelSpec::parse(r#"kernel = "poisson", alpha = 2.0"#)
        .unwrap()
        .build()
        .unwrap();
    assert_eq!(k, Kernel::poisson(2.0).unwrap());
    let doc = "kernel = \"gaussian\"\nalpha = 0.5\n";
    assert_eq!(
        KernelSpec::parse(doc).unwrap().build().unwrap(),
        Kernel::gaussian(0.5).unwrap()
    );
    let nested = r#"kernel = "convolution", left = { kernel = "gaussian", alpha = 4.0 }, right = { kernel = "triangle-spectrum" }"#;
    let tau = KernelSpec::parse(nested).unwrap().build().unwrap();
    assert_eq!(tau.name(), "convolution(gaussian(4), triangle-spectrum)");
    assert!(KernelSpec::parse(r#"kernel = "poisson", alpha = 2.0, beta = 1"#).is_err());
    assert!(KernelSpec::parse(r#"kernel = "poisson", alpha = -2.0"#)
        .unwrap()
        .build()
        .is_err());
    assert!(KernelSpec::parse(r#"kernel = "wavelet""#)
        .unwrap()
        .build()
        .is_err());

    let json = serde_json::to_string(&tau).unwrap();
    let back: Kernel = serde_json::from_str(&json).unwrap();
    assert_eq!(back, tau);
}

fn arb_kernel() -> impl Strategy<Value = Kernel> {
    (0usize..9, 0.2f64..8.0).prop_map(|(i, a)| match i {
        0 => Kernel::sinc(),
        1 => Kernel::gaussian(a).unwrap(),
        2 => Kernel::poisson(a).unwrap(),
        3 => Kernel::inverse_multiquadric(1.0 + a).unwrap(),
        4 => Kernel::triangle_spectrum(),
        5 => Kernel::dilated(Kernel::gaussian(1.0).unwrap(), a).unwrap(),
        6 => convolve(&Kernel::gaussian(a).unwrap(), &Kernel::triangle_spectrum()),
        7 => convolve(
            &Kernel::poisson(a).unwrap(),
            &Kernel::gaussian(1.0).unwrap(),
        ),
        _ => Kernel::cardinal(Kernel::poisson(a).unwrap(), 8).unwrap(),
    })
}

proptest! {
    #[test]
    fn spectra_are_even_and_nonnegative(k in arb_kernel(), xi in -40.0f64..40.0) {
        let v = k.spectrum(xi);
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v, k.spectrum(-xi));
    }

    #[test]
    fn convolution_is_symmetric(a in arb_kernel(), b in arb_kernel(), xi in -20.0f64..20.0) {
        let ab = convolve(&a, &b).spectrum(xi);
        let ba = convolve(&b, &a).spectrum(xi);
        prop_assert!((ab - ba).abs() <= 1e-15 * ab.abs().max(1e-300));
    }

    #[test]
    fn log_spectrum_agrees(k in arb_kernel(), xi in 0.01f64..30.0) {
        let v = k.spectrum(xi);
        let l = k.ln_spectrum(xi).exp();
        prop_assert!((v - l).abs() <= 1e-12 * v.max(1e-300));
    }
}

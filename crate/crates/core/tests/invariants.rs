use proptest::prelude::*;
use qtm_core::{
    bose_occupation, classify, entropy_rate_from_currents, evaluate_point, exergy_efficiency, spectral_lorentzian,
    LorentzianBath, MachineConfig, OhmicBath, OperatingMode, Temperatures, WorkingMedium,
};

fn bath(temperature: f64, center: f64, width: f64, kappa: f64) -> LorentzianBath {
    LorentzianBath {
        temperature,
        center,
        width,
        kappa,
    }
}

prop_compose! {
    /// Valid configurations: `T_h > T_m > T_c`, `0 < Ω < ω₀`, `κ` log-uniform.
    fn machine()(
        t_cold in 0.02f64..0.6,
        dm in 0.005f64..0.6,
        dh in 0.005f64..1.5,
        centers in (0.1f64..3.0, 0.1f64..3.0),
        widths in (0.005f64..0.3, 0.005f64..0.3),
        log_kappa in (-4.0f64..0.05f64.log10(), -4.0f64..0.05f64.log10()),
        drive_freq in 0.01f64..0.99,
    ) -> MachineConfig {
        let t_mid = t_cold + dm;
        MachineConfig {
            wm: WorkingMedium::default(),
            hot: bath(t_mid + dh, centers.0, widths.0, 10f64.powf(log_kappa.0)),
            cold: bath(t_cold, centers.1, widths.1, 10f64.powf(log_kappa.1)),
            mid: OhmicBath { temperature: t_mid, gamma_m: 0.1 },
            drive_freq,
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn bose_reflection(x in 1e-8f64..50.0) {
        let sum = bose_occupation(x).unwrap() + bose_occupation(-x).unwrap();
        prop_assert!((sum + 1.0).abs() <= 1e-12, "n(x) + n(-x) = {sum}");
    }

    #[test]
    fn bose_strictly_decreasing(x in 1e-8f64..40.0, f in 1.0001f64..2.0) {
        prop_assert!(bose_occupation(x * f).unwrap() < bose_occupation(x).unwrap());
    }

    #[test]
    fn lorentzian_peaks_near_center(center in 0.3f64..3.0, rel_width in 0.005f64..0.1, kappa in 1e-4f64..0.05) {
        let wm = WorkingMedium::default();
        let b = bath(1.0, center, rel_width * center, kappa);
        let n = 20_000;
        let (lo, hi) = (center * 0.5, center * 1.5);
        let argmax = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .max_by(|a, c| spectral_lorentzian(&b, &wm, *a).total_cmp(&spectral_lorentzian(&b, &wm, *c)))
            .unwrap();
        prop_assert!((argmax - center).abs() <= 0.5 * b.width);
    }

    #[test]
    fn lorentzian_linear_in_kappa(center in 0.3f64..3.0, width in 0.005f64..0.3, kappa in 1e-4f64..0.05, w in 0.01f64..4.0) {
        let wm = WorkingMedium::default();
        let one = spectral_lorentzian(&bath(1.0, center, width, kappa), &wm, w);
        let two = spectral_lorentzian(&bath(1.0, center, width, 2.0 * kappa), &wm, w);
        prop_assert!(rel_close(two, 2.0 * one, 1e-15), "{two} vs 2 x {one}");
    }

    #[test]
    fn entropy_rate_matches_heat_over_temperature(cfg in machine()) {
        let p = evaluate_point(&cfg).unwrap();
        let t = Temperatures::from(&cfg);
        let clausius = -(p.j_hot / t.hot + p.j_cold / t.cold + p.j_mid / t.mid);
        prop_assert!((p.entropy_rate - clausius).abs() <= 1e-12);
        prop_assert!((entropy_rate_from_currents(&p, &t) - p.entropy_rate).abs() <= 1e-12);
    }

    #[test]
    fn currents_linear_in_kappa(cfg in machine(), s in 0.1f64..10.0) {
        let mut scaled = cfg;
        scaled.hot.kappa *= s;
        scaled.cold.kappa *= s;
        let a = evaluate_point(&cfg).unwrap();
        let b = evaluate_point(&scaled).unwrap();
        // P and J_m are differences of bath contributions; the error is
        // measured against the largest flow, as for the first law.
        let scale = a.scale() * s;
        for (x, y, name) in [
            (a.j_hot, b.j_hot, "j_hot"),
            (a.j_cold, b.j_cold, "j_cold"),
            (a.power, b.power, "power"),
            (a.j_mid, b.j_mid, "j_mid"),
        ] {
            prop_assert!((y - s * x).abs() <= 1e-14 * scale, "{name}: {y:e} vs {s} x {x:e}");
        }
    }

    #[test]
    fn currents_scale_exactly_by_powers_of_two(cfg in machine(), k in -10i32..10) {
        let s = 2f64.powi(k);
        let mut scaled = cfg;
        scaled.hot.kappa *= s;
        scaled.cold.kappa *= s;
        let a = evaluate_point(&cfg).unwrap();
        let b = evaluate_point(&scaled).unwrap();
        prop_assert_eq!(b.j_hot, s * a.j_hot);
        prop_assert_eq!(b.j_cold, s * a.j_cold);
        prop_assert_eq!(b.power, s * a.power);
        prop_assert_eq!(b.j_mid, s * a.j_mid);
    }

    #[test]
    fn swapping_baths_swaps_currents(cfg in machine()) {
        let mut swapped = cfg;
        std::mem::swap(&mut swapped.hot, &mut swapped.cold);
        let a = evaluate_point(&cfg).unwrap();
        let b = evaluate_point(&swapped).unwrap();
        prop_assert_eq!(a.j_hot.to_bits(), b.j_cold.to_bits());
        prop_assert_eq!(a.j_cold.to_bits(), b.j_hot.to_bits());
    }

    #[test]
    fn wasteful_points_have_zero_exergy(cfg in machine()) {
        let p = evaluate_point(&cfg).unwrap();
        let phi = exergy_efficiency(&p, &Temperatures::from(&cfg)).unwrap();
        prop_assert!((0.0..=1.0).contains(&phi));
        if classify(&p).unwrap() == OperatingMode::Wasteful {
            prop_assert_eq!(phi, 0.0);
        }
    }

    #[test]
    fn two_terminal_engine_exergy_is_carnot_normalised(cfg in machine()) {
        let cfg = cfg.without_cold();
        let p = evaluate_point(&cfg).unwrap();
        if classify(&p).unwrap() == OperatingMode::Engine {
            let t = Temperatures::from(&cfg);
            let expected = (-p.power / p.j_hot) / (1.0 - t.mid / t.hot);
            let phi = exergy_efficiency(&p, &t).unwrap();
            prop_assert!(rel_close(phi, expected, 1e-10), "{phi} vs {expected}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn first_and_second_law(cfg in machine()) {
        let p = evaluate_point(&cfg).unwrap();
        prop_assert!(p.entropy_rate >= -1e-12, "entropy rate {:e}", p.entropy_rate);
        prop_assert!(p.first_law_residual() <= 1e-12 * p.scale().max(1e-300));
        prop_assert!(classify(&p).is_ok());
    }
}

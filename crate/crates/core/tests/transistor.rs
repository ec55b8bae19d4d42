use qtm_core::sweep::linspace;
use qtm_core::transistor::{scan, DEFAULT_FD_STEP, RELIABLE_SLOPE};
use qtm_core::{evaluate_point, transistor_point, LorentzianBath, MachineConfig, OhmicBath, WorkingMedium};

fn device(center: f64) -> MachineConfig {
    MachineConfig {
        wm: WorkingMedium::default(),
        hot: LorentzianBath { temperature: 0.9, center, width: 0.05, kappa: 0.01 },
        cold: LorentzianBath { temperature: 0.2, center, width: 0.05, kappa: 0.01 },
        mid: OhmicBath { temperature: 0.21, gamma_m: 0.1 },
        drive_freq: 0.5,
    }
}

/// Richardson-extrapolated central difference with a coarse step.
fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn at(cfg: &MachineConfig, omega: f64) -> qtm_core::ThermoPoint {
    let mut c = *cfg;
    c.drive_freq = omega;
    evaluate_point(&c).unwrap()
}

#[test]
fn gain_matches_richardson_oracle() {
    let mut checked = 0;
    for center in [1.1, 1.3, 1.6] {
        let cfg = device(center);
        for omega in linspace(0.05, 0.95, 19) {
            let mut c = cfg;
            c.drive_freq = omega;
            let t = transistor_point(&c, DEFAULT_FD_STEP).unwrap();
            if t.dpower_domega.abs() < 1e-6 {
                continue;
            }
            let h = 1e-3 * omega;
            let dj = richardson(|o| at(&cfg, o).j_hot, omega, h);
            let dp = richardson(|o| at(&cfg, o).power, omega, h);
            let g = (dj / dp).abs();
            assert!(
                (t.g - g).abs() <= 1e-4 * g,
                "center {center}, Ω {omega}: g {} vs oracle {g}",
                t.g
            );
            checked += 1;
        }
    }
    assert!(checked > 30, "only {checked} points checked");
}

#[test]
fn gain_is_stable_under_step_halving() {
    for center in [1.05, 1.2, 1.5, 1.9] {
        let cfg = device(center);
        for omega in linspace(0.01, 0.99, 197) {
            let mut c = cfg;
            c.drive_freq = omega;
            let full = transistor_point(&c, DEFAULT_FD_STEP).unwrap();
            let half = transistor_point(&c, DEFAULT_FD_STEP / 2.0).unwrap();
            if full.dpower_domega.abs() > RELIABLE_SLOPE && full.g.is_finite() {
                let change = (half.g - full.g).abs() / full.g;
                assert!(change < 0.01, "center {center}, Ω {omega}: g {} -> {}", full.g, half.g);
            }
        }
    }
}

#[test]
fn windows_are_sorted_disjoint_and_finite() {
    for center in [1.1, 1.3, 1.6] {
        let s = scan(&device(center), &linspace(0.005, 0.995, 199), 10.0, DEFAULT_FD_STEP).unwrap();
        for w in s.windows.windows(2) {
            assert!(w[0].omega_max < w[1].omega_min);
        }
        for p in &s.points {
            if s.in_window(p.omega_drive) {
                assert!(p.r.is_finite() && p.g.is_finite());
            }
        }
    }
}

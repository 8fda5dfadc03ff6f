use approx::assert_relative_eq;
use proptest::prelude::*;
use wirenoise::asymptotics::{
    g_classical, h_classical, lossless_mode_free_energy, lossless_mode_h, nernst_entropy_limit,
};
use wirenoise::spectral::self_entropy;
use wirenoise::{
    h_factor, interaction_entropy, interaction_free_energy, total_entropy, QuadratureConfig,
    ReducedParams, ResistanceModel,
};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn h_positive_without_capacitance(m in 0.01f64..0.95, log_wr in -3.0f64..1.0, log_t in -2.0f64..2.0) {
        let p = ReducedParams::inductive(m, 10f64.powf(log_wr), 10f64.powf(log_t)).unwrap();
        prop_assert!(h_factor(&p, &q()).unwrap().value > 0.0);
    }

    #[test]
    fn free_energy_nondecreasing_in_coupling(
        m_lo in 0.0f64..0.9, dm in 0.01f64..0.09, log_wr in -2.0f64..1.0, log_t in -1.0f64..2.0,
    ) {
        let p = ReducedParams::inductive(m_lo, 10f64.powf(log_wr), 10f64.powf(log_t)).unwrap();
        let lo = interaction_free_energy(&p, &q()).unwrap();
        let hi = interaction_free_energy(&p.with_m(m_lo + dm).unwrap(), &q()).unwrap();
        prop_assert!(hi.value + hi.abs_error_estimate + lo.abs_error_estimate >= lo.value);
        prop_assert!(lo.value >= -lo.abs_error_estimate);
    }

    #[test]
    fn free_energy_gradient_is_t_times_h(m in 0.1f64..0.9, log_t in 2.0f64..6.0) {
        let q = QuadratureConfig { rel_tol: 1e-12, ..Default::default() };
        let p = ReducedParams::inductive(m, 1.0, 10f64.powf(log_t)).unwrap();
        let f = |z: f64| interaction_free_energy(&p.with_m(z.sqrt()).unwrap(), &q).unwrap().value;
        let (m2, step) = (m * m, 1e-3);
        let d1 = (f(m2 + step) - f(m2 - step)) / (2.0 * step);
        let d2 = (f(m2 + 2.0 * step) - f(m2 - 2.0 * step)) / (4.0 * step);
        let d = d1 + (d1 - d2) / 3.0;
        let h = h_factor(&p, &q).unwrap().value;
        prop_assert!((d / (p.t() * h) - 1.0).abs() < 1e-6, "{} vs {}", d, p.t() * h);
    }
}

#[test]
fn h_vanishes_identically_without_dissipation() {
    for m in [0.0, 0.3, 0.9] {
        for t in [1e-3, 1.0, 1e3] {
            let p = ReducedParams::inductive(m, 0.0, t).unwrap();
            assert_eq!(h_factor(&p, &q()).unwrap().value, 0.0);
            let p = ReducedParams::capacitive(m, 0.0, t).unwrap();
            assert_eq!(h_factor(&p, &q()).unwrap().value, 0.0);
        }
    }
}

#[test]
fn classical_deviation_shrinks_with_dissipation() {
    for m in [0.1, 0.3, 0.5, 0.8, 0.9] {
        let mut prev = f64::INFINITY;
        for r in [1e-4, 1e-5, 1e-6] {
            let p = ReducedParams::inductive(m, 1.0, 1.0 / r).unwrap();
            let dev = (h_factor(&p, &q()).unwrap().value / h_classical(m).unwrap() - 1.0).abs();
            assert!(dev < prev, "m = {m}, r = {r}: {dev}");
            if r <= 1e-5 {
                assert!(dev < 1e-3, "m = {m}, r = {r}: {dev}");
            }
            prev = dev;
        }
    }
}

#[test]
fn classical_free_energy_matches_g() {
    for m in [0.1, 0.5, 0.9] {
        let p = ReducedParams::inductive(m, 1.0, 1e5).unwrap();
        let f = interaction_free_energy(&p, &q()).unwrap().value;
        assert_relative_eq!(f / p.t(), g_classical(m).unwrap(), max_relative = 1e-3);
    }
}

#[test]
fn capacitive_limit_is_lossless_normal_modes() {
    let (m, t) = (0.8, 0.1);
    let h0 = lossless_mode_h(m, t).unwrap();
    let f0 = lossless_mode_free_energy(m, t).unwrap();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for wr in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let p = ReducedParams::capacitive(m, wr, t).unwrap();
        let dh = (h_factor(&p, &q()).unwrap().value - h0).abs();
        let df = (interaction_free_energy(&p, &q()).unwrap().value - f0).abs();
        assert!(dh < prev.0 && df < prev.1, "omega_r = {wr}");
        prev = (dh, df);
    }
    assert!(prev.0 < 1e-3 * h0.abs());
    assert!(prev.1 < 1e-3 * f0.abs());
}

#[test]
fn entropy_without_capacitance_tends_to_minus_g() {
    let m = 0.8;
    let p = ReducedParams::inductive(m, 1.0, 1e5).unwrap();
    let s = interaction_entropy(&p, &ResistanceModel::Fixed, &q()).unwrap();
    assert_relative_eq!(
        s.value,
        nernst_entropy_limit(m).unwrap(),
        max_relative = 1e-2
    );
}

#[test]
fn nernst_restored_with_capacitance() {
    let rq = QuadratureConfig::relative_only();
    let models = [
        ResistanceModel::Fixed,
        ResistanceModel::PowerLaw {
            coefficient: 5.0,
            exponent: 2.0,
        },
    ];
    for rm in models {
        let mut prev = f64::INFINITY;
        for t in [0.1, 0.05, 0.02, 0.01, 0.005] {
            let base = ReducedParams::capacitive(0.8, 1e-3, t).unwrap();
            let p = rm.at(&base, t).unwrap();
            let s = total_entropy(&p, &rm, &rq).unwrap().value;
            assert!(s.abs() < prev, "{rm:?} t = {t}: {s}");
            prev = s.abs();
        }
        assert!(prev < 1e-10, "{rm:?}: {prev}");
    }
}

#[test]
fn oscillator_entropy_vanishes_at_low_temperature() {
    let p = ReducedParams::capacitive(0.5, 0.1, 0.01).unwrap();
    assert!(self_entropy(&p).unwrap() < 1e-40);
    let p = ReducedParams::inductive(0.5, 0.1, 0.01).unwrap();
    assert!(self_entropy(&p).is_err());
}

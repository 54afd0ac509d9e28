use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qtraj_core::fock::{build_hamiltonian, build_quadratures};
use qtraj_core::spectra::{bin_jump_increments, welch_psd};
use qtraj_core::{PhysicalParams, TimeSeries, WindowKind};

fn params() -> impl Strategy<Value = PhysicalParams> {
    (0.05..1.0f64, 0.01..1.0f64, 0.0..3.0f64, any::<bool>()).prop_map(|(beta, gamma, g, sho_mode)| PhysicalParams {
        beta,
        gamma,
        g,
        sho_mode,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian(p in params(), dim in 4usize..48, t in 0.0..7.0f64) {
        let h = build_hamiltonian(&p, dim).unwrap();
        prop_assert!(h.h_static.is_hermitian());
        prop_assert!(h.h_drive.is_hermitian());
        prop_assert!(h.at(t).is_hermitian());
    }

    #[test]
    fn banded_apply_matches_dense_product(p in params(), dim in 4usize..40, seed in any::<u64>()) {
        let h = build_hamiltonian(&p, dim).unwrap().h_static;
        let x: Vec<C64> = (0..dim)
            .map(|k| C64::new(((seed as f64) * 1e-9 + k as f64).sin(), (k as f64 * 0.7).cos()))
            .collect();
        let mut y = vec![C64::new(0.0, 0.0); dim];
        h.apply_into(&x, &mut y);
        let dense = h.to_dense();
        for i in 0..dim {
            let want: C64 = (0..dim).map(|j| dense[i * dim + j] * x[j]).sum();
            prop_assert!((want - y[i]).norm() <= 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn commutator_of_quadratures_is_i_away_from_the_edge(dim in 6usize..64) {
        let q = build_quadratures(dim).unwrap();
        let qp = q.q.mul(&q.p).unwrap();
        let pq = q.p.mul(&q.q).unwrap();
        for k in 0..dim - 1 {
            let c = qp.get(k, k) - pq.get(k, k);
            prop_assert!((c - C64::i()).norm() < 1e-12);
        }
    }

    #[test]
    fn binning_conserves_jumps_inside_the_window(
        mut times in proptest::collection::vec(0.0..100.0f64, 0..400),
        dt in 0.05..3.0f64,
    ) {
        times.sort_by(|a, b| a.total_cmp(b));
        let s = bin_jump_increments(&times, dt, 10.0, 90.0).unwrap();
        let end = 10.0 + s.len() as f64 * dt;
        let inside = times.iter().filter(|&&t| (10.0..end).contains(&t)).count();
        prop_assert_eq!(s.values.iter().sum::<f64>() as usize, inside);
    }

    #[test]
    fn welch_power_matches_variance(amp in 0.1..5.0f64, freq in 0.2..20.0f64, seed in any::<u32>()) {
        let n = 1 << 14;
        let dt = std::f64::consts::TAU / 64.0;
        let mut state = seed as u64 | 1;
        let mut noise = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let v: Vec<f64> = (0..n).map(|k| amp * (freq * k as f64 * dt).sin() + noise()).collect();
        let series = TimeSeries::new(dt, v, 0.0).unwrap();
        let s = welch_psd(&series, 1024, 0.5, WindowKind::Hann).unwrap();
        let rel = (s.total_power() / series.variance() - 1.0).abs();
        prop_assert!(rel < 0.03, "relative power error {}", rel);
    }
}

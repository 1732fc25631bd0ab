use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use uca_mimo::transceiver::{capacity_rate, identity_rate, optimal_precoder_rate, precoded_rate};
use uca_mimo::{
    approx_power_allocation, build_channel, build_codebook, precoder_from_angles,
    select_codebook_index, water_fill, zf_rate, zf_sic_rate, AngleMode, ArrayConfigF64,
    ChannelMatrixF64, ChannelModel, MisalignmentF64, Quantization,
};

const PHI: (f64, f64) = (-0.175, 0.175);

fn link(n: usize, d: f64, mis: MisalignmentF64) -> ChannelMatrixF64 {
    let cfg = ArrayConfigF64::new(n, 0.004, 0.44, 0.44, d).unwrap();
    build_channel(&cfg, &mis, ChannelModel::Approximate).unwrap()
}

fn random_link() -> impl Strategy<Value = ChannelMatrixF64> {
    (
        prop::sample::select(vec![4usize, 8, 12, 16]),
        100.0f64..400.0,
    )
        .prop_flat_map(|(n, d)| {
            let edge = PI / n as f64;
            (
                -edge..=edge,
                -PI..=PI,
                0.0f64..0.17,
                -0.17f64..0.17,
                -0.17f64..0.17,
            )
                .prop_map(move |(o, cs, pcs, px, py)| {
                    link(
                        n,
                        d,
                        MisalignmentF64::new(n, o, cs, pcs, px, py, AngleMode::Strict).unwrap(),
                    )
                })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn precoders_are_unitary(n in prop::sample::select(vec![2usize, 4, 8, 16]), cs in -PI..PI, pcs in -1.0f64..1.0) {
        let cfg = ArrayConfigF64::new(n, 0.004, 0.44, 0.44, 100.0).unwrap();
        prop_assert!(precoder_from_angles(&cfg, cs, pcs).matrix.unitarity_error() <= 1e-10);
    }

    #[test]
    fn rates_are_ordered(h in random_link(), snr_db in 0.0f64..25.0) {
        let p = 10f64.powf(snr_db / 10.0);
        let m = h.entries();
        let cap = capacity_rate(m, p, 1.0).unwrap();
        let opt = optimal_precoder_rate(&h, p, 1.0).unwrap();
        let id = identity_rate(m, p, 1.0).unwrap();
        prop_assert!((opt.rate - cap.rate).abs() <= 1e-9, "optimal {} capacity {}", opt.rate, cap.rate);
        prop_assert!(id.rate <= cap.rate + 1e-9);
        for r in [&cap, &opt, &id] {
            prop_assert!((r.rate - r.per_stream.iter().sum::<f64>()).abs() <= 1e-9);
        }
        if let (Ok(zf), Ok(sic)) = (zf_rate(m, p, 1.0), zf_sic_rate(m, p, 1.0)) {
            prop_assert!(zf.rate <= sic.rate + 1e-9);
            prop_assert!(sic.rate <= cap.rate + 1e-9);
        }
    }

    #[test]
    fn selection_does_not_depend_on_codebook_order(h in random_link(), seed in any::<u64>()) {
        let cb = build_codebook(3, 2, PHI, Quantization::SineUniform).unwrap();
        let p = approx_power_allocation(h.config(), 15.0).unwrap();
        let (index, rate) = select_codebook_index(&h, &cb, &p).unwrap();
        prop_assert!(index >= 1 && index <= cb.len());

        let loading = p.normalized();
        let mut entries = cb.entries();
        entries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let best = entries
            .iter()
            .map(|&(t, ph)| precoded_rate(h.entries(), &precoder_from_angles(h.config(), t, ph).matrix, &loading).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((best - rate).abs() <= 1e-9, "shuffled best {best}, selected {rate}");
        let (t, ph) = cb.entry(index).unwrap();
        let again = precoded_rate(h.entries(), &precoder_from_angles(h.config(), t, ph).matrix, &loading).unwrap();
        prop_assert!((again - rate).abs() <= 1e-9);
    }
}

#[test]
fn on_grid_angles_recover_the_optimal_precoder() {
    let cb = build_codebook(5, 3, PHI, Quantization::SineUniform).unwrap();
    let (t, ph) = cb.entry(77).unwrap();
    let h = link(
        8,
        200.0,
        MisalignmentF64::new(8, 0.0, t, ph.abs(), 0.0, 0.0, AngleMode::Permissive).unwrap(),
    );
    let cfg = h.config();
    let p = approx_power_allocation(cfg, 15.0).unwrap();
    let (_, rate) = select_codebook_index(&h, &cb, &p).unwrap();
    let sigma = uca_mimo::closed_form_svd(cfg, h.misalignment())
        .unwrap()
        .sigma;
    let exact = water_fill(&sigma, 10f64.powf(1.5), 1.0).unwrap();
    assert!((rate - exact.rate(&sigma)).abs() <= 1e-9);
}

#[test]
fn zero_entry_codebook_matches_identity_without_center_shift() {
    let cb = build_codebook(0, 0, PHI, Quantization::SineUniform).unwrap();
    for (o, px, py) in [(0.0, 0.0, 0.0), (0.1, 0.05, -0.1), (-0.3, 0.15, 0.02)] {
        let h = link(
            8,
            300.0,
            MisalignmentF64::new(8, o, 0.4, 0.0, px, py, AngleMode::Strict).unwrap(),
        );
        let p = uca_mimo::PowerAllocationF64::equal(8, 10f64.powf(1.5), 1.0).unwrap();
        let (_, rate) = select_codebook_index(&h, &cb, &p).unwrap();
        let id = identity_rate(h.entries(), 10f64.powf(1.5), 1.0)
            .unwrap()
            .rate;
        assert!((rate - id).abs() <= 1e-9, "codebook {rate} identity {id}");
    }
}

#[test]
fn approximate_allocation_is_exact_when_aligned() {
    let cfg = ArrayConfigF64::new(8, 0.004, 0.44, 0.44, 150.0).unwrap();
    let approx = approx_power_allocation(&cfg, 15.0).unwrap();
    let sigma = uca_mimo::spectrum(8, cfg.rpdr(), 0.0).unwrap();
    let exact = water_fill(&sigma, 10f64.powf(1.5), 1.0).unwrap();
    assert_eq!(approx.powers(), exact.powers());
}

#[test]
fn approximate_allocation_costs_little_under_rotation() {
    let n = 8;
    let beta = uca_mimo::search_beta_opt(n, 0.0, 15.0, 14.0, 0.01)
        .unwrap()
        .beta_opt;
    let r = (beta * 0.004 * 100.0 / (2.0 * PI)).sqrt();
    let cfg = ArrayConfigF64::new(n, 0.004, r, r, 100.0).unwrap();
    let sigma = uca_mimo::spectrum(n, beta, PI / (2.0 * n as f64)).unwrap();
    let snr = 10f64.powf(1.5);
    let exact = water_fill(&sigma, snr, 1.0).unwrap().rate(&sigma);
    let approx = approx_power_allocation(&cfg, 15.0).unwrap().rate(&sigma);
    assert!(
        exact - approx <= 0.005 * exact,
        "exact {exact} approx {approx}"
    );
}

#[test]
fn zf_reaches_capacity_on_a_scaled_unitary_channel() {
    let beta = uca_mimo::search_beta_opt(4, 0.0, 15.0, 14.0, 0.01)
        .unwrap()
        .beta_opt;
    let r = (beta * 0.004 * 100.0 / (2.0 * PI)).sqrt();
    let cfg = ArrayConfigF64::new(4, 0.004, r, r, 100.0).unwrap();
    let h = build_channel(&cfg, &MisalignmentF64::aligned(), ChannelModel::Approximate).unwrap();
    let snr = 10f64.powf(1.5);
    let zf = zf_rate(h.entries(), snr, 1.0).unwrap().rate;
    let cap = capacity_rate(h.entries(), snr, 1.0).unwrap().rate;
    assert!((zf - cap).abs() <= 0.01, "zf {zf} capacity {cap}");
}

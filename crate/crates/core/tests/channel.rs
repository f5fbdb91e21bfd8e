use octorecon::channel::{mutual_information, simulate, snr, ChannelParams, PairMoments};

fn reference_point() -> ChannelParams {
    // 5 dB of loss, V_A tuned to SNR 0.5
    ChannelParams::experimental().at_distance(25.0).with_snr(0.5)
}

#[test]
fn empirical_snr_and_information_match_the_model() {
    let p = reference_point();
    assert!((p.transmission - 10f64.powf(-0.5)).abs() < 1e-15);
    let m = PairMoments::of(&simulate(&p, 1_000_000, 2024));
    let expected_snr = snr(&p);
    assert!((m.snr() / expected_snr - 1.0).abs() < 0.01, "{} vs {expected_snr}", m.snr());
    let expected_info = mutual_information(expected_snr);
    assert!((m.mutual_information() / expected_info - 1.0).abs() < 0.02);
}

#[test]
fn output_variance_within_three_sigma() {
    for (km, target) in [(0.0, 0.3), (25.0, 0.5), (60.0, 1.0)] {
        let p = ChannelParams::experimental().at_distance(km).with_snr(target);
        let n = 1_000_000;
        let m = PairMoments::of(&simulate(&p, n, 77));
        let expected = p.transmission * p.eta * p.v_a + 1.0 + p.transmission * p.eta * p.xi + p.v_elec;
        let sd = expected * (2.0 / n as f64).sqrt();
        assert!((m.var_y - expected).abs() < 3.0 * sd, "{km} km: {} vs {expected}", m.var_y);
    }
}

#[test]
fn gain_matches_square_root_of_transmission_and_efficiency() {
    let p = reference_point();
    let m = PairMoments::of(&simulate(&p, 1_000_000, 5));
    let gain = m.cov / m.var_x;
    assert!((gain - (p.transmission * p.eta).sqrt()).abs() < 0.01 * gain);
}

#[test]
fn seeds_reproduce_bit_for_bit() {
    let p = reference_point();
    assert_eq!(simulate(&p, 300_000, 1), simulate(&p, 300_000, 1));
}

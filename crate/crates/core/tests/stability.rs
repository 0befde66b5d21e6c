use admwex::einstein_maxwell::hirzebruch_setup;
use admwex::stability::Mabuchi;
use admwex::*;

#[test]
fn hirzebruch_dual_class_is_analytically_stable() {
    let setup = hirzebruch_setup(q(4, 5)).unwrap();
    let r = stability_verdict(&setup, &WeightParams::int(q(2, 1), 4).unwrap(), 0.0).unwrap();
    assert!(r.futaki_vanishes);
    assert_eq!(r.absolute, StabilityVerdict::AnalyticallyKStable);
    assert_eq!(r.df_product, 0.0);
}

#[test]
fn off_curve_class_has_nonzero_futaki() {
    let setup = hirzebruch_setup(0.5).unwrap();
    let r = stability_verdict(&setup, &WeightParams::int(5.0, 4).unwrap(), 1e-10).unwrap();
    assert!(!r.futaki_vanishes);
    assert_eq!(r.absolute, StabilityVerdict::NotKSemistable);
    assert!(r.relative.rank() >= 1);
    let prof = build_profile(&setup, &WeightParams::int(5.0, 4).unwrap()).unwrap();
    for (zeta, df) in r.df_samples {
        assert_eq!(df > 0.0, prof.value_f64(zeta) > 0.0);
    }
}

#[test]
fn destabilized_class_reports_witness() {
    let setup =
        AdmissibleSetup::new(vec![Block::new(q(1, 2), 1, q(-400, 1)), Block::new(q(1, 3), 1, q(1, 1))], 0, 0).unwrap();
    let r = stability_verdict(&setup, &WeightParams::int(q(5, 1), 6).unwrap(), 0.0).unwrap();
    assert_eq!(r.relative, StabilityVerdict::NotKSemistable);
    assert!(r.df_samples.iter().any(|&(_, df)| df < 0.0));
}

#[test]
fn mabuchi_energy_increases_away_from_the_extremal_profile() {
    let setup = hirzebruch_setup(0.6).unwrap();
    let mab = Mabuchi::new(&setup, &WeightParams::int(3.0, 4).unwrap()).unwrap();
    let ext = mab.extremal().clone();
    let theta = |z: f64| ext.theta(&z).unwrap();
    let e0 = mab.energy(&theta).unwrap();
    let bump = |z: f64| theta(z) * (1.0 + 0.05 * (1.0 - z * z));
    assert!(mab.energy(&bump).unwrap() > e0 - 1e-12);
}

use deltashell::approx::*;
use deltashell::eigenfun::*;
use deltashell::shell::*;
use deltashell::Error;
use proptest::prelude::*;

fn unit() -> PhysParams {
    PhysParams::new(1.0).unwrap()
}

fn plus_half() -> AngularMode {
    AngularMode::new(1, Sign::Plus).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_equals_determinant(
        half in 0u32..4,
        plus in any::<bool>(),
        a in -0.95f64..0.95,
        mu in 0.1f64..3.0,
        k in 3i32..=14,
    ) {
        let phys = unit();
        let mode = AngularMode::new(2 * half + 1, if plus { Sign::Plus } else { Sign::Minus }).unwrap();
        let gap = GapEnergy::new(a, &phys).unwrap();
        let squeeze = SqueezeParams::new(2f64.powi(-k), mu).unwrap();
        match dispersion_squeezed(mode, gap, squeeze, &phys) {
            Err(Error::ComplexRegime { .. }) => prop_assume!(false),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(closed) => {
                let det = dispersion_squeezed_det(mode, gap, squeeze, &phys).unwrap();
                let scale = closed.value.abs().max(det.abs());
                prop_assert!((closed.value - det).abs() / scale < 1e-8, "{} vs {}", closed.value, det);
            }
        }
    }
}

#[test]
fn squeezed_relation_changes_sign_in_gap() {
    let phys = unit();
    let squeeze = SqueezeParams::new(2f64.powi(-10), 1.0).unwrap();
    let values: Vec<f64> = deltashell::roots::uniform_grid(-0.99, 0.99, 199)
        .into_iter()
        .map(|a| dispersion_squeezed(plus_half(), GapEnergy::new(a, &phys).unwrap(), squeeze, &phys).unwrap().value)
        .collect();
    assert!(values.windows(2).any(|w| w[0] * w[1] < 0.0));
}

#[test]
fn literal_limit_sign_does_not_hold() {
    // D_eps tends to -C D, not +C D: the residual against +C D stays of order |C D|
    let phys = unit();
    let gap = GapEnergy::new(0.3, &phys).unwrap();
    let squeeze = SqueezeParams::new(2f64.powi(-14), 1.0).unwrap();
    let d_eps = dispersion_squeezed(plus_half(), gap, squeeze, &phys).unwrap().value;
    let cd = limit_constant(gap, 1.0, &phys)
        * dispersion_shell(plus_half(), gap, renormalized_coupling(1.0).unwrap(), &phys).unwrap().value;
    assert!((d_eps - cd).abs() > cd.abs());
    assert!((d_eps + cd).abs() < 1e-3 * cd.abs());
}

#[test]
fn small_strength_limit() {
    // as mu -> 0 the shell strength vanishes, D -> -1 and the limit tends to C
    let phys = unit();
    let gap = GapEnergy::new(0.0, &phys).unwrap();
    let mu = 1e-3;
    let limit = squeezed_limit(plus_half(), gap, mu, &phys).unwrap();
    let c = limit_constant(gap, mu, &phys);
    assert!((limit / c - 1.0).abs() < 2e-3);
    // the approach is O(eps / mu), so the annulus has to be much thinner than mu
    let squeeze = SqueezeParams::new(2f64.powi(-30), mu).unwrap();
    let d_eps = dispersion_squeezed(plus_half(), gap, squeeze, &phys).unwrap().value;
    assert!((d_eps / limit - 1.0).abs() < 1e-5);
}

#[test]
fn naive_coupling_does_not_converge() {
    let phys = unit();
    let mu = 2.0;
    let eps: Vec<f64> = (6..=12).map(|k| 2f64.powi(-k)).collect();
    let cfg = TrackConfig::default();
    let renormalized = &root_track(plus_half(), mu, &phys, &eps, &cfg).unwrap()[0];
    let naive = &root_track_with(plus_half(), mu, ShellCoupling::new(mu).unwrap(), &phys, &eps, &cfg).unwrap()[0];
    let last = |t: &RootTrack| t.errors().last().copied().flatten().unwrap();
    assert!(last(renormalized) < 1e-3);
    assert!(last(naive) > 0.05);
    let naive_errors: Vec<f64> = naive.errors().into_iter().flatten().collect();
    // the naive error settles to a positive constant instead of halving
    let tail = &naive_errors[naive_errors.len() - 3..];
    assert!((tail[2] / tail[0] - 1.0).abs() < 0.1);
}

#[test]
fn trajectories_stay_in_gap() {
    let phys = unit();
    let eps: Vec<f64> = (4..=12).map(|k| 2f64.powi(-k)).collect();
    for mode in AngularMode::all_up_to(3) {
        for track in root_track(mode, 1.5, &phys, &eps, &TrackConfig::default()).unwrap() {
            for p in &track.points {
                if let Some(a) = p.a_eps {
                    assert!(a > -1.0 && a < 1.0);
                }
            }
        }
    }
}

#[test]
fn windowed_tracking_reports_missing_roots() {
    let phys = unit();
    let cfg = TrackConfig { window: Some(1e-6), ..TrackConfig::default() };
    let track = &root_track(plus_half(), 1.0, &phys, &[2f64.powi(-6)], &cfg).unwrap()[0];
    assert!(track.points[0].a_eps.is_none());
    assert!(track.points[0].failure.as_deref().unwrap().contains("no sign change"));
    assert!(track.extrapolated.is_none());
}

#[test]
fn eigenfunctions_along_trajectory() {
    let phys = unit();
    let eps: Vec<f64> = (6..=14).map(|k| 2f64.powi(-k)).collect();
    let track = &root_track(plus_half(), 1.0, &phys, &eps, &TrackConfig::default()).unwrap()[0];
    for p in &track.points {
        let gap = GapEnergy::new(p.a_eps.unwrap(), &phys).unwrap();
        let squeeze = SqueezeParams::new(p.eps, 1.0).unwrap();
        let s = squeezed_eigenfunction(plus_half(), gap, squeeze, &phys).unwrap();
        assert!(continuity_residual(&s) < 1e-9);
        let ode = fd_order(&s, default_step(&s));
        assert!(ode.order >= 1.9, "eps = {}: {ode:?}", p.eps);
    }
}

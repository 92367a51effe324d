use deltashell::inequality::*;
use deltashell::roots::log_grid;
use deltashell::shell::*;
use deltashell::approx::renormalized_coupling;

#[test]
fn chains_hold_on_wide_grid() {
    let grid = log_grid(0.05, 20.0, 100);
    let conjecture = conjecture_scan(50, &grid, None).unwrap();
    let turan = turan_scan(50, &grid, None).unwrap();
    assert!(conjecture.violations.is_empty(), "{:?}", conjecture.violations);
    assert!(turan.violations.is_empty(), "{:?}", turan.violations);
    assert!(turan.max_induction_term <= 0.0);
}

#[test]
fn displayed_difference_formula() {
    for m in [0.5, 1.0, 2.0] {
        let d = d_ladder(2, m).unwrap();
        let closed = d2_minus_d0_closed(m);
        assert!(((d[2] - d[0]) / closed - 1.0).abs() < 1e-10);
        assert!(closed < 0.0);
    }
}

#[test]
fn per_mode_inequality() {
    let phys = PhysParams::new(1.0).unwrap();
    let couplings = [0.5, renormalized_coupling(1.0).unwrap().value(), 5.0];
    for mode in AngularMode::all_up_to(21) {
        let equality_mode = mode.twice_j() == 1 && mode.sign() == Sign::Plus;
        for a in [-0.5, 0.0, 0.5] {
            let gap = GapEnergy::new(a, &phys).unwrap();
            for &lambda in &couplings {
                let g = per_mode_gap(mode, gap, ShellCoupling::new(lambda).unwrap(), &phys).unwrap();
                assert!(g >= -1e-10);
                if equality_mode {
                    assert!(g.abs() < 1e-8, "{mode} a={a} lambda={lambda}: {g}");
                } else {
                    assert!(g > 1e-4, "{mode} a={a} lambda={lambda}: {g}");
                }
            }
        }
    }
}

#[test]
fn d0_exceeds_d1() {
    for m in log_grid(0.01, 50.0, 60) {
        let c = closed_coeffs(m).unwrap();
        assert!(c.d0 > c.d1);
    }
}

#[test]
fn minimizer_strengths_solve_j_half_modes() {
    let phys = PhysParams::new(1.0).unwrap();
    for a in [-0.9, -0.3, 0.0, 0.4, 0.9] {
        let gap = GapEnergy::new(a, &phys).unwrap();
        for exchanged in [false, true] {
            let link = minimizer_link(gap, &phys, exchanged).unwrap();
            assert!(link.check && link.lambda > 0.0);
            assert_eq!(link.mode.twice_j(), 1);
        }
    }
}

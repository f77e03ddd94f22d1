use super::*;
use crate::interaction::GateGeometry;

fn pair(separation: f64) -> PulsePair {
    PulsePair::new(GateGeometry::reference(separation).unwrap())
}

fn dipole() -> InteractionSpec {
    InteractionSpec::dipole(0.0)
}

#[test]
fn wrap_maps_into_principal_interval() {
    for (d, w) in [(0.0, 0.0), (PI, PI), (-PI, PI), (3.0 * PI, PI), (2.0 * PI + 0.1, 0.1), (-0.5, -0.5)] {
        assert!((wrap(d) - w).abs() < 1e-12, "{d}");
    }
}

#[test]
fn geometric_grid_starts_at_zero() {
    let g = geometric_grid(0.01, 10.0, 4).unwrap();
    assert_eq!(g.len(), 5);
    assert_eq!(g[0], 0.0);
    assert_eq!(g[1], 0.01);
    assert_eq!(g[4], 10.0);
    assert!((g[2] - 0.1).abs() < 1e-15 && (g[3] - 1.0).abs() < 1e-14);
    assert!(geometric_grid(0.0, 1.0, 4).is_err());
    assert!(geometric_grid(1.0, 1.0, 4).is_err());
}

#[test]
fn single_zero_row() {
    let rows = sweep_strength(&pair(0.0), &dipole(), &[0.0], &SweepOptions::default()).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.index, r.g), (0, 0.0));
    assert!((r.fidelity - 1.0).abs() < 1e-10 && r.phase_unwrapped.abs() < 1e-10);
}

#[test]
fn grid_preconditions() {
    let o = SweepOptions::default();
    assert!(matches!(sweep_strength(&pair(0.0), &dipole(), &[], &o), Err(SweepError::EmptyGrid)));
    assert!(matches!(sweep_strength(&pair(0.0), &dipole(), &[0.1, 0.2], &o), Err(SweepError::InvalidGrid(_))));
    assert!(matches!(sweep_strength(&pair(0.0), &dipole(), &[0.0, 0.2, 0.2], &o), Err(SweepError::InvalidGrid(_))));
    assert!(matches!(
        tradeoff_curve(&pair(0.0), &dipole(), &[], PI, &o),
        Err(SweepError::EmptyGrid)
    ));
}

#[test]
fn head_on_tradeoff_is_monotone_on_the_grid() {
    let grid = geometric_grid(1e-3, 8.0, 14).unwrap();
    let rows = sweep_strength(&pair(0.0), &dipole(), &grid, &SweepOptions::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].fidelity <= w[0].fidelity, "{:?}", w);
        assert!(w[1].phase_unwrapped.abs() >= w[0].phase_unwrapped.abs(), "{:?}", w);
        assert!((w[1].phase_unwrapped - w[0].phase_unwrapped).abs() < PI);
    }
    // the last rows pass through the branch cut; the continued phase does not
    assert!(rows.last().unwrap().phase_unwrapped < -PI);
}

#[test]
fn separated_grid_brackets_pi() {
    let grid = [0.0, 400.0, 800.0, 1200.0, 1600.0, 2000.0];
    let rows = sweep_strength(&pair(26.0), &dipole(), &grid, &SweepOptions::default()).unwrap();
    let signs: Vec<bool> = rows.iter().map(|r| r.phase_unwrapped.abs() > PI).collect();
    assert!(signs.windows(2).any(|w| w[0] != w[1]), "{rows:?}");
}

#[test]
fn refining_the_grid_keeps_the_continued_phase() {
    let coarse = geometric_grid(0.05, 12.0, 7).unwrap();
    let mut fine = vec![0.0];
    for w in coarse[1..].windows(2) {
        fine.push(w[0]);
        fine.push((w[0] * w[1]).sqrt());
    }
    fine.push(*coarse.last().unwrap());
    let o = SweepOptions::default();
    let a = sweep_strength(&pair(0.0), &dipole(), &coarse, &o).unwrap();
    let b = sweep_strength(&pair(0.0), &dipole(), &fine, &o).unwrap();
    for row in &a {
        let twin = b.iter().find(|r| r.g == row.g).unwrap();
        assert!((twin.phase_unwrapped - row.phase_unwrapped).abs() < o.tol, "g = {}", row.g);
    }
}

#[test]
fn failed_rows_stay_in_place() {
    let aniso = InteractionSpec::dipole_anisotropic(0.0, [0.0, 0.0, 1.0]).unwrap();
    let rows = sweep_strength(&pair(0.0), &aniso, &[0.0, 0.5], &SweepOptions::default()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.error.is_some() && r.fidelity.is_nan()));
}

#[test]
fn output_is_bit_identical_across_thread_counts() {
    let grid = geometric_grid(0.01, 5.0, 9).unwrap();
    let run = |threads: usize| {
        let rows = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep_strength(&pair(1.5), &dipole(), &grid, &SweepOptions::default()).unwrap());
        let mut out = Vec::new();
        write_rows(&mut out, &[], &rows).unwrap();
        out
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn csv_round_trips_exactly() {
    let rows = vec![
        SweepRow {
            index: 0,
            g: 0.0,
            separation: 26.0,
            fidelity: 1.0,
            phase_wrapped: 0.0,
            phase_unwrapped: -0.0,
            err_estimate: 1e-12,
            error: None,
        },
        SweepRow {
            index: 1,
            g: 1345.522_453_799_231_5,
            separation: 26.0,
            fidelity: 0.901_959_8 + 1e-17,
            phase_wrapped: PI,
            phase_unwrapped: -PI - 1e-15,
            err_estimate: 3.0e-11,
            error: None,
        },
        SweepRow::failed(2, 0.1 + 0.2, 26.0, "quadrature failed".into()),
    ];
    let mut out = Vec::new();
    write_rows(&mut out, &["config line".into(), "second\nthird".into()], &rows).unwrap();
    let text = String::from_utf8(out.clone()).unwrap();
    assert!(text.starts_with("# config line\n# second\n# third\nindex,g,R,F,phi_wrapped,phi_unwrapped,err\n"));
    let back = read_rows(&out[..]).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.index, b.index);
        for (x, y) in [
            (a.g, b.g),
            (a.separation, b.separation),
            (a.fidelity, b.fidelity),
            (a.phase_wrapped, b.phase_wrapped),
            (a.phase_unwrapped, b.phase_unwrapped),
            (a.err_estimate, b.err_estimate),
        ] {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
        assert_eq!(a.error, b.error);
    }
    assert!(read_rows(&b"index,g\n1,2\n"[..]).is_err());
    assert!(read_rows(&b"index,g,R,F,phi_wrapped,phi_unwrapped,err\n1,2,3\n"[..]).is_err());
}

#[test]
fn zero_target_gives_zero_strength() {
    let (g, r) = find_strength_for_phase(&pair(0.0), &dipole(), 0.0, (0.0, 1.0), &SweepOptions::default()).unwrap();
    assert_eq!(g, 0.0);
    assert!((r.fidelity - 1.0).abs() < 1e-10);
    assert_eq!(r.phase_unwrapped, Some(r.phase));
}

#[test]
fn bracket_must_straddle_target() {
    let err = find_strength_for_phase(&pair(0.0), &dipole(), PI, (0.0, 1.0), &SweepOptions::default()).unwrap_err();
    assert!(matches!(err, SweepError::NoBracket { .. }));
}

#[test]
fn root_at_pi_beyond_the_branch_cut() {
    let o = SweepOptions {
        tol: 1e-8,
        phase_tol: 1e-6,
        ..Default::default()
    };
    let (g, r) = find_strength_for_phase(&pair(0.0), &dipole(), PI, (1.0, 20.0), &o).unwrap();
    assert!((r.phase_unwrapped.unwrap().abs() - PI).abs() <= o.phase_tol);
    assert!(g > 5.0 && g < 7.0, "{g}");
    // a bracket wider than one turn of the wrapped phase still works
    let (g2, _) = find_strength_for_phase(&pair(0.0), &dipole(), 2.0 * PI, (1.0, 25.0), &o).unwrap();
    assert!(g2 > g);
}

#[test]
fn tradeoff_relaxes_with_separation() {
    let o = SweepOptions {
        phase_tol: 1e-6,
        ..Default::default()
    };
    let rows = tradeoff_curve(&pair(0.0), &dipole(), &[2.0, 6.0, 12.0], PI, &o).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].g > w[0].g && w[1].fidelity >= w[0].fidelity, "{rows:?}");
    }
    let capped = SweepOptions {
        initial_guess: 1e-6,
        max_expansions: 3,
        ..o
    };
    let err = tradeoff_curve(&pair(0.0), &dipole(), &[2.0], PI, &capped).unwrap_err();
    assert!(matches!(err, SweepError::BracketCap { .. }) && err.is_numerical());
}

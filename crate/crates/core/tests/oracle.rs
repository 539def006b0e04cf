use insarfopt_core::comms::{check_power_constraints, PowerSchedule};
use insarfopt_core::geometry::Formation;
use insarfopt_core::metrics::evaluate_constraints;
use insarfopt_core::oracle::{dump_feasible_csv, grid_search, grid_search_mode, refine, Axis};
use insarfopt_core::sca::schedule_for;
use insarfopt_core::{GridSpec, Mode, ScenarioConfig};

fn reference() -> ScenarioConfig {
    ScenarioConfig::reference()
}

fn best_coverage(s: &ScenarioConfig, g: &GridSpec) -> f64 {
    grid_search(s, g)
        .unwrap()
        .best
        .map(|b| b.coverage_m2)
        .unwrap_or(f64::NEG_INFINITY)
}

#[test]
fn finer_grids_never_lose() {
    let s = reference();
    // 4 m points are a subset of the 2 m points, and those of the 1 m points
    let coarse = best_coverage(&s, &GridSpec::uniform(&s, 4.0));
    let mid = best_coverage(&s, &GridSpec::uniform(&s, 2.0));
    let fine = best_coverage(&s, &GridSpec::uniform(&s, 1.0));
    assert!(coarse <= mid && mid <= fine, "{coarse} {mid} {fine}");
}

#[test]
fn reported_points_pass_the_exact_checks() {
    let s = reference();
    let g = GridSpec::uniform(&s, 3.0);
    let mut buf = Vec::new();
    let rows = dump_feasible_csv(&s, &g, Mode::Proposed, &mut buf).unwrap();
    let res = grid_search(&s, &g).unwrap();
    assert_eq!(rows, res.feasible);
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v = |i: usize| rec[i].parse::<f64>().unwrap();
        let f = Formation::new(
            insarfopt_core::Position::new(v(1), v(0)),
            insarfopt_core::Position::new(v(2), v(3)),
        );
        let p1 = schedule_for(f.q1, &s, 0, Mode::Proposed);
        let p2 = schedule_for(f.q2, &s, 1, Mode::Proposed);
        assert!(evaluate_constraints(&f, (&p1, &p2), &s).is_feasible());
        assert!(check_power_constraints(&p1, &s).c9 && check_power_constraints(&p2, &s).c11);
    }
    let best = res.best.unwrap();
    assert!(best.constraints.is_feasible());
}

#[test]
fn minimal_power_is_as_good_as_any() {
    // any feasible schedule dominates the minimal one pointwise, so a point is
    // feasible with some schedule exactly when it is with the minimal one
    let s = reference();
    let res = grid_search(&s, &GridSpec::uniform(&s, 5.0)).unwrap();
    let f = res.best.unwrap().formation;
    let p1 = schedule_for(f.q1, &s, 0, Mode::Proposed);
    let p2 = schedule_for(f.q2, &s, 1, Mode::Proposed);
    for scale in [1.0, 1.5, 3.0] {
        let up = |p: &PowerSchedule| PowerSchedule::new(p.p.iter().map(|v| v * scale).collect());
        let rep = evaluate_constraints(&f, (&up(&p1), &up(&p2)), &s);
        assert!(rep.is_feasible());
    }
    let down = PowerSchedule::new(p2.p.iter().map(|v| v * 0.99).collect());
    assert!(!evaluate_constraints(&f, (&p1, &down), &s).is_feasible());
}

#[test]
fn ties_break_deterministically() {
    let s = reference();
    let g = GridSpec::uniform(&s, 4.0);
    let a = grid_search(&s, &g).unwrap();
    let b = grid_search(&s, &g).unwrap();
    assert_eq!(a, b);
}

#[test]
fn vertical_mode_ignores_the_slave_range() {
    let s = reference();
    let mut g = GridSpec::uniform(&s, 2.0);
    let a = grid_search_mode(&s, &g, Mode::Benchmark1).unwrap();
    g.x2 = Axis::single(0.0);
    let b = grid_search_mode(&s, &g, Mode::Benchmark1).unwrap();
    assert_eq!(a.best, b.best);
    let f = a.best.unwrap().formation;
    assert_eq!(f.q1.x, f.q2.x);
}

#[test]
fn refine_searches_around_a_point() {
    let s = reference();
    let best = grid_search(&s, &GridSpec::uniform(&s, 5.0)).unwrap().best.unwrap();
    let r = refine(&s, &best.formation, 3.0, 0.5).unwrap();
    assert!(r.best.unwrap().coverage_m2 >= best.coverage_m2);
    assert!(refine(&s, &best.formation, 1.0, 1.0).is_err());
}

#[test]
fn empty_feasible_set_reports_none() {
    let mut s = reference();
    s.comm.p_com_max = 0.01;
    let res = grid_search(&s, &GridSpec::uniform(&s, 10.0)).unwrap();
    assert!(res.best.is_none());
    assert_eq!(res.feasible, 0);
    assert!(res.evaluated > 0);
}

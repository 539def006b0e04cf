use insarfopt_core::convex::{solve, ConstraintKind, Row};
use insarfopt_core::geometry::{Formation, Position};
use insarfopt_core::sca::{build_slave_subproblem, initial_state, objective_tilde};
use insarfopt_core::{ConvexProgram, Mode, ScenarioConfig, SolveStatus};

fn slave_program(mode: Mode) -> (ScenarioConfig, insarfopt_core::sca::Subproblem) {
    let s = ScenarioConfig::reference();
    let (st, _) = initial_state(&s, None, mode).unwrap();
    let sub = build_slave_subproblem(&st, &s, mode).unwrap();
    (s, sub)
}

#[test]
fn identical_programs_give_identical_reports() {
    let (_, sub) = slave_program(Mode::Proposed);
    let a = solve(&sub.program, 1e-8).unwrap();
    let b = solve(&sub.program.clone(), 1e-8).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn optimal_reports_survive_independent_rechecks() {
    for mode in Mode::ALL {
        let (_, sub) = slave_program(mode);
        let r = solve(&sub.program, 1e-8).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let p = &sub.program;
        for c in &p.constraints {
            assert!(c.value(&r.x) <= 1e-7, "{} = {}", c.label, c.value(&r.x));
        }
        for (i, v) in r.x.iter().enumerate() {
            assert!(*v >= p.lower[i] && *v <= p.upper[i], "{} out of its box", p.names[i]);
        }
    }
}

#[test]
fn slave_program_matches_a_grid_search() {
    // one power variable per UAV: the geometry is all that is left to search
    let (s, sub) = slave_program(Mode::Benchmark2);
    let p = &sub.program;
    let r = solve(p, 1e-10).unwrap();
    let t = sub.epigraph_var();
    let (ix, iz) = (0, 1);
    assert_eq!((p.names[ix].as_str(), p.names[iz].as_str()), ("x2", "z2"));
    let ip = p.names.iter().position(|n| n == "p2[1]").unwrap();
    let q1 = Position::new(-80.0, 100.0);

    let value_at = |x2: f64, z2: f64| -> Option<f64> {
        if z2 < p.lower[iz] || z2 > p.upper[iz] || x2 > p.upper[ix] {
            return None;
        }
        let mut x = r.x.clone();
        x[ix] = x2;
        x[iz] = z2;
        // smallest power meeting every rate constraint at this position
        x[ip] = 0.0;
        let need = p
            .constraints
            .iter()
            .filter(|c| c.label.starts_with("C10"))
            .map(|c| c.value(&x))
            .fold(0.0, f64::max);
        x[ip] = need;
        x[t] = objective_tilde(&Formation::new(q1, Position::new(x2, z2)), &s.radar);
        p.constraints.iter().all(|c| c.value(&x) <= 1e-12).then_some(x[t])
    };

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut x2 = -90.0;
    while x2 <= -50.0 {
        let mut z2 = 80.0;
        while z2 <= 100.0 {
            if let Some(v) = value_at(x2, z2) {
                if v > best.0 {
                    best = (v, x2, z2);
                }
            }
            z2 += 0.05;
        }
        x2 += 0.05;
    }
    // local refinement around the grid optimum
    let (mut v0, mut bx, mut bz) = best;
    let mut h = 0.025;
    while h > 1e-6 {
        let mut moved = false;
        for (dx, dz) in [
            (h, 0.0),
            (-h, 0.0),
            (0.0, h),
            (0.0, -h),
            (h, h),
            (-h, -h),
            (h, -h),
            (-h, h),
        ] {
            if let Some(v) = value_at(bx + dx, bz + dz) {
                if v > v0 {
                    (v0, bx, bz) = (v, bx + dx, bz + dz);
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    assert!(v0.is_finite());
    assert!(
        (r.objective - v0).abs() <= 1e-3 * v0.abs(),
        "solver {} vs search {v0}",
        r.objective
    );
}

#[test]
fn dump_is_one_line_per_item() {
    let (_, sub) = slave_program(Mode::Proposed);
    let text = sub.program.dump();
    let p = &sub.program;
    assert_eq!(text.lines().count(), 1 + p.num_vars() + p.constraints.len());
    assert!(text.lines().any(|l| l.starts_with("C7: soc")));
}

#[test]
fn unbounded_direction_is_capped_by_constraints() {
    // maximize x + z over the disk of radius 2 around (1, 1)
    let mut p = ConvexProgram::new();
    let x = p.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
    let z = p.add_var("z", f64::NEG_INFINITY, f64::INFINITY);
    p.set_objective(x, 1.0);
    p.set_objective(z, 1.0);
    p.push(
        "disk",
        ConstraintKind::Soc {
            rows: vec![Row::new(vec![(x, 1.0)], -1.0), Row::new(vec![(z, 1.0)], -1.0)],
            g: vec![],
            h: 2.0,
        },
    );
    let r = solve(&p, 1e-10).unwrap();
    let expect = 2.0 + 2.0 * 2f64.sqrt();
    assert!((r.objective - expect).abs() < 1e-7, "{}", r.objective);
}

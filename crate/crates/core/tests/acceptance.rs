//! Acceptance criteria, one line per criterion.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{config, regression_pairs, regression_set, square, v};
use lpbm::experiment::{self, Overrides, RunOutcome};
use lpbm::functionals::{
    generalized_wills, generalized_wills_exact, quermassintegrals_fit, wills_hadwiger, wills_steiner, EvalContext,
    FunctionalSpec, UFamily, VolumeEngine,
};
use lpbm::geometry::{
    convex_hull_points, is_weakly_unconditional, minkowski_sum, polar, reflect_invariant, Body, DirectionGrid, Polytope,
    Vector, INTERIOR_DELTA,
};
use lpbm::measures::{density_measure, gaussian_measure_mc, volume_exact, volume_mc, McBudget, MeasureSpec};
use lpbm::psum::{holder_step, inclusion_check, PCombinationSpec};
use lpbm::rng;
use lpbm::solver::{euclidean_distance, gauge_distance, membership, solve_lp, LpProblem, LpStatus, Relation};
use lpbm::verify::{PairRelation, VerificationRecord};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn ok<T>(r: lpbm::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn within_sigma(value: f64, se: f64, target: f64, k: f64) -> bool {
    (value - target).abs() <= k * se
}

fn random_polytope(seed: u64, n: usize, points: usize) -> Body {
    let mut r = rng::stream(seed, &[n as u64, points as u64]);
    let pts: Vec<Vector> = (0..points).map(|_| rng::normal_vector(&mut r, n)).collect();
    Body::polytope(&pts).unwrap()
}

fn geometry_oracles() -> Outcome {
    let sq = square(1.0);
    let b2 = Body::unit_ball(2);
    let tol = 1e-9;
    let mut checks = 0;
    let mut check = |cond: bool, what: &str| -> Result<(), String> {
        checks += 1;
        if cond {
            Ok(())
        } else {
            Err(what.to_string())
        }
    };

    check(close(ok(sq.support(&v(&[1.0, 0.0])))?, 1.0, tol), "support of the square")?;
    let mut r = rng::stream(1, &[]);
    for _ in 0..16 {
        let u = rng::unit_vector(&mut r, 2);
        check(close(ok(b2.support(&u))?, 1.0, tol), "support of the disc")?;
    }
    let diamond_v = [v(&[2.0, 0.0]), v(&[-2.0, 0.0]), v(&[0.0, 2.0]), v(&[0.0, -2.0])];
    let diamond = ok(Body::polytope(&diamond_v))?;
    let u = v(&[1.0, 1.0]);
    let brute = diamond_v.iter().map(|x| x.dot(&u)).fold(f64::MIN, f64::max);
    check(close(ok(diamond.support(&u))?, brute, tol) && close(brute, 2.0, tol), "support of the diamond")?;

    let big = ok(sq.scale(2.0))?;
    check(big.as_polytope().unwrap().same_vertices(square(2.0).as_polytope().unwrap(), tol), "scaled square")?;
    let half = ok(b2.scale(0.5))?;
    check(matches!(half, Body::Ball { radius, .. } if close(radius, 0.5, tol)), "scaled disc")?;
    for seed in 0..8 {
        let k = random_polytope(seed, 3, 12);
        let rk = ok(k.scale(1.7))?;
        let direct = Body::polytope(&k.as_polytope().unwrap().vertices().iter().map(|x| *x * 1.7).collect::<Vec<_>>()).unwrap();
        for _ in 0..8 {
            let u = rng::unit_vector(&mut r, 3);
            let a = ok(rk.support(&u))?;
            check(close(a, ok(direct.support(&u))?, tol) && close(a, 1.7 * ok(k.support(&u))?, 1e-9), "support scaling")?;
        }
    }

    let unit = ok(Body::polytope(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 1.0]), v(&[0.0, 1.0])]))?;
    let s = ok(minkowski_sum(&unit, &unit, None))?;
    let two = ok(Body::polytope(&[v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[2.0, 2.0]), v(&[0.0, 2.0])]))?;
    check(s.as_polytope().unwrap().same_vertices(two.as_polytope().unwrap(), tol), "[0,1]^2 + [0,1]^2")?;
    let seg_x = ok(Body::polytope(&[v(&[-1.0, 0.0]), v(&[1.0, 0.0])]))?;
    let seg_y = ok(Body::polytope(&[v(&[0.0, -1.0]), v(&[0.0, 1.0])]))?;
    let cross = ok(minkowski_sum(&seg_x, &seg_y, None))?;
    check(cross.as_polytope().unwrap().same_vertices(sq.as_polytope().unwrap(), tol), "segment sum")?;
    let balls = ok(minkowski_sum(&b2, &ok(Body::ball(v(&[0.0, 0.0]), 2.0))?, None))?;
    check(matches!(balls, Body::Ball { radius, .. } if close(radius, 3.0, tol)), "ball sum")?;

    let h = ok(convex_hull_points(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, 0.25]), v(&[0.0, 1.0]), v(&[1.0, 1.0])]))?;
    check(h.vertices.len() == 4 && !h.vertices.iter().any(|x| x.approx_eq(&v(&[0.5, 0.25]), tol)), "interior point dropped")?;
    let h = ok(convex_hull_points(&[v(&[0.3, 0.7])]))?;
    check(h.vertices.len() == 1 && h.vertices[0].approx_eq(&v(&[0.3, 0.7]), 0.0), "single point hull")?;
    let h = ok(convex_hull_points(&[v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])]))?;
    check(h.vertices.len() == 2 && h.affine_dim == 1, "collinear hull")?;

    let g2 = Arc::new(ok(DirectionGrid::default_for(2))?);
    let g3 = Arc::new(ok(DirectionGrid::default_for(3))?);
    let sq_polar = ok(polar(&sq, &g2, INTERIOR_DELTA))?;
    let diamond1 = Polytope::cross_polytope(2, 1.0).unwrap();
    check(sq_polar.as_polytope().is_some_and(|p| p.same_vertices(&diamond1, 1e-9)), "polar of the square")?;
    let bp = ok(polar(&b2, &g2, INTERIOR_DELTA))?;
    check(matches!(bp, Body::Ball { radius, .. } if close(radius, 1.0, tol)), "polar of the disc")?;
    for (seed, n) in [(1, 2), (2, 2), (3, 3), (4, 3)] {
        let k = {
            let mut pts = random_polytope(seed, n, 10).as_polytope().unwrap().vertices().to_vec();
            for a in 0..n {
                pts.push(Vector::unit(n, a) * 0.3);
                pts.push(Vector::unit(n, a) * -0.3);
            }
            ok(Body::polytope(&pts))?
        };
        let g = if n == 2 { &g2 } else { &g3 };
        let lhs = ok(polar(&ok(k.scale(2.5))?, g, INTERIOR_DELTA))?;
        let rhs = ok(ok(polar(&k, g, INTERIOR_DELTA))?.scale(0.4))?;
        for _ in 0..8 {
            let u = rng::unit_vector(&mut r, n);
            check(close(ok(lhs.support(&u))?, ok(rhs.support(&u))?, 1e-9), "polar homogeneity")?;
        }
    }

    let e = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
    check(ok(reflect_invariant(&sq, &e))?, "square reflection invariant")?;
    check(!ok(reflect_invariant(&ok(sq.translate(&v(&[1.0, 0.0])))?, &e))?, "shifted square")?;
    check(reflect_invariant(&sq, &e[..1]).is_err(), "too few normals rejected")?;
    for _ in 0..4 {
        let mut pts = Vec::new();
        for _ in 0..3 {
            let x = rng::normal_vector(&mut r, 3).map(f64::abs);
            for mask in 0..8u32 {
                pts.push(Vector::new(&[
                    if mask & 1 == 0 { x[0] } else { -x[0] },
                    if mask & 2 == 0 { x[1] } else { -x[1] },
                    if mask & 4 == 0 { x[2] } else { -x[2] },
                ]));
            }
        }
        let k = ok(Body::polytope(&pts))?;
        let axes: Vec<Vector> = (0..3).map(|a| Vector::unit(3, a)).collect();
        check(ok(reflect_invariant(&k, &axes))?, "unconditional orbit")?;
    }
    check(ok(is_weakly_unconditional(&unit, 1e-9))?, "[0,1]^2 weakly unconditional")?;
    let tri = ok(Body::polytope(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])]))?;
    check(!ok(is_weakly_unconditional(&tri, 1e-9))?, "triangle not weakly unconditional")?;
    check(!ok(membership(&v(&[0.0, 0.0]), &tri, 1e-9))?, "masked corner outside the triangle")?;
    for seed in 10..14 {
        let k = random_polytope(seed, 2, 8);
        let orbit: Vec<Vector> = k
            .as_polytope()
            .unwrap()
            .vertices()
            .iter()
            .flat_map(|x| [*x, v(&[-x[0], x[1]]), v(&[x[0], -x[1]]), *x * -1.0])
            .collect();
        check(ok(is_weakly_unconditional(&ok(Body::polytope(&orbit))?, 1e-9))?, "sign-flip orbit weakly unconditional")?;
    }
    let rhombus = ok(Body::polytope(&[v(&[1.0, 1.0]), v(&[-1.0, -1.0]), v(&[0.1, -0.1]), v(&[-0.1, 0.1])]))?;
    check(!ok(membership(&v(&[1.0, 0.0]), &rhombus, 1e-9))?, "masked rhombus vertex outside")?;
    check(!ok(is_weakly_unconditional(&rhombus, 1e-9))?, "symmetric rhombus not weakly unconditional")?;

    let mut lp = LpProblem::maximize(vec![1.0, 1.0]);
    lp.add(vec![1.0, 0.0], Relation::Le, 1.0).add(vec![0.0, 1.0], Relation::Le, 1.0);
    let sol = ok(solve_lp(&lp))?;
    check(sol.status == LpStatus::Optimal && close(sol.value, 2.0, tol), "simple LP value")?;
    check(close(sol.point[0], 1.0, tol) && close(sol.point[1], 1.0, tol), "simple LP point")?;
    let mut lp = LpProblem::maximize(vec![1.0]);
    lp.add(vec![1.0], Relation::Le, -1.0).add(vec![1.0], Relation::Ge, 0.0);
    check(ok(solve_lp(&lp))?.status == LpStatus::Infeasible, "infeasible LP")?;
    for seed in 0..10 {
        let (lp, rows, rhs) = random_lp(seed);
        let sol = ok(solve_lp(&lp))?;
        let brute = brute_force_lp(&lp.objective, &rows, &rhs);
        check(sol.status == LpStatus::Optimal && close(sol.value, brute, 1e-7 * brute.abs().max(1.0)), "random LP vs enumeration")?;
    }

    check(ok(membership(&v(&[0.0, 0.0]), &sq, 1e-8))?, "origin in the square")?;
    check(!ok(membership(&v(&[1.000001, 0.0]), &sq, 1e-8))?, "point just outside")?;
    let hexagon = random_polytope(99, 2, 9);
    let verts = hexagon.as_polytope().unwrap().vertices().to_vec();
    for _ in 0..500 {
        let x = rng::normal_vector(&mut r, 2) * 1.2;
        let inside = (0..verts.len()).all(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % verts.len()]);
            (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
        });
        check(ok(membership(&x, &hexagon, 0.0))? == inside, "membership vs edge normals")?;
    }

    check(close(ok(gauge_distance(&v(&[2.0, 0.0]), &sq, &b2))?, 1.0, tol), "gauge distance to the square")?;
    check(close(ok(gauge_distance(&v(&[0.3, -0.2]), &sq, &b2))?, 0.0, tol), "gauge distance inside")?;
    let origin = ok(Body::polytope(&[v(&[0.0, 0.0])]))?;
    check(close(ok(gauge_distance(&v(&[3.0, 0.0]), &origin, &sq))?, 3.0, tol), "square gauge of a point")?;
    check(close(ok(euclidean_distance(&v(&[2.0, 0.0]), &sq))?, 1.0, tol), "edge projection")?;
    check(close(ok(euclidean_distance(&v(&[2.0, 2.0]), &sq))?, SQRT_2, tol), "corner projection")?;
    check(close(ok(euclidean_distance(&v(&[0.5, 0.5]), &sq))?, 0.0, tol), "distance inside")?;
    Ok(format!("{checks} oracle checks"))
}

/// Five variables in `[0, 1]` with three random `<=` rows.
fn random_lp(seed: u64) -> (LpProblem, Vec<Vec<f64>>, Vec<f64>) {
    let mut r = rng::stream(seed, &[rng::tag("lp")]);
    let n = 5;
    let obj: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut lp = LpProblem::maximize(obj);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for _ in 0..3 {
        let row: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let b = r.random_range(0.2..1.5);
        lp.add(row.clone(), Relation::Le, b);
        rows.push(row);
        rhs.push(b);
    }
    for j in 0..n {
        lp.bounds(j, 0.0, 1.0);
        let mut lo = vec![0.0; n];
        lo[j] = -1.0;
        rows.push(lo);
        rhs.push(0.0);
        let mut hi = vec![0.0; n];
        hi[j] = 1.0;
        rows.push(hi);
        rhs.push(1.0);
    }
    (lp, rows, rhs)
}

/// Best objective over every basic feasible solution of `rows x <= rhs`.
fn brute_force_lp(obj: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> f64 {
    let n = obj.len();
    let m = rows.len();
    let mut best = f64::NEG_INFINITY;
    let mut pick = vec![0usize; n];
    fn next(pick: &mut [usize], m: usize) -> bool {
        let n = pick.len();
        for i in (0..n).rev() {
            if pick[i] < m - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let a = DMatrix::from_fn(n, n, |i, j| rows[pick[i]][j]);
        let b = DVector::from_fn(n, |i, _| rhs[pick[i]]);
        if let Some(x) = a.lu().solve(&b) {
            let feasible = rows
                .iter()
                .zip(rhs)
                .all(|(row, b)| row.iter().zip(x.iter()).map(|(a, x)| a * x).sum::<f64>() <= b + 1e-9);
            if feasible && x.iter().all(|v| v.is_finite()) {
                best = best.max(obj.iter().zip(x.iter()).map(|(c, x)| c * x).sum());
            }
        }
        if !next(&mut pick, m) {
            return best;
        }
    }
}

fn measure_oracles() -> Outcome {
    let budget = McBudget::new(11, 1_000_000).with_shards(4);
    let phi1 = 0.841_344_746_068_542_9;
    let target = (2.0 * phi1 - 1.0_f64).powi(2);
    let g = ok(gaussian_measure_mc(&square(1.0), &budget))?;
    ensure!(close(target, 0.46607, 1e-5), "closed form {target}");
    ensure!(g.std_error <= 0.002, "square: sigma {}", g.std_error);
    ensure!(within_sigma(g.value, g.std_error, target, 3.0), "square: {} vs {target}", g.value);
    let disc_target = 1.0 - (-0.5_f64).exp();
    let d = ok(gaussian_measure_mc(&Body::unit_ball(2), &budget.clone().with_key(&[1])))?;
    ensure!(d.std_error <= 0.002, "disc: sigma {}", d.std_error);
    ensure!(within_sigma(d.value, d.std_error, disc_target, 3.0), "disc: {} vs {disc_target}", d.value);
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let k = random_polytope(1000 + seed, 3, 10);
        let exact = ok(volume_exact(&k))?.value;
        let mc = ok(volume_mc(&k, &McBudget::new(seed, 200_000)))?;
        let z = (mc.value - exact).abs() / mc.std_error;
        worst = worst.max(z);
        ensure!(z <= 3.0, "polytope {seed}: mc {} vs exact {exact} ({z:.2} sigma)", mc.value);
    }
    Ok(format!(
        "square {:.5}±{:.5}, disc {:.5}±{:.5}, worst volume deviation {worst:.2} sigma",
        g.value, g.std_error, d.value, d.std_error
    ))
}

fn wills_oracles() -> Outcome {
    let budget = McBudget::new(5, 400_000).with_shards(4);
    let cases = [
        ("point", ok(Body::polytope(&[v(&[0.0, 0.0])]))?, 1.0),
        ("[0,2]", ok(Body::polytope(&[v(&[0.0]), v(&[2.0])]))?, 3.0),
        (
            "[0,1]^2",
            ok(Body::polytope(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 1.0]), v(&[0.0, 1.0])]))?,
            4.0,
        ),
    ];
    let mut parts = Vec::new();
    for (i, (name, k, target)) in cases.iter().enumerate() {
        let w = ok(wills_hadwiger(k, &budget.clone().with_key(&[i as u64])))?;
        ensure!(w.std_error <= 0.01 * target, "{name}: sigma {} above 1%", w.std_error);
        ensure!(within_sigma(w.value, w.std_error, *target, 3.0), "{name}: {} vs {target}", w.value);
        parts.push(format!("{name} {:.4}", w.value));
    }
    let mut worst = 0.0_f64;
    for (i, k) in regression_set().iter().enumerate() {
        let h = ok(wills_hadwiger(k, &McBudget::new(77, 100_000).with_key(&[i as u64])))?;
        let s = ok(wills_steiner(k, &VolumeEngine::Exact))?;
        let z = (h.value - s.value).abs() / h.combined_error(&s);
        worst = worst.max(z);
        ensure!(z <= 3.0, "regression body {i}: hadwiger {} vs steiner {} ({z:.2} sigma)", h.value, s.value);
    }
    Ok(format!("{}; Hadwiger vs Steiner worst {worst:.2} sigma over 20 bodies", parts.join(", ")))
}

fn steiner_fit() -> Outcome {
    let target = [4.0, 4.0, PI];
    let exact = ok(quermassintegrals_fit(&square(1.0), &Body::unit_ball(2), None, &VolumeEngine::Exact))?;
    for (i, t) in target.iter().enumerate() {
        ensure!(close(exact.w[i], *t, 1e-6), "exact W_{i} = {} vs {t}", exact.w[i]);
    }
    let mc = ok(quermassintegrals_fit(
        &square(1.0),
        &Body::unit_ball(2),
        None,
        &VolumeEngine::Mc(McBudget::new(3, 400_000).with_shards(4)),
    ))?;
    for (i, t) in target.iter().enumerate() {
        ensure!(
            within_sigma(mc.w[i], mc.w_err[i], *t, 3.0),
            "Monte Carlo W_{i} = {} ± {} vs {t}",
            mc.w[i],
            mc.w_err[i]
        );
    }
    Ok(format!(
        "exact ({:.8}, {:.8}, {:.8}); Monte Carlo ({:.3}±{:.3}, {:.3}±{:.3}, {:.3}±{:.3})",
        exact.w[0], exact.w[1], exact.w[2], mc.w[0], mc.w_err[0], mc.w[1], mc.w_err[1], mc.w[2], mc.w_err[2]
    ))
}

const REQUIRED_SUITES: [&str; 10] = [
    "volume_n",
    "gaussian_symmetric_n",
    "gaussian_weakly_unconditional_n",
    "gaussian_reflection_n",
    "product_measure_n",
    "beta_concave_n",
    "even_log_concave_n",
    "polar_w",
    "wills_n",
    "generalized_wills_n",
];

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m] } else { 0.5 * (xs[m - 1] + xs[m]) })
}

fn inequality_suites(out: &RunOutcome, elapsed: Duration) -> Outcome {
    ensure!(elapsed < Duration::from_secs(30 * 60), "master took {:.0}s", elapsed.as_secs_f64());
    for prefix in REQUIRED_SUITES {
        ensure!(out.suites.iter().any(|s| s.name.starts_with(prefix)), "no suite `{prefix}*`");
    }
    let polar: Vec<&str> = out.suites.iter().filter(|s| s.name.starts_with("polar_w")).map(|s| s.name.as_str()).collect();
    for n in 2..=3 {
        for i in 0..n {
            let name = format!("polar_w{i}_n{n}");
            ensure!(polar.contains(&name.as_str()), "missing {name}");
        }
    }
    for s in &out.suites {
        let sum = s.summary();
        ensure!(sum.fail == 0 && sum.error == 0, "{}: {} fail, {} error", s.name, sum.fail, sum.error);
        let mut grid = std::collections::BTreeMap::<&str, (std::collections::BTreeSet<usize>, std::collections::BTreeSet<u64>, std::collections::BTreeSet<u64>)>::new();
        for r in &s.records {
            let e = grid.entry(r.family.as_str()).or_default();
            e.0.insert(r.pair_id);
            e.1.insert(r.lambda.to_bits());
            e.2.insert(r.p.to_bits());
        }
        let covered = grid.values().any(|(pairs, l, p)| pairs.len() >= 20 && l.len() >= 3 && p.len() >= 4);
        ensure!(covered, "{}: no family with 20 pairs x 3 lambda x 4 p", s.name);
        let slacks: Vec<f64> = s
            .records
            .iter()
            .filter(|r| !matches!(r.relation, PairRelation::Identical))
            .filter_map(VerificationRecord::slack)
            .collect();
        let med = median(slacks).ok_or(format!("{}: no non-identical records", s.name))?;
        ensure!(med > 0.0, "{}: median slack {med}", s.name);
    }
    Ok(format!(
        "{} suites, {} records, 0 fail, median slack > 0 everywhere, {:.0}s",
        out.suites.len(),
        out.records(),
        elapsed.as_secs_f64()
    ))
}

fn equality_probes(out: &RunOutcome) -> Outcome {
    let records: Vec<&VerificationRecord> = out.suites.iter().flat_map(|s| &s.records).collect();
    let identical: Vec<_> = records
        .iter()
        .filter(|r| matches!(r.relation, PairRelation::Identical) && r.equality_expected)
        .collect();
    ensure!(!identical.is_empty(), "no identical pairs");
    for r in &identical {
        let c = r.comparison.as_ref().ok_or(format!("{} pair {}: no comparison", r.suite, r.pair_id))?;
        ensure!(c.slack.abs() <= 3.0 * c.sigma, "{} pair {}: slack {} sigma {}", r.suite, r.pair_id, c.slack, c.sigma);
    }
    let dilatate: Vec<_> = records
        .iter()
        .filter(|r| {
            matches!(r.relation, PairRelation::Dilatate { .. })
                && r.functional == "gaussian"
                && [1.5, 2.0, 4.0].contains(&r.p)
        })
        .collect();
    ensure!(!dilatate.is_empty(), "no Gaussian dilatate records");
    let strict = dilatate
        .iter()
        .filter(|r| r.comparison.as_ref().is_some_and(|c| c.slack > 3.0 * c.sigma))
        .count();
    let frac = strict as f64 / dilatate.len() as f64;
    ensure!(frac >= 0.95, "only {strict}/{} dilatate records beyond 3 sigma", dilatate.len());
    Ok(format!(
        "{} identical records within 3 sigma; {strict}/{} Gaussian dilatate records strictly positive",
        identical.len(),
        dilatate.len()
    ))
}

fn structural_lemmas() -> Outcome {
    let mut pairs = 0;
    for (i, (k, l)) in regression_pairs().iter().enumerate() {
        let grid = ok(DirectionGrid::default_for(k.dim()))?;
        for (p, lambda) in [(2.0, 0.5), (1.5, 0.25), (4.0, 0.75)] {
            let spec = ok(PCombinationSpec::new(p, lambda))?;
            let rep = ok(inclusion_check(k, l, &spec, &grid, 10_000, i as u64))?;
            ensure!(rep.violations == 0, "pair {i} p={p}: {} violations", rep.violations);
            ensure!(rep.min_support_slack >= -1e-12, "pair {i} p={p}: support slack {}", rep.min_support_slack);
            pairs += 1;
        }
    }
    let axis: Vec<f64> = (1..=10).map(|j| j as f64 / 11.0).collect();
    let ps: Vec<f64> = (0..10).map(|j| 1.1 + 0.7 * j as f64).collect();
    let mut equalities = 0;
    for &mu in &axis {
        for &lambda in &axis {
            for &p in &ps {
                let (t, s) = holder_step(p, lambda, mu);
                ensure!(t + s <= 1.0 + 1e-12, "t+s = {} at mu={mu} lambda={lambda} p={p}", t + s);
                let equal = (t + s - 1.0).abs() <= 1e-12;
                ensure!(equal == (mu == lambda), "equality {equal} at mu={mu} lambda={lambda} p={p}");
                equalities += usize::from(equal);
            }
        }
    }
    Ok(format!(
        "{pairs} inclusion checks with 0 violations; Hölder step on 1000 points, {equalities} equalities, all at mu = lambda"
    ))
}

fn homogeneity() -> Outcome {
    let set = regression_set();
    let mut strict_nu = 0;
    let mut strict_w = 0;
    let radial = MeasureSpec::Radial {
        density: lpbm::measures::RadialDensity::ExpNorm { scale: 1.0 },
    };
    let profiles = [UFamily::CLASSICAL, UFamily::Affine { a: 1.0, b: 1.0 }];
    for (i, k) in set.iter().enumerate() {
        let n = k.dim() as i32;
        let budget = McBudget::new(31, 100_000).with_key(&[i as u64]);
        for measure in [MeasureSpec::Gaussian, radial.clone()] {
            let base = ok(density_measure(k, &measure, &budget))?;
            for r in [1.5, 2.0] {
                let scaled = ok(density_measure(&ok(k.scale(r))?, &measure, &budget))?;
                let bound = r.powi(n) * base.value;
                let sigma = scaled.std_error.hypot(r.powi(n) * base.std_error);
                ensure!(scaled.value <= bound + 3.0 * sigma, "body {i}: measure of {r}K above r^n bound");
                if r == 2.0 {
                    ensure!(bound - scaled.value > 3.0 * sigma, "body {i}: measure not strictly sub-homogeneous");
                    strict_nu += 1;
                }
            }
        }
        let e = Body::unit_ball(k.dim());
        for u in &profiles {
            let base = ok(generalized_wills_exact(k, &e, u))?;
            for r in [1.5, 2.0] {
                let scaled = ok(generalized_wills_exact(&ok(k.scale(r))?, &e, u))?;
                let bound = r.powi(n) * base.value;
                let tol = 1e-9 * bound;
                ensure!(scaled.value <= bound + tol, "body {i}: W_u({r}K) above r^n bound");
                if r == 2.0 {
                    ensure!(bound - scaled.value > tol, "body {i}: W_u not strictly sub-homogeneous");
                    strict_w += 1;
                }
            }
        }
    }
    let k = &set[4];
    let mc = ok(generalized_wills(k, &Body::unit_ball(2), &UFamily::CLASSICAL, &McBudget::new(8, 200_000)))?;
    let mc2 = ok(generalized_wills(&ok(k.scale(2.0))?, &Body::unit_ball(2), &UFamily::CLASSICAL, &McBudget::new(9, 200_000)))?;
    let sigma = mc2.std_error.hypot(4.0 * mc.std_error);
    ensure!(4.0 * mc.value - mc2.value > 3.0 * sigma, "Monte Carlo W(2K) not strictly below 4 W(K)");

    let mut polar_checks = 0;
    let mut worst = 0.0_f64;
    for (j, k) in set.iter().enumerate().filter(|(_, k)| k.dim() >= 2) {
        let n = k.dim();
        let ctx = EvalContext {
            budget: McBudget::new(41, 100_000).with_key(&[j as u64]),
            grid: Arc::new(ok(DirectionGrid::default_for(n))?),
        };
        for i in 0..n {
            let f = FunctionalSpec::PolarQuermassintegral { i };
            let a = ok(f.evaluate(k, &ctx))?;
            for r in [0.5, 2.0] {
                let b = ok(f.evaluate(&ok(k.scale(r))?, &ctx))?;
                let expect = r.powi(-((n - i) as i32)) * a.value;
                let tol = (3.0 * b.std_error.hypot(r.powi(-((n - i) as i32)) * a.std_error)).max(1e-6 * expect);
                let dev = (b.value - expect).abs() / expect;
                worst = worst.max(dev);
                ensure!((b.value - expect).abs() <= tol, "body {j} i={i} r={r}: {} vs {expect}", b.value);
                polar_checks += 1;
            }
        }
    }
    Ok(format!(
        "{strict_nu} strict measure and {strict_w} strict W_u sub-homogeneity checks; {polar_checks} polar homogeneity checks (worst relative deviation {worst:.1e})"
    ))
}

fn run_master(dir: &std::path::Path) -> Result<(RunOutcome, Duration), String> {
    let overrides = Overrides {
        out_dir: Some(dir.to_path_buf()),
        ..Default::default()
    };
    let cfg = ok(experiment::load(&config("master.json"), &overrides))?;
    let started = Instant::now();
    let out = ok(experiment::run(&cfg))?;
    Ok((out, started.elapsed()))
}

fn determinism(first: &RunOutcome, second: &RunOutcome) -> Outcome {
    let a = fs::read(&first.report_path).map_err(|e| e.to_string())?;
    let b = fs::read(&second.report_path).map_err(|e| e.to_string())?;
    ensure!(a == b, "reports differ");
    let sa = fs::read(&first.summary_path).map_err(|e| e.to_string())?;
    let sb = fs::read(&second.summary_path).map_err(|e| e.to_string())?;
    ensure!(sa == sb, "summaries differ");
    Ok(format!("{} report bytes identical across two runs", a.len()))
}

struct Runner {
    failures: usize,
}

impl Runner {
    fn run(&mut self, id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let mut result = f();
        let t = started.elapsed();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if t > limit {
                result = Err(format!("took {:.1}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()));
            }
        }
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => {
                self.failures += 1;
                ("FAIL", d.clone())
            }
        };
        println!("[{tag}] criterion {id}: {title} ({:.1}s): {detail}", t.as_secs_f64());
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut runner = Runner { failures: 0 };
    runner.run(1, "geometry and solver oracles", Some(Duration::from_secs(10)), geometry_oracles);
    runner.run(2, "measure oracles", Some(Duration::from_secs(60)), measure_oracles);
    runner.run(3, "Wills oracles", Some(Duration::from_secs(300)), wills_oracles);
    runner.run(4, "Steiner fit", None, steiner_fit);

    let tmp = tempfile::tempdir().expect("temporary directory");
    let first = run_master(&tmp.path().join("first"));
    let second = run_master(&tmp.path().join("second"));
    let outcomes = first.as_ref().ok().map(|(o, _)| o);
    runner.run(5, "inequality suites", None, || {
        let (out, t) = first.as_ref().map_err(Clone::clone)?;
        inequality_suites(out, *t)
    });
    runner.run(6, "equality probes", None, || equality_probes(outcomes.ok_or("master run failed")?));
    runner.run(7, "structural lemmas", None, structural_lemmas);
    runner.run(8, "sub- and super-homogeneity", None, homogeneity);
    runner.run(9, "determinism", None, || {
        let (a, _) = first.as_ref().map_err(Clone::clone)?;
        let (b, _) = second.as_ref().map_err(Clone::clone)?;
        determinism(a, b)
    });
    if runner.failures == 0 {
        println!("acceptance: 9 of 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 9 criteria fail", runner.failures);
        ExitCode::FAILURE
    }
}

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria on `BLOCKED` are expected to fail for the stated reason. They
//! still run in full and print FAIL; the target exits non-zero when any
//! other criterion fails or when a blocked one starts passing.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use linkvol::dilog::{bloch_wigner, li2, log_p, ZETA2};
use linkvol::potential::{complex_dist_mod, dist_mod, PotentialFunction, Tolerances};
use linkvol::solver::{search, SearchConfig};
use linkvol::{
    parse_pd, twist_defining_polynomial, twist_knot_diagram, twist_solutions, IntPoly, LinkDiagram, Triangulation,
};
use linkvol_cli::reference::{COMPLEX_VOLUMES, DEFINING_POLYNOMIALS, FIGURE_EIGHT_VOLUME};
use linkvol_cli::{cmd_solve, Command, RunConfig, EXIT_OK};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

/// `(n, potential, triangulation, t, z)` for one twist-knot row.
type TwistPoint = (i64, PotentialFunction, Triangulation, Complex64, Vec<Complex64>);

type Criterion = (u32, &'static str, fn() -> Verdict);

const FOUR_PI2: f64 = 4.0 * PI * PI;

const BLOCKED: [(u32, &str); 2] = [
    (1, "the published n = 4 row has content 2; the computed polynomial is primitive and equals it divided by 2"),
    (
        2,
        "the published cs of the n = 3 pair t = 2.2664 +- 0.7158i is +0.2110, while the computed value is -0.211005 \
         and an independent 30-digit evaluation agrees with the computed sign",
    ),
];

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> LinkDiagram {
    parse_pd(&std::fs::read_to_string(data(name)).expect("data file")).expect("valid diagram")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn twist_points(range: std::ops::RangeInclusive<i64>) -> Result<Vec<TwistPoint>, String> {
    let tol = Tolerances::default();
    let mut out = Vec::new();
    for n in range {
        let d = twist_knot_diagram(n).map_err(err)?;
        let pf = PotentialFunction::build(&d);
        let tri = Triangulation::build(&d).map_err(err)?;
        for row in twist_solutions(n, &tol).map_err(err)?.rows {
            ensure(row.point.essential, || format!("n = {n}: row t = {} is not essential", row.t))?;
            out.push((n, pf.clone(), tri.clone(), row.t, row.point.z));
        }
    }
    Ok(out)
}

fn searched_points(d: &LinkDiagram) -> Result<(PotentialFunction, Triangulation, Vec<Vec<Complex64>>), String> {
    let pf = PotentialFunction::build(d);
    let tri = Triangulation::build(d).map_err(err)?;
    let (set, _) = search(&pf, &SearchConfig::default());
    Ok((pf, tri, set.points.into_iter().map(|p| p.z).collect()))
}

fn defining_polynomials() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (i, coeffs) in DEFINING_POLYNOMIALS.iter().enumerate() {
        let n = i as i64 + 1;
        let published = IntPoly::from_i64s(coeffs);
        let ours = twist_defining_polynomial(n).map_err(err)?;
        if !ours.eq_up_to_sign(&published) {
            bad.push(format!("n = {n}: computed {ours}, published {published}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 1.0 {
        bad.push(format!("runtime {secs:.2} s"));
    }
    if bad.is_empty() {
        Ok(format!("{} of {} equal up to sign", DEFINING_POLYNOMIALS.len(), DEFINING_POLYNOMIALS.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn complex_volume_rows() -> Verdict {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut bad = Vec::new();
    let mut cells = 0;
    for (i, published) in COMPLEX_VOLUMES.iter().enumerate() {
        let n = i as i64 + 1;
        let rows = twist_solutions(n, &tol).map_err(err)?.rows;
        cells += 1;
        if rows.len() != published.len() {
            bad.push(format!("n = {n}: {} rows, expected {}", rows.len(), published.len()));
        }
        let mut matched = Vec::new();
        for p in published.iter() {
            let t = Complex64::new(p.t_re, p.t_im);
            let (j, c) = rows
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1.t - t).norm().total_cmp(&(b.1.t - t).norm()))
                .ok_or_else(|| format!("n = {n}: no rows"))?;
            matched.push(j);
            let dt = (c.t - t).norm();
            let dvol = (c.report.vol - p.vol).abs();
            let dcs = dist_mod(c.report.cs, p.cs, PI * PI);
            cells += 3;
            for (what, d, got, want) in [
                ("t", dt, c.t.to_string(), t.to_string()),
                ("vol", dvol, c.report.vol.to_string(), p.vol.to_string()),
                ("cs", dcs, c.report.cs.to_string(), p.cs.to_string()),
            ] {
                if d >= 1e-4 {
                    bad.push(format!("n = {n}, t = {t}: {what} {got} vs {want}"));
                }
            }
        }
        let mut distinct = matched.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != matched.len() {
            bad.push(format!("n = {n}: two published rows match the same computed row"));
        }
        cells += 1;
        let max_im = rows.iter().enumerate().max_by(|a, b| a.1.report.vol.total_cmp(&b.1.report.vol)).map(|(j, _)| j);
        let flagged: Vec<usize> = rows.iter().enumerate().filter(|r| r.1.geometric).map(|(j, _)| j).collect();
        if max_im.is_none() || flagged != [max_im.unwrap()] || matched.first() != max_im.as_ref() {
            bad.push(format!("n = {n}: geometric flag not on the max-Im row"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 5.0 {
        bad.push(format!("runtime {secs:.2} s"));
    }
    if bad.is_empty() {
        Ok(format!("{cells} of {cells} cells match"))
    } else {
        Err(format!("{} of {cells} cells fail: {}", bad.len(), bad.join("; ")))
    }
}

fn figure_eight_end_to_end() -> Verdict {
    let start = Instant::now();
    let mut cfg = RunConfig::new(Command::Solve);
    cfg.input_path = Some(data("figure8.pd"));
    cfg.n_starts = 500;
    cfg.timestamp = false;
    let out = cmd_solve(&cfg).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(out.exit_code == EXIT_OK, || format!("exit code {}", out.exit_code))?;
    let sols = out.json["solutions"].as_array().ok_or("no solutions array")?;
    let hit = sols.iter().find(|s| {
        let vol = s["vol"].as_f64().unwrap_or(f64::NAN);
        let cs = s["cs"].as_f64().unwrap_or(f64::NAN);
        (vol - FIGURE_EIGHT_VOLUME).abs() < 1e-4 && cs.abs() < 1e-9
    });
    let hit = hit.ok_or_else(|| format!("no solution with vol {FIGURE_EIGHT_VOLUME} and cs 0 among {}", sols.len()))?;
    ensure(secs < 10.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("vol {}, cs {}, 500 starts in {secs:.2} s", hit["vol"], hit["cs"]))
}

fn gluing_products() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let (_, tri, pts) = searched_points(&load("figure8.pd"))?;
    ensure(!pts.is_empty(), || "no figure-eight solution found".into())?;
    for z in &pts {
        worst = worst.max(tri.max_gluing_residual(z).map_err(err)?);
        count += 1;
    }
    for (_, _, tri, _, z) in twist_points(2..=5)? {
        worst = worst.max(tri.max_gluing_residual(&z).map_err(err)?);
        count += 1;
    }
    ensure(worst < 1e-10, || format!("max |prod - 1| = {worst:e}"))?;
    Ok(format!("{count} solutions, max |prod - 1| = {worst:.1e}"))
}

fn volume_cross_oracle() -> Verdict {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    let (mut count, mut negative, mut zero) = (0, 0, 0);
    let mut check = |pf: &PotentialFunction, tri: &Triangulation, z: &[Complex64]| -> Result<(), String> {
        let vol = pf.eval_v0(z, &tol).map_err(err)?.vol;
        let bw = tri.bw_volume(z).map_err(err)?;
        worst = worst.max((bw - vol).abs());
        count += 1;
        if vol < -1e-3 {
            negative += 1;
        }
        if vol.abs() < 1e-9 {
            zero += 1;
        }
        Ok(())
    };
    let fig8 = load("figure8.pd");
    for d in [fig8.clone(), fig8.mirror(), fig8.with_switched(&[0]), load("five2.pd")] {
        let (pf, tri, pts) = searched_points(&d)?;
        for z in &pts {
            check(&pf, &tri, z)?;
        }
    }
    for (_, pf, tri, _, z) in twist_points(1..=5)? {
        check(&pf, &tri, &z)?;
    }
    ensure(negative > 0 && zero > 0, || format!("{negative} negative-volume and {zero} zero-volume solutions"))?;
    ensure(worst < 1e-9, || format!("max |bw - Im V0| = {worst:e}"))?;
    Ok(format!("{count} solutions ({negative} negative, {zero} zero volume), max |bw - Im V0| = {worst:.1e}"))
}

fn is_integer_multiple(d: Complex64, m: f64, tol: f64) -> bool {
    let q = d / m;
    (q.re - q.re.round()).abs() < tol && q.im.abs() < tol
}

fn property_suites() -> Verdict {
    let tol = Tolerances::default();
    let pts = twist_points(1..=5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for _ in 0..100 {
        let (_, pf, _, _, z) = &pts[rng.random_range(0..pts.len())];
        let lambda = Complex64::from_polar(rng.random_range(-3.0f64..3.0).exp(), rng.random_range(-PI..PI));
        let scaled: Vec<Complex64> = z.iter().map(|w| w * lambda).collect();
        let d = pf.eval_v0(&scaled, &tol).map_err(err)?.v0 - pf.eval_v0(z, &tol).map_err(err)?.v0;
        ensure(is_integer_multiple(d, FOUR_PI2, 1e-9), || format!("scale invariance: lambda {lambda}, delta {d}"))?;
    }

    let mut nontrivial = 0;
    for (_, pf, _, _, z) in &pts {
        let base = pf.eval_v0(z, &tol).map_err(err)?.v0;
        let r = pf.flattening(z, tol.flat).map_err(err)?;
        for k in 0..pf.n() {
            let mut shifts = vec![0; pf.n()];
            shifts[k] = 1;
            let d = pf.eval_v0_shifted(z, &shifts, &tol).map_err(err)?.v0 - base;
            ensure(is_integer_multiple(d, FOUR_PI2, 1e-9), || format!("branch shift: delta {d}"))?;
            if r[k] != 0 && d.norm() > 1.0 {
                nontrivial += 1;
            }
        }
    }
    ensure(nontrivial > 0, || "branch shift never moved V0".into())?;

    let fig8 = load("figure8.pd");
    let (pf8, _, fig8_pts) = searched_points(&fig8)?;
    let flat = pts.iter().map(|p| (&p.1, &p.4)).chain(fig8_pts.iter().map(|z| (&pf8, z)));
    for (pf, z) in flat {
        let r = pf.flattening(z, tol.flat).map_err(err)?;
        ensure(r.iter().sum::<i64>() == 0 && r.iter().all(|k| k % 2 == 0), || format!("flattening {r:?}"))?;
    }

    let potentials = [
        pf8.clone(),
        PotentialFunction::build(&twist_knot_diagram(3).map_err(err)?),
        PotentialFunction::build(&fig8.with_switched(&[0])),
    ];
    let h: f64 = 1e-6;
    let mut worst_grad: f64 = 0.0;
    for i in 0..100 {
        let pf = &potentials[i % potentials.len()];
        let z: Vec<Complex64> = (0..pf.n())
            .map(|_| Complex64::from_polar(rng.random_range(-2.0f64..2.0).exp(), rng.random_range(-PI..PI)))
            .collect();
        let grad = pf.log_derivatives(&z).map_err(err)?;
        let scale = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let mut diff: f64 = 0.0;
        for k in 0..pf.n() {
            let (mut zp, mut zm) = (z.clone(), z.clone());
            zp[k] *= h.exp();
            zm[k] *= (-h).exp();
            let fd = (pf.eval_v(&zp).map_err(err)? - pf.eval_v(&zm).map_err(err)?) / (2.0 * h);
            diff = diff.max((fd - grad[k]).norm());
        }
        worst_grad = worst_grad.max(diff / scale);
    }
    ensure(worst_grad < 1e-5, || format!("gradient relative error {worst_grad:e}"))?;

    for (n, pf, _, t, z) in &pts {
        let zc: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
        let a = pf.eval_v0(z, &tol).map_err(err)?.v0;
        let b = pf.eval_v0(&zc, &tol).map_err(err)?.v0;
        ensure(complex_dist_mod(b, a.conj(), FOUR_PI2) < 1e-9, || format!("conjugation: n = {n}, {a} vs {b}"))?;
        let partner = pts.iter().find(|p| p.0 == *n && (p.3 - t.conj()).norm() < 1e-9);
        let (_, ppf, _, _, pz) = partner.ok_or_else(|| format!("conjugation: n = {n}, no row at conj({t})"))?;
        let c = ppf.eval_v0(pz, &tol).map_err(err)?.v0;
        ensure(complex_dist_mod(c, a.conj(), FOUR_PI2) < 1e-9, || format!("conjugate row: n = {n}, {a} vs {c}"))?;
    }

    Ok(format!(
        "scale 100 pairs, branch and flattening at {} solutions, gradient error {worst_grad:.1e}, conjugation",
        pts.len() + fig8_pts.len()
    ))
}

fn li2_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = z;
    for k in 1..=1_000_000u64 {
        let term = pow / (k * k) as f64;
        sum += term;
        if term.norm() < 1e-20 {
            break;
        }
        pow *= z;
    }
    sum
}

fn dilogarithm_kernel() -> Verdict {
    let one = Complex64::new(1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_series: f64 = 0.0;
    for k in 0..2064 {
        let z = if k < 2000 {
            Complex64::from_polar(0.5 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI))
        } else {
            Complex64::from_polar(0.5, 2.0 * PI * (k - 2000) as f64 / 64.0)
        };
        worst_series = worst_series.max((li2(z).map_err(err)? - li2_series(z)).norm());
    }
    ensure(worst_series < 1e-14, || format!("series oracle error {worst_series:e}"))?;

    let (mut inv, mut refl) = (0usize, 0usize);
    let (mut worst_inv, mut worst_refl): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let z = Complex64::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        if z.norm() < 1e-3 || z.im.abs() < 1e-9 {
            continue;
        }
        let l = log_p(-z).map_err(err)?;
        let e = (li2(z).map_err(err)? + li2(z.inv()).map_err(err)? + ZETA2 + 0.5 * l * l).norm();
        worst_inv = worst_inv.max(e);
        inv += 1;
    }
    for _ in 0..10_000 {
        let z = Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        if z.norm() < 1e-3 || (one - z).norm() < 1e-3 {
            continue;
        }
        let e = (li2(z).map_err(err)? + li2(one - z).map_err(err)? - ZETA2
            + log_p(z).map_err(err)? * log_p(one - z).map_err(err)?)
        .norm();
        worst_refl = worst_refl.max(e);
        refl += 1;
    }
    ensure(worst_inv < 1e-12 && worst_refl < 1e-12, || format!("inversion {worst_inv:e}, reflection {worst_refl:e}"))?;
    ensure(bloch_wigner(Complex64::new(0.5, 0.0)).map_err(err)? == 0.0, || "D on the real axis is not zero".into())?;
    Ok(format!(
        "series {worst_series:.1e} on 2064 points, inversion {worst_inv:.1e} on {inv}, reflection {worst_refl:.1e} on {refl}"
    ))
}

fn negative_controls() -> Verdict {
    let d = load("obstruction.pd");
    let (set, _) = search(&PotentialFunction::build(&d), &SearchConfig::default());
    ensure(set.is_empty(), || format!("obstruction pattern has {} essential solutions", set.len()))?;
    let kink = std::fs::read_to_string(data("kink.pd")).map_err(err)?;
    match parse_pd(&kink) {
        Err(linkvol::DiagramError::Kink { .. }) => Ok("obstruction set empty at 500 starts, kink rejected".into()),
        Err(e) => Err(format!("kink rejected with the wrong error: {e}")),
        Ok(_) => Err("kinked diagram accepted".into()),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "defining polynomials exact", defining_polynomials),
        (2, "complex volume rows", complex_volume_rows),
        (3, "figure-eight end to end", figure_eight_end_to_end),
        (4, "edge gluing products", gluing_products),
        (5, "volume cross-oracle", volume_cross_oracle),
        (6, "property suites", property_suites),
        (7, "dilogarithm kernel", dilogarithm_kernel),
        (8, "negative controls", negative_controls),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let blocked = BLOCKED.iter().find(|b| b.0 == id).map(|b| b.1);
        match (&verdict, blocked) {
            (Ok(detail), None) => println!("PASS  {id}. {name} ({secs:.2} s): {detail}"),
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!("PASS  {id}. {name} ({secs:.2} s): {detail}; listed as blocked, remove it from BLOCKED");
            }
            (Err(detail), Some(reason)) => {
                failed += 1;
                println!("FAIL  {id}. {name} ({secs:.2} s): {detail}; known blocked: {reason}");
            }
            (Err(detail), None) => {
                failed += 1;
                unexpected += 1;
                println!("FAIL  {id}. {name} ({secs:.2} s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, {unexpected} unexpected", criteria.len() - failed);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

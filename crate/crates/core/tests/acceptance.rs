//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kmsdyn::exact::{gq_ratio, ExactPoly};
use kmsdyn::ifs::{classify_ifs, hutchinson, kms_measure_ifs, orbit_condition, HutchinsonMode};
use kmsdyn::kms::{
    check_k1, check_k2, classify, divergence_witness, kms_measure, lyubich, lyubich_invariance_residual, Beta,
    DEFAULT_RHO,
};
use kmsdyn::ratmap::ExceptionalCase;
use kmsdyn::{parse_map, AtomicMeasure, IfsSystem, PlanePoint, RationalMap, SpherePoint, Support, TestFunctionLibrary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let out = f()?;
    let el = t.elapsed();
    if let Some(l) = limit {
        ensure(el < l, format!("took {el:.2?}, limit {l:?}"))?;
    }
    Ok(format!("{out} ({el:.2?})"))
}

fn err(e: kmsdyn::Error) -> String {
    format!("{}: {e}", e.kind())
}

fn c1() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let r = parse_map("1/z^2").map_err(err)?;
        let mut worst: f64 = 0.0;
        for beta in [0.25f64, 0.5, 1.0, 2.0, 4.0] {
            let hi = beta.exp() / (beta.exp() + 1.0);
            let lo = 1.0 / (beta.exp() + 1.0);
            for (w, other) in
                [(SpherePoint::zero(), SpherePoint::infinity()), (SpherePoint::infinity(), SpherePoint::zero())]
            {
                let m = kms_measure(&r, &w, beta, None).map_err(err)?.measure;
                ensure(m.len() == 2, format!("{} atoms at beta {beta}", m.len()))?;
                let d = (m.weight_near(&w, 1e-12) - hi).abs().max((m.weight_near(&other, 1e-12) - lo).abs());
                worst = worst.max(d);
            }
        }
        ensure(worst <= 1e-12, format!("weight error {worst:e}"))?;
        Ok(format!("max weight error {worst:.1e}"))
    })
}

fn c2() -> Outcome {
    for n in [2, 3, 4] {
        let r = RationalMap::power(n).map_err(err)?;
        ensure(
            r.exceptional_points().case == ExceptionalCase::TwoFixed,
            format!("z^{n}: case {}", r.exceptional_points().case),
        )?;
        for beta in [0.1, 1.0, 10.0] {
            for w in [SpherePoint::zero(), SpherePoint::infinity()] {
                let m = kms_measure(&r, &w, beta, None).map_err(err)?.measure;
                ensure(m == AtomicMeasure::dirac(w), format!("z^{n}, beta {beta}, anchor {w}: {:?}", m.atoms()))?;
            }
        }
    }
    Ok("Dirac measures and TwoFixed for N = 2, 3, 4".into())
}

fn c3() -> Outcome {
    timed(Some(Duration::from_secs(5)), || {
        let r = parse_map("z^2+1").map_err(err)?;
        let cases: [(Beta, usize); 5] =
            [(0.3.into(), 1), (0.6.into(), 1), (Beta::Critical, 2), (0.8.into(), 2), (1.5.into(), 2)];
        let mut got = Vec::new();
        for (b, want) in cases {
            let rep = classify(&r, b).map_err(err)?;
            let (f, i) = rep.counts();
            got.push(f + i);
            ensure(f + i == want, format!("beta {}: {} states, expected {want}", rep.beta, f + i))?;
            if b == Beta::Critical {
                ensure(i == 1, "critical report lacks the Lyubich state")?;
            }
        }
        Ok(format!("counts {got:?}"))
    })
}

fn c4() -> Outcome {
    let r = parse_map("z^2+1").map_err(err)?;
    let lib = TestFunctionLibrary::sphere(4);
    let m = kms_measure(&r, &SpherePoint::zero(), 1.0, Some(14)).map_err(err)?;
    let bound = 10.0 * m.tail_bound;
    let k1 = check_k1(&r, &m.measure, 1.0, &lib, DEFAULT_RHO).map_err(err)?;
    let k2 = check_k2(&r, &m.measure, 1.0, &lib).map_err(err)?;
    ensure(k1.max_residual <= bound, format!("K1 {:e} > {bound:e}", k1.max_residual))?;
    ensure(k2.max_residual <= bound, format!("K2 {:e} > {bound:e}", k2.max_residual))?;
    Ok(format!("K1 {:.2e}, K2 {:.2e}, tail bound {:.2e}", k1.max_residual, k2.max_residual, m.tail_bound))
}

fn c5() -> Outcome {
    timed(Some(Duration::from_secs(10)), || {
        let r = RationalMap::power(2).map_err(err)?;
        let mu = lyubich(&r, &SpherePoint::from_real(1.0), 16).map_err(err)?;
        ensure(mu.len() == 65_536, format!("{} atoms", mu.len()))?;
        let lib = TestFunctionLibrary::sphere(4);
        let res = lyubich_invariance_residual(&r, &mu, &lib);
        ensure(res <= 1e-3, format!("invariance residual {res:e}"))?;
        let moment = (0..3).map(|k| mu.integrate(|p| p.embed()[k]).abs()).fold(0.0, f64::max);
        ensure(moment <= 1e-10, format!("first moment {moment:e}"))?;
        Ok(format!("residual {res:.2e}, first moment {moment:.1e}"))
    })
}

fn c6() -> Outcome {
    let r = RationalMap::power(2).map_err(err)?;
    let rep = divergence_witness(&r, &SpherePoint::from_real(1.0), 0.5, 12).map_err(err)?;
    let direct: f64 = (0..=12).map(|n| (2.0 * (-0.5f64).exp()).powi(n)).sum();
    let last = *rep.partial_sums.last().expect("sums");
    ensure(last >= direct * (1.0 - 1e-12), format!("partial sum {last} < {direct}"))?;
    Ok(format!("partial sum {last:.4} >= direct sum {direct:.4}, mass bound {:.3e}", rep.mass_bound))
}

fn random_map(rng: &mut ChaCha8Rng) -> RationalMap {
    loop {
        let n = rng.random_range(2..=5usize);
        let dq = rng.random_range(0..=n);
        let (dp, dq) = if rng.random_bool(0.5) { (n, dq) } else { (dq, n) };
        let mut coeff = |d: usize| {
            let mut c: Vec<_> = (0..=d).map(|_| gq_ratio(rng.random_range(-9..=9), rng.random_range(1..=4))).collect();
            c[d] = gq_ratio(rng.random_range(1..=9), rng.random_range(1..=4));
            ExactPoly::new(c)
        };
        if let Ok(r) = RationalMap::new(coeff(dp), coeff(dq)) {
            return r;
        }
    }
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut failures = Vec::new();
    for k in 0..50 {
        let r = random_map(&mut rng);
        let n = r.degree();
        let total: usize = r.branch_data().branch_points.iter().map(|b| b.index - 1).sum();
        if total != 2 * n - 2 {
            failures.push(format!("map {k}: RH sum {total} != {}", 2 * n - 2));
        }
        for _ in 0..20 {
            let y = SpherePoint::from_affine(num_complex::Complex64::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ));
            match r.preimages(&y, 1e-8) {
                Ok(pre) if pre.iter().map(|p| p.1).sum::<usize>() == n => {}
                Ok(pre) => {
                    failures.push(format!("map {k}: {} preimages counted", pre.iter().map(|p| p.1).sum::<usize>()))
                }
                Err(e) => failures.push(format!("map {k}: {}", err(e))),
            }
        }
    }
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok("50 maps x 20 fibres, zero failures".into())
}

fn c8() -> Outcome {
    let t = IfsSystem::tent();
    let mu = hutchinson(&t, 20, HutchinsonMode::Deterministic { x0: None, prune: false }).map_err(err)?;
    let m1 = mu.integrate(|p| p.x);
    let m2 = mu.integrate(|p| p.x * p.x);
    ensure((m1 - 0.5).abs() <= 1e-6, format!("first moment {m1}"))?;
    ensure((m2 - 1.0 / 3.0).abs() <= 1e-5, format!("second moment {m2}"))?;
    let beta = 4f64.ln();
    let k = kms_measure_ifs(&t, &PlanePoint::new(0.5, 0.0), beta, None).map_err(err)?;
    ensure(k.normalization == 0.5, format!("prefactor {}", k.normalization))?;
    let lib = t.library(4);
    let bound = 10.0 * k.tail_bound;
    let k1 = check_k1(&t, &k.measure, beta, &lib, DEFAULT_RHO).map_err(err)?;
    let k2 = check_k2(&t, &k.measure, beta, &lib).map_err(err)?;
    ensure(k1.max_residual <= bound, format!("K1 {:e} > {bound:e}", k1.max_residual))?;
    ensure(k2.max_residual <= bound, format!("K2 {:e} > {bound:e}", k2.max_residual))?;
    Ok(format!(
        "moments {m1:.9}, {m2:.9}; prefactor 1/2; K1 {:.1e}, K2 {:.1e} at depth {}",
        k1.max_residual, k2.max_residual, k.truncation_depth
    ))
}

fn c9() -> Outcome {
    let s3 = 3f64.sqrt();
    let sys = IfsSystem::sierpinski_twisted();
    let want = [PlanePoint::new(0.25, s3 / 4.0), PlanePoint::new(0.75, s3 / 4.0), PlanePoint::new(0.5, 0.0)];
    let got = &sys.branch_data().branch_points;
    ensure(got.len() == 3, format!("{} branched points", got.len()))?;
    for w in want {
        ensure(got.iter().any(|p| p.distance(&w) <= 1e-9), format!("missing {w}"))?;
    }
    let mut counts = Vec::new();
    for (b, want) in [(Beta::Value(1.0), 0), (Beta::Critical, 1), (Beta::Value(1.5), 3)] {
        let (f, i) = classify_ifs(&sys, b, false).map_err(err)?.counts();
        ensure(f + i == want, format!("{} states, expected {want}", f + i))?;
        counts.push(f + i);
    }
    ensure(orbit_condition(&sys, 10).certified(), "orbit condition not certified at depth 10")?;
    Ok(format!("midpoints found, counts {counts:?}, orbit condition certified"))
}

fn restrictions(src: &str) -> Result<Vec<AtomicMeasure<SpherePoint>>, String> {
    let r = parse_map(src).map_err(err)?;
    let rep = classify(&r, 0.0).map_err(err)?;
    rep.states.into_iter().map(|s| s.restriction.ok_or_else(|| format!("{src}: state without restriction"))).collect()
}

fn c10() -> Outcome {
    let (zero, inf) = (SpherePoint::zero(), SpherePoint::infinity());
    let a = restrictions("1/z^2")?;
    ensure(a == vec![AtomicMeasure::from_atoms(vec![(zero, 0.5), (inf, 0.5)], 0.0)], format!("1/z^2: {a:?}"))?;
    let b = restrictions("z^2")?;
    ensure(
        b.len() == 2 && b.contains(&AtomicMeasure::dirac(zero)) && b.contains(&AtomicMeasure::dirac(inf)),
        format!("z^2: {b:?}"),
    )?;
    let c = restrictions("z^2+1")?;
    ensure(c == vec![AtomicMeasure::dirac(inf)], format!("z^2+1: {c:?}"))?;
    Ok("exact restrictions for 1/z^2, z^2, z^2+1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("inverse square weights", c1),
        ("power map Dirac states", c2),
        ("z^2+1 phase counts", c3),
        ("trace-condition residuals", c4),
        ("Lyubich invariance", c5),
        ("divergence witness", c6),
        ("Riemann-Hurwitz suite", c7),
        ("tent map", c8),
        ("twisted gasket", c9),
        ("states at beta 0", c10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {}: {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

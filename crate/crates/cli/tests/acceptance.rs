//! The eight acceptance criteria, one line of output each.

use std::time::{Duration, Instant};

use cantorspeed::dimension::{
    class_of, ergodic_measures, integral, is_coboundary, is_positive, sign_mod_inf, verify_coboundary_witness,
    CoboundaryVerdict, Mode, ModInfSign, PositivityVerdict,
};
use cantorspeed::speedup::{
    build_speedup, ergodic_profile_compare, infinitesimal_speedup, strong_speedup, verify_build, verify_speedup,
    ConjugacyCell, CylinderEpimorphism,
};
use cantorspeed::towers::min_return_bound;
use cantorspeed::{Atom, ClopenSet, CylinderFunction, Direction, OrderedBratteliDiagram};
use cantorspeed_cli::{run, RunConfig};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

fn m2112() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![2, 1], vec![1, 2]]).unwrap()
}

fn m11() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 1]]).unwrap()
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    if e < limit {
        Ok(())
    } else {
        Err(format!("took {e:?}, limit {limit:?}"))
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_function(d: &OrderedBratteliDiagram, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> CylinderFunction {
    let level = rng.gen_range(1..=3);
    CylinderFunction::from_fn(d, level, |_| rng.gen_range(lo..=hi))
}

/// `g − g∘T` at one level below `g`, where every image lands in one atom of `g`'s level.
fn minus_coboundary(d: &OrderedBratteliDiagram, g: &CylinderFunction) -> Result<CylinderFunction, String> {
    let mut err = None;
    let f = CylinderFunction::from_fn(d, g.level() + 1, |a| {
        let img = d.atom_step(a, Direction::Forward).unwrap();
        let vals: Vec<i64> = img.iter().map(|&b| g.value(d, b)).collect();
        if vals.iter().any(|&v| v != vals[0]) {
            err = Some(format!("g∘T is not constant on {a}"));
        }
        g.value(d, a) - vals[0]
    });
    err.map_or(Ok(f), Err)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let config = RunConfig::try_parse_from(["cantorspeed", "--format", "structured", "group-examples"]).unwrap();
    let out = run(&config);
    within(t, Duration::from_secs(1))?;
    check(out.status == 0, || format!("exit {}", out.status))?;
    let r = &out.report;
    let want = [
        ("ex1.image_proper", "true"),
        ("ex1.witness.boundary_preimage", "(2,-1)"),
        ("ex2.witness.element", "(-1,1)"),
        ("ex2.witness.preimage", "(0,1)"),
        ("ex2.quotient.exhaustive", "yes"),
        ("ex3.exhaustive", "no"),
        ("ex3.refutation", "empty-fiber-interval"),
        ("ex3.verified", "true"),
    ];
    for (k, v) in want {
        check(r.get(k) == Some(v), || format!("{k} = {:?}, expected {v}", r.get(k)))?;
    }
    Ok("three examples reproduced".into())
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut yes = 0;
    let mut no = 0;
    for d in [d2(), m2112()] {
        let mus = ergodic_measures(&d).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let g = random_function(&d, &mut rng, -4, 4);
            let f = minus_coboundary(&d, &g)?;
            match is_coboundary(&d, &f).map_err(|e| e.to_string())? {
                CoboundaryVerdict::Yes { witness, .. } => {
                    let ok = verify_coboundary_witness(&d, &f, &witness, 6).map_err(|e| e.to_string())?;
                    check(ok, || "witness fails on level-6 atoms".into())?;
                    yes += 1;
                }
                other => return Err(format!("coboundary not recognized: {other:?}")),
            }
        }
        let mut drawn = 0;
        while drawn < 200 {
            let f = random_function(&d, &mut rng, -3, 3);
            if mus.iter().all(|mu| integral(&d, &f, mu).is_zero()) {
                continue;
            }
            drawn += 1;
            match is_coboundary(&d, &f).map_err(|e| e.to_string())? {
                CoboundaryVerdict::No(_) => no += 1,
                other => return Err(format!("nonzero integral not refuted: {other:?}")),
            }
        }
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!("{yes} coboundaries verified on level 6, {no} refuted"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tally = [0usize; 3];
    for d in [d2(), m2112()] {
        let mus = ergodic_measures(&d).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let f = random_function(&d, &mut rng, -2, 4);
            let p = is_positive(&d, &f).map_err(|e| e.to_string())?;
            let s = sign_mod_inf(&d, &f).map_err(|e| e.to_string())?;
            match (&p, &s) {
                (PositivityVerdict::Positive { .. }, ModInfSign::Positive { c }) => {
                    check(c.signum() > 0, || "reported c is not positive".into())?;
                    for mu in &mus {
                        let i = integral(&d, &f, mu);
                        check((&i - c).signum() >= 0, || format!("integral {i} below c = {c}"))?;
                    }
                    tally[0] += 1;
                }
                (PositivityVerdict::Zero, ModInfSign::Zero) => {
                    let cob = is_coboundary(&d, &f).map_err(|e| e.to_string())?;
                    check(matches!(cob, CoboundaryVerdict::Yes { .. }), || "zero class is not a coboundary".into())?;
                    tally[1] += 1;
                }
                (PositivityVerdict::NotPositive(_), ModInfSign::Negative | ModInfSign::Mixed | ModInfSign::Infinitesimal) => {
                    tally[2] += 1
                }
                _ => return Err(format!("inconsistent: {p:?} against {s:?} for {:?}", f.values())),
            }
        }
    }
    let d = m2112();
    let w = CylinderFunction::new(&d, 1, vec![vec![1], vec![-1]]).map_err(|e| e.to_string())?;
    let s = sign_mod_inf(&d, &w).map_err(|e| e.to_string())?;
    check(s == ModInfSign::Infinitesimal, || format!("(1,-1) classified {s:?}"))?;
    check(matches!(is_positive(&d, &w), Ok(PositivityVerdict::NotPositive(_))), || "(1,-1) reported positive".into())?;
    Ok(format!("positive {}, zero {}, not positive {}; (1,-1) infinitesimal", tally[0], tally[1], tally[2]))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let d = d2();
    let mus = ergodic_measures(&d).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    let mut level3 = 0;
    for n in 1..=3 {
        let atoms: Vec<Atom> = d.atoms(n).collect();
        for &a in &atoms {
            for &c in atoms.iter().filter(|&&c| c != a) {
                let (sa, sc) = (ClopenSet::from_atom(a), ClopenSet::from_atom(c));
                let map = strong_speedup(&d, &sa, &sc).map_err(|e| format!("{a} -> {c}: {e}"))?;
                let r = verify_speedup(&d, &map, &mus, Some(&sc), &[]);
                check(r.bijection_ok() && r.measure_ok() && r.jumps_ok() && r.bounded() && r.passed(), || {
                    format!("{a} -> {c}:\n{r}")
                })?;
                check(d.set_eq(&map.domain_cover, &sa), || format!("{a} -> {c}: domain is not A"))?;
                pairs += 1;
                level3 += usize::from(n == 3);
            }
        }
    }
    within(t, Duration::from_secs(5))?;
    check(level3 == 56, || format!("{level3} level-3 pairs"))?;
    Ok(format!("{pairs} ordered pairs ({level3} at level 3) pass (a)-(d)"))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let cases = [
        ("identity D2 at N=3", CylinderEpimorphism::identity(&d2()).map_err(|e| e.to_string())?, 3),
        (
            "D2 onto [[1,1],[1,1]] at N=2",
            CylinderEpimorphism::new(d2(), m11(), vec![vec![1], vec![1]], 1, Mode::Exact).map_err(|e| e.to_string())?,
            2,
        ),
    ];
    let mut cells = 0;
    for (name, e, n) in &cases {
        let built = build_speedup(e, *n).map_err(|err| format!("{name}: {err}"))?;
        check(built.stages.len() == *n, || format!("{name}: {} stages", built.stages.len()))?;
        for s in &built.stages {
            check(s.invariants.all(), || format!("{name}: stage {} {:?}", s.index, s.invariants))?;
        }
        let r = verify_build(e, &built);
        check(r.passed() && r.conjugacy_cells > 0, || format!("{name}:\n{r}"))?;
        let mus = ergodic_measures(&e.target).map_err(|err| err.to_string())?;
        for entry in &built.map.entries {
            let dom = ClopenSet::from_atom(entry.domain);
            for mu in &mus {
                check(mu.set_measure(&dom) == mu.set_measure(&entry.image), || format!("{name}: measure on {}", entry.domain))?;
            }
        }
        cells += r.conjugacy_cells;
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("all seven invariants at every stage, {cells} cells conjugate"))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let d = m2112();
    let mus = ergodic_measures(&d).map_err(|e| e.to_string())?;
    let a = ClopenSet::from_atom(Atom::new(1, 0, 0));
    let b = ClopenSet::from_atom(Atom::new(1, 1, 0));
    let diff = class_of(&d, &CylinderFunction::new(&d, 1, vec![vec![1], vec![-1]]).unwrap());
    check(mus.iter().all(|mu| mu.set_measure(&a) == mu.set_measure(&b)), || "A and B differ in measure".into())?;
    let cob = is_coboundary(&d, &CylinderFunction::new(&d, 1, vec![vec![1], vec![-1]]).unwrap()).map_err(|e| e.to_string())?;
    check(!matches!(cob, CoboundaryVerdict::Yes { .. }), || format!("difference {diff} is a coboundary"))?;
    let s = infinitesimal_speedup(&d, &mus, &a, &b, None, 4).map_err(|e| e.to_string())?;
    check(s.remainder_a.len() == 1, || format!("A remainder is not one cylinder: {:?}", s.remainder_a))?;
    let last = s.stages.last().ok_or("no stages")?;
    check(d.set_eq(&last.c, &s.remainder_a), || "A remainder is not the last cylinder around x0".into())?;
    // the matching remainder of B holds the last cylinder around y0
    check(d.is_subset(&last.d, &s.remainder_b), || "B remainder misses the cylinder around y0".into())?;
    check(d.point_in(&s.y0, &last.d).unwrap_or(false), || "y0 not in its cylinder".into())?;
    let bound = cantorspeed::arith::q_frac(1, 81);
    for mu in &mus {
        let m = mu.set_measure(&s.remainder_a).to_rational().ok_or("irrational remainder measure")?;
        check(m <= bound, || format!("remainder measure {m} exceeds 3^-4"))?;
        check(mu.set_measure(&s.remainder_b) == mu.set_measure(&s.remainder_a), || "remainders differ".into())?;
    }
    check(d.point_in(&s.x0, &s.remainder_a).unwrap_or(false), || "x0 not in remainder".into())?;
    check(d.set_eq(&s.map.domain_cover, &d.difference(&a, &s.remainder_a)), || "domain is not A minus remainder".into())?;
    let image = d.difference(&b, &s.remainder_b);
    check(d.set_eq(&s.map.image_cover(&d), &image), || "image is not B minus remainder".into())?;
    // atom accounting: disjoint domains, disjoint images, equal total measure
    let es = &s.map.entries;
    for (i, x) in es.iter().enumerate() {
        for y in &es[i + 1..] {
            check(x.domain != y.domain && !d.atom_meets(x.domain, &ClopenSet::from_atom(y.domain)), || "domains overlap".into())?;
            check(d.is_disjoint(&x.image, &y.image), || format!("images of {} and {} overlap", x.domain, y.domain))?;
        }
    }
    let r = verify_speedup(&d, &s.map, &mus, Some(&image), &[]);
    check(r.passed(), || format!("{r}"))?;
    within(t, Duration::from_secs(10))?;
    let rem = s.remainder_a.iter().next().unwrap();
    Ok(format!("{} entries, remainder {rem} of measure {}", es.len(), mus[0].set_measure(&s.remainder_a)))
}

fn criterion_7() -> Outcome {
    let d = d2();
    for n in 1..=8usize {
        let want = 1u64 << n;
        check(min_return_bound(&d, n) == want, || format!("D2 n={n}: {}", min_return_bound(&d, n)))?;
        // +1 on Z/2^(n+2); the base of level n is the residues divisible by 2^n
        let modulus = 1u64 << (n + 2);
        let brute = (0..modulus)
            .filter(|x| x % want == 0)
            .map(|x| (1..=modulus).find(|k| (x + k) % modulus % want == 0).unwrap())
            .min()
            .unwrap();
        check(brute == want, || format!("orbit simulation n={n}: {brute}"))?;
    }
    let d = m2112();
    let mut v = vec![1u64, 1];
    for n in 1..=8usize {
        let want = *v.iter().min().unwrap();
        check(min_return_bound(&d, n) == want, || format!("M n={n}: {} vs {want}", min_return_bound(&d, n)))?;
        v = vec![2 * v[0] + v[1], v[0] + 2 * v[1]];
    }
    Ok("D2 bound 2^n for n<=8 matches orbit simulation; M bound matches M^(n-1)(1,1)".into())
}

fn pair_atoms(a: &OrderedBratteliDiagram, b: &OrderedBratteliDiagram, n: usize) -> Vec<ConjugacyCell> {
    a.atoms(n)
        .zip(b.atoms(n))
        .map(|(x, y)| ConjugacyCell { column: 0, level: 0, x: ClopenSet::from_atom(x), y: ClopenSet::from_atom(y) })
        .collect()
}

fn criterion_8() -> Outcome {
    let mut confirmed = 0;
    let pairs: [(&str, OrderedBratteliDiagram, OrderedBratteliDiagram, usize); 4] = [
        ("D2/D2", d2(), d2(), 3),
        ("D2/[[1,1],[1,1]]", d2(), m11(), 3),
        ("[[1,1],[1,1]]/D2", m11(), d2(), 4),
        ("M/M", m2112(), m2112(), 2),
    ];
    for (name, a, b, n) in &pairs {
        let r = ergodic_profile_compare(a, b, &pair_atoms(a, b, *n)).map_err(|e| e.to_string())?;
        check(r.bijection == Some(true) && r.passed(), || format!("{name}:\n{r}"))?;
        confirmed += 1;
    }
    let e = CylinderEpimorphism::new(d2(), m11(), vec![vec![1], vec![1]], 1, Mode::Exact).map_err(|e| e.to_string())?;
    let built = build_speedup(&e, 2).map_err(|e| e.to_string())?;
    let r = ergodic_profile_compare(&e.target, &e.source, built.conjugacy.cells()).map_err(|e| e.to_string())?;
    check(r.bijection == Some(true), || format!("built pairing:\n{r}"))?;
    confirmed += 1;

    let mut refuted = 0;
    // D2 level-2 atoms against cells of measure 1/2, 1/4, 1/8, 1/8
    let (a, b) = (d2(), m11());
    let mut y = vec![ClopenSet::from_atom(Atom::new(1, 0, 0)), ClopenSet::from_atom(Atom::new(2, 1, 1))];
    y.extend(b.descendants(Atom::new(2, 0, 1), 3).into_iter().map(ClopenSet::from_atom));
    let cells: Vec<ConjugacyCell> = a
        .atoms(2)
        .zip(y)
        .map(|(x, y)| ConjugacyCell { column: 0, level: 0, x: ClopenSet::from_atom(x), y })
        .collect();
    let r = ergodic_profile_compare(&a, &b, &cells).map_err(|e| e.to_string())?;
    check(!r.passed() && r.bijection == Some(false), || format!("unequal pairing accepted:\n{r}"))?;
    refuted += 1;
    // M: one level-1 atom paired with a level-2 atom, the rest made up below
    let m = m2112();
    let mut cells = pair_atoms(&m, &m, 2);
    let swap = cells.iter().position(|c| c.x.iter().next().unwrap().vertex == 1).unwrap();
    cells.swap(0, swap);
    let x0 = cells[0].x.clone();
    cells[0].y = ClopenSet::from_atom(Atom::new(1, 0, 0));
    cells.retain(|c| c.y.iter().next().unwrap().level == 1 || !m.atom_in(*c.y.iter().next().unwrap(), &ClopenSet::from_atom(Atom::new(1, 0, 0))));
    check(cells[0].x == x0, || "fault cell lost".into())?;
    let r = ergodic_profile_compare(&m, &m, &cells).map_err(|e| e.to_string())?;
    check(!r.passed(), || format!("unequal pairing on M accepted:\n{r}"))?;
    refuted += 1;
    Ok(format!("{confirmed} pairings confirmed bijective, {refuted} fault injections refuted"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("group examples replayed", criterion_1),
        ("coboundary decider sound and complete", criterion_2),
        ("positivity trichotomy consistent", criterion_3),
        ("strong speedup on all atom pairs", criterion_4),
        ("main construction at desk scale", criterion_5),
        ("infinitesimal speedup at depth 4", criterion_6),
        ("return-time bound", criterion_7),
        ("finite-ergodic comparison", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("acceptance {}: PASS {name} ({detail}) [{:.2?}]", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

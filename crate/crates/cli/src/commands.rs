use std::path::Path;

use cantorspeed::bv::validate_diagram;
use cantorspeed::dimension::{
    class_of, ergodic_measures, is_coboundary, is_positive, sign_mod_inf, verify_coboundary_witness, CoboundaryVerdict,
    ModInfSign, NoCertificate, PositivityVerdict,
};
use cantorspeed::format::{
    parse_conjugacy, parse_function, parse_jump_table, parse_set, read_epimorphism, read_system, write_conjugacy,
    write_jump_table,
};
use cantorspeed::speedup::{
    build_speedup, ergodic_profile_compare, infinitesimal_speedup, partial_speedup, strong_speedup, verify_build,
    verify_speedup, BuildResult, ConjugacyCell, SpeedupMap, SpeedupReport,
};
use cantorspeed::towers::{canonical_towers, check_kr_partition, min_return_bound};
use cantorspeed::{ClopenSet, CylinderFunction, Direction, Error, OrderedBratteliDiagram, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{dot, examples, parse_system_file, Command, PairArgs, ProfileArgs, Report, RunConfig, SpeedupCommand, VerifyArgs};
use crate::{EXIT_OK, EXIT_REFUTED};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Towers { .. } => "towers",
        Command::Class { .. } => "class",
        Command::Coboundary { .. } => "coboundary",
        Command::Positivity { .. } => "positivity",
        Command::Measures { .. } => "measures",
        Command::GroupExamples => "group-examples",
        Command::Speedup(SpeedupCommand::Strong(_)) => "speedup strong",
        Command::Speedup(SpeedupCommand::Partial(_)) => "speedup partial",
        Command::Speedup(SpeedupCommand::Infinitesimal { .. }) => "speedup infinitesimal",
        Command::Speedup(SpeedupCommand::Build { .. }) => "speedup build",
        Command::Verify(_) => "verify",
        Command::ProfileCompare(_) => "profile-compare",
        Command::ExportDot { .. } => "export-dot",
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn positive(field: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Parse(format!("field `{field}`: must be positive")));
    }
    Ok(())
}

fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) if !m.starts_with(&path.display().to_string()) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn set_file(d: &OrderedBratteliDiagram, path: &Path) -> Result<ClopenSet> {
    parse_set(d, &read(path)?).map_err(|e| located(path, e))
}

fn function_file(d: &OrderedBratteliDiagram, path: &Path) -> Result<CylinderFunction> {
    parse_function(d, &read(path)?).map_err(|e| located(path, e))
}

fn atoms(s: &ClopenSet) -> String {
    let v: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    v.join(" ")
}

fn columns(f: &CylinderFunction) -> String {
    let cols: Vec<String> =
        f.values().iter().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
    cols.join(" | ")
}

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_REFUTED
    }
}

pub fn dispatch(config: &RunConfig, r: &mut Report) -> Result<i32> {
    match &config.command {
        Command::Validate { system } => {
            let d = read_system(system)?;
            let v = validate_diagram(&d);
            r.absorb("", &v);
            r.push("valid", v.passed());
            Ok(status(v.passed()))
        }
        Command::Towers { system, level } => {
            positive("level", *level)?;
            let d = parse_system_file(system)?;
            let p = canonical_towers(&d, *level);
            r.push("min_return_bound", min_return_bound(&d, *level));
            r.push("kr_partition", if check_kr_partition(&d, &p).is_ok() { "ok" } else { "invalid" });
            r.absorb("towers", &p);
            Ok(EXIT_OK)
        }
        Command::Class { system, function, level } => {
            let d = parse_system_file(system)?;
            let f = function_file(&d, function)?;
            let mut c = class_of(&d, &f);
            if let Some(l) = level {
                if *l < c.level {
                    return Err(Error::LevelBelowCurrent { current: c.level, target: *l });
                }
                c = c.push_to(&d, *l);
            }
            r.push("class", &c);
            Ok(EXIT_OK)
        }
        Command::Coboundary { system, function, random, level } => {
            let d = parse_system_file(system)?;
            match (function, random) {
                (Some(f), None) => coboundary(&d, &function_file(&d, f)?, r),
                (None, Some(n)) => random_coboundaries(&d, *n, *level, config.seed, r),
                _ => Err(Error::Parse("give either a function file or `--random`".into())),
            }
        }
        Command::Positivity { system, function } => {
            let d = parse_system_file(system)?;
            let f = function_file(&d, function)?;
            positivity(&d, &f, r)
        }
        Command::Measures { system, level } => {
            let d = parse_system_file(system)?;
            d.check_level(*level)?;
            let mus = ergodic_measures(&d)?;
            r.push("measures", mus.len());
            for (i, mu) in mus.iter().enumerate() {
                r.push(format!("measure.{i}.kind"), format!("{:?}", mu.kind));
                if let Some(l) = mu.lambda() {
                    r.push(format!("measure.{i}.lambda"), l);
                }
                for v in 0..d.vertex_count(*level) {
                    r.push(format!("measure.{i}.L{level}.{v}"), mu.vertex_measure(*level, v));
                }
            }
            Ok(EXIT_OK)
        }
        Command::GroupExamples => examples::run(r),
        Command::Speedup(s) => speedup(s, r),
        Command::Verify(v) => verify(v, r),
        Command::ProfileCompare(p) => profile(p, r),
        Command::ExportDot { system, levels, towers, out } => {
            positive("levels", *levels)?;
            let d = parse_system_file(system)?;
            let text = match towers {
                Some(n) => {
                    positive("towers", *n)?;
                    dot::towers(&canonical_towers(&d, *n))
                }
                None => dot::diagram(&d, *levels),
            };
            match out {
                Some(p) => {
                    write(p, &text)?;
                    r.push("written.dot", p.display());
                    r.push("dot.lines", text.lines().count());
                }
                None => {
                    for (i, line) in text.lines().enumerate() {
                        r.push(format!("dot.{i:04}"), line);
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn no_certificate(r: &mut Report, c: &NoCertificate) {
    match c {
        NoCertificate::NonzeroIntegral(x) => r.push("certificate.nonzero_integral", x),
        NoCertificate::NonpositiveIntegral(x) => r.push("certificate.nonpositive_integral", x),
        NoCertificate::KernelRefutation(c) => r.push("certificate.kernel_refutation", c),
    }
}

fn coboundary(d: &OrderedBratteliDiagram, f: &CylinderFunction, r: &mut Report) -> Result<i32> {
    match is_coboundary(d, f)? {
        CoboundaryVerdict::Yes { witness, level } => {
            let check = (level.max(f.level()) + 1).min(d.max_dynamic_level());
            let ok = verify_coboundary_witness(d, f, &witness, check)?;
            r.push("verdict", "yes");
            r.push("witness.level", level);
            r.push("witness.values", columns(&witness));
            r.push("witness.checked_at", check);
            r.push("witness.verified", ok);
            Ok(status(ok))
        }
        CoboundaryVerdict::No(c) => {
            r.push("verdict", "no");
            no_certificate(r, &c);
            Ok(EXIT_REFUTED)
        }
        CoboundaryVerdict::Unknown { depth } => {
            r.push("verdict", "unknown");
            r.push("depth", depth);
            Ok(EXIT_REFUTED)
        }
    }
}

/// `g∘T − g` for a random `g` at `level` vanishing on base atoms, so the
/// difference is exact at `level + 1`.
fn random_coboundaries(d: &OrderedBratteliDiagram, n: usize, level: usize, seed: u64, r: &mut Report) -> Result<i32> {
    positive("random", n)?;
    positive("level", level)?;
    d.check_level(level + 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..n {
        let g = CylinderFunction::from_fn(d, level, |a| if a.index == 0 { 0 } else { rng.gen_range(-3..=3) });
        let mut step_err = None;
        let f = CylinderFunction::from_fn(d, level + 1, |a| match d.atom_step(a, Direction::Forward) {
            Ok(img) => g.value(d, *img.iter().next().expect("images are nonempty")) - g.value(d, a),
            Err(e) => {
                step_err = Some(e);
                0
            }
        });
        if let Some(e) = step_err {
            return Err(e);
        }
        let ok = match is_coboundary(d, &f)? {
            CoboundaryVerdict::Yes { witness, level: wl } => {
                verify_coboundary_witness(d, &f, &witness, (wl.max(level + 1) + 1).min(d.max_dynamic_level()))?
            }
            _ => false,
        };
        failures += usize::from(!ok);
    }
    r.push("seed", seed);
    r.push("samples", n);
    r.push("failures", failures);
    Ok(status(failures == 0))
}

fn positivity(d: &OrderedBratteliDiagram, f: &CylinderFunction, r: &mut Report) -> Result<i32> {
    let verdict = is_positive(d, f)?;
    let exit = match &verdict {
        PositivityVerdict::Positive { level } => {
            r.push("verdict", "positive");
            r.push("level", level);
            EXIT_OK
        }
        PositivityVerdict::Zero => {
            r.push("verdict", "zero");
            EXIT_REFUTED
        }
        PositivityVerdict::NotPositive(c) => {
            r.push("verdict", "not-positive");
            no_certificate(r, c);
            EXIT_REFUTED
        }
        PositivityVerdict::Unknown { depth } => {
            r.push("verdict", "unknown");
            r.push("depth", depth);
            EXIT_REFUTED
        }
    };
    match sign_mod_inf(d, f)? {
        ModInfSign::Positive { c } => {
            r.push("sign_mod_inf", "positive");
            r.push("sign_mod_inf.c", c);
        }
        ModInfSign::Infinitesimal => r.push("sign_mod_inf", "infinitesimal"),
        ModInfSign::Negative => r.push("sign_mod_inf", "negative"),
        ModInfSign::Mixed => r.push("sign_mod_inf", "mixed"),
        ModInfSign::Zero => r.push("sign_mod_inf", "zero"),
    }
    Ok(exit)
}

fn speedup_report(r: &mut Report, map: &SpeedupMap, v: &SpeedupReport) {
    r.absorb("map", map);
    r.absorb("verify", v);
}

fn save_map(out: &Option<std::path::PathBuf>, map: &SpeedupMap, r: &mut Report) -> Result<()> {
    if let Some(p) = out {
        write(p, &write_jump_table(map))?;
        r.push("written.jumps", p.display());
    }
    Ok(())
}

fn pair(p: &PairArgs) -> Result<(OrderedBratteliDiagram, ClopenSet, ClopenSet)> {
    let d = parse_system_file(&p.system)?;
    let a = set_file(&d, &p.a)?;
    let b = set_file(&d, &p.b)?;
    Ok((d, a, b))
}

fn speedup(s: &SpeedupCommand, r: &mut Report) -> Result<i32> {
    match s {
        SpeedupCommand::Strong(p) => {
            let (d, a, c) = pair(p)?;
            let map = strong_speedup(&d, &a, &c)?;
            let v = verify_speedup(&d, &map, &ergodic_measures(&d)?, Some(&c), &[]);
            speedup_report(r, &map, &v);
            save_map(&p.out, &map, r)?;
            Ok(status(v.passed()))
        }
        SpeedupCommand::Partial(p) => {
            let (d, a, b) = pair(p)?;
            let mus = ergodic_measures(&d)?;
            let map = partial_speedup(&d, &mus, &a, &b)?;
            let v = verify_speedup(&d, &map, &mus, None, &[]);
            let inside = d.is_subset(&map.image_cover(&d), &b);
            speedup_report(r, &map, &v);
            r.push("image_within_b", inside);
            save_map(&p.out, &map, r)?;
            Ok(status(v.passed() && inside))
        }
        SpeedupCommand::Infinitesimal { pair: p, depth } => {
            positive("depth", *depth)?;
            let (d, a, b) = pair(p)?;
            let mus = ergodic_measures(&d)?;
            let s = infinitesimal_speedup(&d, &mus, &a, &b, None, *depth)?;
            let v = verify_speedup(&d, &s.map, &mus, None, &[]);
            speedup_report(r, &s.map, &v);
            r.push("remainder_a", atoms(&s.remainder_a));
            r.push("remainder_b", atoms(&s.remainder_b));
            for (i, mu) in mus.iter().enumerate() {
                r.push(format!("remainder_a.measure.{i}"), mu.set_measure(&s.remainder_a));
                r.push(format!("remainder_b.measure.{i}"), mu.set_measure(&s.remainder_b));
            }
            r.push("stages", s.stages.len());
            save_map(&p.out, &s.map, r)?;
            Ok(status(v.passed()))
        }
        SpeedupCommand::Build { epimorphism, depth, out, conjugacy_out } => {
            positive("depth", *depth)?;
            let e = read_epimorphism(epimorphism)?;
            let built = build_speedup(&e, *depth)?;
            for s in &built.stages {
                for (name, ok) in s.invariants.as_array() {
                    r.push(format!("stage.{}.{name}", s.index), ok);
                }
            }
            let v = verify_build(&e, &built);
            r.absorb("build", &v);
            save_map(out, &built.map, r)?;
            if let Some(p) = conjugacy_out {
                write(p, &write_conjugacy(&built.conjugacy))?;
                r.push("written.conjugacy", p.display());
            }
            Ok(status(v.passed()))
        }
    }
}

fn verify(v: &VerifyArgs, r: &mut Report) -> Result<i32> {
    if let (Some(epi), Some(conj)) = (&v.epimorphism, &v.conjugacy) {
        let e = read_epimorphism(epi)?;
        let map = parse_jump_table(&e.target, &read(&v.jumps)?).map_err(|err| located(&v.jumps, err))?;
        let conjugacy = parse_conjugacy(&e.target, &e.source, &read(conj)?).map_err(|err| located(conj, err))?;
        let report = verify_build(&e, &BuildResult { map, conjugacy, stages: Vec::new() });
        r.absorb("build", &report);
        return Ok(status(report.passed()));
    }
    let system = v.system.as_ref().ok_or_else(|| Error::Parse("`--system` is required".into()))?;
    let d = parse_system_file(system)?;
    let map = parse_jump_table(&d, &read(&v.jumps)?).map_err(|err| located(&v.jumps, err))?;
    let target = v.target.as_ref().map(|t| set_file(&d, t)).transpose()?;
    let report = verify_speedup(&d, &map, &ergodic_measures(&d)?, target.as_ref(), &[]);
    r.absorb("verify", &report);
    Ok(status(report.passed()))
}

fn profile(p: &ProfileArgs, r: &mut Report) -> Result<i32> {
    let a = parse_system_file(&p.source)?;
    let b = parse_system_file(&p.target)?;
    let cells: Vec<ConjugacyCell> = match (&p.conjugacy, p.level) {
        (Some(c), _) => {
            let conj = parse_conjugacy(&a, &b, &read(c)?).map_err(|e| located(c, e))?;
            conj.cells().to_vec()
        }
        (None, Some(n)) => {
            positive("level", n)?;
            a.check_level(n)?;
            b.check_level(n)?;
            if a.atom_count(n) != b.atom_count(n) {
                return Err(Error::Parse(format!("field `level`: {} and {} atoms cannot be paired", a.atom_count(n), b.atom_count(n))));
            }
            a.atoms(n)
                .zip(b.atoms(n))
                .map(|(x, y)| ConjugacyCell { column: 0, level: 0, x: ClopenSet::from_atom(x), y: ClopenSet::from_atom(y) })
                .collect()
        }
        (None, None) => return Err(Error::Parse("give `--conjugacy` or `--level`".into())),
    };
    let report = ergodic_profile_compare(&a, &b, &cells)?;
    r.push("cells", cells.len());
    r.absorb("profile", &report);
    Ok(status(report.passed()))
}

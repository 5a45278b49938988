use cantorspeed::arith::QuadReal;
use cantorspeed::groups::{
    cone_check, example_cone_image, example_discrete_kernel, example_quotient_sum, example_second_coordinate,
    exhaustive_check, exhaustive_check_pair, verify_refutation, ExhaustiveCertificate, ExhaustiveVerdict, GroupMap,
    Refutation,
};
use cantorspeed::Result;

use crate::{Report, EXIT_OK, EXIT_REFUTED};

fn vector(v: &[QuadReal]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn ints(v: &[i64]) -> Vec<QuadReal> {
    v.iter().map(|&x| QuadReal::int(x)).collect()
}

/// Cone check of one map; returns whether the image is proper.
fn cone(r: &mut Report, key: &str, m: &GroupMap) -> Result<bool> {
    let c = cone_check(m)?;
    r.push(format!("{key}.preserves_order"), c.preserves);
    r.push(format!("{key}.image_proper"), c.image_proper);
    if let Some(w) = &c.witness {
        r.push(format!("{key}.witness.element"), vector(&w.element));
        r.push(format!("{key}.witness.preimage"), vector(&w.preimage));
        if let Some((ray, pre)) = &w.boundary_ray {
            r.push(format!("{key}.witness.boundary_ray"), vector(ray));
            r.push(format!("{key}.witness.boundary_preimage"), vector(pre));
        }
    }
    Ok(c.image_proper)
}

fn refutation(r: &mut Report, key: &str, m: &GroupMap, g: &[QuadReal], h: &[QuadReal], x: &Refutation) -> Result<bool> {
    r.push(format!("{key}.g"), vector(g));
    r.push(format!("{key}.h"), vector(h));
    match x {
        Refutation::PreimageOutsideInterval { preimage } => {
            r.push(format!("{key}.refutation"), "preimage-outside-interval");
            r.push(format!("{key}.preimage"), vector(preimage));
        }
        Refutation::EmptyFiberInterval { point, kernel, lo, hi } => {
            let show = |v: &[num_bigint::BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let bound = |b: &Option<num_bigint::BigInt>| b.as_ref().map_or("none".into(), |x| x.to_string());
            r.push(format!("{key}.refutation"), "empty-fiber-interval");
            r.push(format!("{key}.fiber.point"), show(point));
            r.push(format!("{key}.fiber.kernel"), show(kernel));
            r.push(format!("{key}.fiber.lo"), bound(lo));
            r.push(format!("{key}.fiber.hi"), bound(hi));
        }
    }
    let ok = verify_refutation(m, g, h, x)?;
    r.push(format!("{key}.verified"), ok);
    Ok(ok)
}

fn exhaustive(r: &mut Report, key: &str, m: &GroupMap, bound: i64) -> Result<Option<bool>> {
    Ok(match exhaustive_check(m, bound)? {
        ExhaustiveVerdict::Exhaustive(c) => {
            let name = match c {
                ExhaustiveCertificate::OrderIsomorphism => "order-isomorphism",
                ExhaustiveCertificate::Scaling => "scaling",
            };
            r.push(format!("{key}.exhaustive"), "yes");
            r.push(format!("{key}.certificate"), name);
            Some(true)
        }
        ExhaustiveVerdict::NotExhaustive { g, h, refutation: x } => {
            r.push(format!("{key}.exhaustive"), "no");
            refutation(r, key, m, &g, &h, &x)?.then_some(false)
        }
        ExhaustiveVerdict::Unknown => {
            r.push(format!("{key}.exhaustive"), "unknown");
            None
        }
    })
}

/// The three worked examples of positive maps between ordered groups.
pub fn run(r: &mut Report) -> Result<i32> {
    let mut ok = true;

    let m = example_cone_image();
    r.push("ex1.map", "(x,y) -> ((2x+y)/3, (x+2y)/3)");
    ok &= cone(r, "ex1", &m)?;
    ok &= exhaustive(r, "ex1", &m, 4)? == Some(false);

    let m = example_second_coordinate();
    r.push("ex2.map", "(x,y) -> (x-y, x+y) onto the second-coordinate order");
    ok &= cone(r, "ex2", &m)?;
    ok &= exhaustive(r, "ex2", &m, 4)? == Some(false);
    let q = example_quotient_sum();
    r.push("ex2.quotient.map", "(x,y) -> x+y");
    ok &= !cone(r, "ex2.quotient", &q)?;
    ok &= exhaustive(r, "ex2.quotient", &q, 4)? == Some(true);

    let m = example_discrete_kernel();
    r.push("ex3.map", "second coordinate on {(a*sqrt2 + b, a*sqrt2 + c*sqrt3 + d)}");
    let g = ints(&[1, 1]);
    let h = vec![&QuadReal::sqrt3() - &QuadReal::int(1)];
    match exhaustive_check_pair(&m, &g, &h)? {
        Some(x) => {
            r.push("ex3.exhaustive", "no");
            ok &= refutation(r, "ex3", &m, &g, &h, &x)?;
        }
        None => {
            r.push("ex3.exhaustive", "not-refuted");
            ok = false;
        }
    }
    r.push("examples_reproduced", ok);
    Ok(if ok { EXIT_OK } else { EXIT_REFUTED })
}

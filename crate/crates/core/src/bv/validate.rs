use std::fmt;

use super::diagram::{OrderedBratteliDiagram, TailRule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

/// Outcome of each standing assumption on a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub no_dead_vertices: CheckOutcome,
    pub primitive: CheckOutcome,
    pub primitivity_window: Option<usize>,
    pub properly_ordered: CheckOutcome,
    /// Set when the order is proper but maximal or minimal edges of a step
    /// have several sources, so the diagram has to be telescoped first.
    pub telescope_by: Option<usize>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.no_dead_vertices.passed() && self.primitive.passed() && self.properly_ordered.passed()
    }

    /// First failing check as an error.
    pub fn into_result(self) -> Result<ValidationReport> {
        if let CheckOutcome::Fail(m) = &self.no_dead_vertices {
            return Err(Error::MalformedDiagram(m.clone()));
        }
        if let CheckOutcome::Fail(m) = &self.primitive {
            return Err(Error::NotPrimitive(m.clone()));
        }
        if let CheckOutcome::Fail(m) = &self.properly_ordered {
            return Err(Error::NotProperlyOrdered(m.clone()));
        }
        Ok(self)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: &CheckOutcome| match c {
            CheckOutcome::Pass => "pass".to_string(),
            CheckOutcome::Fail(m) => format!("fail ({m})"),
        };
        writeln!(f, "no_dead_vertices={}", show(&self.no_dead_vertices))?;
        writeln!(f, "primitive={}", show(&self.primitive))?;
        if let Some(w) = self.primitivity_window {
            writeln!(f, "primitivity_window={w}")?;
        }
        writeln!(f, "properly_ordered={}", show(&self.properly_ordered))?;
        if let Some(k) = self.telescope_by {
            writeln!(f, "telescope_by={k}")?;
        }
        Ok(())
    }
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).fold(0u64, |s, (x, r)| s.saturating_add(x.saturating_mul(r[j]))))
                .collect()
        })
        .collect()
}

fn positive(m: &[Vec<u64>]) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x > 0))
}

/// Smallest `d` with `M_{n+d-1} ... M_n` strictly positive for every level
/// `n >= 1` that the diagram reaches, bounded by `bound`.
pub fn primitivity_window(d: &OrderedBratteliDiagram, bound: usize) -> Option<usize> {
    match d.tail() {
        TailRule::Stationary => {
            let m = d.matrix(1).to_vec();
            let mut p = m.clone();
            for k in 1..=bound {
                if positive(&p) {
                    return Some(k);
                }
                p = mat_mul(&m, &p);
            }
            None
        }
        TailRule::Finite => {
            let steps = d.declared_steps();
            'window: for w in 1..=bound.min(steps.saturating_sub(1)) {
                for n in 1..steps {
                    if n + w > steps {
                        break;
                    }
                    let mut p = d.matrix(n).to_vec();
                    for j in n + 1..n + w {
                        p = mat_mul(d.matrix(j), &p);
                    }
                    if !positive(&p) {
                        continue 'window;
                    }
                }
                return Some(w);
            }
            None
        }
    }
}

/// Default bound on the primitivity window (Wielandt's bound for the widest level).
pub fn default_window_bound(d: &OrderedBratteliDiagram) -> usize {
    let v = (1..=d.declared_steps()).map(|n| d.vertex_count(n)).max().unwrap_or(1);
    (v - 1) * (v - 1) + 1
}

/// Checks whether a self-map of vertices has a unique fixed point attracting everything.
fn attracting_fixed_point(map: &[usize]) -> Option<usize> {
    let n = map.len();
    let mut target = None;
    for start in 0..n {
        let mut v = start;
        for _ in 0..n {
            v = map[v];
        }
        if map[v] != v {
            return None;
        }
        match target {
            None => target = Some(v),
            Some(t) if t != v => return None,
            _ => {}
        }
    }
    target
}

pub fn validate_diagram(d: &OrderedBratteliDiagram) -> ValidationReport {
    // dead vertices are rejected at construction time
    let no_dead_vertices = CheckOutcome::Pass;
    let window = primitivity_window(d, default_window_bound(d));
    let primitive = match window {
        Some(_) => CheckOutcome::Pass,
        None => CheckOutcome::Fail("no strictly positive product found within the window bound".into()),
    };
    let (properly_ordered, telescope_by) = proper_order(d);
    ValidationReport { no_dead_vertices, primitive, primitivity_window: window, properly_ordered, telescope_by }
}

fn proper_order(d: &OrderedBratteliDiagram) -> (CheckOutcome, Option<usize>) {
    let steps: Vec<usize> = match d.tail() {
        TailRule::Stationary => vec![1],
        TailRule::Finite => (1..d.declared_steps()).collect(),
    };
    let mut telescope = None;
    for &n in &steps {
        let srcs = d.step_sources(n);
        let maxs: Vec<usize> = srcs.iter().map(|l| *l.last().unwrap()).collect();
        let mins: Vec<usize> = srcs.iter().map(|l| l[0]).collect();
        let constant = |v: &[usize]| v.iter().all(|&x| x == v[0]);
        if constant(&maxs) && constant(&mins) {
            let (vmax, umin) = (maxs[0], mins[0]);
            if vmax == umin && srcs[vmax].len() == 1 {
                return (CheckOutcome::Fail("the maximal and minimal paths coincide".into()), None);
            }
            continue;
        }
        if d.tail() == TailRule::Finite {
            return (
                CheckOutcome::Fail(format!("step {n} has several maximal or minimal sources")),
                None,
            );
        }
        match (attracting_fixed_point(&maxs), attracting_fixed_point(&mins)) {
            (Some(_), Some(_)) => telescope = Some(srcs.len()),
            _ => {
                return (
                    CheckOutcome::Fail("several maximal or minimal infinite paths".into()),
                    None,
                )
            }
        }
    }
    (CheckOutcome::Pass, telescope)
}

/// Validates and, if the order is proper but not yet step-constant,
/// telescopes the diagram.
pub fn prepare_diagram(d: &OrderedBratteliDiagram) -> Result<OrderedBratteliDiagram> {
    let report = validate_diagram(d).into_result()?;
    match report.telescope_by {
        Some(k) => {
            let t = d.telescope(k)?;
            validate_diagram(&t).into_result()?;
            Ok(t)
        }
        None => Ok(d.clone()),
    }
}

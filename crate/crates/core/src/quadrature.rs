//! Adaptive Simpson integration.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpsonOptions {
    /// Absolute error target for the whole interval.
    pub abs_tol: f64,
    /// Uniform panels seeded before any adaptive refinement.
    pub initial_panels: usize,
    /// Maximum number of bisections below an initial panel.
    pub max_depth: u32,
}

impl Default for SimpsonOptions {
    fn default() -> Self {
        SimpsonOptions {
            abs_tol: 1e-6,
            initial_panels: 16,
            max_depth: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]`.
///
/// Each panel is bisected until the two-halves Simpson estimate agrees with
/// the whole-panel estimate to within `15·tol` (the Richardson bound), the
/// tolerance halving with each bisection. A panel still unresolved at
/// `max_depth` aborts with both global estimates.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, opts: SimpsonOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    if !(opts.abs_tol > 0.0) || opts.initial_panels == 0 || !(b > a) {
        return Err(Error::domain(
            "quadrature needs b > a, tol > 0 and at least one panel",
        ));
    }
    let panels = opts.initial_panels;
    let width = (b - a) / panels as f64;
    let mut evaluations = 0usize;
    let mut eval = |x: f64, n: &mut usize| {
        *n += 1;
        f(x)
    };

    let mut nodes = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        let x = if i == panels { b } else { a + i as f64 * width };
        nodes.push((x, eval(x, &mut evaluations)));
    }
    let panel_tol = opts.abs_tol / panels as f64;

    // Panels are pushed in reverse so the stack pops them left to right.
    let mut stack: Vec<Panel> = Vec::new();
    for i in (0..panels).rev() {
        let (pa, fa) = nodes[i];
        let (pb, fb) = nodes[i + 1];
        let m = 0.5 * (pa + pb);
        let fm = eval(m, &mut evaluations);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole: simpson(pa, pb, fa, fm, fb),
            tol: panel_tol,
            depth: 0,
        });
    }

    let mut total = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm, &mut evaluations);
        let frm = eval(rm, &mut evaluations);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let refined = left + right;
        let diff = refined - p.whole;
        if math::abs(diff) <= 15.0 * p.tol {
            total += refined + diff / 15.0;
            continue;
        }
        if p.depth >= opts.max_depth {
            let pending: f64 = stack.iter().map(|q| q.whole).sum();
            return Err(Error::NonConvergence {
                last: total + refined + pending,
                previous: total + p.whole + pending,
            });
        }
        let tol = 0.5 * p.tol;
        let depth = p.depth + 1;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol,
            depth,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol,
            depth,
        });
    }
    Ok(Quadrature {
        value: total,
        evaluations,
    })
}

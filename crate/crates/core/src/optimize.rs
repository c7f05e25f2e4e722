//! Derivative-free 1-D and N-D minimizers used by the capacity model.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a bracketed 1-D search.
#[derive(Debug, Clone, Copy)]
pub struct LineMin {
    pub x: f64,
    pub fx: f64,
    /// Final bracket; its width is below the requested tolerance.
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Golden-section minimization of `f` over `[lo, hi]`.
///
/// Assumes `f` is unimodal on the bracket. Stops once the bracket is
/// narrower than `tol`.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> LineMin
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    LineMin {
        x,
        fx,
        lo: a,
        hi: b,
        evaluations,
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`.
///
/// Returns `None` when the endpoints do not straddle a root. Iterates until
/// the midpoint stops moving in floating point.
pub fn bisect_root<G>(mut g: G, mut lo: f64, mut hi: f64) -> Option<f64>
where
    G: FnMut(f64) -> f64,
{
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Some(lo);
    }
    if g_hi == 0.0 {
        return Some(hi);
    }
    if g_lo.signum() == g_hi.signum() || g_lo.is_nan() || g_hi.is_nan() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Some(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when the largest vertex-to-best distance drops below this.
    pub diameter_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-6,
            max_evaluations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex minimization with standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// `project` maps every trial point back into the feasible box before it
/// is evaluated, so the whole simplex stays feasible.
pub fn nelder_mead<F, P>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    project: P,
    options: NelderMeadOptions,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let dim = x0.len();
    assert_eq!(dim, steps.len(), "one initial step per coordinate");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut start = x0.to_vec();
    project(&mut start);
    simplex.push(start.clone());
    for (i, &step) in steps.iter().enumerate() {
        let mut v = start.clone();
        v[i] += step;
        project(&mut v);
        if v[i] == start[i] {
            // clamped onto the start point; step the other way
            v[i] -= 2.0 * step;
            project(&mut v);
        }
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();

    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];

    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < options.diameter_tol {
            converged = true;
            break;
        }
        if evaluations >= options.max_evaluations {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let worst = dim;

        along(&centroid, &simplex[worst], -1.0, &mut trial);
        project(&mut trial);
        let f_reflect = eval(&trial, &mut evaluations);

        if f_reflect < values[0] {
            along(&centroid, &simplex[worst], -2.0, &mut trial2);
            project(&mut trial2);
            let f_expand = eval(&trial2, &mut evaluations);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[dim - 1] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        // contraction: outside if the reflection improved on the worst point
        let (coef, target) = if f_reflect < values[worst] {
            (-0.5, f_reflect)
        } else {
            (0.5, values[worst])
        };
        along(&centroid, &simplex[worst], coef, &mut trial2);
        project(&mut trial2);
        let f_contract = eval(&trial2, &mut evaluations);
        if f_contract < target {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let best = simplex[0].clone();
        for i in 1..=dim {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            project(&mut simplex[i]);
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }

    NelderMeadResult {
        x: simplex[0].clone(),
        fx: values[0],
        evaluations,
        converged,
    }
}

/// centroid + coef * (point − centroid)
fn along(centroid: &[f64], point: &[f64], coef: f64, out: &mut [f64]) {
    for ((o, c), p) in out.iter_mut().zip(centroid).zip(point) {
        *o = c + coef * (p - c);
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

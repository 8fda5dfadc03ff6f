//! Globally adaptive Gauss-Kronrod integration on a set of breakpoints, with an
//! optional semi-infinite tail handled by the map `x = x0 / u`.
//!
//! The error bookkeeping follows QUADPACK's QAG: every panel carries a G7/K15
//! estimate and the panel with the largest error is bisected until the summed
//! error meets `max(abs_tol, rel_tol * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ThermoResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureConfig {
    /// Default settings with a negligible absolute floor, for integrals whose
    /// magnitude is far below `1e-14` (deep low-temperature tails).
    pub fn relative_only() -> Self {
        QuadratureConfig {
            abs_tol: 1e-300,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 100 {
            return Err(Error::Config(format!(
                "max_subdivisions must be >= 100, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }
}

// G7/K15 abscissae on [0, 1) (symmetric), Kronrod weights and the Gauss weights
// belonging to the odd-indexed abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    9.914553711208126392068546975263285e-01,
    9.491079123427585245261896840478513e-01,
    8.648644233597690727897127886409262e-01,
    7.415311855993944398638647732807884e-01,
    5.860872354676911302941448382587296e-01,
    4.058451513773971669066064120769615e-01,
    2.077849550078984676006894037732449e-01,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    2.293532201052922496373200805896959e-02,
    6.309209262997855329070066318920429e-02,
    1.047900103222501838398763225415180e-01,
    1.406532597155259187451895905102379e-01,
    1.690047266392679028265834265985503e-01,
    1.903505780647854099132564024210137e-01,
    2.044329400752988924141619992346491e-01,
    2.094821410847278280129991748917143e-01,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    1.294849661688696932706114326790820e-01,
    2.797053914892766679014677714237796e-01,
    3.818300505051189449503697754889751e-01,
    4.179591836734693877551020408163265e-01,
];

struct Panel {
    a: f64,
    b: f64,
    tail: bool,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over `[breakpoints[0], breakpoints[last]]` and, when
/// `tail_from` is given, additionally over `[tail_from, inf)`.
///
/// Breakpoints must be sorted ascending; zero-width pieces are dropped.
pub fn integrate<F>(
    f: F,
    breakpoints: &[f64],
    tail_from: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<ThermoResult>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let tail_map = |u: f64| {
        let x0 = tail_from.unwrap_or(1.0);
        let x = x0 / u;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * x0 / (u * u)
        }
    };
    let eval = |p_tail: bool, a: f64, b: f64| {
        if p_tail {
            gk15(&tail_map, a, b)
        } else {
            gk15(&f, a, b)
        }
    };

    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Panel>, tail: bool, a: f64, b: f64| {
        let (value, error) = eval(tail, a, b);
        heap.push(Panel {
            a,
            b,
            tail,
            value,
            error,
        });
    };
    for w in breakpoints.windows(2) {
        debug_assert!(w[1] >= w[0], "breakpoints must be sorted");
        if w[1] > w[0] {
            push(&mut heap, false, w[0], w[1]);
        }
    }
    if let Some(x0) = tail_from {
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Error::domain("tail_from", x0, "must be finite and > 0"));
        }
        push(&mut heap, true, 0.0, 0.5);
        push(&mut heap, true, 0.5, 1.0);
    }
    if heap.is_empty() {
        return Ok(ThermoResult::exact(0.0));
    }

    let exact_sums = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let mut subdivisions = heap.len();
    let (mut stuck_value, mut stuck_error) = (0.0, 0.0);
    let (mut total, mut error) = exact_sums(&heap);
    loop {
        if subdivisions % 64 == 0 {
            (total, error) = exact_sums(&heap);
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * (total + stuck_value).abs());
        if error + stuck_error <= target || heap.is_empty() {
            let (v, e) = exact_sums(&heap);
            return Ok(ThermoResult::new(v + stuck_value, e + stuck_error));
        }
        if subdivisions >= cfg.max_subdivisions {
            let (v, e) = exact_sums(&heap);
            return Err(Error::Convergence {
                partial: v + stuck_value,
                error: e + stuck_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        total -= worst.value;
        error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            // cannot be resolved further in double precision
            stuck_value += worst.value;
            stuck_error += worst.error;
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = eval(worst.tail, a, b);
            total += value;
            error += err;
            heap.push(Panel {
                a,
                b,
                tail: worst.tail,
                value,
                error: err,
            });
        }
        subdivisions += 1;
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

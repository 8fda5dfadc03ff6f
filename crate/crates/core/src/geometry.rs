//! Mutual inductance of wire curves and the resulting force in newtons.
//!
//! `M = (mu0 / 4 pi) sum_{i,j} (d_i . d_j) int_0^1 int_0^1 ds du / |P_i(s) - Q_j(u)|`
//! over straight segments `P_i(s) = p_i + s d_i` of the first curve and
//! `Q_j(u) = q_j + u d_j` of the second. Each segment pair is integrated with an
//! 8 x 8 Gauss-Legendre product rule, bisecting the longer panel until it is
//! shorter than `panel_ratio` times the panel-to-panel distance.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{to_reduced, to_reduced_with_reference, PhysicalParams, BOLTZMANN, HBAR};
use crate::quadrature::{gauss_legendre, QuadratureConfig};
use crate::spectral::h_factor;
use crate::ThermoResult;

/// Vacuum permeability (H/m), CODATA 2018.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Version tag written to and accepted from curve JSON documents.
pub const SCHEMA_VERSION: u32 = 1;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Wire centre line as a polygonal chain (meters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolylineDoc", into = "PolylineDoc")]
pub struct Polyline3 {
    points: Vec<V3>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct PolylineDoc {
    #[serde(default = "default_schema")]
    schema_version: u32,
    closed: bool,
    points: Vec<V3>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl TryFrom<PolylineDoc> for Polyline3 {
    type Error = Error;

    fn try_from(doc: PolylineDoc) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported curve schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Polyline3::new(doc.points, doc.closed)
    }
}

impl From<Polyline3> for PolylineDoc {
    fn from(p: Polyline3) -> Self {
        PolylineDoc {
            schema_version: SCHEMA_VERSION,
            closed: p.closed,
            points: p.points,
        }
    }
}

impl Polyline3 {
    pub fn new(points: Vec<V3>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("a curve needs at least 2 points".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Config("curve coordinates must be finite".into()));
        }
        let p = Polyline3 { points, closed };
        for (k, (a, b)) in p.segments().enumerate() {
            if a == b {
                return Err(Error::Config(format!(
                    "segment {k} has coincident end points"
                )));
            }
        }
        Ok(p)
    }

    /// Regular `n`-gon inscribed in a circle of radius `radius` about the z axis,
    /// in the plane `z = z`.
    pub fn circle(radius: f64, z: f64, n: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain("radius", radius, "must be finite and > 0"));
        }
        if n < 3 {
            return Err(Error::Config("a circle needs at least 3 vertices".into()));
        }
        let points = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                [radius * phi.cos(), radius * phi.sin(), z]
            })
            .collect();
        Polyline3::new(points, true)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("curve JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }

    pub fn points(&self) -> &[V3] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> impl Iterator<Item = (V3, V3)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| norm(sub(b, a))).sum()
    }

    /// Rigid translation by `a`.
    pub fn translated(&self, a: V3) -> Self {
        Polyline3 {
            points: self.points.iter().map(|&p| add(p, a)).collect(),
            closed: self.closed,
        }
    }

    /// Same curve with the midpoint of every segment inserted.
    pub fn refined(&self) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len());
        for (a, b) in self.segments() {
            points.push(a);
            points.push(scale(add(a, b), 0.5));
        }
        if !self.closed {
            points.push(*self.points.last().expect("non-empty"));
        }
        Polyline3 {
            points,
            closed: self.closed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Minimum allowed distance between the curves (m).
    pub contact_cutoff: f64,
    /// Largest allowed panel length relative to the panel-to-panel distance.
    pub panel_ratio: f64,
    /// Sum segment pairs on the rayon pool. The reduction order is fixed either way.
    pub parallel: bool,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            contact_cutoff: 1e-6,
            panel_ratio: 0.5,
            parallel: true,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.contact_cutoff.is_finite() && self.contact_cutoff > 0.0) {
            return Err(Error::Config("contact_cutoff must be > 0".into()));
        }
        if !(self.panel_ratio.is_finite() && self.panel_ratio > 0.0 && self.panel_ratio <= 1.0) {
            return Err(Error::Config("panel_ratio must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InductanceResult {
    /// Henry.
    pub mutual: f64,
    /// Henry.
    pub quadrature_error: f64,
}

/// Minimum distance between segments `p0 + s d1` and `q0 + u d2`, `s, u` in [0, 1].
fn segment_distance(p0: V3, d1: V3, q0: V3, d2: V3) -> f64 {
    let r = sub(p0, q0);
    let a = dot(d1, d1);
    let e = dot(d2, d2);
    let f = dot(d2, r);
    let c = dot(d1, r);
    let b = dot(d1, d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut u = (b * s + f) / e;
    if u < 0.0 {
        u = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if u > 1.0 {
        u = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    norm(sub(add(p0, scale(d1, s)), add(q0, scale(d2, u))))
}

struct Rules {
    x8: Vec<f64>,
    w8: Vec<f64>,
    x6: Vec<f64>,
    w6: Vec<f64>,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| {
        // mapped from [-1, 1] to [0, 1]
        let map = |(x, w): (Vec<f64>, Vec<f64>)| {
            (
                x.iter().map(|x| 0.5 * (x + 1.0)).collect::<Vec<_>>(),
                w.iter().map(|w| 0.5 * w).collect::<Vec<_>>(),
            )
        };
        let (x8, w8) = map(gauss_legendre(8));
        let (x6, w6) = map(gauss_legendre(6));
        Rules { x8, w8, x6, w6 }
    })
}

fn product_rule(p0: V3, d1: V3, q0: V3, d2: V3, x: &[f64], w: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&s, &ws) in x.iter().zip(w) {
        let p = add(p0, scale(d1, s));
        let mut inner = 0.0;
        for (&u, &wu) in x.iter().zip(w) {
            inner += wu / norm(sub(p, add(q0, scale(d2, u))));
        }
        sum += ws * inner;
    }
    sum
}

/// `int_0^1 int_0^1 ds du / |P(s) - Q(u)|` scaled by the panel lengths, with
/// its error estimate. Returns `(value, error)` in meters.
fn panel_pair(p0: V3, d1: V3, q0: V3, d2: V3, ratio: f64, depth: u32) -> (f64, f64) {
    let l1 = norm(d1);
    let l2 = norm(d2);
    let dist = segment_distance(p0, d1, q0, d2);
    if l1.max(l2) > ratio * dist && depth < 64 {
        return if l1 >= l2 {
            let h = scale(d1, 0.5);
            let a = panel_pair(p0, h, q0, d2, ratio, depth + 1);
            let b = panel_pair(add(p0, h), h, q0, d2, ratio, depth + 1);
            (a.0 + b.0, a.1 + b.1)
        } else {
            let h = scale(d2, 0.5);
            let a = panel_pair(p0, d1, q0, h, ratio, depth + 1);
            let b = panel_pair(p0, d1, add(q0, h), h, ratio, depth + 1);
            (a.0 + b.0, a.1 + b.1)
        };
    }
    let r = rules();
    let g8 = product_rule(p0, d1, q0, d2, &r.x8, &r.w8);
    let g6 = product_rule(p0, d1, q0, d2, &r.x6, &r.w6);
    let lens = l1 * l2;
    (
        g8 * lens,
        ((g8 - g6).abs() + 64.0 * f64::EPSILON * g8.abs()) * lens,
    )
}

fn min_distance(c1: &Polyline3, c2: &Polyline3) -> f64 {
    let mut best = f64::INFINITY;
    for (a0, a1) in c1.segments() {
        let d1 = sub(a1, a0);
        for (b0, b1) in c2.segments() {
            best = best.min(segment_distance(a0, d1, b0, sub(b1, b0)));
        }
    }
    best
}

/// Neumann mutual inductance between `c1` and `c2` translated by `a`.
pub fn neumann_mutual_inductance(
    c1: &Polyline3,
    c2: &Polyline3,
    a: V3,
    cfg: &GeometryConfig,
) -> Result<InductanceResult> {
    cfg.validate()?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("displacement must be finite".into()));
    }
    let c2 = c2.translated(a);
    let distance = min_distance(c1, &c2);
    if distance < cfg.contact_cutoff {
        return Err(Error::Singularity {
            distance,
            cutoff: cfg.contact_cutoff,
        });
    }
    let s1: Vec<(V3, V3)> = c1.segments().collect();
    let s2: Vec<(V3, V3)> = c2.segments().collect();
    let ratio = cfg.panel_ratio;
    let row = |&(a0, a1): &(V3, V3)| {
        let d1 = sub(a1, a0);
        let (mut v, mut e) = (0.0, 0.0);
        for &(b0, b1) in &s2 {
            let d2 = sub(b1, b0);
            let cos = dot(d1, d2);
            if cos == 0.0 {
                continue;
            }
            let (pv, pe) = panel_pair(a0, d1, b0, d2, ratio, 0);
            let unit = cos / (norm(d1) * norm(d2));
            v += unit * pv;
            e += unit.abs() * pe;
        }
        (v, e)
    };
    let rows: Vec<(f64, f64)> = if cfg.parallel {
        s1.par_iter().map(row).collect()
    } else {
        s1.iter().map(row).collect()
    };
    let (v, e) = rows
        .iter()
        .fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
    let k = MU0 / (4.0 * PI);
    Ok(InductanceResult {
        mutual: k * v,
        quadrature_error: k * e,
    })
}

/// Complete elliptic integrals `(K(k), E(k))` by the arithmetic-geometric mean.
pub fn complete_elliptic(k: f64) -> Result<(f64, f64)> {
    if !(k.is_finite() && (0.0..1.0).contains(&k)) {
        return Err(Error::domain("k", k, "modulus must lie in [0, 1)"));
    }
    let mut a = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..40 {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
    }
    let kk = PI / (2.0 * a);
    Ok((kk, kk * (1.0 - sum)))
}

/// Maxwell's closed form for two coaxial circular loops of radii `r1`, `r2`
/// whose planes are `d` apart (H).
pub fn coaxial_loops_mutual_inductance(r1: f64, r2: f64, d: f64) -> Result<f64> {
    for (name, v) in [("r1", r1), ("r2", r2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(name, v, "must be finite and > 0"));
        }
    }
    if !d.is_finite() {
        return Err(Error::domain("d", d, "must be finite"));
    }
    let k2 = 4.0 * r1 * r2 / ((r1 + r2).powi(2) + d * d);
    let k = k2.sqrt();
    let (kk, ee) = complete_elliptic(k)?;
    Ok(MU0 * (r1 * r2).sqrt() * ((2.0 / k - k) * kk - 2.0 / k * ee))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientResult {
    /// d(m^2)/da (1/m).
    pub grad: V3,
    /// Componentwise error estimate.
    pub error: V3,
    /// Coupling `M(a)/L` at the base displacement.
    pub m: f64,
}

/// Gradient of `(M(a)/L)^2` with respect to the displacement of `c2`.
///
/// Central differences with `h = max(1e-4 |a|, 1e-7 m)` and `h/2`, combined by
/// Richardson extrapolation; the error is the size of the correction.
pub fn grad_m2(
    c1: &Polyline3,
    c2: &Polyline3,
    a: V3,
    inductance: f64,
    cfg: &GeometryConfig,
) -> Result<GradientResult> {
    if !(inductance.is_finite() && inductance > 0.0) {
        return Err(Error::domain("L", inductance, "must be finite and > 0"));
    }
    let base = neumann_mutual_inductance(c1, c2, a, cfg)?;
    let m = base.mutual / inductance;
    if m * m >= 1.0 {
        return Err(Error::CouplingBound { m2: m * m });
    }
    let m2_at = |x: V3| -> Result<(f64, f64)> {
        let r = neumann_mutual_inductance(c1, c2, x, cfg)?;
        let m = r.mutual / inductance;
        Ok((m * m, 2.0 * m.abs() * r.quadrature_error / inductance))
    };
    let h = (1e-4 * norm(a)).max(1e-7);
    let mut grad = [0.0; 3];
    let mut error = [0.0; 3];
    for k in 0..3 {
        let diff = |step: f64| -> Result<(f64, f64)> {
            let mut e = [0.0; 3];
            e[k] = step;
            let (fp, ep) = m2_at(add(a, e))?;
            let (fm, em) = m2_at(sub(a, e))?;
            Ok(((fp - fm) / (2.0 * step), (ep + em) / (2.0 * step)))
        };
        let (g1, q1) = diff(h)?;
        let (g2, q2) = diff(0.5 * h)?;
        grad[k] = (4.0 * g2 - g1) / 3.0;
        error[k] = (g2 - g1).abs() / 3.0 + q1.max(q2);
    }
    Ok(GradientResult { grad, error, m })
}

/// Thermal force on `c2` (N) with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    pub force: V3,
    pub error: V3,
    pub h: ThermoResult,
    pub mutual: f64,
}

/// `F = -k_B T H grad(m^2)` for wires with self-inductance `L` (H), resistance
/// `R` (ohm), optional end capacitance `C` (F) at temperature `T` (K).
#[allow(clippy::too_many_arguments)]
pub fn physical_force(
    c1: &Polyline3,
    c2: &Polyline3,
    a: V3,
    inductance: f64,
    resistance: f64,
    capacitance: Option<f64>,
    temperature: f64,
    q: &QuadratureConfig,
    cfg: &GeometryConfig,
) -> Result<ForceResult> {
    let base = neumann_mutual_inductance(c1, c2, a, cfg)?;
    let p = PhysicalParams {
        inductance,
        mutual: base.mutual,
        resistance,
        capacitance,
        temperature,
    };
    p.validate()?;
    let zero = ForceResult {
        force: [0.0; 3],
        error: [0.0; 3],
        h: ThermoResult::exact(0.0),
        mutual: base.mutual,
    };
    if temperature == 0.0 || (resistance == 0.0 && capacitance.is_none()) {
        return Ok(zero);
    }
    let (reduced, _) = match to_reduced(&p) {
        Err(Error::NoReferenceFrequency) => {
            to_reduced_with_reference(&p, BOLTZMANN * temperature / HBAR)?
        }
        r => r?,
    };
    let h = h_factor(&reduced, q)?;
    let g = grad_m2(c1, c2, a, inductance, cfg)?;
    let kt = BOLTZMANN * temperature;
    Ok(ForceResult {
        force: g.grad.map(|x| -kt * h.value * x),
        error: [0, 1, 2]
            .map(|k| kt * (h.abs_error_estimate * g.grad[k].abs() + h.value.abs() * g.error[k])),
        h,
        mutual: base.mutual,
    })
}

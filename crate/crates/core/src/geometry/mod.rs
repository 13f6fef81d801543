//! Closed and periodic plane curves sampled at uniform arc length.
//!
//! Presets are resampled exactly (arc length by Gauss–Legendre quadrature and
//! Newton inversion) and carry analytic curvature. Sampled polygons are
//! interpolated by a chord-length cubic spline, resampled at uniform arc
//! length, and their curvature is the central difference of the unwrapped
//! chord tangent angle, which makes the discrete turning number exact.

mod spline;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use spline::Cubic;

fn default_true() -> bool {
    true
}

fn default_r0() -> f64 {
    1.0
}

fn default_one() -> f64 {
    1.0
}

fn default_period() -> f64 {
    std::f64::consts::TAU
}

/// Description of a boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        #[serde(rename = "R", alias = "r")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Polar curve `r(τ) = R (1 + ε cos(mτ))`.
    PerturbedCircle {
        #[serde(rename = "R", alias = "r")]
        radius: f64,
        amplitude: f64,
        mode: u32,
    },
    /// Convex curve whose curvature has a single maximum `1/r0` with
    /// `κ(s) = 1/r0 - C_p s^{2p} + O(s^{2p+2})` near it.
    ///
    /// The curve is defined by its radius of curvature as a function of the
    /// tangent angle, `ρ(θ) = r0 + A u^p (w^q + ε)` with `u = 1 - cos θ` and
    /// `w = (1 + cos θ)/2`; `ε` closes the curve and `A` fixes `C_p`.
    FlatWell {
        p: u32,
        c_p: f64,
        #[serde(default = "default_r0")]
        r0: f64,
        #[serde(default)]
        q: Option<u32>,
    },
    /// Two half-discs of radius `R` joined by straight segments of length
    /// `ell`. The boundary is only `C^{1,1}`: curvature jumps at the four
    /// junctions, so it is meant for the effective operator, not for layer
    /// bracketing.
    Stadium {
        #[serde(rename = "R", alias = "r")]
        radius: f64,
        ell: f64,
    },
    Sampled {
        points: Vec<[f64; 2]>,
        #[serde(default = "default_true")]
        closed: bool,
    },
    /// Sampled points read from a CSV file with header `x,y`.
    SampledCsv {
        path: PathBuf,
        #[serde(default = "default_true")]
        closed: bool,
    },
}

/// Curve description plus grid size, as read from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    #[serde(flatten)]
    pub spec: CurveSpec,
    #[serde(default)]
    pub n: Option<usize>,
}

impl CurveConfig {
    /// Parses TOML or JSON (chosen by extension, JSON if it starts with `{`
    /// otherwise). Relative CSV paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let mut cfg: CurveConfig = if json {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        };
        if let Some(dir) = path.parent() {
            cfg.resolve_relative(dir);
        }
        Ok(cfg)
    }

    /// Makes a relative CSV path relative to `base`.
    pub fn resolve_relative(&mut self, base: &Path) {
        if let CurveSpec::SampledCsv { path: csv, .. } = &mut self.spec {
            if csv.is_relative() {
                *csv = base.join(&*csv);
            }
        }
    }
}

/// Reads `x,y` points from a CSV file with a header row.
pub fn read_points_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column `{name}`", path.display())))
    };
    let (ix, iy) = (col("x")?, col("y")?);
    let mut pts = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("{}: bad number on data row {}", path.display(), line + 1)))
        };
        pts.push([get(ix)?, get(iy)?]);
    }
    Ok(pts)
}

impl CurveSpec {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive and finite (got {v})")))
            }
        };
        match self {
            CurveSpec::Circle { radius } => pos("R", *radius),
            CurveSpec::Ellipse { a, b } => {
                pos("a", *a)?;
                pos("b", *b)?;
                if a < b {
                    return Err(Error::Invalid(format!("ellipse requires a >= b (got a={a}, b={b})")));
                }
                Ok(())
            }
            CurveSpec::PerturbedCircle { radius, amplitude, mode } => {
                pos("R", *radius)?;
                pos("amplitude", *amplitude)?;
                if *amplitude >= 1.0 {
                    return Err(Error::Invalid(format!("amplitude must be < 1 (got {amplitude})")));
                }
                if *mode == 0 {
                    return Err(Error::Invalid("mode must be at least 1".into()));
                }
                Ok(())
            }
            CurveSpec::FlatWell { p, c_p, r0, q } => {
                pos("C_p", *c_p)?;
                pos("r0", *r0)?;
                if *p == 0 || q == &Some(0) {
                    return Err(Error::Invalid("p and q must be at least 1".into()));
                }
                Ok(())
            }
            CurveSpec::Stadium { radius, ell } => {
                pos("R", *radius)?;
                pos("ell", *ell)
            }
            CurveSpec::Sampled { points, closed } => validate_points(points, *closed).map(|_| ()),
            CurveSpec::SampledCsv { .. } => Ok(()),
        }
    }
}

/// How the arc-length grid closes up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Simple closed curve, nodes `s_i = iL/n`.
    Closed,
    /// One period of an `L`-periodic curve (e.g. a straight strip), nodes `s_i = iL/n`.
    Periodic,
    /// Open arc, nodes `s_i = iL/(n-1)` including both ends.
    Open,
}

/// Curve sampled at uniform arc length.
#[derive(Debug, Clone, Serialize)]
pub struct ArcCurve<T> {
    pub n: usize,
    pub length: T,
    pub kappa: Vec<T>,
    pub position: Vec<[T; 2]>,
    pub topology: Topology,
    /// Set for inputs outside the smooth-boundary class (stadium).
    pub warning: Option<String>,
}

impl<T: Real> ArcCurve<T> {
    pub fn closed(&self) -> bool {
        self.topology != Topology::Open
    }

    pub fn spacing(&self) -> T {
        match self.topology {
            Topology::Open => self.length / T::from_usize_lossy(self.n - 1),
            _ => self.length / T::from_usize_lossy(self.n),
        }
    }

    pub fn s(&self, i: usize) -> T {
        self.spacing() * T::from_usize_lossy(i)
    }

    pub fn kappa_max(&self) -> T {
        self.kappa.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Trapezoidal `∫ κ ds`; equals `2π` for a positively oriented simple closed curve.
    pub fn total_curvature(&self) -> T {
        let h = self.spacing();
        let sum: T = self.kappa.iter().copied().sum();
        match self.topology {
            Topology::Open => (sum - (self.kappa[0] + self.kappa[self.n - 1]) / lit(2.0)) * h,
            _ => sum * h,
        }
    }

    /// Straight periodic strip with the cell's curvature profile.
    pub fn from_cell(cell: &PeriodicCell<T>) -> Self {
        let h = cell.period / T::from_usize_lossy(cell.n);
        ArcCurve {
            n: cell.n,
            length: cell.period,
            kappa: cell.kappa.clone(),
            position: (0..cell.n).map(|i| [h * T::from_usize_lossy(i), T::zero()]).collect(),
            topology: Topology::Periodic,
            warning: None,
        }
    }
}

// ---------------------------------------------------------------------------
// quadrature

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_1,
];

fn gauss5<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> T {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let mut acc = T::zero();
    for k in 0..5 {
        acc = acc + lit::<T>(GL5_W[k]) * f(mid + half * lit(GL5_X[k]));
    }
    acc * half
}

fn gauss5_vec<T: Real, F: Fn(T) -> [T; 2]>(f: &F, a: T, b: T) -> [T; 2] {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let mut acc = [T::zero(); 2];
    for k in 0..5 {
        let v = f(mid + half * lit(GL5_X[k]));
        let w = lit::<T>(GL5_W[k]);
        acc[0] = acc[0] + w * v[0];
        acc[1] = acc[1] + w * v[1];
    }
    [acc[0] * half, acc[1] * half]
}

// ---------------------------------------------------------------------------
// smooth presets parametrized on [0, 2π)

#[derive(Debug, Clone, Copy)]
enum Param<T> {
    Ellipse { a: T, b: T },
    Polar { r: T, eps: T, m: T },
    /// radius of curvature as a function of tangent angle
    Tangent { r0: T, amp: T, p: i32, q: i32, eps: T },
}

impl<T: Real> Param<T> {
    fn rho(r0: T, amp: T, p: i32, q: i32, eps: T, th: T) -> T {
        let u = T::one() - th.cos();
        let w = (T::one() + th.cos()) / lit(2.0);
        r0 + amp * u.powi(p) * (w.powi(q) + eps)
    }

    fn velocity(&self, t: T) -> [T; 2] {
        match *self {
            Param::Ellipse { a, b } => [-a * t.sin(), b * t.cos()],
            Param::Polar { r, eps, m } => {
                let rr = r * (T::one() + eps * (m * t).cos());
                let dr = -r * eps * m * (m * t).sin();
                [dr * t.cos() - rr * t.sin(), dr * t.sin() + rr * t.cos()]
            }
            Param::Tangent { r0, amp, p, q, eps } => {
                let rho = Self::rho(r0, amp, p, q, eps, t);
                [rho * t.cos(), rho * t.sin()]
            }
        }
    }

    fn speed(&self, t: T) -> T {
        match *self {
            Param::Tangent { r0, amp, p, q, eps } => Self::rho(r0, amp, p, q, eps, t),
            _ => {
                let v = self.velocity(t);
                v[0].hypot(v[1])
            }
        }
    }

    fn kappa(&self, t: T) -> T {
        match *self {
            Param::Ellipse { a, b } => {
                let sp = self.speed(t);
                a * b / (sp * sp * sp)
            }
            Param::Polar { r, eps, m } => {
                let rr = r * (T::one() + eps * (m * t).cos());
                let dr = -r * eps * m * (m * t).sin();
                let ddr = -r * eps * m * m * (m * t).cos();
                let g = rr * rr + dr * dr;
                (g + dr * dr - rr * ddr) / (g * g.sqrt())
            }
            Param::Tangent { r0, amp, p, q, eps } => T::one() / Self::rho(r0, amp, p, q, eps, t),
        }
    }

    fn position(&self, t: T) -> Option<[T; 2]> {
        match *self {
            Param::Ellipse { a, b } => Some([a * t.cos(), b * t.sin()]),
            Param::Polar { r, eps, m } => {
                let rr = r * (T::one() + eps * (m * t).cos());
                Some([rr * t.cos(), rr * t.sin()])
            }
            Param::Tangent { .. } => None,
        }
    }
}

/// Closure constant and amplitude of the flat-well profile.
fn flat_well_coefficients(p: i32, q: i32, c_p: f64, r0: f64) -> Result<(f64, f64)> {
    // ρ is a trigonometric polynomial of degree p + q, so the periodic
    // trapezoid rule below is exact.
    let m = 4 * (p + q + 2) as usize;
    let (mut i0, mut i1) = (0.0, 0.0);
    for k in 0..m {
        let th = std::f64::consts::TAU * k as f64 / m as f64;
        let u: f64 = 1.0 - th.cos();
        let w: f64 = (1.0 + th.cos()) / 2.0;
        i0 += u.powi(p) * th.cos();
        i1 += u.powi(p) * w.powi(q) * th.cos();
    }
    let eps = -i1 / i0;
    if !(eps > -1.0) {
        return Err(Error::Invalid(format!("flat_well profile cannot close (eps = {eps})")));
    }
    let amp = c_p * 2f64.powi(p) * r0.powi(2 * p + 2) / (1.0 + eps);
    for k in 0..1024 {
        let th = std::f64::consts::TAU * k as f64 / 1024.0;
        let u: f64 = 1.0 - th.cos();
        let w: f64 = (1.0 + th.cos()) / 2.0;
        if r0 + amp * u.powi(p) * (w.powi(q) + eps) <= 0.0 {
            return Err(Error::Invalid("flat_well radius of curvature not positive".into()));
        }
    }
    Ok((eps, amp))
}

fn resample_param<T: Real>(param: Param<T>, n: usize) -> ArcCurve<T> {
    let two_pi = T::TAU();
    let panels = (8 * n).max(2048);
    let dt = two_pi / T::from_usize_lossy(panels);
    let speed = |t: T| param.speed(t);
    let mut cum = vec![T::zero(); panels + 1];
    for j in 0..panels {
        let a = dt * T::from_usize_lossy(j);
        cum[j + 1] = cum[j] + gauss5(&speed, a, a + dt);
    }
    let length = cum[panels];
    let h = length / T::from_usize_lossy(n);

    let analytic_pos = param.position(T::zero()).is_some();
    let velocity = |t: T| param.velocity(t);
    let mut cum_pos = Vec::new();
    if !analytic_pos {
        cum_pos = vec![[T::zero(); 2]; panels + 1];
        for j in 0..panels {
            let a = dt * T::from_usize_lossy(j);
            let d = gauss5_vec(&velocity, a, a + dt);
            cum_pos[j + 1] = [cum_pos[j][0] + d[0], cum_pos[j][1] + d[1]];
        }
    }

    let mut kappa = Vec::with_capacity(n);
    let mut position = Vec::with_capacity(n);
    let mut j = 0usize;
    for i in 0..n {
        let target = h * T::from_usize_lossy(i);
        while j + 1 < panels && cum[j + 1] <= target {
            j += 1;
        }
        let t0 = dt * T::from_usize_lossy(j);
        let mut t = t0 + (target - cum[j]) / speed(t0);
        for _ in 0..30 {
            let err = cum[j] + gauss5(&speed, t0, t) - target;
            let step = err / speed(t);
            t = t - step;
            if step.abs() <= lit::<T>(4.0) * T::epsilon() * (T::one() + t.abs()) {
                break;
            }
        }
        kappa.push(param.kappa(t));
        let pos = match param.position(t) {
            Some(p) => p,
            None => {
                let d = gauss5_vec(&velocity, t0, t);
                [cum_pos[j][0] + d[0], cum_pos[j][1] + d[1]]
            }
        };
        position.push(pos);
    }
    ArcCurve { n, length, kappa, position, topology: Topology::Closed, warning: None }
}

fn stadium<T: Real>(r: T, ell: T, n: usize) -> ArcCurve<T> {
    let pi = T::PI();
    let half_pi = pi / lit(2.0);
    let arc = pi * r;
    let length = lit::<T>(2.0) * (ell + arc);
    let h = length / T::from_usize_lossy(n);
    let half = ell / lit(2.0);
    // tangent angle, continuous and increasing from 0 to 2π
    let angle = |s: T| -> T {
        let s = s.modulo(length);
        if s <= ell {
            T::zero()
        } else if s <= ell + arc {
            (s - ell) / r
        } else if s <= lit::<T>(2.0) * ell + arc {
            pi
        } else {
            pi + (s - lit::<T>(2.0) * ell - arc) / r
        }
    };
    let point = |s: T| -> [T; 2] {
        if s <= ell {
            [-half + s, -r]
        } else if s <= ell + arc {
            let a = (s - ell) / r - half_pi;
            [half + r * a.cos(), r * a.sin()]
        } else if s <= lit::<T>(2.0) * ell + arc {
            [half - (s - ell - arc), r]
        } else {
            let a = (s - lit::<T>(2.0) * ell - arc) / r + half_pi;
            [-half + r * a.cos(), r * a.sin()]
        }
    };
    let two_pi = T::TAU();
    let mut kappa = Vec::with_capacity(n);
    let mut position = Vec::with_capacity(n);
    for i in 0..n {
        let s = h * T::from_usize_lossy(i);
        let half_h = h / lit(2.0);
        // cell average of κ: turning angle across the dual cell
        let mut lo = angle(s - half_h);
        let hi = angle(s + half_h);
        if s - half_h < T::zero() {
            lo = lo - two_pi;
        }
        let mut turn = hi - lo;
        if turn < T::zero() {
            turn = turn + two_pi;
        }
        kappa.push(turn / h);
        position.push(point(s));
    }
    ArcCurve {
        n,
        length,
        kappa,
        position,
        topology: Topology::Closed,
        warning: Some("stadium boundary is only C^{1,1}; curvature jumps at the arc junctions".into()),
    }
}

// ---------------------------------------------------------------------------
// sampled curves

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let on_seg = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_seg(q1, q2, p1))
        || (d2 == 0.0 && on_seg(q1, q2, p2))
        || (d3 == 0.0 && on_seg(p1, p2, q1))
        || (d4 == 0.0 && on_seg(p1, p2, q2))
}

/// Validates a sampled polygon; returns the points with a duplicated closing
/// point removed and orientation made counter-clockwise for closed input.
fn validate_points(points: &[[f64; 2]], closed: bool) -> Result<Vec<[f64; 2]>> {
    let mut pts = points.to_vec();
    if closed && pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
        pts.pop();
    }
    if pts.len() < 16 {
        return Err(Error::Invalid(format!("sampled curve needs at least 16 points (got {})", pts.len())));
    }
    if pts.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Invalid("sampled curve has non-finite coordinates".into()));
    }
    let m = pts.len();
    let segs = if closed { m } else { m - 1 };
    for i in 0..segs {
        if pts[i] == pts[(i + 1) % m] {
            return Err(Error::Invalid(format!("consecutive sampled points {i} and {} coincide", (i + 1) % m)));
        }
    }
    let bbox = |i: usize| {
        let (a, b) = (pts[i], pts[(i + 1) % m]);
        (a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1]))
    };
    let boxes: Vec<_> = (0..segs).map(bbox).collect();
    for i in 0..segs {
        for j in i + 2..segs {
            if closed && i == 0 && j == segs - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]) {
                return Err(Error::Invalid(format!("sampled curve self-intersects (segments {i} and {j})")));
            }
        }
    }
    if closed {
        let area: f64 = (0..m).map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        }).sum();
        if area < 0.0 {
            pts.reverse();
        }
    }
    Ok(pts)
}

fn resample_sampled<T: Real>(points: &[[f64; 2]], closed: bool, n: usize) -> Result<ArcCurve<T>> {
    let pts = validate_points(points, closed)?;
    let m = pts.len();
    let segs = if closed { m } else { m - 1 };
    let mut knots = vec![T::zero(); segs + 1];
    for i in 0..segs {
        let (a, b) = (pts[i], pts[(i + 1) % m]);
        knots[i + 1] = knots[i] + lit::<T>((b[0] - a[0]).hypot(b[1] - a[1]));
    }
    let xs: Vec<T> = pts.iter().map(|p| lit(p[0])).collect();
    let ys: Vec<T> = pts.iter().map(|p| lit(p[1])).collect();
    let sx = Cubic::new(knots.clone(), xs, closed)?;
    let sy = Cubic::new(knots, ys, closed)?;

    let speed_on = |seg: usize, t: T| {
        let (_, dx) = sx.eval(seg, t);
        let (_, dy) = sy.eval(seg, t);
        dx.hypot(dy)
    };
    let mut cum = vec![T::zero(); segs + 1];
    for k in 0..segs {
        let hk = sx.knot(k + 1) - sx.knot(k);
        let f = |t: T| speed_on(k, t);
        let mid = hk / lit(2.0);
        cum[k + 1] = cum[k] + gauss5(&f, T::zero(), mid) + gauss5(&f, mid, hk);
    }
    let length = cum[segs];
    let (count, h) = if closed {
        (n, length / T::from_usize_lossy(n))
    } else {
        (n, length / T::from_usize_lossy(n - 1))
    };
    let mut position = Vec::with_capacity(count);
    let mut k = 0usize;
    for i in 0..count {
        let target = (h * T::from_usize_lossy(i)).min(length);
        while k + 1 < sx.segments() && cum[k + 1] <= target {
            k += 1;
        }
        let hk = sx.knot(k + 1) - sx.knot(k);
        let f = |t: T| speed_on(k, t);
        let mut t = (target - cum[k]) / speed_on(k, T::zero());
        for _ in 0..30 {
            let err = cum[k] + gauss5(&f, T::zero(), t) - target;
            let step = err / f(t);
            t = (t - step).max(T::zero()).min(hk);
            if step.abs() <= lit::<T>(4.0) * T::epsilon() * (T::one() + hk) {
                break;
            }
        }
        position.push([sx.eval(k, t).0, sy.eval(k, t).0]);
    }

    // chord tangent angles between consecutive nodes
    let chords = if closed { count } else { count - 1 };
    let theta: Vec<T> = (0..chords)
        .map(|i| {
            let (a, b) = (position[i], position[(i + 1) % count]);
            (b[1] - a[1]).atan2(b[0] - a[0])
        })
        .collect();
    let wrap = |d: T| {
        let pi = T::PI();
        let mut d = d;
        while d > pi {
            d = d - T::TAU();
        }
        while d <= -pi {
            d = d + T::TAU();
        }
        d
    };
    let mut kappa = vec![T::zero(); count];
    if closed {
        for i in 0..count {
            kappa[i] = wrap(theta[i] - theta[(i + count - 1) % count]) / h;
        }
    } else {
        for i in 1..count - 1 {
            kappa[i] = wrap(theta[i] - theta[i - 1]) / h;
        }
        kappa[0] = lit::<T>(2.0) * kappa[1] - kappa[2];
        kappa[count - 1] = lit::<T>(2.0) * kappa[count - 2] - kappa[count - 3];
    }
    Ok(ArcCurve {
        n: count,
        length,
        kappa,
        position,
        topology: if closed { Topology::Closed } else { Topology::Open },
        warning: None,
    })
}

/// Builds the uniform arc-length sampling of `spec` with `n ≥ 32` nodes.
pub fn build_arc_curve<T: Real>(spec: &CurveSpec, n: usize) -> Result<ArcCurve<T>> {
    if n < 32 {
        return Err(Error::Invalid(format!("curve grid needs n >= 32 (got {n})")));
    }
    spec.validate()?;
    Ok(match spec {
        CurveSpec::Circle { radius } => {
            let r: T = lit(*radius);
            let step = T::TAU() / T::from_usize_lossy(n);
            ArcCurve {
                n,
                length: T::TAU() * r,
                kappa: vec![T::one() / r; n],
                position: (0..n)
                    .map(|i| {
                        let a = step * T::from_usize_lossy(i);
                        [r * a.cos(), r * a.sin()]
                    })
                    .collect(),
                topology: Topology::Closed,
                warning: None,
            }
        }
        CurveSpec::Ellipse { a, b } => resample_param(Param::Ellipse { a: lit(*a), b: lit(*b) }, n),
        CurveSpec::PerturbedCircle { radius, amplitude, mode } => resample_param(
            Param::Polar { r: lit(*radius), eps: lit(*amplitude), m: lit(*mode as f64) },
            n,
        ),
        CurveSpec::FlatWell { p, c_p, r0, q } => {
            let p = *p as i32;
            let q = q.map(|q| q as i32).unwrap_or(p + 2);
            let (eps, amp) = flat_well_coefficients(p, q, *c_p, *r0)?;
            resample_param(Param::Tangent { r0: lit(*r0), amp: lit(amp), p, q, eps: lit(eps) }, n)
        }
        CurveSpec::Stadium { radius, ell } => stadium(lit(*radius), lit(*ell), n),
        CurveSpec::Sampled { points, closed } => resample_sampled(points, *closed, n)?,
        CurveSpec::SampledCsv { path, closed } => resample_sampled(&read_points_csv(path)?, *closed, n)?,
    })
}

// ---------------------------------------------------------------------------
// curvature analysis

/// One local maximum of the curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakSite<T> {
    pub node: usize,
    pub s0: T,
    pub kappa: T,
    pub kappa_dd: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvaturePeak<T> {
    pub s0: T,
    pub kappa_max: T,
    /// `κ''(s₀)`; zero when `flat` is set.
    pub kappa_dd: T,
    /// Plateau of at least three nodes at the maximum.
    pub flat: bool,
    /// All maxima within `1e-9` (relative) of `kappa_max`, ordered by node.
    pub maxima: Vec<PeakSite<T>>,
}

/// Least-squares quartic through `κ` at nodes `i-4..=i+4`; returns the
/// coefficients in the local variable `(s - s_i)/h`.
fn quartic_fit<T: Real>(vals: &[T; 9]) -> [T; 5] {
    let mut ata = [[T::zero(); 5]; 5];
    let mut atb = [T::zero(); 5];
    for (k, &v) in vals.iter().enumerate() {
        let x = T::from_usize_lossy(k) - lit(4.0);
        let mut pw = [T::one(); 5];
        for d in 1..5 {
            pw[d] = pw[d - 1] * x;
        }
        for r in 0..5 {
            atb[r] = atb[r] + pw[r] * v;
            for c in 0..5 {
                ata[r][c] = ata[r][c] + pw[r] * pw[c];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..5 {
        let piv = (col..5).max_by(|&a, &b| ata[a][col].abs().partial_cmp(&ata[b][col].abs()).unwrap()).unwrap();
        ata.swap(col, piv);
        atb.swap(col, piv);
        for r in col + 1..5 {
            let f = ata[r][col] / ata[col][col];
            for c in col..5 {
                ata[r][c] = ata[r][c] - f * ata[col][c];
            }
            atb[r] = atb[r] - f * atb[col];
        }
    }
    let mut c = [T::zero(); 5];
    for r in (0..5).rev() {
        let mut acc = atb[r];
        for k in r + 1..5 {
            acc = acc - ata[r][k] * c[k];
        }
        c[r] = acc / ata[r][r];
    }
    c
}

/// Locates the curvature maximum, refines it by quadratic interpolation and
/// estimates `κ''` there from a local quartic fit.
pub fn curvature_peak<T: Real>(curve: &ArcCurve<T>) -> Result<CurvaturePeak<T>> {
    let n = curve.n;
    let kap = &curve.kappa;
    let closed = curve.closed();
    let h = curve.spacing();
    let kmax = curve.kappa_max();
    let at = |i: isize| -> Option<T> {
        if closed {
            Some(kap[i.rem_euclid(n as isize) as usize])
        } else if i >= 0 && (i as usize) < n {
            Some(kap[i as usize])
        } else {
            None
        }
    };

    // plateau: at least three consecutive nodes within 1e-12 of the maximum
    let near = |i: isize| at(i).is_some_and(|v| kmax - v <= lit(1e-12));
    for i in 0..n as isize {
        if near(i) && near(i + 1) && near(i + 2) {
            let site = PeakSite { node: i as usize, s0: curve.s(i as usize), kappa: kmax, kappa_dd: T::zero() };
            return Ok(CurvaturePeak { s0: site.s0, kappa_max: kmax, kappa_dd: T::zero(), flat: true, maxima: vec![site] });
        }
    }

    let rel = lit::<T>(1e-9) * T::one().max(kmax.abs());
    let mut maxima = Vec::new();
    for i in 0..n as isize {
        let (Some(l), Some(c), Some(r)) = (at(i - 1), at(i), at(i + 1)) else { continue };
        if c < l || c < r || kmax - c > rel {
            continue;
        }
        let mut vals = [T::zero(); 9];
        let mut ok = true;
        for (k, v) in vals.iter_mut().enumerate() {
            match at(i + k as isize - 4) {
                Some(x) => *v = x,
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let curv = l - lit::<T>(2.0) * c + r;
        let dx = if curv < T::zero() { (l - r) / (lit::<T>(2.0) * curv) } else { T::zero() };
        let cf = quartic_fit(&vals);
        let kdd = (lit::<T>(2.0) * cf[2] + lit::<T>(6.0) * cf[3] * dx + lit::<T>(12.0) * cf[4] * dx * dx) / (h * h);
        let mut s0 = curve.s(i.rem_euclid(n as isize) as usize) + dx * h;
        if closed {
            s0 = s0.modulo(curve.length);
        }
        maxima.push(PeakSite { node: i as usize, s0, kappa: c, kappa_dd: kdd });
    }
    let Some(first) = maxima.iter().copied().max_by(|a, b| a.kappa.partial_cmp(&b.kappa).unwrap().then(b.node.cmp(&a.node)))
    else {
        return Err(Error::Invalid("curvature has no interior maximum on the grid".into()));
    };
    Ok(CurvaturePeak { s0: first.s0, kappa_max: kmax, kappa_dd: first.kappa_dd, flat: false, maxima })
}

/// Curvature of a closed or periodic curve at `m` uniform arc-length nodes,
/// interpolated by a periodic cubic spline when `m` differs from `curve.n`.
pub fn resample_kappa<T: Real>(curve: &ArcCurve<T>, m: usize) -> Result<Vec<T>> {
    if !curve.closed() {
        return Err(Error::Invalid("curvature resampling needs a closed or periodic curve".into()));
    }
    if m == curve.n {
        return Ok(curve.kappa.clone());
    }
    let h = curve.spacing();
    let knots: Vec<T> = (0..=curve.n).map(|i| h * T::from_usize_lossy(i)).collect();
    let sp = Cubic::new(knots, curve.kappa.clone(), true)?;
    let hm = curve.length / T::from_usize_lossy(m);
    Ok((0..m)
        .map(|i| {
            let s = hm * T::from_usize_lossy(i);
            let seg = (s / h).floor().to_usize().unwrap_or(0).min(curve.n - 1);
            sp.eval(seg, s - h * T::from_usize_lossy(seg)).0
        })
        .collect())
}

/// Largest `δ` with `1 - tκ(s) ≥ 1/2` for all `t ∈ [0, δ]`; `+∞` when `κ ≤ 0`.
pub fn min_layer_width<T: Real>(curve: &ArcCurve<T>) -> T {
    let kmax = curve.kappa_max();
    if kmax > T::zero() {
        T::one() / (lit::<T>(2.0) * kmax)
    } else {
        T::infinity()
    }
}

// ---------------------------------------------------------------------------
// periodic cells

/// Curvature profile on one period of a periodic boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellSpec {
    /// `κ ≡ 0`.
    Free {
        #[serde(default = "default_period")]
        period: f64,
    },
    Constant {
        c: f64,
        #[serde(default = "default_period")]
        period: f64,
    },
    /// `κ(s) = mean + amplitude·cos(2πs/L)`.
    Cosine {
        #[serde(default = "default_one")]
        mean: f64,
        #[serde(default = "default_one")]
        amplitude: f64,
        #[serde(default = "default_period")]
        period: f64,
    },
    /// Curvature samples at `s_i = iL/m`, interpolated by a periodic cubic spline.
    Samples {
        kappa: Vec<f64>,
        period: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    #[serde(flatten)]
    pub spec: CellSpec,
    #[serde(default)]
    pub n: Option<usize>,
}

impl CellConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if json {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicCell<T> {
    pub period: T,
    pub kappa: Vec<T>,
    pub n: usize,
}

impl<T: Real> PeriodicCell<T> {
    pub fn spacing(&self) -> T {
        self.period / T::from_usize_lossy(self.n)
    }
}

pub fn build_cell<T: Real>(spec: &CellSpec, n: usize) -> Result<PeriodicCell<T>> {
    if n < 8 {
        return Err(Error::Invalid(format!("cell grid needs n >= 8 (got {n})")));
    }
    let period = match spec {
        CellSpec::Free { period }
        | CellSpec::Constant { period, .. }
        | CellSpec::Cosine { period, .. }
        | CellSpec::Samples { period, .. } => *period,
    };
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Invalid(format!("period must be positive (got {period})")));
    }
    let lp: T = lit(period);
    let h = lp / T::from_usize_lossy(n);
    let kappa: Vec<T> = match spec {
        CellSpec::Free { .. } => vec![T::zero(); n],
        CellSpec::Constant { c, .. } => {
            if !c.is_finite() {
                return Err(Error::Invalid("constant curvature must be finite".into()));
            }
            vec![lit(*c); n]
        }
        CellSpec::Cosine { mean, amplitude, .. } => (0..n)
            .map(|i| {
                let s = h * T::from_usize_lossy(i);
                lit::<T>(*mean) + lit::<T>(*amplitude) * (T::TAU() * s / lp).cos()
            })
            .collect(),
        CellSpec::Samples { kappa, .. } => {
            let m = kappa.len();
            if m < 4 || kappa.iter().any(|k| !k.is_finite()) {
                return Err(Error::Invalid("cell samples need at least 4 finite values".into()));
            }
            if m == n {
                kappa.iter().map(|&k| lit(k)).collect()
            } else {
                let hm = lp / T::from_usize_lossy(m);
                let knots: Vec<T> = (0..=m).map(|i| hm * T::from_usize_lossy(i)).collect();
                let sp = Cubic::new(knots, kappa.iter().map(|&k| lit(k)).collect(), true)?;
                (0..n)
                    .map(|i| {
                        let s = h * T::from_usize_lossy(i);
                        let seg = ((s / hm).floor().to_usize().unwrap_or(0)).min(m - 1);
                        sp.eval(seg, s - hm * T::from_usize_lossy(seg)).0
                    })
                    .collect()
            }
        }
    };
    Ok(PeriodicCell { period: lp, kappa, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn ellipse_points(a: f64, b: f64, m: usize) -> Vec<[f64; 2]> {
        (0..m)
            .map(|i| {
                let t = TAU * i as f64 / m as f64;
                [a * t.cos(), b * t.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_preset() {
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Circle { radius: 1.0 }, 256).unwrap();
        assert!((c.length - TAU).abs() < 1e-12);
        assert!(c.kappa.iter().all(|&k| (k - 1.0).abs() < 1e-15));
        assert!((min_layer_width(&c) - 0.5).abs() < 1e-15);
        let pk = curvature_peak(&c).unwrap();
        assert!(pk.flat);
        assert_eq!(pk.kappa_dd, 0.0);
    }

    #[test]
    fn ellipse_preset() {
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 512).unwrap();
        assert!((c.kappa_max() - 2.0).abs() < 1e-12);
        assert!((c.total_curvature() - TAU).abs() < 1e-6);
        assert!((min_layer_width(&c) - 0.25).abs() < 1e-12);
        // perimeter of the (2,1) ellipse
        assert!((c.length - 9.688_448_220_547_675).abs() < 1e-10);
        let pk = curvature_peak(&c).unwrap();
        assert!(!pk.flat);
        assert_eq!(pk.maxima.len(), 2);
        assert!((pk.kappa_max - 2.0).abs() < 1e-12);
        // κ(τ) = 2/(4 sin² + cos²)^{3/2}, ds/dτ = 1 at τ = 0: κ''(s₀) = -18
        assert!((pk.kappa_dd / -18.0 - 1.0).abs() < 1e-3, "{}", pk.kappa_dd);
        let fine: ArcCurve<f64> = build_arc_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 4096).unwrap();
        let kdd = curvature_peak(&fine).unwrap().kappa_dd;
        assert!((kdd / -18.0 - 1.0).abs() < 1e-6, "{kdd}");
        assert!((pk.maxima[1].s0 - c.length / 2.0).abs() < 1e-9);
        // positions sit on the ellipse and are equally spaced in arc length
        for p in &c.position {
            assert!((p[0] * p[0] / 4.0 + p[1] * p[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn turning_number_for_every_closed_preset() {
        let specs = [
            CurveSpec::Circle { radius: 2.0 },
            CurveSpec::Ellipse { a: 3.0, b: 1.0 },
            CurveSpec::PerturbedCircle { radius: 1.0, amplitude: 0.1, mode: 3 },
            CurveSpec::FlatWell { p: 2, c_p: 1.0, r0: 1.0, q: None },
            CurveSpec::Stadium { radius: 1.0, ell: 2.0 },
        ];
        for spec in &specs {
            let n = 256;
            let c: ArcCurve<f64> = build_arc_curve(spec, n).unwrap();
            let tol = 10.0 * (c.length / n as f64).powi(2);
            assert!((c.total_curvature() / TAU - 1.0).abs() <= tol, "{spec:?}: {}", c.total_curvature());
            assert!(min_layer_width(&c) > 0.0);
            assert!(c.kappa.iter().all(|k| k.is_finite()));
        }
    }

    #[test]
    fn flat_well_closes_and_has_prescribed_quartic_maximum() {
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::FlatWell { p: 2, c_p: 1.0, r0: 1.0, q: None }, 4096).unwrap();
        let first = c.position[0];
        let last = c.position[c.n - 1];
        let h = c.spacing();
        assert!(((last[0] - first[0]).hypot(last[1] - first[1]) - h).abs() < 1e-6);
        assert!((c.kappa[0] - 1.0).abs() < 1e-14);
        assert_eq!(c.kappa_max(), c.kappa[0]);
        // κ(s) ≈ 1 - s⁴ near the maximum
        for i in [5usize, 10, 20] {
            let s = c.s(i);
            let rel = (1.0 - c.kappa[i]) / s.powi(4);
            assert!((rel - 1.0).abs() < 3.0 * s * s, "s={s}: {rel}");
        }
    }

    #[test]
    fn perturbed_circle_peak_matches_fine_grid() {
        let spec = CurveSpec::PerturbedCircle { radius: 1.0, amplitude: 0.1, mode: 2 };
        let c: ArcCurve<f64> = build_arc_curve(&spec, 256).unwrap();
        let fine: ArcCurve<f64> = build_arc_curve(&spec, 256 * 16).unwrap();
        let pk = curvature_peak(&c).unwrap();
        let hf = fine.spacing();
        let i = (0..fine.n).max_by(|&a, &b| fine.kappa[a].partial_cmp(&fine.kappa[b]).unwrap()).unwrap();
        let k = |j: isize| fine.kappa[j.rem_euclid(fine.n as isize) as usize];
        let i = i as isize;
        let kdd_fine = (k(i - 1) - 2.0 * k(i) + k(i + 1)) / (hf * hf);
        assert!((pk.kappa_max / fine.kappa[i as usize] - 1.0).abs() < 1e-2);
        assert!((pk.kappa_dd / kdd_fine - 1.0).abs() < 1e-2, "{} vs {kdd_fine}", pk.kappa_dd);
        assert!(pk.kappa_dd < 0.0);
    }

    #[test]
    fn sampled_ellipse_curvature_converges_at_second_order() {
        let pts = ellipse_points(2.0, 1.0, 8192);
        let spec = CurveSpec::Sampled { points: pts, closed: true };
        let exact = |c: &ArcCurve<f64>| -> f64 {
            c.position
                .iter()
                .zip(&c.kappa)
                .map(|(p, k)| {
                    let t = (p[1]).atan2(p[0] / 2.0);
                    let sp = (4.0 * t.sin().powi(2) + t.cos().powi(2)).sqrt();
                    (k - 2.0 / sp.powi(3)).abs()
                })
                .fold(0.0, f64::max)
        };
        let c1: ArcCurve<f64> = build_arc_curve(&spec, 64).unwrap();
        let c2: ArcCurve<f64> = build_arc_curve(&spec, 128).unwrap();
        let ratio = exact(&c1) / exact(&c2);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        assert!((c1.total_curvature() - TAU).abs() < 1e-9);
        assert!((c1.length - 9.688_448_220_547_675).abs() < 1e-7);
    }

    #[test]
    fn sampled_clockwise_input_is_reoriented() {
        let mut pts = ellipse_points(1.5, 1.0, 64);
        pts.reverse();
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Sampled { points: pts, closed: true }, 64).unwrap();
        assert!((c.total_curvature() - TAU).abs() < 1e-9);
    }

    #[test]
    fn sampled_rejections() {
        let few = ellipse_points(1.0, 1.0, 10);
        assert!(build_arc_curve::<f64>(&CurveSpec::Sampled { points: few, closed: true }, 64).is_err());
        let mut dup = ellipse_points(1.0, 1.0, 40);
        dup[5] = dup[4];
        assert!(build_arc_curve::<f64>(&CurveSpec::Sampled { points: dup, closed: true }, 64).is_err());
        // figure eight
        let eight: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let t = TAU * i as f64 / 64.0;
                [t.sin(), (2.0 * t).sin() / 2.0]
            })
            .collect();
        let err = build_arc_curve::<f64>(&CurveSpec::Sampled { points: eight, closed: true }, 64).unwrap_err();
        assert!(err.to_string().contains("self-intersect"));
        assert!(build_arc_curve::<f64>(&CurveSpec::Circle { radius: 1.0 }, 16).is_err());
        assert!(build_arc_curve::<f64>(&CurveSpec::Ellipse { a: 1.0, b: 2.0 }, 64).is_err());
        assert!(build_arc_curve::<f64>(&CurveSpec::Circle { radius: -1.0 }, 64).is_err());
    }

    #[test]
    fn concave_open_arc_has_infinite_width() {
        // clockwise arc: negative curvature throughout
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = PI * i as f64 / 39.0;
                [t.cos(), -t.sin()]
            })
            .collect();
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Sampled { points: pts, closed: false }, 64).unwrap();
        assert!(c.kappa.iter().all(|&k| k < 0.0));
        assert!(min_layer_width(&c).is_infinite());
        let cell: PeriodicCell<f64> = build_cell(&CellSpec::Free { period: 1.0 }, 32).unwrap();
        assert!(min_layer_width(&ArcCurve::from_cell(&cell)).is_infinite());
    }

    #[test]
    fn kappa_resampling() {
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 512).unwrap();
        let fine: ArcCurve<f64> = build_arc_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 1024).unwrap();
        let r = resample_kappa(&c, 1024).unwrap();
        for (a, b) in r.iter().zip(&fine.kappa) {
            assert!((a - b).abs() < 1e-5);
        }
        assert_eq!(resample_kappa(&c, 512).unwrap(), c.kappa);
    }

    #[test]
    fn stadium_has_plateau() {
        let c: ArcCurve<f64> = build_arc_curve(&CurveSpec::Stadium { radius: 1.0, ell: 2.0 }, 512).unwrap();
        assert!(c.warning.is_some());
        let pk = curvature_peak(&c).unwrap();
        assert!(pk.flat);
        assert!((pk.kappa_max - 1.0).abs() < 1e-12);
        assert!((c.length - (4.0 + TAU)).abs() < 1e-12);
    }

    #[test]
    fn config_parsing() {
        let cfg: CurveConfig = toml::from_str("kind = \"ellipse\"\na = 2.0\nb = 1.0\nn = 512\n").unwrap();
        assert_eq!(cfg.spec, CurveSpec::Ellipse { a: 2.0, b: 1.0 });
        assert_eq!(cfg.n, Some(512));
        let cfg: CurveConfig = serde_json::from_str(r#"{"kind":"circle","R":1.5}"#).unwrap();
        assert_eq!(cfg.spec, CurveSpec::Circle { radius: 1.5 });
        let cell: CellConfig = toml::from_str("kind = \"cosine\"\n").unwrap();
        assert_eq!(cell.spec, CellSpec::Cosine { mean: 1.0, amplitude: 1.0, period: TAU });
    }

    #[test]
    fn csv_points_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        let mut text = String::from("x,y\n");
        for p in ellipse_points(2.0, 1.0, 200) {
            text.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        std::fs::write(&path, text).unwrap();
        let cfg_path = dir.path().join("curve.toml");
        std::fs::write(&cfg_path, "kind = \"sampled_csv\"\npath = \"pts.csv\"\n").unwrap();
        let cfg = CurveConfig::load(&cfg_path).unwrap();
        let c: ArcCurve<f64> = build_arc_curve(&cfg.spec, 128).unwrap();
        assert!((c.kappa_max() - 2.0).abs() < 0.02);
    }

    #[test]
    fn cells() {
        let cos: PeriodicCell<f64> = build_cell(&CellSpec::Cosine { mean: 1.0, amplitude: 1.0, period: TAU }, 64).unwrap();
        assert!((cos.kappa[0] - 2.0).abs() < 1e-15);
        assert!(cos.kappa[32].abs() < 1e-15);
        let samples: Vec<f64> = (0..16).map(|i| (TAU * i as f64 / 16.0).cos()).collect();
        let sp: PeriodicCell<f64> = build_cell(&CellSpec::Samples { kappa: samples, period: 3.0 }, 64).unwrap();
        for i in 0..64 {
            assert!((sp.kappa[i] - (TAU * i as f64 / 64.0).cos()).abs() < 2e-3);
        }
        assert!(build_cell::<f64>(&CellSpec::Free { period: -1.0 }, 64).is_err());
    }

    #[test]
    fn single_precision_ellipse() {
        let c: ArcCurve<f32> = build_arc_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
        assert!((c.kappa_max() - 2.0).abs() < 1e-5);
        assert!((c.total_curvature() - std::f32::consts::TAU).abs() < 1e-4);
    }
}

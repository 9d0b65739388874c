//! Euclidean and Lorentz-model geometry.
//!
//! The hyperboloid of curvature `-c` is the upper sheet
//! `{x in R^(1+d) : <x,x>_L = -1/c, x_0 > 0}` with the Lorentzian inner
//! product `<x,y>_L = -x_0 y_0 + sum_k x_k y_k`. Its origin is
//! `o = (1/sqrt(c), 0, ..., 0)`.
//!
//! All geometry runs in `f64` regardless of how the slots were stored.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{self, pairwise_sum_by};

/// Below this value of `sqrt(c) * |s|`, `sinh(r) / r` is replaced by `1 + r^2 / 6`.
const SMALL_RADIUS: f64 = 1e-7;

/// `-c <x,y>_L` at or above which the arccosh form of the distance is used.
/// Below it the chordal form `2 asinh(sqrt(c) |x - y|_L / 2) / sqrt(c)` keeps
/// full relative precision for nearby points.
const ARCCOSH_SWITCH: f64 = 2.0;

/// Tolerance on `|c <x,x>_L + 1|` accepted by [`LorentzPoint::new`], relative to
/// the magnitude `max(1, c x_0^2)` of the terms that cancel in that expression.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-6;

/// Positive, finite curvature magnitude `c` of a hyperboloid with sectional curvature `-c`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Curvature(f64);

impl Curvature {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Curvature(c))
        } else {
            Err(Error::InvalidCurvature(c))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which geometry a measurement is taken in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ManifoldSpec {
    Euclidean,
    Lorentz(Curvature),
}

impl ManifoldSpec {
    pub fn lorentz(c: f64) -> Result<Self> {
        Curvature::new(c).map(ManifoldSpec::Lorentz)
    }

    pub fn curvature(&self) -> Option<Curvature> {
        match self {
            ManifoldSpec::Euclidean => None,
            ManifoldSpec::Lorentz(c) => Some(*c),
        }
    }

    /// Euclidean plus Lorentz at `c = 0.2, 0.5, 1.0`.
    pub fn default_grid() -> Vec<ManifoldSpec> {
        let mut grid = vec![ManifoldSpec::Euclidean];
        for c in [0.2, 0.5, 1.0] {
            grid.push(ManifoldSpec::Lorentz(Curvature(c)));
        }
        grid
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldSpec::Euclidean => f.write_str("euclidean"),
            ManifoldSpec::Lorentz(c) => write!(f, "lorentz:{c}"),
        }
    }
}

impl FromStr for ManifoldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("euclidean") {
            return Ok(ManifoldSpec::Euclidean);
        }
        match s.split_once(':') {
            Some((kind, c)) if kind.eq_ignore_ascii_case("lorentz") => {
                let c: f64 = c.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse curvature in {s:?}"))
                })?;
                ManifoldSpec::lorentz(c)
            }
            _ => Err(Error::InvalidParameter(format!(
                "unknown manifold {s:?}; expected `euclidean` or `lorentz:<c>`"
            ))),
        }
    }
}

impl Serialize for ManifoldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ManifoldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite, nonempty coordinate vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanVector(Vec<f64>);

impl EuclideanVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        if values.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one component".into()));
        }
        Ok(EuclideanVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        numerics::norm(&self.0)
    }
}

impl AsRef<[f64]> for EuclideanVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A point on the hyperboloid of curvature `-c`, stored as `(x_0, x_1, ..., x_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPoint {
    coords: Vec<f64>,
    curvature: Curvature,
}

impl LorentzPoint {
    /// Validates the hyperboloid constraint and the upper-sheet condition.
    pub fn new(coords: Vec<f64>, curvature: Curvature) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "Lorentz point needs at least 2 components, got {}",
                coords.len()
            )));
        }
        check_finite(&coords)?;
        let point = LorentzPoint { coords, curvature };
        let c = curvature.get();
        let residual = point.constraint_residual();
        let scale = (c * point.time() * point.time()).max(1.0);
        if residual.abs() > CONSTRAINT_TOLERANCE * scale {
            return Err(Error::InvalidInput(format!(
                "point violates c<x,x>_L = -1 (residual {residual:e})"
            )));
        }
        if point.time() * curvature.sqrt() < 1.0 - CONSTRAINT_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "x_0 = {} is below 1/sqrt(c); point is not on the upper sheet",
                point.time()
            )));
        }
        Ok(point)
    }

    /// The hyperboloid origin `(1/sqrt(c), 0, ..., 0)` with `dim` spatial components.
    pub fn origin(dim: usize, curvature: Curvature) -> Self {
        let mut coords = vec![0.0; dim + 1];
        coords[0] = 1.0 / curvature.sqrt();
        LorentzPoint { coords, curvature }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// Time component `x_0`.
    pub fn time(&self) -> f64 {
        self.coords[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.coords[1..]
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `c <x,x>_L + 1`; zero for an exact hyperboloid point.
    pub fn constraint_residual(&self) -> f64 {
        self.curvature.get() * minkowski_dot(&self.coords, &self.coords) + 1.0
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidInput(format!(
            "component {i} is not finite ({})",
            values[i]
        ))),
        None => Ok(()),
    }
}

#[inline]
pub(crate) fn minkowski_dot(x: &[f64], y: &[f64]) -> f64 {
    let spatial = pairwise_sum_by(x.len() - 1, |k| x[k + 1] * y[k + 1]);
    spatial - x[0] * y[0]
}

/// Lorentzian inner product `-x_0 y_0 + sum_k x_k y_k` of two raw `(1+d)`-vectors.
pub fn lorentz_inner(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("Lorentz vectors need at least 2 components".into()));
    }
    check_finite(x)?;
    check_finite(y)?;
    Ok(minkowski_dot(x, y))
}

/// Exponential map at the hyperboloid origin.
///
/// `s` is taken as a tangent vector at `o` and is not normalized first.
pub fn exp_map_origin(s: &[f64], curvature: f64) -> Result<LorentzPoint> {
    let curvature = Curvature::new(curvature)?;
    if s.is_empty() {
        return Err(Error::InvalidInput("tangent vector must be nonempty".into()));
    }
    check_finite(s)?;
    let coords = exp_map_coords(s, curvature.sqrt());
    if !coords[0].is_finite() {
        return Err(Error::InvalidInput(format!(
            "tangent norm {} overflows the hyperboloid at c = {curvature}",
            numerics::norm(s)
        )));
    }
    Ok(LorentzPoint { coords, curvature })
}

pub(crate) fn exp_map_coords(s: &[f64], sqrt_c: f64) -> Vec<f64> {
    let r = numerics::norm(s);
    let a = sqrt_c * r;
    // sinh(a) s / (sqrt(c) |s|) == (sinh(a) / a) s
    let sinhc = if a < SMALL_RADIUS {
        1.0 + a * a / 6.0
    } else {
        a.sinh() / a
    };
    let mut coords = Vec::with_capacity(s.len() + 1);
    coords.push(a.cosh() / sqrt_c);
    coords.extend(s.iter().map(|v| sinhc * v));
    coords
}

/// Geodesic distance between two points on the same hyperboloid.
pub fn lorentz_distance(x: &LorentzPoint, y: &LorentzPoint, curvature: f64) -> Result<f64> {
    let c = Curvature::new(curvature)?;
    if x.curvature != c || y.curvature != c {
        return Err(Error::InvalidInput(format!(
            "curvature mismatch: points at c = {} and c = {}, distance requested at c = {c}",
            x.curvature, y.curvature
        )));
    }
    if x.coords.len() != y.coords.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(distance_coords(&x.coords, &y.coords, c.get()))
}

/// `(1/sqrt(c)) arccosh(-c <x,y>_L)` evaluated without the precision loss of
/// arccosh near 1.
pub(crate) fn distance_coords(x: &[f64], y: &[f64], c: f64) -> f64 {
    let sqrt_c = c.sqrt();
    let arg = -c * minkowski_dot(x, y);
    if arg >= ARCCOSH_SWITCH {
        return arg.max(1.0).acosh() / sqrt_c;
    }
    // <x-y, x-y>_L = (4/c) sinh^2(sqrt(c) d / 2)
    let dt = x[0] - y[0];
    let spatial = pairwise_sum_by(x.len() - 1, |k| {
        let d = x[k + 1] - y[k + 1];
        d * d
    });
    let chord_sq = (spatial - dt * dt).max(0.0);
    2.0 * (0.5 * sqrt_c * chord_sq.sqrt()).asinh() / sqrt_c
}

/// Distance from the origin to a raw hyperboloid point. Only `x_0` enters.
pub(crate) fn origin_distance_coords(x: &[f64], c: f64) -> f64 {
    let sqrt_c = c.sqrt();
    let arg = sqrt_c * x[0];
    if arg >= ARCCOSH_SWITCH {
        return arg.acosh() / sqrt_c;
    }
    // spatial norm = sinh(sqrt(c) d) / sqrt(c)
    let spatial = numerics::norm(&x[1..]);
    (sqrt_c * spatial).asinh() / sqrt_c
}

/// Indices of `items` sorted by lexicographic coordinate order, used so that
/// means are bit-identical under any permutation of their inputs.
fn canonical_order<V: AsRef<[f64]>>(items: &[V]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (items[a].as_ref(), items[b].as_ref());
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    order
}

fn mean_vector<V: AsRef<[f64]>>(items: &[V]) -> Vec<f64> {
    let order = canonical_order(items);
    let n = items.len() as f64;
    let dim = items[0].as_ref().len();
    (0..dim)
        .map(|k| pairwise_sum_by(order.len(), |i| items[order[i]].as_ref()[k]) / n)
        .collect()
}

/// Lorentzian centroid: the arithmetic mean rescaled back onto the hyperboloid.
pub fn lorentz_centroid(points: &[LorentzPoint], curvature: f64) -> Result<LorentzPoint> {
    let c = Curvature::new(curvature)?;
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("centroid of an empty point set".into()))?;
    for p in points {
        if p.curvature != c {
            return Err(Error::InvalidInput(format!(
                "curvature mismatch: point at c = {}, centroid requested at c = {c}",
                p.curvature
            )));
        }
        if p.coords.len() != first.coords.len() {
            return Err(Error::InvalidInput("points have different dimensions".into()));
        }
    }
    let coords = centroid_coords(points.iter().map(|p| p.coords.as_slice()).collect::<Vec<_>>().as_slice(), c.get())?;
    Ok(LorentzPoint {
        coords,
        curvature: c,
    })
}

pub(crate) fn centroid_coords<V: AsRef<[f64]>>(points: &[V], c: f64) -> Result<Vec<f64>> {
    let m = mean_vector(points);
    let sq = minkowski_dot(&m, &m);
    if sq >= 0.0 || !sq.is_finite() {
        return Err(Error::DegenerateCentroid(sq));
    }
    let scale = 1.0 / (c.sqrt() * (-sq).sqrt());
    Ok(m.into_iter().map(|v| v * scale).collect())
}

/// Component-wise arithmetic mean.
pub fn euclidean_centroid<V: AsRef<[f64]>>(vectors: &[V]) -> Result<EuclideanVector> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("centroid of an empty vector set".into()))?;
    let dim = first.as_ref().len();
    if vectors.iter().any(|v| v.as_ref().len() != dim) {
        return Err(Error::InvalidInput("vectors have different dimensions".into()));
    }
    EuclideanVector::new(mean_vector(vectors))
}

/// `1 - u.v / (|u| |v|)`, in `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (numerics::norm(u), numerics::norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateInput("cosine distance of a zero-norm vector".into()));
    }
    Ok(cosine_unchecked(u, v, nu, nv))
}

#[inline]
pub(crate) fn cosine_unchecked(u: &[f64], v: &[f64], nu: f64, nv: f64) -> f64 {
    let cos = pairwise_sum_by(u.len(), |k| (u[k] / nu) * (v[k] / nv));
    (1.0 - cos).clamp(0.0, 2.0)
}

/// Depth of an embedding: its `l2` norm, or its geodesic distance from the
/// hyperboloid origin after the exponential map.
pub fn distance_to_origin(embedding: &[f64], manifold: ManifoldSpec) -> Result<f64> {
    check_finite(embedding)?;
    match manifold {
        ManifoldSpec::Euclidean => Ok(numerics::norm(embedding)),
        ManifoldSpec::Lorentz(c) => {
            let x = exp_map_origin(embedding, c.get())?;
            let o = LorentzPoint::origin(x.dim(), c);
            lorentz_distance(&o, &x, c.get())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(lorentz_inner(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(lorentz_inner(&[2.0, 1.0, 0.0], &[2.0, 0.0, 1.0]).unwrap(), -4.0);
        let x = [1.5431, 0.7051, 0.9402];
        assert!(close(lorentz_inner(&x, &x).unwrap(), -1.0, 1e-3));
        assert!(matches!(
            lorentz_inner(&[1.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn exp_map_examples() {
        let o = exp_map_origin(&[0.0; 5], 1.0).unwrap();
        assert_eq!(o.coords(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        // high-precision reference values
        let x = exp_map_origin(&[0.6, 0.8], 1.0).unwrap();
        let want = [1.543_080_634_815_244, 0.705_120_716_186_281, 0.940_160_954_915_041];
        for (a, b) in x.coords().iter().zip(want) {
            assert!(close(*a, b, 1e-12), "{a} vs {b}");
        }

        let x = exp_map_origin(&[1.0], 0.2).unwrap();
        assert!(close(x.coords()[0], 2.463_426_489_342_358, 1e-12));
        assert!(close(x.coords()[1], 1.033_668_258_385_452, 1e-12));
        assert!(x.constraint_residual().abs() < 1e-6);
    }

    #[test]
    fn exp_map_rejects_bad_input() {
        assert!(matches!(exp_map_origin(&[1.0], 0.0), Err(Error::InvalidCurvature(_))));
        assert!(matches!(exp_map_origin(&[1.0], -1.0), Err(Error::InvalidCurvature(_))));
        assert!(matches!(exp_map_origin(&[f64::NAN], 1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(exp_map_origin(&[1e6], 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn small_norm_branch_is_continuous() {
        for r in [1e-12, 1e-8, 9.9e-8, 1.01e-7, 1e-6] {
            let x = exp_map_origin(&[r, 0.0], 1.0).unwrap();
            assert!(close(x.coords()[1] / r, 1.0 + r * r / 6.0, 1e-15));
            assert!(close(distance_to_origin(&[r, 0.0], ManifoldSpec::lorentz(1.0).unwrap()).unwrap() / r, 1.0, 1e-12));
        }
    }

    #[test]
    fn distance_examples() {
        let c = Curvature::new(0.5).unwrap();
        let o = LorentzPoint::origin(2, c);
        assert_eq!(lorentz_distance(&o, &o, 0.5).unwrap(), 0.0);

        let s = [0.3, -1.2];
        let x = exp_map_origin(&s, 0.5).unwrap();
        let d = lorentz_distance(&o, &x, 0.5).unwrap();
        assert!(close(d / numerics::norm(&s), 1.0, 1e-8));

        let x = exp_map_origin(&[1.0, 0.0], 0.5).unwrap();
        let y = exp_map_origin(&[0.0, 1.0], 0.5).unwrap();
        let d = lorentz_distance(&x, &y, 0.5).unwrap();
        // reference: 1.468215381214754 (40-digit evaluation)
        assert!(close(d, 1.4685, 1e-3));
        assert!(close(d, 1.468_215_381_214_754, 1e-12));
        assert!(d > 2f64.sqrt());
    }

    #[test]
    fn distance_rejects_mixed_curvature() {
        let x = exp_map_origin(&[1.0, 0.0], 0.5).unwrap();
        let y = exp_map_origin(&[0.0, 1.0], 1.0).unwrap();
        assert!(matches!(lorentz_distance(&x, &y, 0.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn centroid_examples() {
        let x = exp_map_origin(&[0.7, -0.2], 1.0).unwrap();
        let mu = lorentz_centroid(std::slice::from_ref(&x), 1.0).unwrap();
        for (a, b) in mu.coords().iter().zip(x.coords()) {
            assert!(close(*a, *b, 1e-9));
        }

        let a = exp_map_origin(&[1.0, 0.0], 1.0).unwrap();
        let b = exp_map_origin(&[-1.0, 0.0], 1.0).unwrap();
        let mu = lorentz_centroid(&[a, b], 1.0).unwrap();
        for (got, want) in mu.coords().iter().zip([1.0, 0.0, 0.0]) {
            assert!(close(*got, want, 1e-9));
        }

        let a = exp_map_origin(&[1.0, 0.0], 1.0).unwrap();
        let b = exp_map_origin(&[0.0, 1.0], 1.0).unwrap();
        let mu = lorentz_centroid(&[a.clone(), b.clone()], 1.0).unwrap();
        assert!(mu.constraint_residual().abs() < 1e-12);
        let da = lorentz_distance(&mu, &a, 1.0).unwrap();
        let db = lorentz_distance(&mu, &b, 1.0).unwrap();
        assert!(close(da, db, 1e-8));
        // reference: 0.7566870032982520
        assert!(close(da, 0.756_687_003_298_252, 1e-12));

        assert!(matches!(lorentz_centroid(&[], 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn centroid_guards_non_timelike_mean() {
        // raw vectors off the hyperboloid whose mean is spacelike
        let pts = [vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(matches!(centroid_coords(&pts, 1.0), Err(Error::DegenerateCentroid(_))));
    }

    #[test]
    fn euclidean_centroid_examples() {
        assert_eq!(euclidean_centroid(&[[1.0, 1.0]]).unwrap().as_slice(), &[1.0, 1.0]);
        assert_eq!(euclidean_centroid(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(
            euclidean_centroid(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap().as_slice(),
            &[3.0, 4.0]
        );
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(euclidean_centroid(&empty), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn cosine_examples() {
        assert!(close(cosine_distance(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0, 1e-15));
        assert_eq!(cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(cosine_distance(&[1.0, 0.0], &[-2.0, 0.0]).unwrap(), 2.0);
        assert!(matches!(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn depth_examples() {
        let lor = ManifoldSpec::lorentz(0.5).unwrap();
        assert_eq!(distance_to_origin(&[0.0, 0.0], ManifoldSpec::Euclidean).unwrap(), 0.0);
        assert_eq!(distance_to_origin(&[0.0, 0.0], lor).unwrap(), 0.0);
        assert_eq!(distance_to_origin(&[3.0, 4.0], ManifoldSpec::Euclidean).unwrap(), 5.0);
        assert!(close(distance_to_origin(&[3.0, 4.0], lor).unwrap(), 5.0, 1e-6));
    }

    #[test]
    fn manifold_spec_parsing() {
        assert_eq!("euclidean".parse::<ManifoldSpec>().unwrap(), ManifoldSpec::Euclidean);
        let m: ManifoldSpec = "lorentz:0.2".parse().unwrap();
        assert_eq!(m.to_string(), "lorentz:0.2");
        assert!("lorentz:0".parse::<ManifoldSpec>().is_err());
        assert!("lorentz:-1".parse::<ManifoldSpec>().is_err());
        assert!("poincare:1".parse::<ManifoldSpec>().is_err());
        let json = serde_json::to_string(&ManifoldSpec::default_grid()).unwrap();
        assert_eq!(json, r#"["euclidean","lorentz:0.2","lorentz:0.5","lorentz:1"]"#);
    }

    #[test]
    fn lorentz_point_validation() {
        let c = Curvature::new(1.0).unwrap();
        assert!(LorentzPoint::new(vec![1.0, 0.0], c).is_ok());
        assert!(LorentzPoint::new(vec![2.0, 0.0], c).is_err());
        assert!(LorentzPoint::new(vec![-1.0, 0.0], c).is_err());
        assert!(LorentzPoint::new(vec![1.0], c).is_err());
    }
}

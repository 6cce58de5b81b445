//! Projective geometry of the complexified fiber: `CP^3` with its standard
//! real structure, the metric quadric and its two rulings classified through
//! Plucker coordinates, the quaternionic structures on the rulings, the
//! `psi_p` line correspondence, and the tangent-conic construction of the
//! quadratic spinor map.
//!
//! All computations run in homogeneous coordinates with canonical
//! normalization (first coordinate of significant modulus scaled to 1) and
//! explicit tolerances; the constructions are generic-position and
//! numerically benign.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cliffkern::{Metric4, TwoForm, TOL_COMPOSITE, TOL_DERIVED};

type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistorError {
    #[error("homogeneous coordinates are all zero")]
    ZeroVector,
    #[error("spanning points are projectively dependent")]
    DegenerateSpan,
    #[error("line is not on the quadric: residual {residual:e}")]
    NotOnQuadric { residual: f64 },
    #[error("bivector is not a star eigenvector: residual {residual:e}")]
    NotEigen { residual: f64 },
    #[error("point lies on the quadric (residual {residual:e}), psi is undefined there")]
    PointOnQuadric { residual: f64 },
    #[error("pencil through the point and line is degenerate (tangent plane)")]
    DegeneratePencil,
    #[error("point is not on the ruling conic: residual {residual:e}")]
    NotOnConic { residual: f64 },
    #[error("tangent lines coincide; conjugate points collapsed")]
    TangentsCoincide,
    #[error("operator is not a compatible almost complex structure: {detail}")]
    NotCompatible { detail: String },
}

/// Which family of lines on the quadric: `Plus` is the star eigenvalue `+1`
/// family, parametrizing structures compatible with the given orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ruling {
    Plus,
    Minus,
}

/// Real-structure tags: the standard conjugation on `CP^3` and the two
/// quaternionic (fixed-point-free) structures it induces on the rulings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealStructureTag {
    Standard,
    QuaternionicPlus,
    QuaternionicMinus,
}

/// A point of `CP^3` in canonically normalized homogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    coords: [C64; 4],
}

impl ProjPoint {
    pub fn new(coords: [C64; 4]) -> Result<Self, TwistorError> {
        let normalized = normalize(&coords).ok_or(TwistorError::ZeroVector)?;
        Ok(Self { coords: normalized })
    }

    pub fn from_real(v: &Vector4<f64>) -> Result<Self, TwistorError> {
        Self::new([
            Complex::new(v[0], 0.0),
            Complex::new(v[1], 0.0),
            Complex::new(v[2], 0.0),
            Complex::new(v[3], 0.0),
        ])
    }

    pub fn coords(&self) -> &[C64; 4] {
        &self.coords
    }

    /// The standard real structure: coordinate-wise conjugation.
    pub fn conjugated(&self) -> Self {
        let mut coords = self.coords;
        for c in &mut coords {
            *c = c.conj();
        }
        Self::new(coords).expect("conjugate of a point is a point")
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.distance_to(&self.conjugated()) < tol
    }

    /// Chordal projective distance in `[0, 1]`.
    pub fn distance_to(&self, other: &Self) -> f64 {
        chordal_distance(&self.coords, &other.coords)
    }
}

/// A projective line via two spanning points and normalized Plucker
/// coordinates `p01, p02, p03, p12, p13, p23`; the Plucker relation
/// `p01 p23 - p02 p13 + p03 p12 = 0` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjLine {
    points: (ProjPoint, ProjPoint),
    plucker: [C64; 6],
}

impl ProjLine {
    pub fn from_points(x: ProjPoint, y: ProjPoint) -> Result<Self, TwistorError> {
        let plucker_raw = plucker_of(x.coords(), y.coords());
        let plucker = normalize6(&plucker_raw).ok_or(TwistorError::DegenerateSpan)?;
        Ok(Self { points: (x, y), plucker })
    }

    pub fn spanning_points(&self) -> (&ProjPoint, &ProjPoint) {
        (&self.points.0, &self.points.1)
    }

    pub fn plucker(&self) -> &[C64; 6] {
        &self.plucker
    }

    /// Residual of the Plucker decomposability relation.
    pub fn plucker_residual(&self) -> f64 {
        let p = &self.plucker;
        (p[0] * p[5] - p[1] * p[4] + p[2] * p[3]).norm()
    }

    /// The conjugate line; realizes the quaternionic structures on the
    /// rulings (the standard structure preserves each family).
    pub fn conjugated(&self) -> Self {
        Self::from_points(self.points.0.conjugated(), self.points.1.conjugated())
            .expect("conjugate of a line is a line")
    }

    /// Chordal projective distance between Plucker vectors.
    pub fn distance_to(&self, other: &Self) -> f64 {
        chordal_distance(&self.plucker, &other.plucker)
    }
}

fn normalize<const N: usize>(coords: &[C64; N]) -> Option<[C64; N]> {
    let max = coords.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if max <= 0.0 {
        return None;
    }
    let lead = coords.iter().find(|c| c.norm() > 1e-12 * max)?;
    let inv = 1.0 / lead.norm();
    let phase = lead.conj() * inv;
    let mut out = *coords;
    for c in &mut out {
        *c = *c * phase * inv;
    }
    Some(out)
}

fn normalize6(coords: &[C64; 6]) -> Option<[C64; 6]> {
    normalize(coords)
}

/// Projective distance by phase-and-scale alignment: the relative norm of
/// `a - z b` for the optimal unit-scale `z`. Linear in perturbations, so
/// identical inputs measure at machine precision (a cosine-based chordal
/// distance would bottom out near sqrt(machine epsilon)).
fn chordal_distance<const N: usize>(a: &[C64; N], b: &[C64; N]) -> f64 {
    let mut inner = Complex::new(0.0, 0.0);
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..N {
        inner += a[i].conj() * b[i];
        na += a[i].norm_sqr();
        nb += b[i].norm_sqr();
    }
    let na = na.sqrt();
    let nb = nb.sqrt();
    if inner.norm() <= f64::MIN_POSITIVE {
        return std::f64::consts::SQRT_2;
    }
    let z = inner.conj() / inner.norm() * (na / nb);
    let mut diff = 0.0;
    for i in 0..N {
        diff += (a[i] - z * b[i]).norm_sqr();
    }
    diff.sqrt() / na
}

/// Plucker coordinates `p_ij = x_i y_j - x_j y_i`, `i < j`, in the order
/// `01, 02, 03, 12, 13, 23`.
fn plucker_of(x: &[C64; 4], y: &[C64; 4]) -> [C64; 6] {
    let p = |i: usize, j: usize| x[i] * y[j] - x[j] * y[i];
    [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)]
}

/// The complex-bilinear extension of the metric evaluated on ambient
/// homogeneous coordinates (not the hermitian form).
pub fn complex_metric_value(m: &Metric4, p: &ProjPoint) -> C64 {
    let g = m.g();
    let v = p.coords();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i] * Complex::new(g[(i, j)], 0.0) * v[j];
        }
    }
    acc
}

fn frame_coords(m: &Metric4, p: &ProjPoint) -> [C64; 4] {
    let fi = m.frame_inverse();
    let v = p.coords();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (i, slot) in out.iter_mut().enumerate() {
        for j in 0..4 {
            *slot += Complex::new(fi[(i, j)], 0.0) * v[j];
        }
    }
    out
}

fn ambient_from_frame(m: &Metric4, u: &[C64; 4]) -> [C64; 4] {
    let f = m.frame();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (i, slot) in out.iter_mut().enumerate() {
        for j in 0..4 {
            *slot += Complex::new(f[(i, j)], 0.0) * u[j];
        }
    }
    out
}

/// Standard bilinear form in frame coordinates, `sum u_i w_i`.
fn frame_bilinear(u: &[C64; 4], w: &[C64; 4]) -> C64 {
    u.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Residual of quadric membership on the normalized representative.
pub fn quadric_residual(m: &Metric4, p: &ProjPoint) -> f64 {
    let u = frame_coords(m, p);
    let normalized = normalize(&u).expect("projective point is nonzero");
    frame_bilinear(&normalized, &normalized).norm()
}

/// Whether the point is on the metric quadric (isotropic for the complex
/// bilinear extension), to tolerance 1e-10.
pub fn quadric_membership(m: &Metric4, p: &ProjPoint) -> bool {
    quadric_residual(m, p) <= TOL_DERIVED
}

/// The quadric has no real points: riemannian metrics admit no real
/// isotropic vectors. The structural argument is positive-definiteness
/// (checked at metric construction); the sampling is a smoke test.
pub fn no_real_points_check(m: &Metric4, samples: u32) -> bool {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for _ in 0..samples {
        let v = Vector4::new(next(), next(), next(), next());
        if v.norm() < 1e-6 {
            continue;
        }
        if m.inner(&v, &v) <= 0.0 {
            return false;
        }
    }
    true
}

/// The decomposable bivector of a line in frame coordinates, as a frame
/// two-form coefficient vector (complex).
pub fn line_bivector_frame(m: &Metric4, l: &ProjLine) -> [C64; 6] {
    let u = frame_coords(m, &l.points.0);
    let w = frame_coords(m, &l.points.1);
    plucker_of(&u, &w)
}

const STAR_SIGNS: [(usize, f64); 6] = [(5, 1.0), (4, -1.0), (3, 1.0), (2, 1.0), (1, -1.0), (0, 1.0)];

fn star6(b: &[C64; 6]) -> [C64; 6] {
    let mut out = [Complex::new(0.0, 0.0); 6];
    for (i, &(j, sign)) in STAR_SIGNS.iter().enumerate() {
        out[i] = b[j] * Complex::new(sign, 0.0);
    }
    out
}

fn check_line_on_quadric(m: &Metric4, l: &ProjLine) -> Result<(), TwistorError> {
    let (x, y) = l.spanning_points();
    let rx = quadric_residual(m, x);
    let ry = quadric_residual(m, y);
    // the chord through both points lies on Q iff the points are isotropic
    // and mutually orthogonal; test the midpoint to cover the cross term
    let u = frame_coords(m, x);
    let w = frame_coords(m, y);
    let un = normalize(&u).ok_or(TwistorError::ZeroVector)?;
    let wn = normalize(&w).ok_or(TwistorError::ZeroVector)?;
    let cross = frame_bilinear(&un, &wn).norm();
    let residual = rx.max(ry).max(cross);
    if residual > TOL_COMPOSITE {
        return Err(TwistorError::NotOnQuadric { residual });
    }
    Ok(())
}

/// Classify a line on the quadric by the star eigenvalue of its bivector:
/// `+1` is the plus ruling, `-1` the minus ruling.
pub fn ruling_of_line(m: &Metric4, l: &ProjLine) -> Result<Ruling, TwistorError> {
    check_line_on_quadric(m, l)?;
    ruling_of_bivector(&line_bivector_frame(m, l))
}

fn ruling_of_bivector(b: &[C64; 6]) -> Result<Ruling, TwistorError> {
    let norm: f64 = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(TwistorError::DegenerateSpan);
    }
    let s = star6(b);
    let mut plus_res = 0.0;
    let mut minus_res = 0.0;
    for i in 0..6 {
        plus_res += (s[i] - b[i]).norm_sqr();
        minus_res += (s[i] + b[i]).norm_sqr();
    }
    let plus_res = plus_res.sqrt() / norm;
    let minus_res = minus_res.sqrt() / norm;
    let best = plus_res.min(minus_res);
    if best > 1e-6 {
        return Err(TwistorError::NotEigen { residual: best });
    }
    Ok(if plus_res < minus_res { Ruling::Plus } else { Ruling::Minus })
}

/// Eigen-residual of the classification, for invariant suites.
pub fn ruling_residual(m: &Metric4, l: &ProjLine) -> f64 {
    let b = line_bivector_frame(m, l);
    let norm: f64 = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let s = star6(&b);
    let mut plus_res = 0.0;
    let mut minus_res = 0.0;
    for i in 0..6 {
        plus_res += (s[i] - b[i]).norm_sqr();
        minus_res += (s[i] + b[i]).norm_sqr();
    }
    (plus_res.sqrt() / norm).min(minus_res.sqrt() / norm)
}

/// The pair of conjugate lines a compatible almost complex structure cuts
/// on the quadric: spans of the `+i` and `-i` eigenspaces. Both lie on the
/// quadric and in the same ruling; the standard real structure exchanges
/// them.
pub fn lines_of_acs(m: &Metric4, j: &Matrix4<f64>) -> Result<(ProjLine, ProjLine), TwistorError> {
    let residual = m.acs_residual(j);
    if residual > TOL_COMPOSITE {
        return Err(TwistorError::NotCompatible {
            detail: format!("compatibility residual {residual:e}"),
        });
    }
    // P = (id - iJ)/2 projects onto the +i eigenspace
    let mut projector = [[Complex::new(0.0, 0.0); 4]; 4];
    for (r, row) in projector.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            let delta = if r == c { 1.0 } else { 0.0 };
            *slot = Complex::new(0.5 * delta, -0.5 * j[(r, c)]);
        }
    }
    // two independent columns span the eigenspace
    let columns: Vec<[C64; 4]> = (0..4)
        .map(|c| {
            let mut v = [Complex::new(0.0, 0.0); 4];
            for r in 0..4 {
                v[r] = projector[r][c];
            }
            v
        })
        .collect();
    let mut best: Option<(ProjPoint, ProjPoint)> = None;
    let mut best_span = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            let (Ok(pa), Ok(pb)) = (ProjPoint::new(columns[a]), ProjPoint::new(columns[b])) else {
                continue;
            };
            let span: f64 = plucker_of(pa.coords(), pb.coords())
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
            if span > best_span {
                best_span = span;
                best = Some((pa, pb));
            }
        }
    }
    let (pa, pb) = best.ok_or(TwistorError::DegenerateSpan)?;
    let line = ProjLine::from_points(pa, pb)?;
    let conjugate = line.conjugated();
    check_line_on_quadric(m, &line)?;
    Ok((line, conjugate))
}

/// The second line cut by the plane through `p` and `l` on the quadric.
///
/// Restricting the quadric to the plane factors the conic into `l` and one
/// more line; that line meets `l` in a single point and lies in the other
/// ruling. For real `p` the construction commutes with the quaternionic
/// structures.
pub fn psi_p(m: &Metric4, p: &ProjPoint, l: &ProjLine) -> Result<ProjLine, TwistorError> {
    let p_residual = quadric_residual(m, p);
    if p_residual <= TOL_COMPOSITE {
        return Err(TwistorError::PointOnQuadric { residual: p_residual });
    }
    check_line_on_quadric(m, l)?;
    let pp = {
        let u = frame_coords(m, p);
        normalize(&u).ok_or(TwistorError::ZeroVector)?
    };
    let u = {
        let raw = frame_coords(m, &l.points.0);
        normalize(&raw).ok_or(TwistorError::ZeroVector)?
    };
    let w = {
        let raw = frame_coords(m, &l.points.1);
        normalize(&raw).ok_or(TwistorError::ZeroVector)?
    };
    let q_p = frame_bilinear(&pp, &pp);
    let b_pu = frame_bilinear(&pp, &u);
    let b_pw = frame_bilinear(&pp, &w);
    if b_pu.norm().max(b_pw.norm()) <= 1e-10 {
        return Err(TwistorError::DegeneratePencil);
    }
    // the conic on the plane span(p, u, w) is s(s q(p) + 2t B(p,u) + 2r B(p,w));
    // the second factor is the line psi_p(l): one point is the intersection
    // with l, the other uses the s = 2 B slice
    let mut z0 = [Complex::new(0.0, 0.0); 4];
    let mut z1 = [Complex::new(0.0, 0.0); 4];
    for i in 0..4 {
        z0[i] = -b_pw * u[i] + b_pu * w[i];
        z1[i] = if b_pu.norm() >= b_pw.norm() {
            2.0 * b_pu * pp[i] - q_p * u[i]
        } else {
            2.0 * b_pw * pp[i] - q_p * w[i]
        };
    }
    let a0 = ambient_from_frame(m, &z0);
    let a1 = ambient_from_frame(m, &z1);
    let result = ProjLine::from_points(ProjPoint::new(a0)?, ProjPoint::new(a1)?)?;
    check_line_on_quadric(m, &result)?;
    Ok(result)
}

/// A point of the projectivized complexified self-dual 3-space, in the
/// basis `e12+e34, e13-e24, e14+e23`. On the ruling conic the coordinates
/// satisfy `a^2 + b^2 + c^2 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfDualBivector {
    coords: [C64; 3],
}

impl SelfDualBivector {
    pub fn new(coords: [C64; 3]) -> Result<Self, TwistorError> {
        let normalized = normalize(&coords).ok_or(TwistorError::ZeroVector)?;
        Ok(Self { coords: normalized })
    }

    /// Project a full frame bivector onto the self-dual basis; errors if an
    /// anti-self-dual component of relative size above tolerance remains.
    pub fn from_frame_bivector(b: &[C64; 6]) -> Result<Self, TwistorError> {
        let s = star6(b);
        let norm: f64 = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut asd = 0.0;
        for i in 0..6 {
            asd += (b[i] - s[i]).norm_sqr();
        }
        let residual = asd.sqrt() / (2.0 * norm);
        if residual > TOL_COMPOSITE {
            return Err(TwistorError::NotOnConic { residual });
        }
        Self::new([b[0] + b[5], b[1] - b[4], b[2] + b[3]].map(|c| 0.5 * c))
    }

    pub fn coords(&self) -> &[C64; 3] {
        &self.coords
    }

    pub fn conic_residual(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<C64>().norm()
    }

    pub fn conjugated(&self) -> Self {
        Self::new(self.coords.map(|c| c.conj())).expect("conjugate is nonzero")
    }

    pub fn distance_to(&self, other: &Self) -> f64 {
        chordal_distance(&self.coords, &other.coords)
    }
}

/// The tangent-conic intersection: tangents to the ruling conic at a point
/// and its conjugate meet in the projective class of a real self-dual
/// two-form. Agrees with the quadratic spinor map projectively.
pub fn tangent_conic_quadratic(
    _m: &Metric4,
    phi: &SelfDualBivector,
) -> Result<TwoForm, TwistorError> {
    let residual = phi.conic_residual();
    if residual > TOL_COMPOSITE {
        return Err(TwistorError::NotOnConic { residual });
    }
    let a = phi.coords();
    let b = phi.conjugated();
    let bc = b.coords();
    // tangent lines at phi and conj(phi) are the polars; their intersection
    // is the cross product of the two coordinate vectors
    let cross = [
        a[1] * bc[2] - a[2] * bc[1],
        a[2] * bc[0] - a[0] * bc[2],
        a[0] * bc[1] - a[1] * bc[0],
    ];
    let size: f64 = cross.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if size <= 1e-10 {
        return Err(TwistorError::TangentsCoincide);
    }
    // conj(cross) = conj(phi) x phi = -cross, so i*cross is real
    let real = [
        (Complex::<f64>::i() * cross[0]).re,
        (Complex::<f64>::i() * cross[1]).re,
        (Complex::<f64>::i() * cross[2]).re,
    ];
    let imag_residual: f64 = cross
        .iter()
        .map(|c| (Complex::<f64>::i() * c).im.powi(2))
        .sum::<f64>()
        .sqrt()
        / size;
    if imag_residual > TOL_COMPOSITE {
        return Err(TwistorError::TangentsCoincide);
    }
    let norm: f64 = real.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut unit = [real[0] / norm, real[1] / norm, real[2] / norm];
    // canonical projective representative: first significant entry positive
    if let Some(lead) = unit.iter().find(|c| c.abs() > 1e-8) {
        if *lead < 0.0 {
            for c in &mut unit {
                *c = -*c;
            }
        }
    }
    let [x, y, z] = unit;
    Ok(TwoForm::new([x, y, z, z, -y, x]))
}

/// Projective distance between real forms: relative norm of `a - z b` for
/// the optimal signed scale `z` (sign-insensitive, linear in perturbations).
pub fn sd_projective_distance(a: &TwoForm, b: &TwoForm) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na <= 0.0 || nb <= 0.0 {
        return 1.0;
    }
    let mut dot = 0.0;
    for i in 0..6 {
        dot += a.coeffs[i] * b.coeffs[i];
    }
    let z = dot.signum() * na / nb;
    let mut diff = 0.0;
    for i in 0..6 {
        diff += (a.coeffs[i] - z * b.coeffs[i]).powi(2);
    }
    diff.sqrt() / na
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliffkern::{reference_i, Spinor};

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn standard() -> Metric4 {
        Metric4::standard()
    }

    #[test]
    fn quadric_membership_examples() {
        let m = standard();
        let p = ProjPoint::new([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(quadric_membership(&m, &p));
        let q = ProjPoint::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(!quadric_membership(&m, &q));
    }

    #[test]
    fn quadric_is_real() {
        let m = standard();
        let p = ProjPoint::new([c(1.0, 0.0), c(0.3, 0.4), c(0.0, 1.0), c(0.2, -0.1)]).unwrap();
        assert!(
            (quadric_residual(&m, &p) - quadric_residual(&m, &p.conjugated())).abs() < 1e-12
        );
    }

    #[test]
    fn no_real_points_smoke() {
        assert!(no_real_points_check(&standard(), 1000));
    }

    #[test]
    fn theta_is_involutive() {
        let p = ProjPoint::new([c(0.3, -0.8), c(1.0, 0.5), c(-0.2, 0.9), c(0.1, 0.1)]).unwrap();
        assert!(p.conjugated().conjugated().distance_to(&p) < 1e-12);
    }

    #[test]
    fn reference_structure_lines_classify_plus() {
        let m = standard();
        let (l, lbar) = lines_of_acs(&m, &reference_i()).unwrap();
        assert_eq!(ruling_of_line(&m, &l).unwrap(), Ruling::Plus);
        assert_eq!(ruling_of_line(&m, &lbar).unwrap(), Ruling::Plus);
        // the conjugate is theta(l) and is disjoint from l
        assert!(l.distance_to(&lbar) > 0.5);
    }

    #[test]
    fn reverse_structures_classify_minus() {
        let m = standard();
        let j = m.reverse_acs_from_twistor_point(1.0, 0.0, 0.0);
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        assert_eq!(ruling_of_line(&m, &l).unwrap(), Ruling::Minus);
    }

    #[test]
    fn explicit_line_on_standard_quadric() {
        let m = standard();
        let x = ProjPoint::new([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let y = ProjPoint::new([c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let l = ProjLine::from_points(x, y).unwrap();
        let ruling = ruling_of_line(&m, &l).unwrap();
        let conj_ruling = ruling_of_line(&m, &l.conjugated()).unwrap();
        assert_eq!(ruling, conj_ruling);
        assert!(l.plucker_residual() < 1e-12);
    }

    #[test]
    fn ruling_rejects_off_quadric_lines() {
        let m = standard();
        let x = ProjPoint::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let y = ProjPoint::new([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let l = ProjLine::from_points(x, y).unwrap();
        assert!(matches!(
            ruling_of_line(&m, &l),
            Err(TwistorError::NotOnQuadric { .. })
        ));
    }

    #[test]
    fn psi_maps_minus_to_plus() {
        let m = standard();
        let p = ProjPoint::from_real(&Vector4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let j = m.reverse_acs_from_twistor_point(0.6, 0.0, 0.8);
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        assert_eq!(ruling_of_line(&m, &l).unwrap(), Ruling::Minus);
        let image = psi_p(&m, &p, &l).unwrap();
        assert_eq!(ruling_of_line(&m, &image).unwrap(), Ruling::Plus);

        // the image line meets l: spans intersect nontrivially, checked via
        // the rank of the joint span being 3
        let (a, b) = l.spanning_points();
        let (x, y) = image.spanning_points();
        let joint = rank4(&[*a.coords(), *b.coords(), *x.coords(), *y.coords()]);
        assert_eq!(joint, 3);
    }

    fn rank4(vectors: &[[C64; 4]]) -> usize {
        let mut rows: Vec<[C64; 4]> = vectors.to_vec();
        let mut rank = 0;
        for col in 0..4 {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][col].norm() > 1e-8) else {
                continue;
            };
            rows.swap(rank, p);
            let lead = rows[rank][col];
            for r in 0..rows.len() {
                if r != rank && rows[r][col].norm() > 1e-12 {
                    let factor = rows[r][col] / lead;
                    for ccol in 0..4 {
                        let delta = factor * rows[rank][ccol];
                        rows[r][ccol] -= delta;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn psi_reality_relation() {
        let m = standard();
        let p = ProjPoint::from_real(&Vector4::new(0.7, -0.4, 1.1, 0.2)).unwrap();
        let j = m.reverse_acs_from_twistor_point(0.36, 0.48, 0.8);
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        let lhs = psi_p(&m, &p, &l.conjugated()).unwrap();
        let rhs = psi_p(&m, &p, &l).unwrap().conjugated();
        assert!(lhs.distance_to(&rhs) < TOL_COMPOSITE);
    }

    #[test]
    fn psi_rejects_point_on_quadric() {
        let m = standard();
        let p = ProjPoint::new([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let j = m.reverse_acs_from_twistor_point(1.0, 0.0, 0.0);
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        assert!(matches!(
            psi_p(&m, &p, &l),
            Err(TwistorError::PointOnQuadric { .. })
        ));
    }

    #[test]
    fn psi_round_trip() {
        let m = standard();
        let p = ProjPoint::from_real(&Vector4::new(0.9, 0.1, -0.5, 0.4)).unwrap();
        let j = m.reverse_acs_from_twistor_point(0.0, 0.6, 0.8);
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        let forward = psi_p(&m, &p, &l).unwrap();
        let back = psi_p(&m, &p, &forward).unwrap();
        assert!(back.distance_to(&l) < TOL_COMPOSITE);
    }

    #[test]
    fn conic_point_t_zero_tangent_intersection() {
        // conic a^2+b^2+c^2 = 0 at (1, i, 0): tangents z0 + i z1 = 0 and
        // z0 - i z1 = 0 meet at (0, 0, 1) by the 2x2 linear solve
        let m = standard();
        let phi = SelfDualBivector::new([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let omega = tangent_conic_quadratic(&m, &phi).unwrap();
        // (0,0,1) in the SD basis is e14 + e23
        let expected = TwoForm::new([0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(sd_projective_distance(&omega, &expected) < 1e-10);
    }

    #[test]
    fn tangent_conic_is_conjugation_symmetric() {
        let m = standard();
        let phi = SelfDualBivector::new([c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let omega1 = tangent_conic_quadratic(&m, &phi).unwrap();
        let omega2 = tangent_conic_quadratic(&m, &phi.conjugated()).unwrap();
        assert!(sd_projective_distance(&omega1, &omega2) < 1e-12);
    }

    #[test]
    fn tangent_conic_rejects_off_conic_points() {
        let m = standard();
        let phi = SelfDualBivector::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            tangent_conic_quadratic(&m, &phi),
            Err(TwistorError::NotOnConic { .. })
        ));
    }

    #[test]
    fn tangent_conic_agrees_with_quad_map() {
        let m = standard();
        let phi = Spinor::plus(c(0.7, -0.2), c(0.4, 1.1));
        let j = m.spinor_to_acs(&phi).unwrap();
        let (l, _) = lines_of_acs(&m, &j).unwrap();
        let bivector = line_bivector_frame(&m, &l);
        let conic_point = SelfDualBivector::from_frame_bivector(&bivector).unwrap();
        let omega = tangent_conic_quadratic(&m, &conic_point).unwrap();
        let (_, qform) = m.quad_map(&phi);
        assert!(
            sd_projective_distance(&omega, &qform) < TOL_COMPOSITE,
            "distance {}",
            sd_projective_distance(&omega, &qform)
        );
    }
}

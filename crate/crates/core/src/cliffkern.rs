//! The flat-fiber spinor kernel: a metric on `R^4`, the Clifford module
//! `W+ = W- = C^2`, the Hodge star on two-forms with its SD/ASD splitting,
//! the identification of self-dual forms with traceless skew-hermitian
//! endomorphisms of `W+`, the quadratic spinor map, and the map from a
//! nonzero spinor to its compatible almost complex structure.
//!
//! Conventions (fixed once, used everywhere):
//! - the frame is a positively oriented g-orthonormal basis from the
//!   Cholesky factor of `g`; two-form coefficients are frame coefficients
//!   in the order `e12, e13, e14, e23, e24, e34`;
//! - the volume form is `e1^e2^e3^e4` and `*(e1^e2) = e3^e4`;
//! - Clifford multiplication on `W+ (+) W-` is block off-diagonal,
//!   `c(v) = [[0, -rho(v)^*], [rho(v), 0]]` with the quaternion matrix
//!   `rho(v) = [[v0 + i v1, -v2 + i v3], [v2 + i v3, v0 - i v1]]`, which
//!   makes anti-self-dual forms act as zero on `W+`;
//! - the reference structure `I0` maps `e1 -> e2`, `e3 -> e4`, and the
//!   spinor `(1, 0)` projects to it.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C64 = Complex<f64>;
type CMat2 = Matrix2<C64>;

/// Construction-level tolerance (single factorization).
pub const TOL_CONSTRUCTION: f64 = 1e-12;
/// Tolerance for identities derived in one or two steps.
pub const TOL_DERIVED: f64 = 1e-10;
/// Tolerance for composite, multi-operation checks.
pub const TOL_COMPOSITE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("metric is not symmetric positive definite")]
    SingularMetric,
    #[error("two-form is not self-dual: residual {residual:e}")]
    NotSelfDual { residual: f64 },
    #[error("spinor norm {norm:e} below threshold")]
    ZeroSpinor { norm: f64 },
    #[error("operator is not a compatible almost complex structure: {detail}")]
    NotCompatible { detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Plus,
    Minus,
}

/// A spinor in one chirality of the Clifford module.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    pub components: Vector2<C64>,
    pub chirality: Chirality,
}

impl Spinor {
    pub fn plus(a: C64, b: C64) -> Self {
        Self { components: Vector2::new(a, b), chirality: Chirality::Plus }
    }

    pub fn norm_squared(&self) -> f64 {
        self.components[0].norm_sqr() + self.components[1].norm_sqr()
    }
}

/// A real two-form in frame coefficients, basis order
/// `e12, e13, e14, e23, e24, e34`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm {
    pub coeffs: [f64; 6],
}

impl TwoForm {
    pub fn new(coeffs: [f64; 6]) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: [0.0; 6] }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The Hodge star in the positively oriented orthonormal frame:
    /// an involution exchanging `e12 <-> e34`, `e13 <-> -e24`,
    /// `e14 <-> e23`.
    pub fn star(&self) -> Self {
        let [a12, a13, a14, a23, a24, a34] = self.coeffs;
        Self { coeffs: [a34, -a24, a23, a14, -a13, a12] }
    }

    pub fn self_dual_part(&self) -> Self {
        let s = self.star();
        let mut coeffs = [0.0; 6];
        for i in 0..6 {
            coeffs[i] = 0.5 * (self.coeffs[i] + s.coeffs[i]);
        }
        Self { coeffs }
    }

    pub fn anti_self_dual_part(&self) -> Self {
        let s = self.star();
        let mut coeffs = [0.0; 6];
        for i in 0..6 {
            coeffs[i] = 0.5 * (self.coeffs[i] - s.coeffs[i]);
        }
        Self { coeffs }
    }

    /// Residual of self-duality, `|f - *f| / max(1, |f|)`.
    pub fn self_duality_residual(&self) -> f64 {
        let s = self.star();
        let mut diff = 0.0;
        for i in 0..6 {
            diff += (self.coeffs[i] - s.coeffs[i]).powi(2);
        }
        diff.sqrt() / self.norm().max(1.0)
    }

    /// Wedge square against the volume form: `f ^ f = wedge_square(f) dmu`.
    pub fn wedge_square(&self) -> f64 {
        let [a12, a13, a14, a23, a24, a34] = self.coeffs;
        2.0 * (a12 * a34 - a13 * a24 + a14 * a23)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut coeffs = self.coeffs;
        for c in &mut coeffs {
            *c *= s;
        }
        Self { coeffs }
    }
}

/// Endomorphism of `W+` tagged with the algebraic subtype it was built as.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoW {
    pub matrix: CMat2,
    pub kind: EndoKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndoKind {
    TracelessSkewHermitian,
    HermitianTraceless,
}

/// Clifford multiplication by a vector, as the block map `W+ -> W-` and the
/// full operator on `W+ (+) W-`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordOp {
    /// The `W+ -> W-` block.
    pub rho: CMat2,
    /// The full 4x4 operator `[[0, -rho^*], [rho, 0]]`.
    pub full: Matrix4<C64>,
}

/// A riemannian metric on `R^4` with a fixed positively oriented
/// g-orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric4 {
    g: Matrix4<f64>,
    frame: Matrix4<f64>,
    frame_inv: Matrix4<f64>,
}

impl Metric4 {
    /// Build from a symmetric positive definite matrix. The frame columns
    /// come from the inverse transpose of the Cholesky factor, so
    /// `frame^T g frame = id` exactly up to factorization error.
    pub fn new(g: Matrix4<f64>) -> Result<Self, KernelError> {
        let sym_residual = (g - g.transpose()).norm();
        if sym_residual > TOL_CONSTRUCTION * g.norm().max(1.0) {
            return Err(KernelError::SingularMetric);
        }
        let chol = nalgebra::linalg::Cholesky::new(g).ok_or(KernelError::SingularMetric)?;
        let l = chol.l();
        let frame = l
            .transpose()
            .try_inverse()
            .ok_or(KernelError::SingularMetric)?;
        let frame_inv = l.transpose();
        let gram = frame.transpose() * g * frame;
        let residual = (gram - Matrix4::identity()).norm();
        if residual > 1e-10 {
            return Err(KernelError::SingularMetric);
        }
        debug_assert!(frame.determinant() > 0.0);
        Ok(Self { g, frame, frame_inv })
    }

    /// The standard euclidean metric with the identity frame.
    pub fn standard() -> Self {
        Self {
            g: Matrix4::identity(),
            frame: Matrix4::identity(),
            frame_inv: Matrix4::identity(),
        }
    }

    pub fn g(&self) -> &Matrix4<f64> {
        &self.g
    }

    pub fn frame(&self) -> &Matrix4<f64> {
        &self.frame
    }

    pub fn frame_inverse(&self) -> &Matrix4<f64> {
        &self.frame_inv
    }

    pub fn inner(&self, v: &Vector4<f64>, w: &Vector4<f64>) -> f64 {
        (v.transpose() * self.g * w)[(0, 0)]
    }

    /// Frame coordinates of an ambient vector.
    pub fn to_frame(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.frame_inv * v
    }

    /// Clifford multiplication by an ambient vector; satisfies
    /// `c(v) c(w) + c(w) c(v) = -2 g(v, w) id`.
    pub fn clifford_action(&self, v: &Vector4<f64>) -> CliffordOp {
        let u = self.to_frame(v);
        let rho = rho_frame(&u);
        let mut full = Matrix4::<C64>::zeros();
        let neg_rho_adj = -rho.adjoint();
        for i in 0..2 {
            for j in 0..2 {
                full[(i, j + 2)] = neg_rho_adj[(i, j)];
                full[(i + 2, j)] = rho[(i, j)];
            }
        }
        CliffordOp { rho, full }
    }

    /// Hodge star on two-forms (frame coefficients).
    pub fn hodge_star2(&self, f: &TwoForm) -> TwoForm {
        f.star()
    }

    /// Clifford action of a self-dual two-form on `W+`: a real-linear
    /// isomorphism onto traceless skew-hermitian endomorphisms.
    pub fn form_to_endo(&self, f: &TwoForm) -> Result<EndoW, KernelError> {
        let residual = f.self_duality_residual();
        if residual > TOL_DERIVED {
            return Err(KernelError::NotSelfDual { residual });
        }
        Ok(EndoW {
            matrix: endo_of_coeffs(&f.coeffs),
            kind: EndoKind::TracelessSkewHermitian,
        })
    }

    /// The action of any two-form on `W+` (anti-self-dual input acts as 0).
    pub fn two_form_action_on_wplus(&self, f: &TwoForm) -> CMat2 {
        endo_of_coeffs(&f.coeffs)
    }

    /// Inverse of [`Metric4::form_to_endo`] on traceless skew-hermitian
    /// endomorphisms.
    pub fn endo_to_form(&self, endo: &CMat2) -> TwoForm {
        // endo = 2a s12 + 2b s13 + 2c s14 for the SD form
        // a(e12+e34) + b(e13-e24) + c(e14+e23)
        let x = (Complex::<f64>::i() * endo[(0, 0)]).re;
        let y = endo[(0, 1)].re;
        let z = -endo[(0, 1)].im;
        let (a, b, c) = (x / 2.0, y / 2.0, z / 2.0);
        TwoForm::new([a, b, c, c, -b, a])
    }

    /// The quadratic spinor map: the hermitian traceless endomorphism
    /// `phi phi^* - (|phi|^2 / 2) id` and its self-dual form partner under
    /// the `-i` identification.
    pub fn quad_map(&self, phi: &Spinor) -> (EndoW, TwoForm) {
        let a = phi.components[0];
        let b = phi.components[1];
        let half_norm = 0.5 * phi.norm_squared();
        let matrix = CMat2::new(
            a * a.conj() - half_norm,
            a * b.conj(),
            b * a.conj(),
            b * b.conj() - half_norm,
        );
        let skew = matrix.map(|z| -Complex::<f64>::i() * z);
        let form = self.endo_to_form(&skew);
        (EndoW { matrix, kind: EndoKind::HermitianTraceless }, form)
    }

    /// The compatible almost complex structure a nonzero positive spinor
    /// projects to on the twistor sphere. Depends only on the projective
    /// class of the spinor; `(1, 0)` maps to the reference structure `I0`.
    pub fn spinor_to_acs(&self, phi: &Spinor) -> Result<Matrix4<f64>, KernelError> {
        let norm_sq = phi.norm_squared();
        if norm_sq.sqrt() <= TOL_CONSTRUCTION {
            return Err(KernelError::ZeroSpinor { norm: norm_sq.sqrt() });
        }
        let a = phi.components[0];
        let b = phi.components[1];
        let alpha = (a.norm_sqr() - b.norm_sqr()) / norm_sq;
        let w = 2.0 * a * b.conj() / norm_sq;
        let a_std = twistor_point_structure(alpha, w.im, w.re);
        Ok(self.frame * a_std * self.frame_inv)
    }

    /// The almost complex structure at the twistor-sphere point
    /// `(alpha, beta, gamma)`, `alpha^2 + beta^2 + gamma^2 = 1`, for the
    /// given orientation.
    pub fn acs_from_twistor_point(&self, alpha: f64, beta: f64, gamma: f64) -> Matrix4<f64> {
        self.frame * twistor_point_structure(alpha, beta, gamma) * self.frame_inv
    }

    /// Same for the reverse orientation (the other ruling's sphere).
    pub fn reverse_acs_from_twistor_point(
        &self,
        alpha: f64,
        beta: f64,
        gamma: f64,
    ) -> Matrix4<f64> {
        let a = alpha * right_i() + beta * right_j() + gamma * right_k();
        self.frame * a * self.frame_inv
    }

    /// Compatibility residual of an ambient operator: how far it is from a
    /// metric-orthogonal complex structure.
    pub fn acs_residual(&self, j: &Matrix4<f64>) -> f64 {
        let square = (j * j + Matrix4::identity()).norm();
        let ortho = (j.transpose() * self.g * j - self.g).norm();
        square.max(ortho)
    }

    /// The fundamental two-form `omega(v, w) = g(Jv, w)` of a compatible
    /// structure, in frame coefficients; self-dual for orientation-positive
    /// `J`, with `|omega| = sqrt(2)`.
    pub fn associated_two_form(&self, j: &Matrix4<f64>) -> Result<TwoForm, KernelError> {
        let residual = self.acs_residual(j);
        if residual > TOL_COMPOSITE {
            return Err(KernelError::NotCompatible {
                detail: format!("compatibility residual {residual:e}"),
            });
        }
        let a = self.frame_inv * j * self.frame;
        let omega = |i: usize, k: usize| -> f64 {
            // omega(f_i, f_k) = <A e_i, e_k> in frame coordinates
            a[(k, i)]
        };
        let form = TwoForm::new([
            omega(0, 1),
            omega(0, 2),
            omega(0, 3),
            omega(1, 2),
            omega(1, 3),
            omega(2, 3),
        ]);
        let sd_residual = form.self_duality_residual();
        if sd_residual > TOL_DERIVED {
            return Err(KernelError::NotCompatible {
                detail: format!(
                    "fundamental form not self-dual (residual {sd_residual:e}); \
                     operator is compatible with the reverse orientation"
                ),
            });
        }
        Ok(form)
    }
}

/// `rho(v)` in frame coordinates: the quaternion-style matrix
/// `[[v0 + i v1, -v2 + i v3], [v2 + i v3, v0 - i v1]]`.
fn rho_frame(u: &Vector4<f64>) -> CMat2 {
    let a = Complex::new(u[0], u[1]);
    let b = Complex::new(u[2], u[3]);
    CMat2::new(a, -b.conj(), b, a.conj())
}

/// Action of a frame two-form on `W+`: sum of `sigma(ij)` blocks, where
/// `sigma(ij) = -rho(e_i)^* rho(e_j)`. The three independent values are
/// `sigma(12) = sigma(34) = diag(-i, i)`, `sigma(13) = -sigma(24) =
/// [[0, 1], [-1, 0]]` and `sigma(14) = sigma(23) = [[0, -i], [-i, 0]]`.
fn endo_of_coeffs(coeffs: &[f64; 6]) -> CMat2 {
    let [a12, a13, a14, a23, a24, a34] = *coeffs;
    let i = Complex::<f64>::i();
    let sigma12 = CMat2::new(-i, Complex::ZERO, Complex::ZERO, i);
    let sigma13 = CMat2::new(
        Complex::ZERO,
        Complex::new(1.0, 0.0),
        Complex::new(-1.0, 0.0),
        Complex::ZERO,
    );
    let sigma14 = CMat2::new(Complex::ZERO, -i, -i, Complex::ZERO);
    sigma12.map(|z| z * Complex::new(a12 + a34, 0.0))
        + sigma13.map(|z| z * Complex::new(a13 - a24, 0.0))
        + sigma14.map(|z| z * Complex::new(a14 + a23, 0.0))
}

/// Left quaternion multiplications on `R^4 = H`: the reference compatible
/// structures. `I0: e1 -> e2, e3 -> e4`.
pub fn reference_i() -> Matrix4<f64> {
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

pub fn reference_j() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

pub fn reference_k() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

/// Right quaternion multiplications: reverse-orientation structures.
fn right_i() -> Matrix4<f64> {
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

fn right_j() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

fn right_k() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

fn twistor_point_structure(alpha: f64, beta: f64, gamma: f64) -> Matrix4<f64> {
    alpha * reference_i() + beta * reference_j() + gamma * reference_k()
}

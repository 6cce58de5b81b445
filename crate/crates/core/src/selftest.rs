//! Seeded self-test suite for the spinor and twistor kernels.
//!
//! Runs every machine-checkable identity over randomized inputs and reports
//! the worst residual per identity against its documented tolerance. The
//! run is deterministic for a fixed seed.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cliffkern::{
    reference_i, reference_j, reference_k, Metric4, Spinor, TwoForm, TOL_COMPOSITE,
    TOL_CONSTRUCTION, TOL_DERIVED,
};
use crate::twistor::{
    lines_of_acs, psi_p, ruling_residual, sd_projective_distance, tangent_conic_quadratic,
    ProjPoint, SelfDualBivector,
};

type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub trials: u32,
    pub identities: Vec<IdentityResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(IdentityResult::passed)
    }

    pub fn failures(&self) -> Vec<&IdentityResult> {
        self.identities.iter().filter(|r| !r.passed()).collect()
    }
}

fn random_metric(rng: &mut ChaCha8Rng) -> Metric4 {
    // rotation from QR of a random matrix, diagonal log-uniform in
    // [1/4, 4]: condition number at most 256
    loop {
        let raw: Matrix4<f64> = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let qr = nalgebra::linalg::QR::new(raw);
        let q = qr.q();
        if q.determinant().abs() < 0.5 {
            continue;
        }
        let diag = Vector4::from_fn(|_, _| {
            let exp: f64 = rng.random_range(-1.0..1.0);
            4.0_f64.powf(exp)
        });
        let g = q * Matrix4::from_diagonal(&diag) * q.transpose();
        let g = 0.5 * (g + g.transpose());
        if let Ok(metric) = Metric4::new(g) {
            return metric;
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vector4<f64> {
    Vector4::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

fn random_spinor(rng: &mut ChaCha8Rng) -> Spinor {
    loop {
        let phi = Spinor::plus(
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        if phi.norm_squared() > 1e-2 {
            return phi;
        }
    }
}

fn random_two_form(rng: &mut ChaCha8Rng) -> TwoForm {
    TwoForm::new([
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ])
}

fn random_sphere_point(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y: f64 = rng.random_range(-1.0..1.0);
        let z: f64 = rng.random_range(-1.0..1.0);
        let n = (x * x + y * y + z * z).sqrt();
        if n > 1e-3 {
            return (x / n, y / n, z / n);
        }
    }
}

/// Unit spinor over a twistor-sphere point under the fixed Hopf convention.
fn spinor_over_sphere_point(alpha: f64, beta: f64, gamma: f64) -> Spinor {
    let w = Complex::new(gamma, beta);
    let a_mag = ((1.0 + alpha) / 2.0).max(0.0).sqrt();
    let b_mag = ((1.0 - alpha) / 2.0).max(0.0).sqrt();
    if a_mag >= b_mag {
        let a = Complex::new(a_mag, 0.0);
        let b = if a_mag > 1e-12 { (w / (2.0 * a)).conj() } else { Complex::new(b_mag, 0.0) };
        Spinor::plus(a, b)
    } else {
        let b = Complex::new(b_mag, 0.0);
        let a = if b_mag > 1e-12 { w / (2.0 * b) } else { Complex::new(a_mag, 0.0) };
        Spinor::plus(a, b)
    }
}

/// Run the full identity suite.
pub fn kernel_selftest(seed: u64, trials: u32) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identities = Vec::new();

    // Clifford relation: c(v)c(w) + c(w)c(v) = -2 g(v, w) id
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let v = random_vector(&mut rng);
        let w = random_vector(&mut rng);
        let cv = m.clifford_action(&v).full;
        let cw = m.clifford_action(&w).full;
        let expected =
            Matrix4::<C64>::identity().map(|z| z * Complex::new(-2.0 * m.inner(&v, &w), 0.0));
        worst = worst.max((cv * cw + cw * cv - expected).norm());
    }
    identities.push(IdentityResult {
        name: "clifford_relation".into(),
        max_residual: worst,
        tolerance: TOL_CONSTRUCTION,
    });

    // Star involution on random forms
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let f = random_two_form(&mut rng);
        let ff = m.hodge_star2(&m.hodge_star2(&f));
        let mut diff = 0.0;
        for i in 0..6 {
            diff += (ff.coeffs[i] - f.coeffs[i]).powi(2);
        }
        worst = worst.max(diff.sqrt() / f.norm().max(1e-9));
    }
    identities.push(IdentityResult {
        name: "star_involution".into(),
        max_residual: worst,
        tolerance: TOL_CONSTRUCTION,
    });

    // SD and ASD eigenspaces have dimension three: projector ranks
    let dims_ok = {
        let mut sd: Vec<[f64; 6]> = Vec::new();
        let mut asd: Vec<[f64; 6]> = Vec::new();
        for i in 0..6 {
            let mut coeffs = [0.0; 6];
            coeffs[i] = 1.0;
            let f = TwoForm::new(coeffs);
            sd.push(f.self_dual_part().coeffs);
            asd.push(f.anti_self_dual_part().coeffs);
        }
        (real_rank6(&sd), real_rank6(&asd))
    };
    identities.push(IdentityResult {
        name: "lambda_plus_minus_dimensions".into(),
        max_residual: ((dims_ok.0 as f64) - 3.0).abs() + ((dims_ok.1 as f64) - 3.0).abs(),
        tolerance: 0.0,
    });

    // Quadratic map identity <q(phi) phi, phi> = |phi|^4 / 2
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let phi = random_spinor(&mut rng);
        let (endo, _) = m.quad_map(&phi);
        let image = endo.matrix * phi.components;
        let pairing = (image.adjoint() * phi.components)[(0, 0)].re;
        let expected = 0.5 * phi.norm_squared().powi(2);
        worst = worst.max((pairing - expected).abs() / expected.max(1e-12));
    }
    identities.push(IdentityResult {
        name: "quad_map_half_norm_fourth".into(),
        max_residual: worst,
        tolerance: TOL_CONSTRUCTION,
    });

    // Anti-self-dual forms act as zero on W+
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let asd = random_two_form(&mut rng).anti_self_dual_part();
        if asd.norm() < 1e-9 {
            continue;
        }
        let action = m.two_form_action_on_wplus(&asd);
        worst = worst.max(action.norm() / asd.norm());
    }
    identities.push(IdentityResult {
        name: "asd_acts_as_zero_on_wplus".into(),
        max_residual: worst,
        tolerance: TOL_DERIVED,
    });

    // form_to_endo round trip on self-dual forms
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let f = random_two_form(&mut rng).self_dual_part();
        if f.norm() < 1e-9 {
            continue;
        }
        let Ok(endo) = m.form_to_endo(&f) else { continue };
        let back = m.endo_to_form(&endo.matrix);
        let mut diff = 0.0;
        for i in 0..6 {
            diff += (back.coeffs[i] - f.coeffs[i]).powi(2);
        }
        worst = worst.max(diff.sqrt() / f.norm());
    }
    identities.push(IdentityResult {
        name: "form_endo_round_trip".into(),
        max_residual: worst,
        tolerance: TOL_DERIVED,
    });

    // Projective invariance of the spinor-to-structure map
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let phi = random_spinor(&mut rng);
        let z = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if z.norm() < 1e-2 {
            continue;
        }
        let scaled = Spinor::plus(z * phi.components[0], z * phi.components[1]);
        let j1 = m.spinor_to_acs(&phi).expect("nonzero spinor");
        let j2 = m.spinor_to_acs(&scaled).expect("nonzero spinor");
        worst = worst.max((j1 - j2).norm());
    }
    identities.push(IdentityResult {
        name: "spinor_to_acs_projective".into(),
        max_residual: worst,
        tolerance: TOL_DERIVED,
    });

    // Twistor sphere coverage: every net point is hit by a spinor
    let mut worst = 0.0f64;
    let m_std = Metric4::standard();
    let net = fibonacci_sphere(500);
    for &(alpha, beta, gamma) in &net {
        let phi = spinor_over_sphere_point(alpha, beta, gamma);
        let j = m_std.spinor_to_acs(&phi).expect("unit spinor");
        let expected = alpha * reference_i() + beta * reference_j() + gamma * reference_k();
        worst = worst.max((j - expected).norm());
    }
    identities.push(IdentityResult {
        name: "twistor_sphere_coverage".into(),
        max_residual: worst,
        tolerance: 1e-2,
    });

    // Composite consistency: the fundamental form of the projected
    // structure is a positive multiple of the quadratic-map form
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let phi = random_spinor(&mut rng);
        let j = m.spinor_to_acs(&phi).expect("nonzero spinor");
        let omega = m.associated_two_form(&j).expect("compatible structure");
        let (_, qform) = m.quad_map(&phi);
        if qform.norm() < 1e-9 {
            continue;
        }
        let scale = omega.norm() / qform.norm();
        let mut diff = 0.0;
        for i in 0..6 {
            diff += (omega.coeffs[i] - scale * qform.coeffs[i]).powi(2);
        }
        worst = worst.max(diff.sqrt() / omega.norm());
    }
    identities.push(IdentityResult {
        name: "composite_spinor_form_consistency".into(),
        max_residual: worst,
        tolerance: TOL_COMPOSITE,
    });

    // Ruling classification residual for lines from both spheres
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = random_metric(&mut rng);
        let (alpha, beta, gamma) = random_sphere_point(&mut rng);
        let j = m.acs_from_twistor_point(alpha, beta, gamma);
        if let Ok((l, lbar)) = lines_of_acs(&m, &j) {
            worst = worst.max(ruling_residual(&m, &l));
            worst = worst.max(ruling_residual(&m, &lbar));
        }
        let j = m.reverse_acs_from_twistor_point(alpha, beta, gamma);
        if let Ok((l, _)) = lines_of_acs(&m, &j) {
            worst = worst.max(ruling_residual(&m, &l));
        }
    }
    identities.push(IdentityResult {
        name: "ruling_classification".into(),
        max_residual: worst,
        tolerance: 1e-9,
    });

    // Theta is involutive and the quaternionic structures have no fixed
    // points: worst violation of distance(l, theta l) > 1/2 over a net
    // (two rulings per point, so trials = 1000 walks a 10^4-line net)
    let mut theta_worst = 0.0f64;
    let mut fixed_point_margin = f64::INFINITY;
    let net = fibonacci_sphere((trials as usize * 5).max(100));
    for &(alpha, beta, gamma) in &net {
        for reverse in [false, true] {
            let j = if reverse {
                m_std.reverse_acs_from_twistor_point(alpha, beta, gamma)
            } else {
                m_std.acs_from_twistor_point(alpha, beta, gamma)
            };
            let Ok((l, _)) = lines_of_acs(&m_std, &j) else { continue };
            let conj = l.conjugated();
            theta_worst = theta_worst.max(conj.conjugated().distance_to(&l));
            fixed_point_margin = fixed_point_margin.min(l.distance_to(&conj));
        }
    }
    identities.push(IdentityResult {
        name: "theta_involutive".into(),
        max_residual: theta_worst,
        tolerance: TOL_DERIVED,
    });
    identities.push(IdentityResult {
        name: "quaternionic_fixed_point_free".into(),
        max_residual: 0.5 - fixed_point_margin,
        tolerance: 0.0,
    });

    // psi_p reality: psi_p(theta-(l)) = theta+(psi_p(l)) for real p
    let mut worst = 0.0f64;
    for _ in 0..trials.min(200) {
        let m = random_metric(&mut rng);
        let p = loop {
            let v = random_vector(&mut rng);
            if v.norm() > 1e-2 {
                break ProjPoint::from_real(&v).expect("nonzero");
            }
        };
        let (alpha, beta, gamma) = random_sphere_point(&mut rng);
        let j = m.reverse_acs_from_twistor_point(alpha, beta, gamma);
        let Ok((l, _)) = lines_of_acs(&m, &j) else { continue };
        let Ok(lhs) = psi_p(&m, &p, &l.conjugated()) else { continue };
        let Ok(rhs) = psi_p(&m, &p, &l) else { continue };
        worst = worst.max(lhs.distance_to(&rhs.conjugated()));
    }
    identities.push(IdentityResult {
        name: "psi_reality_commutation".into(),
        max_residual: worst,
        tolerance: TOL_COMPOSITE,
    });

    // psi_p round trip: applying psi from the same point inverts it
    let mut worst = 0.0f64;
    for _ in 0..trials.min(200) {
        let m = random_metric(&mut rng);
        let p = loop {
            let v = random_vector(&mut rng);
            if v.norm() > 1e-2 {
                break ProjPoint::from_real(&v).expect("nonzero");
            }
        };
        let (alpha, beta, gamma) = random_sphere_point(&mut rng);
        let j = m.reverse_acs_from_twistor_point(alpha, beta, gamma);
        let Ok((l, _)) = lines_of_acs(&m, &j) else { continue };
        let Ok(forward) = psi_p(&m, &p, &l) else { continue };
        let Ok(back) = psi_p(&m, &p, &forward) else { continue };
        worst = worst.max(back.distance_to(&l));
    }
    identities.push(IdentityResult {
        name: "psi_round_trip".into(),
        max_residual: worst,
        tolerance: TOL_COMPOSITE,
    });

    // Tangent-conic construction agrees with the quadratic map
    let mut worst = 0.0f64;
    for _ in 0..trials.min(100) {
        let m = random_metric(&mut rng);
        let phi = random_spinor(&mut rng);
        let j = m.spinor_to_acs(&phi).expect("nonzero spinor");
        let Ok((l, _)) = lines_of_acs(&m, &j) else { continue };
        let bivector = crate::twistor::line_bivector_frame(&m, &l);
        let Ok(point) = SelfDualBivector::from_frame_bivector(&bivector) else { continue };
        let Ok(omega) = tangent_conic_quadratic(&m, &point) else { continue };
        let (_, qform) = m.quad_map(&phi);
        worst = worst.max(sd_projective_distance(&omega, &qform));
    }
    identities.push(IdentityResult {
        name: "tangent_conic_agreement".into(),
        max_residual: worst,
        tolerance: TOL_COMPOSITE,
    });

    SelftestReport { seed, trials, identities }
}

fn real_rank6(vectors: &[[f64; 6]]) -> usize {
    let mut rows: Vec<[f64; 6]> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..6 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col].abs() > 1e-9) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col];
        for r in 0..rows.len() {
            if r != rank && rows[r][col].abs() > 1e-12 {
                let factor = rows[r][col] / lead;
                for c in 0..6 {
                    rows[r][c] -= factor * rows[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

fn fibonacci_sphere(n: usize) -> Vec<(f64, f64, f64)> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let theta = golden * i as f64;
            (r * theta.cos(), y, r * theta.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_with_default_seed() {
        let report = kernel_selftest(1, 50);
        for identity in &report.identities {
            assert!(
                identity.passed(),
                "{} residual {:e} tolerance {:e}",
                identity.name,
                identity.max_residual,
                identity.tolerance
            );
        }
    }

    #[test]
    fn selftest_is_deterministic() {
        let a = kernel_selftest(7, 20);
        let b = kernel_selftest(7, 20);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn spinor_over_sphere_point_round_trips() {
        for &(alpha, beta, gamma) in &fibonacci_sphere(50) {
            let phi = spinor_over_sphere_point(alpha, beta, gamma);
            assert!((phi.norm_squared() - 1.0).abs() < 1e-9);
        }
    }
}

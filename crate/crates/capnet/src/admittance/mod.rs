//! Edge admittances from saddle geometry.
//!
//! Near a saddle z the potential splits into an unstable profile g along
//! the downhill direction and a stable profile G transverse to it. The
//! admittance of the corresponding network edge is
//!
//! ```text
//! y_e = ε · V_ε / d_ε · e^{F(z)/ε},
//!   d_ε ≈ e^{F(z)/ε} ∫ e^{−g(s)/ε} ds,
//!   V_ε ≈ e^{−F(z)/ε} ∫ e^{−G(y)/ε} dy,
//! ```
//!
//! so `ln y_e = ln ε + ln ∫e^{−G/ε} − ln ∫e^{−g/ε} − F(z)/ε`. The
//! exponentials are kept in log space throughout; F(z)/ε routinely
//! exceeds 700.

mod quad;

pub use quad::{adaptive_simpson, laplace_integral_1d, QuadError, DEFAULT_TOL};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::logspace::LogVal;

#[derive(Debug, Error, PartialEq)]
pub enum AdmittanceError {
    #[error("profile parameter must be positive, got {0}")]
    NonPositiveCoefficient(f64),
    #[error("even-power exponent must be ≥ 2, got {0}")]
    BadExponent(f64),
    #[error("tabulated profile must have ≥ 3 points containing s = 0")]
    TabulatedTooSmall,
    #[error("tabulated profile violates convexity near s = {0}")]
    TabulatedNotConvex(f64),
    #[error("tabulated profile must have its proper minimum 0 at s = 0")]
    TabulatedBadMinimum,
    #[error("frame rotation is not orthogonal (defect {0:e})")]
    FrameNotOrthogonal(f64),
    #[error("frame dimensions do not match: rotation is {0}×{0}, translation has {1}")]
    FrameDimensionMismatch(usize, usize),
    #[error("cutoff delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("modulus too large: ω(δ) = {omega} exceeds δ/100 = {bound}")]
    ModulusTooLarge { omega: f64, bound: f64 },
    #[error("stable form is not positive definite")]
    FormNotPositiveDefinite,
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// One-dimensional convex profile with a proper minimum 0 at the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile1d {
    /// s ↦ λs²/2
    Quadratic { lambda: f64 },
    /// s ↦ λ|s|^p/p
    EvenPower { lambda: f64, p: f64 },
    /// piecewise-linear interpolation of samples, extended by the
    /// outermost slopes
    Tabulated { xs: Vec<f64>, vals: Vec<f64> },
}

impl Profile1d {
    pub fn quadratic(lambda: f64) -> Result<Profile1d, AdmittanceError> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(AdmittanceError::NonPositiveCoefficient(lambda));
        }
        Ok(Profile1d::Quadratic { lambda })
    }

    pub fn even_power(lambda: f64, p: f64) -> Result<Profile1d, AdmittanceError> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(AdmittanceError::NonPositiveCoefficient(lambda));
        }
        if p < 2.0 || !p.is_finite() {
            return Err(AdmittanceError::BadExponent(p));
        }
        Ok(Profile1d::EvenPower { lambda, p })
    }

    pub fn tabulated(xs: Vec<f64>, vals: Vec<f64>) -> Result<Profile1d, AdmittanceError> {
        if xs.len() < 3 || xs.len() != vals.len() {
            return Err(AdmittanceError::TabulatedTooSmall);
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(AdmittanceError::TabulatedTooSmall);
        }
        if xs[0] > 0.0 || *xs.last().unwrap() < 0.0 {
            return Err(AdmittanceError::TabulatedTooSmall);
        }
        // discrete convexity: slopes must be nondecreasing
        let mut prev_slope = f64::NEG_INFINITY;
        for w in xs.windows(2).zip(vals.windows(2)) {
            let slope = (w.1[1] - w.1[0]) / (w.0[1] - w.0[0]);
            if slope < prev_slope - 1e-12 {
                return Err(AdmittanceError::TabulatedNotConvex(w.0[0]));
            }
            prev_slope = slope;
        }
        let p = Profile1d::Tabulated { xs, vals };
        // proper minimum 0 at the origin
        if p.eval(0.0).abs() > 1e-12 {
            return Err(AdmittanceError::TabulatedBadMinimum);
        }
        if let Profile1d::Tabulated { xs, vals } = &p {
            if vals.iter().any(|v| *v < -1e-12)
                || vals[0] <= 1e-12
                || *vals.last().unwrap() <= 1e-12
            {
                return Err(AdmittanceError::TabulatedBadMinimum);
            }
            let _ = xs;
        }
        Ok(p)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile1d::Quadratic { lambda } => 0.5 * lambda * s * s,
            Profile1d::EvenPower { lambda, p } => lambda * s.abs().powf(*p) / p,
            Profile1d::Tabulated { xs, vals } => {
                let n = xs.len();
                if s <= xs[0] {
                    let slope = (vals[1] - vals[0]) / (xs[1] - xs[0]);
                    return vals[0] + slope * (s - xs[0]);
                }
                if s >= xs[n - 1] {
                    let slope = (vals[n - 1] - vals[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    return vals[n - 1] + slope * (s - xs[n - 1]);
                }
                let i = xs.partition_point(|x| *x <= s).min(n - 1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                let t = (s - x0) / (x1 - x0);
                vals[i - 1] * (1.0 - t) + vals[i] * t
            }
        }
    }

    /// ∫_ℝ e^{−profile(s)/ε} ds.
    pub fn laplace_integral(&self, eps: f64, tol: f64) -> Result<f64, AdmittanceError> {
        Ok(laplace_integral_1d(&|s| self.eval(s), eps, tol)?)
    }
}

/// Transverse (stable) profile in n−1 dimensions.
#[derive(Clone, Debug, PartialEq)]
pub enum StableProfile {
    /// G(y) = Σ gᵢ(yᵢ): the integral factors into 1D integrals.
    Separable(Vec<Profile1d>),
    /// Non-separable positive-definite quadratic form in two variables,
    /// G(y) = (a y₁² + 2 b y₁y₂ + c y₂²)/2; integrated by a
    /// tensor-product adaptive rule.
    Form2d { a: f64, b: f64, c: f64 },
}

impl StableProfile {
    pub fn separable(factors: Vec<Profile1d>) -> StableProfile {
        StableProfile::Separable(factors)
    }

    pub fn form2d(a: f64, b: f64, c: f64) -> Result<StableProfile, AdmittanceError> {
        if a <= 0.0 || a * c - b * b <= 0.0 {
            return Err(AdmittanceError::FormNotPositiveDefinite);
        }
        Ok(StableProfile::Form2d { a, b, c })
    }

    pub fn dim(&self) -> usize {
        match self {
            StableProfile::Separable(fs) => fs.len(),
            StableProfile::Form2d { .. } => 2,
        }
    }

    /// ∫_{ℝ^{n−1}} e^{−G(y)/ε} dy.
    pub fn laplace_integral(&self, eps: f64, tol: f64) -> Result<f64, AdmittanceError> {
        match self {
            StableProfile::Separable(fs) => {
                let mut out = 1.0;
                for f in fs {
                    out *= f.laplace_integral(eps, tol)?;
                }
                Ok(out)
            }
            StableProfile::Form2d { a, b, c } => {
                // tensor-product rule: completing the square in y₂ shifts
                // the inner Gaussian without changing its integral, so the
                // outer integrand is the Schur-complement profile times a
                // constant inner factor
                let (a, b, c) = (*a, *b, *c);
                let schur = a - b * b / c;
                let outer_int =
                    laplace_integral_1d(&|y1: f64| 0.5 * schur * y1 * y1, eps, tol)?;
                let inner_int = laplace_integral_1d(&|t: f64| 0.5 * c * t * t, eps, tol)?;
                Ok(outer_int * inner_int)
            }
        }
    }
}

/// Increasing modulus ω with ω(s)/s → 0 as s → 0; enters only through
/// descriptor validation and the truncation error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulus {
    pub coeff: f64,
    /// exponent > 1 so that ω(s) = coeff·s^exponent is o(s)
    pub exponent: f64,
}

impl Modulus {
    pub fn eval(&self, s: f64) -> f64 {
        self.coeff * s.powf(self.exponent)
    }
}

impl Default for Modulus {
    /// ω(s) = s²/100, which satisfies ω(δ) ≤ δ/100 for every δ ≤ 1.
    fn default() -> Self {
        Modulus {
            coeff: 0.01,
            exponent: 2.0,
        }
    }
}

/// Rigid frame mapping saddle-local coordinates to ambient ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub rotation: DMatrix<f64>,
    pub translation: Vec<f64>,
}

impl Frame {
    pub fn new(rotation: DMatrix<f64>, translation: Vec<f64>) -> Result<Frame, AdmittanceError> {
        let n = rotation.nrows();
        if rotation.ncols() != n || translation.len() != n {
            return Err(AdmittanceError::FrameDimensionMismatch(n, translation.len()));
        }
        let defect = (&rotation * rotation.transpose() - DMatrix::identity(n, n)).norm();
        if defect > 1e-12 {
            return Err(AdmittanceError::FrameNotOrthogonal(defect));
        }
        Ok(Frame {
            rotation,
            translation,
        })
    }

    pub fn identity(n: usize) -> Frame {
        Frame {
            rotation: DMatrix::identity(n, n),
            translation: vec![0.0; n],
        }
    }
}

/// Local data of one saddle bridge, enough to compute its admittance.
#[derive(Clone, Debug)]
pub struct SaddleDescriptor {
    pub saddle_height: f64,
    pub unstable: Profile1d,
    pub stable: StableProfile,
    pub frame: Frame,
    pub delta: f64,
    pub omega: Modulus,
}

impl SaddleDescriptor {
    pub fn new(
        saddle_height: f64,
        unstable: Profile1d,
        stable: StableProfile,
        frame: Frame,
        delta: f64,
        omega: Modulus,
    ) -> Result<SaddleDescriptor, AdmittanceError> {
        if !(delta > 0.0) {
            return Err(AdmittanceError::BadDelta(delta));
        }
        let w = omega.eval(delta);
        if w > delta / 100.0 {
            return Err(AdmittanceError::ModulusTooLarge {
                omega: w,
                bound: delta / 100.0,
            });
        }
        let n = frame.rotation.nrows();
        if n != 1 + stable.dim() {
            return Err(AdmittanceError::FrameDimensionMismatch(
                n,
                1 + stable.dim(),
            ));
        }
        Ok(SaddleDescriptor {
            saddle_height,
            unstable,
            stable,
            frame,
            delta,
            omega,
        })
    }

    pub fn dim(&self) -> usize {
        1 + self.stable.dim()
    }
}

/// d_ε ≈ e^{F(z)/ε} ∫ e^{−g/ε}: the geodesic distance across the bridge.
pub fn geodesic_distance(s: &SaddleDescriptor, eps: f64) -> Result<LogVal, AdmittanceError> {
    let i_g = s.unstable.laplace_integral(eps, DEFAULT_TOL)?;
    Ok(LogVal::from_ln(s.saddle_height / eps + i_g.ln()))
}

/// V_ε ≈ e^{−F(z)/ε} ∫ e^{−G/ε}: the minimal cut through the bridge.
pub fn minimal_cut(s: &SaddleDescriptor, eps: f64) -> Result<LogVal, AdmittanceError> {
    let i_cap = s.stable.laplace_integral(eps, DEFAULT_TOL)?;
    Ok(LogVal::from_ln(-s.saddle_height / eps + i_cap.ln()))
}

/// y_e = ε · V_ε/d_ε · e^{F(z)/ε}, carried in log space.
pub fn admittance(s: &SaddleDescriptor, eps: f64) -> Result<LogVal, AdmittanceError> {
    let i_g = s.unstable.laplace_integral(eps, DEFAULT_TOL)?;
    let i_cap = s.stable.laplace_integral(eps, DEFAULT_TOL)?;
    Ok(LogVal::from_ln(
        eps.ln() + i_cap.ln() - i_g.ln() - s.saddle_height / eps,
    ))
}

/// Closed form for fully quadratic saddles in ℝⁿ:
/// y_e = ε·e^{−F(z)/ε}·(2πε)^{(n−2)/2}·√λ₁/√(λ₂⋯λₙ),
/// where λ₁ is the curvature of the unstable profile and λ₂…λₙ the
/// stable ones.
pub fn admittance_quadratic(
    lambda_unstable: f64,
    lambdas_stable: &[f64],
    saddle_height: f64,
    eps: f64,
) -> LogVal {
    let n = 1 + lambdas_stable.len();
    let two_pi_eps = 2.0 * std::f64::consts::PI * eps;
    let mut ln = eps.ln() - saddle_height / eps + 0.5 * (n as f64 - 2.0) * two_pi_eps.ln();
    ln += 0.5 * lambda_unstable.ln();
    for l in lambdas_stable {
        ln -= 0.5 * l.ln();
    }
    LogVal::from_ln(ln)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_saddle(height: f64, l1: f64, l2: f64) -> SaddleDescriptor {
        SaddleDescriptor::new(
            height,
            Profile1d::quadratic(l1).unwrap(),
            StableProfile::separable(vec![Profile1d::quadratic(l2).unwrap()]),
            Frame::identity(2),
            0.5,
            Modulus::default(),
        )
        .unwrap()
    }

    #[test]
    fn geodesic_distance_examples() {
        let s = quad_saddle(0.0, 2.0, 1.0);
        let d = geodesic_distance(&s, 0.1).unwrap().to_f64();
        let want = (0.1 * std::f64::consts::PI).sqrt(); // √(2πε/λ₁)
        assert!(((d - want) / want).abs() < 1e-9, "{d} vs {want}");

        let s1 = quad_saddle(1.0, 2.0, 1.0);
        let d1 = geodesic_distance(&s1, 0.1).unwrap();
        assert!((d1.ln() - (d.ln() + 10.0)).abs() < 1e-9);
    }

    #[test]
    fn minimal_cut_examples() {
        let s = quad_saddle(0.0, 2.0, 1.0);
        let v = minimal_cut(&s, 0.1).unwrap().to_f64();
        let want = (2.0 * std::f64::consts::PI * 0.1).sqrt();
        assert!(((v - want) / want).abs() < 1e-9);

        // separable 2D stable profile multiplies the 1D Gaussians
        let s2 = SaddleDescriptor::new(
            0.0,
            Profile1d::quadratic(1.0).unwrap(),
            StableProfile::separable(vec![
                Profile1d::quadratic(3.0).unwrap(),
                Profile1d::quadratic(5.0).unwrap(),
            ]),
            Frame::identity(3),
            0.5,
            Modulus::default(),
        )
        .unwrap();
        let v2 = minimal_cut(&s2, 0.1).unwrap().to_f64();
        let tp = 2.0 * std::f64::consts::PI * 0.1;
        let want2 = (tp / 3.0).sqrt() * (tp / 5.0).sqrt();
        assert!(((v2 - want2) / want2).abs() < 1e-8);
    }

    #[test]
    fn admittance_examples() {
        let eps = 0.1;
        // λ₁ = λ₂ = 1 → y = ε
        let y = admittance(&quad_saddle(0.0, 1.0, 1.0), eps).unwrap().to_f64();
        assert!(((y - eps) / eps).abs() < 1e-9, "{y}");
        // λ₁ = 4, λ₂ = 1 → y = 2ε
        let y = admittance(&quad_saddle(0.0, 4.0, 1.0), eps).unwrap().to_f64();
        assert!(((y - 2.0 * eps) / (2.0 * eps)).abs() < 1e-9);
        // height h multiplies by e^{−h/ε}, exact in log space
        let y0 = admittance(&quad_saddle(0.0, 4.0, 1.0), eps).unwrap();
        let yh = admittance(&quad_saddle(3.0, 4.0, 1.0), eps).unwrap();
        assert!((yh.ln() - (y0.ln() - 30.0)).abs() < 1e-9);
        // survives heights that would underflow plain doubles
        let deep = admittance(&quad_saddle(200.0, 1.0, 1.0), 0.1).unwrap();
        assert!((deep.ln() - (eps.ln() - 2000.0)).abs() < 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_form_matrix() {
        for l1 in [0.5, 1.0, 4.0] {
            for l2 in [0.5, 1.0, 2.0] {
                for eps in [1e-3, 1e-2, 0.1] {
                    let y = admittance(&quad_saddle(0.0, l1, l2), eps).unwrap();
                    let want = admittance_quadratic(l1, &[l2], 0.0, eps);
                    let rel = (y.ln() - want.ln()).exp() - 1.0;
                    assert!(
                        rel.abs() < 1e-8,
                        "λ₁={l1} λ₂={l2} ε={eps}: rel {rel:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn form2d_matches_determinant() {
        // ∫ e^{−yᵀQy/(2ε)} dy = 2πε/√det Q
        let (a, b, c) = (2.0, 0.7, 1.5);
        let g = StableProfile::form2d(a, b, c).unwrap();
        let eps = 0.1;
        let got = g.laplace_integral(eps, 1e-10).unwrap();
        let det = a * c - b * b;
        let want = 2.0 * std::f64::consts::PI * eps / det.sqrt();
        assert!(((got - want) / want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn even_power_matches_gamma() {
        // ∫ e^{−λ|s|^p/(pε)} ds = 2 (pε/λ)^{1/p} Γ(1/p)/p
        let (lambda, p, eps) = (1.0, 4.0, 0.1);
        let prof = Profile1d::even_power(lambda, p).unwrap();
        let got = prof.laplace_integral(eps, 1e-10).unwrap();
        let want = 2.0 * (p * eps / lambda).powf(1.0 / p)
            * statrs::function::gamma::gamma(1.0 / p)
            / p;
        assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn descriptor_validation() {
        assert!(Profile1d::quadratic(-1.0).is_err());
        assert!(Profile1d::even_power(1.0, 1.5).is_err());
        // ω(δ) > δ/100 rejected
        let err = SaddleDescriptor::new(
            0.0,
            Profile1d::quadratic(1.0).unwrap(),
            StableProfile::separable(vec![Profile1d::quadratic(1.0).unwrap()]),
            Frame::identity(2),
            0.5,
            Modulus {
                coeff: 1.0,
                exponent: 1.1,
            },
        )
        .unwrap_err();
        assert!(matches!(err, AdmittanceError::ModulusTooLarge { .. }));
        // non-orthogonal frame rejected
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            Frame::new(r, vec![0.0, 0.0]),
            Err(AdmittanceError::FrameNotOrthogonal(_))
        ));
        // convexity check on tabulated profiles
        let err = Profile1d::tabulated(
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            vec![1.0, 0.8, 0.0, 0.8, 1.0],
        )
        .unwrap_err();
        assert!(matches!(err, AdmittanceError::TabulatedNotConvex(_)));
        let ok = Profile1d::tabulated(
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            vec![1.0, 0.25, 0.0, 0.25, 1.0],
        )
        .unwrap();
        assert!((ok.eval(0.25) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_height_and_scaling_law() {
        let eps = 0.05;
        let y_low = admittance(&quad_saddle(1.0, 2.0, 1.0), eps).unwrap();
        let y_high = admittance(&quad_saddle(1.5, 2.0, 1.0), eps).unwrap();
        assert!(y_high < y_low);
        // in ℝ² with quadratic profiles, y/ε is independent of ε
        let a = admittance(&quad_saddle(0.0, 3.0, 2.0), 0.1).unwrap();
        let b = admittance(&quad_saddle(0.0, 3.0, 2.0), 0.02).unwrap();
        assert!(((a.ln() - 0.1f64.ln()) - (b.ln() - 0.02f64.ln())).abs() < 1e-8);
    }
}

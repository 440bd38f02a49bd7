//! Least squares under additive Gaussian label noise.
//!
//! With `y = Xw + ηg`, `g ~ N(0, I)`, the estimate `ŵ = (XᵀX)⁻¹Xᵀy` has error
//! `z = ŵ − w ~ N(0, η²(XᵀX)⁻¹)`, hence `E‖z‖² = η² Σ σᵢ⁻²` over the
//! singular values of `X`.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Relative singularity tolerance: `σ_min ≥ SINGULAR_RTOL · σ_max`.
pub const SINGULAR_RTOL: f64 = 1e-10;

/// Default `c₀` in the learnability test `σ_d ≥ c₀√m`.
pub const DEFAULT_C0: f64 = 0.3;

/// An `m × d` design with `m ≥ d ≥ 1` and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn from_matrix(x: DMatrix<f64>) -> Result<Self> {
        let (m, d) = x.shape();
        if d == 0 {
            return domain("design needs at least one column");
        }
        if m < d {
            return domain(format!("design needs m >= d (got {m} x {d})"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return domain("design entries must be finite");
        }
        Ok(DesignMatrix { x })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Invalid(format!(
                "row {} has {} entries, expected {d}",
                i + 1,
                rows[i].len()
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        DesignMatrix::from_matrix(DMatrix::from_row_slice(rows.len(), d, &flat))
    }

    /// Comma-separated rows; a first row that does not parse as numbers is
    /// taken as a header.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse(format!("row {}: non-numeric entry", i + 1)));
                }
            }
        }
        DesignMatrix::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Singular values, nonincreasing.
    pub fn singular_values(&self) -> Vec<f64> {
        self.x.singular_values().iter().copied().collect()
    }

    /// Singular values after checking `σ_min ≥ SINGULAR_RTOL · σ_max`.
    pub fn checked_singular_values(&self) -> Result<Vec<f64>> {
        let sv = self.singular_values();
        let sigma_max = sv[0];
        let sigma_min = *sv.last().expect("d >= 1");
        let threshold = SINGULAR_RTOL * sigma_max;
        if !(sigma_min > 0.0 && sigma_min >= threshold) {
            return Err(Error::SingularDesign {
                sigma_min,
                threshold,
            });
        }
        Ok(sv)
    }
}

/// A reusable QR factorization `X = QR` for repeated least-squares solves.
#[derive(Debug, Clone)]
pub struct OlsSolver {
    x: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    sigma_max: f64,
}

impl OlsSolver {
    pub fn new(design: &DesignMatrix) -> Result<Self> {
        let sv = design.checked_singular_values()?;
        let qr = design.x.clone().qr();
        Ok(OlsSolver {
            x: design.x.clone(),
            q: qr.q(),
            r: qr.r(),
            sigma_max: sv[0],
        })
    }

    /// `ŵ = R⁻¹Qᵀy`, then `‖Xᵀ(Xŵ − y)‖` is checked against a
    /// scale-relative tolerance.
    pub fn solve(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.len() != self.x.nrows() {
            return Err(Error::Invalid(format!(
                "response has {} entries, design has {} rows",
                y.len(),
                self.x.nrows()
            )));
        }
        let qty = self.q.transpose() * y;
        let w = self
            .r
            .solve_upper_triangular(&qty)
            .ok_or(Error::SingularDesign {
                sigma_min: 0.0,
                threshold: SINGULAR_RTOL * self.sigma_max,
            })?;
        let gradient = self.x.transpose() * (&self.x * &w - y);
        let tol = 1e-9 * self.sigma_max * (self.sigma_max * w.norm() + y.norm()).max(1.0);
        if gradient.norm() > tol {
            return Err(Error::Invalid(format!(
                "normal-equation residual {:e} exceeds {tol:e}",
                gradient.norm()
            )));
        }
        Ok(w)
    }
}

/// Ordinary least squares through an orthogonal factorization.
pub fn ols_fit(design: &DesignMatrix, y: &DVector<f64>) -> Result<DVector<f64>> {
    OlsSolver::new(design)?.solve(y)
}

/// `η² Σ σᵢ⁻²`.
pub fn expected_error(design: &DesignMatrix, eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta >= 0.0) {
        return domain(format!("noise level must be nonnegative (got {eta})"));
    }
    let sv = design.checked_singular_values()?;
    Ok(eta * eta * sv.iter().map(|s| 1.0 / (s * s)).sum::<f64>())
}

/// The OLS fit together with its error identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub w_hat: Vec<f64>,
    pub error_sq_expected: f64,
    pub singular_values: Vec<f64>,
}

pub fn regress(design: &DesignMatrix, y: &DVector<f64>, eta: f64) -> Result<RegressionResult> {
    let w = ols_fit(design, y)?;
    Ok(RegressionResult {
        w_hat: w.iter().copied().collect(),
        error_sq_expected: expected_error(design, eta)?,
        singular_values: design.singular_values(),
    })
}

/// Learnability of a fixed design from its spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversarialCheck {
    /// `E‖z‖²·√m`.
    pub epsilon: f64,
    /// `1/√m`; by Markov `P(‖z‖² > ε) ≤ δ`.
    pub delta: f64,
    /// `σ_d ≥ c₀√m`.
    pub qualifies: bool,
    pub sigma_min: f64,
    pub c0: f64,
}

pub fn adversarial_design_check(design: &DesignMatrix, eta: f64, c0: f64) -> Result<AdversarialCheck> {
    if !(c0.is_finite() && c0 > 0.0) {
        return domain(format!("c0 must be positive (got {c0})"));
    }
    let err = expected_error(design, eta)?;
    let sv = design.singular_values();
    let root_m = (design.rows() as f64).sqrt();
    let sigma_min = *sv.last().expect("d >= 1");
    Ok(AdversarialCheck {
        epsilon: err * root_m,
        delta: 1.0 / root_m,
        qualifies: sigma_min >= c0 * root_m,
        sigma_min,
        c0,
    })
}

/// Draw `y = Xw + ηg` and return `‖ŵ − w‖²`.
pub fn noise_trial<R: Rng + ?Sized>(
    solver: &OlsSolver,
    w_true: &DVector<f64>,
    eta: f64,
    rng: &mut R,
) -> Result<f64> {
    let clean = &solver.x * w_true;
    let y = DVector::from_iterator(
        clean.len(),
        clean.iter().map(|c| c + eta * rng.sample::<f64, _>(StandardNormal)),
    );
    let w = solver.solve(&y)?;
    Ok((w - w_true).norm_squared())
}

/// `m × d` matrix of independent standard normals.
pub fn gaussian_design<R: Rng + ?Sized>(m: usize, d: usize, rng: &mut R) -> Result<DesignMatrix> {
    DesignMatrix::from_matrix(DMatrix::from_fn(m, d, |_, _| rng.sample(StandardNormal)))
}

/// `U·diag(σ)·Vᵀ` with `U`, `V` the orthogonal factors of Gaussian matrices.
pub fn design_with_spectrum<R: Rng + ?Sized>(m: usize, sigma: &[f64], rng: &mut R) -> Result<DesignMatrix> {
    let d = sigma.len();
    if d == 0 || m < d {
        return domain(format!("spectrum of length {d} needs 1 <= d <= m = {m}"));
    }
    let u = DMatrix::<f64>::from_fn(m, d, |_, _| rng.sample(StandardNormal)).qr().q();
    let v = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal)).qr().q();
    let s = DMatrix::from_diagonal(&DVector::from_column_slice(sigma));
    DesignMatrix::from_matrix(u * s * v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_of_two_observations() {
        let x = DesignMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let w = ols_fit(&x, &DVector::from_vec(vec![1.0, 3.0])).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-12);
        assert!((expected_error(&x, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(expected_error(&x, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = gaussian_design(30, 4, &mut rng).unwrap();
        let w = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let y = x.matrix() * &w;
        let w_hat = ols_fit(&x, &y).unwrap();
        assert!((w_hat - w).amax() < 1e-10);
    }

    #[test]
    fn singular_designs_are_rejected() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(ols_fit(&x, &DVector::zeros(3)), Err(Error::SingularDesign { .. })));
        assert!(matches!(expected_error(&x, 1.0), Err(Error::SingularDesign { .. })));
        assert!(DesignMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(DesignMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let a = DesignMatrix::read_csv(&b"x1,x2\n1,0\n0,2\n1,1\n"[..]).unwrap();
        let b = DesignMatrix::read_csv(&b"1, 0\n0, 2\n1, 1\n"[..]).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.rows(), a.cols()), (3, 2));
        assert!(DesignMatrix::read_csv(&b"1,0\nx,2\n"[..]).is_err());
    }

    #[test]
    fn prescribed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = design_with_spectrum(40, &[1000.0, 10.0, 1.0], &mut rng).unwrap();
        let sv = x.singular_values();
        for (a, b) in sv.iter().zip([1000.0, 10.0, 1.0]) {
            assert!((a - b).abs() < 1e-9 * 1000.0);
        }
    }

    #[test]
    fn adversarial_check_at_zero_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = gaussian_design(100, 4, &mut rng).unwrap();
        let c = adversarial_design_check(&x, 0.0, DEFAULT_C0).unwrap();
        assert_eq!(c.epsilon, 0.0);
        assert!((c.delta - 0.1).abs() < 1e-15);
        assert!(c.qualifies);
    }
}

use thiserror::Error;

use crate::calculus::Calculus;
use crate::lang::Formula;
use crate::matrix::{Matrix, Valuation};
use crate::normality::{is_cover, CoverFailure};

/// Evidence that `formula` is underivable in `calculus`: a cover of the
/// calculus and a valuation under which the formula is undesignated.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub calculus: Calculus,
    pub matrix: Matrix,
    pub formula: Formula,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("the matrix is not a cover: {0}")]
    NotACover(CoverFailure),
    #[error("the formula takes the designated value `{0}`")]
    FormulaSatisfied(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

pub fn check_certificate(cert: &Certificate) -> Result<(), CertificateError> {
    let malformed = |e: &dyn std::fmt::Display| CertificateError::Malformed(e.to_string());
    if let Some(failure) = is_cover(&cert.calculus, &cert.matrix).map_err(|e| malformed(&e))? {
        return Err(CertificateError::NotACover(failure));
    }
    for (var, &v) in &cert.valuation {
        if v >= cert.matrix.len() {
            return Err(malformed(&format!("value of `{var}` out of range")));
        }
    }
    let v = cert
        .matrix
        .evaluate(&cert.valuation, &cert.formula)
        .map_err(|e| malformed(&e))?;
    if cert.matrix.is_designated(v) {
        return Err(CertificateError::FormulaSatisfied(cert.matrix.name(v).to_string()));
    }
    Ok(())
}

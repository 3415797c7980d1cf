use alloc::format;
use alloc::vec::Vec;

use crate::orthopoly::lambda_from_rates;
use crate::process::{Method, ObservableReport, ProcessParams};
use crate::{Error, Result};

/// Closed-form stationary observables of the symmetric chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SsepClosedForm {
    pub lambda: f64,
    /// `ln Z_L`, with `Z_L = Gamma(lambda + L + 1) / Gamma(lambda + 1)`.
    pub ln_z: f64,
    /// `Z_{L-1} / Z_L = 1 / (lambda + L)` in the normalization of `Z_L`.
    pub z_ratio: f64,
    /// Particle current, `z_ratio (alpha beta - gamma delta) / ((alpha + gamma)(beta + delta))`.
    pub current: f64,
    pub densities: Vec<f64>,
}

impl SsepClosedForm {
    pub fn z(&self) -> f64 {
        libm::exp(self.ln_z)
    }

    pub fn into_report(self, params: &ProcessParams) -> ObservableReport {
        let currents = currents_from_profile(params, &self.densities);
        let l = params.sites;
        let z = (1..=l)
            .map(|k| libm::exp(libm::lgamma(self.lambda + k as f64 + 1.0) - libm::lgamma(self.lambda + 1.0)))
            .collect();
        ObservableReport {
            method: Method::SsepClosedForm,
            params: *params,
            partition_functions: z,
            current: self.current,
            currents,
            densities: self.densities,
            probabilities: None,
            error: 0.0,
        }
    }
}

pub fn ssep_closed_forms(params: &ProcessParams) -> Result<SsepClosedForm> {
    params.validate()?;
    if params.q != 1.0 {
        return Err(Error::InvalidParameter(format!("closed forms hold at q = 1, got q = {}", params.q)));
    }
    let ProcessParams { alpha, beta, gamma, delta, sites, .. } = *params;
    let lambda = lambda_from_rates(alpha, beta, gamma, delta)?;
    if lambda <= -1.0 {
        return Err(Error::Degenerate(format!("lambda = {lambda} hits a pole of the gamma function")));
    }
    let l = sites as f64;
    let ln_z = libm::lgamma(lambda + l + 1.0) - libm::lgamma(lambda + 1.0);
    let z_ratio = 1.0 / (lambda + l);
    let ag = alpha + gamma;
    let slope = (alpha * beta - gamma * delta) / (ag * (beta + delta));
    let densities = (1..=sites).map(|i| alpha / ag - z_ratio * slope * (1.0 / ag + i as f64 - 1.0)).collect();
    Ok(SsepClosedForm { lambda, ln_z, z_ratio, current: z_ratio * slope, densities })
}

/// Boundary and bond currents of a symmetric chain from its profile; at
/// `q = 1` the bond current is the density difference.
fn currents_from_profile(p: &ProcessParams, rho: &[f64]) -> Vec<f64> {
    let l = rho.len();
    let mut out = Vec::with_capacity(l + 1);
    out.push(p.alpha * (1.0 - rho[0]) - p.gamma * rho[0]);
    out.extend(rho.windows(2).map(|w| w[0] - w[1]));
    out.push(p.beta * rho[l - 1] - p.delta * (1.0 - rho[l - 1]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_example() {
        let p = ProcessParams::ssep(1.0, 1.0, 0.0, 0.0, 2).unwrap();
        let c = ssep_closed_forms(&p).unwrap();
        assert_eq!(c.lambda, 1.0);
        assert!((c.current - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.current, c.z_ratio);
        assert!((c.densities[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.densities[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.z() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn single_site_density() {
        let (a, b, g, d) = (0.3, 2.0, 1.0, 0.7);
        let c = ssep_closed_forms(&ProcessParams::ssep(a, b, g, d, 1).unwrap()).unwrap();
        assert!((c.densities[0] - (a + d) / (a + b + g + d)).abs() < 1e-14);
    }

    #[test]
    fn profile_slope_is_current() {
        let p = ProcessParams::ssep(0.3, 1.0, 2.0, 0.3, 6).unwrap();
        let c = ssep_closed_forms(&p).unwrap();
        for i in 0..5 {
            assert!((c.densities[i] - c.densities[i + 1] - c.current).abs() < 1e-14);
        }
        let r = c.into_report(&p);
        assert!(r.current_spread() < 1e-14);
    }

    #[test]
    fn requires_unit_q() {
        assert!(ssep_closed_forms(&ProcessParams::new(0.5, 1.0, 1.0, 0.0, 0.0, 2).unwrap()).is_err());
    }
}

//! Separable joint-Beta "wavefunction" over rescaled (p, q).

use statrs::function::beta::ln_beta;

use super::MODULE;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWavefunction {
    alpha_p: f64,
    beta_p: f64,
    alpha_q: f64,
    beta_q: f64,
    support_p: (f64, f64),
    support_q: (f64, f64),
}

/// One rescaled Beta factor.
#[derive(Debug, Clone, Copy)]
struct Factor {
    alpha: f64,
    beta: f64,
    lo: f64,
    width: f64,
    ln_norm: f64,
}

impl Factor {
    fn new(alpha: f64, beta: f64, (lo, hi): (f64, f64)) -> Self {
        Self {
            alpha,
            beta,
            lo,
            width: hi - lo,
            ln_norm: ln_beta(alpha, beta),
        }
    }

    fn density(&self, x: f64, axis: &str) -> Result<f64> {
        let u = (x - self.lo) / self.width;
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::invalid(MODULE, format!("{axis} = {x} lies outside its support")));
        }
        if (u == 0.0 && self.alpha < 1.0) || (u == 1.0 && self.beta < 1.0) {
            return Err(Error::invalid(
                MODULE,
                format!("{axis} grid touches a singular endpoint at {x}"),
            ));
        }
        let f = u.powf(self.alpha - 1.0) * (1.0 - u).powf(self.beta - 1.0) * (-self.ln_norm).exp();
        Ok(f / self.width)
    }
}

fn check_shape(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, format!("{name} must be > 0, got {v}")))
    }
}

fn check_support(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && hi > lo {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, format!("{name} support ({lo}, {hi}) is degenerate")))
    }
}

impl BetaWavefunction {
    pub fn new(
        (alpha_p, beta_p): (f64, f64),
        (alpha_q, beta_q): (f64, f64),
        support_p: (f64, f64),
        support_q: (f64, f64),
    ) -> Result<Self> {
        check_shape("alpha_p", alpha_p)?;
        check_shape("beta_p", beta_p)?;
        check_shape("alpha_q", alpha_q)?;
        check_shape("beta_q", beta_q)?;
        check_support("p", support_p)?;
        check_support("q", support_q)?;
        Ok(Self {
            alpha_p,
            beta_p,
            alpha_q,
            beta_q,
            support_p,
            support_q,
        })
    }

    pub fn shape_p(&self) -> (f64, f64) {
        (self.alpha_p, self.beta_p)
    }

    pub fn shape_q(&self) -> (f64, f64) {
        (self.alpha_q, self.beta_q)
    }

    pub fn support_p(&self) -> (f64, f64) {
        self.support_p
    }

    pub fn support_q(&self) -> (f64, f64) {
        self.support_q
    }

    /// Marginal density of `p` in physical units.
    pub fn density_p(&self, p: f64) -> Result<f64> {
        Factor::new(self.alpha_p, self.beta_p, self.support_p).density(p, "p")
    }

    /// Marginal density of `q` in physical units.
    pub fn density_q(&self, q: f64) -> Result<f64> {
        Factor::new(self.alpha_q, self.beta_q, self.support_q).density(q, "q")
    }
}

/// Evaluates `ψ(p, q) = ψ_p(p)·ψ_q(q)` on a grid; row `i` belongs to `grid_p[i]`.
pub fn joint_wavefunction(w: &BetaWavefunction, grid_p: &[f64], grid_q: &[f64]) -> Result<Vec<Vec<f64>>> {
    let fp = grid_p.iter().map(|&p| w.density_p(p)).collect::<Result<Vec<_>>>()?;
    let fq = grid_q.iter().map(|&q| w.density_q(q)).collect::<Result<Vec<_>>>()?;
    Ok(fp.iter().map(|a| fq.iter().map(|b| a * b).collect()).collect())
}

/// Method-of-moments Beta fit after min–max rescaling onto `support`.
pub fn fit_beta(values: &[f64], support: (f64, f64)) -> Result<(f64, f64)> {
    if values.len() < 10 {
        return Err(Error::invalid(
            MODULE,
            format!("a Beta fit needs at least 10 values, got {}", values.len()),
        ));
    }
    check_support("fit", support)?;
    let (lo, hi) = support;
    if values.iter().any(|&v| !(lo..=hi).contains(&v)) {
        return Err(Error::invalid(MODULE, "support does not cover all values"));
    }
    let n = values.len() as f64;
    let u: Vec<f64> = values.iter().map(|&v| (v - lo) / (hi - lo)).collect();
    let m = u.iter().sum::<f64>() / n;
    let v = u.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    let bound = m * (1.0 - m);
    if v <= 0.0 {
        return Err(Error::invalid(MODULE, "degenerate variance, cannot fit a Beta"));
    }
    if v >= bound {
        return Err(Error::invalid(
            MODULE,
            format!("variance {v:.4e} too large for a Beta (limit {bound:.4e})"),
        ));
    }
    let common = bound / v - 1.0;
    Ok((m * common, (1.0 - m) * common))
}

//! Gamma/digamma evaluation and the closed-form constants attached to the
//! fractional and logarithmic Laplacians.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_PI: f64 = 1.144_729_885_849_400_2;
/// `2 * sqrt(e / pi)`, the Lanczos front factor.
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

fn lanczos_sum(x: f64) -> f64 {
    // series for x >= 0.5 in the shifted Lanczos form
    LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (k, dk)| s + dk / (x + k as f64 - 1.0))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection through Gamma(x)Gamma(1-x) = pi / sin(pi x)
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (k, dk)| s + dk / (k as f64 - x));
        PI / ((PI * x).sin()
            * s
            * TWO_SQRT_E_OVER_PI
            * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).powf(0.5 - x))
    } else {
        lanczos_sum(x)
            * TWO_SQRT_E_OVER_PI
            * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).powf(x - 0.5)
    }
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (k, dk)| s + dk / (k as f64 - x));
        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - TWO_SQRT_E_OVER_PI.ln()
            - (0.5 - x) * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).ln()
    } else {
        lanczos_sum(x).ln()
            + TWO_SQRT_E_OVER_PI.ln()
            + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln()
    }
}

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn digamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // shift into the asymptotic regime, then a Bernoulli tail
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k} / (2k x^{2k})
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + x.ln() - 0.5 * inv - tail
}

/// Digamma function psi = Gamma'/Gamma for positive arguments.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("digamma requires x > 0, got {x}")));
    }
    Ok(digamma_pos(x))
}

/// Normalizing constant of the fractional Laplacian kernel,
/// `4^s pi^{-N/2} s(1-s) Gamma(N/2+s) / Gamma(2-s)`.
pub fn const_c_ns(n_dim: u32, s: f64) -> Result<f64> {
    if n_dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("c_Ns requires s in (0,1), got {s}")));
    }
    let nf = f64::from(n_dim);
    Ok(4f64.powf(s) * PI.powf(-nf / 2.0) * s * (1.0 - s) * gamma_pos(nf / 2.0 + s)
        / gamma_pos(2.0 - s))
}

/// Best constant in the fractional Sobolev inequality
/// `|u|_{2N/(N-2s)}^2 <= kappa_{N,s} ||u||_s^2`.
pub fn const_kappa(n_dim: u32, s: f64) -> Result<f64> {
    if n_dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let nf = f64::from(n_dim);
    if !(s > 0.0 && s < nf / 2.0) {
        return Err(invalid(format!("kappa requires s in (0, N/2), got {s}")));
    }
    // evaluate in log form; the Gamma ratio overflows f64 for large N
    let ln = -2.0 * s * 2f64.ln() - s * LN_PI + ln_gamma_pos((nf - 2.0 * s) / 2.0)
        - ln_gamma_pos((nf + 2.0 * s) / 2.0)
        + (2.0 * s / nf) * (ln_gamma_pos(nf) - ln_gamma_pos(nf / 2.0));
    Ok(ln.exp())
}

/// Limit of `kappa_{N,s}^{1/s}` as `s -> 0+`:
/// `(1/4pi) (Gamma(N)/Gamma(N/2))^{2/N} e^{-2 psi(N/2)}`.
pub fn kappa_small_s_limit(n_dim: u32) -> Result<f64> {
    if n_dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let nf = f64::from(n_dim);
    let ln = -(4.0 * PI).ln() + (2.0 / nf) * (ln_gamma_pos(nf) - ln_gamma_pos(nf / 2.0))
        - 2.0 * digamma_pos(nf / 2.0);
    Ok(ln.exp())
}

/// Dimension-dependent constants of the logarithmic Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DimensionalConstants {
    pub n_dim: u32,
    /// Kernel constant `pi^{-N/2} Gamma(N/2)`.
    pub c_n: f64,
    /// Zero-order constant `2 ln 2 + psi(N/2) - gamma` of the pointwise form.
    pub rho_n: f64,
    /// Constant of the sharp logarithmic Sobolev inequality.
    pub a_n: f64,
    /// Constant of the quadratic-form expansion bound,
    /// `4 + (2pi)^{-N} int_{B_1} ln^2(|xi|^2) dxi`.
    pub d_n: f64,
}

/// All closed-form constants for dimension `N`.
///
/// `rho_n` carries the sign that makes the pointwise form agree with the
/// Fourier symbol `2 ln |xi|`; for `N = 1` this gives `rho_1 = -2 gamma`.
pub fn dimensional_constants(n_dim: u32) -> Result<DimensionalConstants> {
    if n_dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let nf = f64::from(n_dim);
    let c_n = PI.powf(-nf / 2.0) * gamma_pos(nf / 2.0);
    let rho_n = 2.0 * 2f64.ln() + digamma_pos(nf / 2.0) - EULER_GAMMA;
    let a_n = (2.0 / nf) * (ln_gamma_pos(nf) - ln_gamma_pos(nf / 2.0)) - (4.0 * PI).ln()
        - 2.0 * digamma_pos(nf / 2.0);
    // int_{B_1} ln^2(|xi|^2) dxi = 8 |S^{N-1}| / N^3 in closed form
    let omega = 2.0 * PI.powf(nf / 2.0) / gamma_pos(nf / 2.0);
    let d_n = 4.0 + (2.0 * PI).powf(-nf) * 8.0 * omega / nf.powi(3);
    Ok(DimensionalConstants { n_dim, c_n, rho_n, a_n, d_n })
}

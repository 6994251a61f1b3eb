//! The Bandit distribution `B(α, β, c)` and the two-valued drift diffusion
//! whose time-one law it is.
//!
//! ```text
//! f(y) = φ-kernel(y) - α e^{2α|y-c|} Φ(-|c-β| - |y-c| - α)
//! dY_s = α sgn(Y_s - c) ds + dB_s
//! ```
//!
//! Negative `α` gives a spike at `c`, positive `α` a two-humped shape, and
//! `α = 0` the unit normal centred at `β`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::env::Order;
use crate::error::{invalid, Error, Result};
use crate::normal::{ln_normal_cdf, normal_cdf};
use crate::quadrature::integrate;
use crate::rng::RngStream;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const PANEL_WIDTH: f64 = 0.5;
const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanditParams {
    pub alpha: f64,
    pub beta: f64,
    pub centre: f64,
}

impl BanditParams {
    pub fn new(alpha: f64, beta: f64, centre: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && centre.is_finite()) {
            return Err(invalid("bandit parameters must be finite"));
        }
        Ok(Self { alpha, beta, centre })
    }

    /// Limit law of `T_{n,n}` under the threshold strategy with centre `c`.
    /// `H0` is the spike `((μ_-μ̄)/2, (μ̄+μ_)/2, c)`, `H1` flips the drift sign.
    pub fn strategic_limit(mu_hi: f64, mu_lo: f64, centre: f64, order: Order) -> Self {
        let half_gap = 0.5 * (mu_hi - mu_lo);
        let alpha = match order {
            Order::H0 => -half_gap,
            Order::H1 => half_gap,
        };
        Self {
            alpha,
            beta: 0.5 * (mu_hi + mu_lo),
            centre,
        }
    }

    /// Integration window; the mass outside it is far below `1e-12`.
    pub fn window(&self) -> (f64, f64) {
        let pad = 12.0 + 3.0 * self.alpha.abs();
        (self.beta.min(self.centre) - pad, self.beta.max(self.centre) + pad)
    }
}

/// `α e^{2αu} Φ(-v)` for `u, v >= 0`, evaluated through `ln Φ`.
#[inline]
fn drift_tail(alpha: f64, u: f64, v: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    alpha * (2.0 * alpha * u + ln_normal_cdf(-v)).exp()
}

/// Density `f^{α,β,c}(y)`.
pub fn bandit_pdf(p: &BanditParams, y: f64) -> Result<f64> {
    let v = pdf_unchecked(p, y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("bandit density at y = {y} with {p:?}")))
    }
}

#[inline]
fn pdf_unchecked(p: &BanditParams, y: f64) -> f64 {
    let u = (y - p.centre).abs();
    let d = (p.centre - p.beta).abs();
    let a = p.alpha;
    let dy = y - p.beta;
    let gauss = (-0.5 * (dy * dy - 2.0 * a * (u - d) + a * a) - LN_SQRT_2PI).exp();
    gauss - drift_tail(a, u, d + u + a)
}

/// Cumulative panel masses of one Bandit law, for repeated CDF queries.
#[derive(Debug, Clone)]
pub struct BanditCdf {
    params: BanditParams,
    edges: Vec<f64>,
    cum: Vec<f64>,
}

impl BanditCdf {
    pub fn new(params: BanditParams) -> Result<Self> {
        let (lo, hi) = params.window();
        let mut edges = Vec::new();
        let mut x = lo;
        while x < hi {
            edges.push(x);
            x += PANEL_WIDTH;
        }
        edges.push(hi);
        // the kink at c gets its own edge
        if let Some(pos) = edges.iter().position(|&e| e >= params.centre) {
            if edges[pos] != params.centre && pos > 0 {
                edges.insert(pos, params.centre);
            }
        }
        let mut cum = Vec::with_capacity(edges.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let mass = integrate(|t| pdf_unchecked(&params, t), w[0], w[1], &[], QUAD_TOL * 1e-2)?.value;
            acc += mass.max(0.0);
            cum.push(acc);
        }
        Ok(Self { params, edges, cum })
    }

    pub fn params(&self) -> BanditParams {
        self.params
    }

    /// Total mass on the window; equals one up to quadrature error.
    pub fn total_mass(&self) -> f64 {
        *self.cum.last().expect("at least one panel")
    }

    /// `P(Y <= y)`, non-decreasing in `y` by construction.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::NonFinite("cdf argument".into()));
        }
        let n = self.edges.len();
        if y <= self.edges[0] {
            return Ok(0.0);
        }
        if y >= self.edges[n - 1] {
            return Ok(self.total_mass().min(1.0));
        }
        let i = self.edges.partition_point(|&e| e <= y) - 1;
        let panel = self.cum[i + 1] - self.cum[i];
        let part = integrate(
            |t| pdf_unchecked(&self.params, t),
            self.edges[i],
            y,
            &[],
            QUAD_TOL * 1e-2,
        )?
        .value;
        Ok((self.cum[i] + part.clamp(0.0, panel)).clamp(0.0, 1.0))
    }
}

/// One-off `P(Y <= y)`. Build a [`BanditCdf`] for repeated queries.
pub fn bandit_cdf(p: &BanditParams, y: f64) -> Result<f64> {
    BanditCdf::new(*p)?.cdf(y)
}

/// Limit of `P(a <= T_{n,n} <= b)` under the threshold strategy centred at
/// `(a + b) / 2`, in closed form.
pub fn interval_prob_closed(mu_hi: f64, mu_lo: f64, order: Order, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(invalid(format!("interval needs a < b, got [{a}, {b}]")));
    }
    if mu_lo > mu_hi {
        return Err(invalid("mu_lo exceeds mu_hi"));
    }
    let upper = a + b >= mu_hi + mu_lo;
    let (near, far, rate) = match order {
        Order::H0 => (mu_hi, mu_lo, mu_lo - mu_hi),
        Order::H1 => (mu_lo, mu_hi, mu_hi - mu_lo),
    };
    let damp = |x: f64| {
        let phi = normal_cdf(x);
        if phi == 0.0 {
            0.0
        } else {
            (0.5 * rate * (b - a)).exp() * phi
        }
    };
    let v = if upper {
        normal_cdf(near - a) - damp(near - b)
    } else {
        normal_cdf(b - far) - damp(a - far)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("interval probability".into()))
    }
}

/// `Φ(-α̂ + a/σ̂) - e^{2α̂a/σ̂} Φ(-α̂ - a/σ̂)`: mass of `[-a, a]` under the
/// scaled two-humped law, with the product formed in log space.
pub fn binormal_abs_mass(alpha_hat: f64, sigma_hat: f64, a: f64) -> Result<f64> {
    let r = a / sigma_hat;
    let tail = (2.0 * alpha_hat * r + ln_normal_cdf(-alpha_hat - r)).exp();
    let v = normal_cdf(r - alpha_hat) - tail;
    if v.is_finite() {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::NonFinite(format!("binormal mass with alpha_hat = {alpha_hat}")))
    }
}

/// Limit of `P(|T̂| <= a)` under `H0` in the symmetric case `μ̄ = -μ_`, `c = 0`.
pub fn abs_interval_h0(mu_hi: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid(format!("half-width must be positive, got {a}")));
    }
    let tail = (-2.0 * mu_hi * a + ln_normal_cdf(mu_hi - a)).exp();
    Ok(normal_cdf(mu_hi + a) - tail)
}

/// `(α̂_n, σ̂)` of the `H1` approximation.
pub fn h1_scaling(n: usize, sigma: f64, mu_hi: f64, mu_lo: f64) -> (f64, f64) {
    let gap = mu_hi - mu_lo;
    let alpha_hat = (1.0 + 2.0 * (n as f64).sqrt() / sigma) * gap / 2.0;
    let sigma_hat = (1.0 + gap * gap / (sigma * sigma)).sqrt();
    (alpha_hat, sigma_hat)
}

/// Approximate `P(|T̂| <= a)` under `H1` at horizon `n`.
pub fn abs_interval_h1(n: usize, sigma: f64, mu_hi: f64, mu_lo: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid(format!("half-width must be positive, got {a}")));
    }
    if n == 0 || !(sigma > 0.0) {
        return Err(invalid("need n >= 1 and sigma > 0"));
    }
    let (alpha_hat, sigma_hat) = h1_scaling(n, sigma, mu_hi, mu_lo);
    binormal_abs_mass(alpha_hat, sigma_hat, a)
}

/// Transition density `q(t, x; s, z)` of the two-valued drift diffusion.
pub fn transition_density(t: f64, x: f64, s: f64, z: f64, alpha: f64, centre: f64) -> Result<f64> {
    if !(s > t) {
        return Err(invalid(format!("need s > t, got t = {t}, s = {s}")));
    }
    let tau = s - t;
    let ux = (x - centre).abs();
    let uz = (z - centre).abs();
    let dz = x - z;
    let expo = -(dz * dz - 2.0 * alpha * tau * (uz - ux) + alpha * alpha * tau * tau) / (2.0 * tau);
    let kernel = (expo - LN_SQRT_2PI - 0.5 * tau.ln()).exp();
    let v = kernel - drift_tail(alpha, uz, (ux + uz + alpha * tau) / tau.sqrt());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("transition density".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeConfig {
    pub dt: f64,
    pub x0: f64,
    pub alpha: f64,
    pub centre: f64,
}

impl SdeConfig {
    pub fn new(dt: f64, x0: f64, alpha: f64, centre: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(invalid(format!("dt must lie in (0, 0.1], got {dt}")));
        }
        let steps = (1.0 / dt).round();
        if ((steps * dt) - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("dt = {dt} does not divide the unit interval")));
        }
        if !(x0.is_finite() && alpha.is_finite() && centre.is_finite()) {
            return Err(invalid("sde parameters must be finite"));
        }
        Ok(Self { dt, x0, alpha, centre })
    }

    pub fn steps(&self) -> usize {
        (1.0 / self.dt).round() as usize
    }

    /// Time-one law from `x0`: Bandit with `β = x0`.
    pub fn terminal_law(&self) -> BanditParams {
        BanditParams {
            alpha: self.alpha,
            beta: self.x0,
            centre: self.centre,
        }
    }
}

/// Euler–Maruyama value of `Y_1`, with `sgn(0) = 0`.
pub fn sample_sde(cfg: &SdeConfig, rng: &mut RngStream) -> f64 {
    let drift = cfg.alpha * cfg.dt;
    let sd = cfg.dt.sqrt();
    let mut y = cfg.x0;
    for _ in 0..cfg.steps() {
        let dev = y - cfg.centre;
        let sgn = if dev > 0.0 {
            1.0
        } else if dev < 0.0 {
            -1.0
        } else {
            0.0
        };
        let z: f64 = StandardNormal.sample(rng);
        y += drift * sgn + sd * z;
    }
    y
}

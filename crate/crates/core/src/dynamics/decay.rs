//! Time-dependent decay-rate laws and their survival factors.
//!
//! A law supplies the rate `γ_t` together with the survival factor
//! `q_t = exp(−∫₀ᵗ γ dt′)` and its derivative. Amplitude damping uses `q_t`
//! as the excited-population factor, dephasing as the coherence factor.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator magnitude below which the non-Markovian rate is reported as
/// divergent.
pub const POLE_EPS: f64 = 1e-12;

/// Coupling strength `γ₀` and spectral width `λ` of a Lorentzian bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonMarkovRate {
    pub gamma0: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Regime {
    /// `λ > 2γ₀`; δ real.
    Damped(f64),
    /// `λ = 2γ₀`.
    Critical,
    /// `λ < 2γ₀`; `δ = iω`.
    Oscillating(f64),
}

impl NonMarkovRate {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && lambda > 0.0 && gamma0.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-Markovian rate needs gamma0, lambda > 0 (got {gamma0}, {lambda})"
            )));
        }
        Ok(Self { gamma0, lambda })
    }

    fn regime(&self) -> Regime {
        let disc = self.lambda * self.lambda - 2.0 * self.gamma0 * self.lambda;
        if disc.abs() <= 1e-14 * self.lambda * self.lambda {
            Regime::Critical
        } else if disc > 0.0 {
            Regime::Damped(disc.sqrt())
        } else {
            Regime::Oscillating((-disc).sqrt())
        }
    }

    /// True when `γ₀ ≤ λ/2`; the rate is then non-negative for all `t`.
    pub fn is_markovian(&self) -> bool {
        !matches!(self.regime(), Regime::Oscillating(_))
    }

    /// Times in `(0, horizon]` where the rate diverges.
    pub fn poles(&self, horizon: f64) -> Vec<f64> {
        let Regime::Oscillating(w) = self.regime() else {
            return Vec::new();
        };
        // ω cos x + λ sin x = 0  ⇔  x = π − atan(ω/λ) + kπ,  t = 2x/ω
        let first = std::f64::consts::PI - (w / self.lambda).atan();
        let period = 2.0 * std::f64::consts::PI / w;
        let mut out = Vec::new();
        let mut t = 2.0 * first / w;
        while t <= horizon {
            out.push(t);
            t += period;
        }
        out
    }

    /// Amplitude `G(t)` and `Ġ(t)` with `q_t = e^{−λt} G²`.
    fn amplitude(&self, t: f64) -> (f64, f64) {
        let l = self.lambda;
        match self.regime() {
            Regime::Critical => (1.0 + 0.5 * l * t, 0.5 * l),
            Regime::Oscillating(w) => {
                let (s, c) = (0.5 * w * t).sin_cos();
                (c + l / w * s, -0.5 * w * s + 0.5 * l * c)
            }
            Regime::Damped(d) => {
                let (s, c) = ((0.5 * d * t).sinh(), (0.5 * d * t).cosh());
                (c + l / d * s, 0.5 * d * s + 0.5 * l * c)
            }
        }
    }

    fn survival(&self, t: f64) -> f64 {
        let l = self.lambda;
        match self.regime() {
            Regime::Damped(d) => {
                // e^{−λt}(cosh + (λ/δ)sinh)² without overflow
                let e = (-d * t).exp();
                let a = 0.5 * ((1.0 + l / d) + (1.0 - l / d) * e);
                (-(l - d) * t).exp() * a * a
            }
            _ => {
                let (g, _) = self.amplitude(t);
                (-l * t).exp() * g * g
            }
        }
    }

    fn survival_rate(&self, t: f64) -> f64 {
        match self.regime() {
            Regime::Damped(_) => -nonmarkov_gamma(*self, t).unwrap_or(0.0) * self.survival(t),
            _ => {
                let (g, gd) = self.amplitude(t);
                (-self.lambda * t).exp() * g * (2.0 * gd - self.lambda * g)
            }
        }
    }
}

/// `γ_t = 2γ₀λ sinh(δt/2) / (δ cosh(δt/2) + λ sinh(δt/2))`, `δ = √(λ² − 2γ₀λ)`.
///
/// For `λ < 2γ₀` the trigonometric continuation is used and the result stays
/// real; [`Error::PoleAt`] is returned where the denominator vanishes.
pub fn nonmarkov_gamma(rate: NonMarkovRate, t: f64) -> Result<f64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and >= 0")));
    }
    let NonMarkovRate { gamma0, lambda } = rate;
    let numerator_scale = 2.0 * gamma0 * lambda;
    match rate.regime() {
        Regime::Damped(d) => {
            let th = (0.5 * d * t).tanh();
            Ok(numerator_scale * th / (d + lambda * th))
        }
        Regime::Critical => Ok(numerator_scale * 0.5 * t / (1.0 + 0.5 * lambda * t)),
        Regime::Oscillating(w) => {
            let (s, c) = (0.5 * w * t).sin_cos();
            let den = w * c + lambda * s;
            if den.abs() < POLE_EPS {
                return Err(Error::PoleAt(t));
            }
            Ok(numerator_scale * s / den)
        }
    }
}

/// Rate table read from a two-column `(t, γ_t)` CSV; linear in between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRate {
    times: Vec<f64>,
    rates: Vec<f64>,
    /// `∫₀^{t_k} γ` at every node.
    cumulative: Vec<f64>,
}

impl TabulatedRate {
    pub fn new(times: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != rates.len() {
            return Err(Error::InvalidArgument(
                "rate table needs at least two (t, gamma) rows".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rate table must start at t = 0, got {}",
                times[0]
            )));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidArgument(
                "rate table times must be strictly increasing".into(),
            ));
        }
        if times.iter().chain(&rates).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("rate table has non-finite entries".into()));
        }
        let mut cumulative = Vec::with_capacity(times.len());
        cumulative.push(0.0);
        for k in 1..times.len() {
            let step = 0.5 * (rates[k] + rates[k - 1]) * (times[k] - times[k - 1]);
            cumulative.push(cumulative[k - 1] + step);
        }
        Ok(Self {
            times,
            rates,
            cumulative,
        })
    }

    /// Reads `t,gamma` rows; a non-numeric first row is taken as a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut times = Vec::new();
        let mut rates = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "rate table row {} has {} columns, expected 2",
                    i + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(g)) => {
                    times.push(t);
                    rates.push(g);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "rate table row {} is not numeric",
                        i + 1
                    )))
                }
            }
        }
        Self::new(times, rates)
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn locate(&self, t: f64) -> Result<usize> {
        if t < 0.0 || t > self.horizon() {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside the rate table [0, {}]",
                self.horizon()
            )));
        }
        Ok(match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= self.times.len() => self.times.len() - 2,
            k => k - 1,
        })
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        let k = self.locate(t)?;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        Ok(self.rates[k] + w * (self.rates[k + 1] - self.rates[k]))
    }

    /// Exact integral of the piecewise-linear rate from 0 to `t`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        let k = self.locate(t)?;
        let g = self.rate(t)?;
        Ok(self.cumulative[k] + 0.5 * (self.rates[k] + g) * (t - self.times[k]))
    }

    fn sign_changes_before(&self, horizon: f64) -> bool {
        let mut seen_pos = false;
        let mut seen_neg = false;
        for (&t, &g) in self.times.iter().zip(&self.rates) {
            if t > horizon {
                break;
            }
            seen_pos |= g > 0.0;
            seen_neg |= g < 0.0;
        }
        if let Ok(g) = self.rate(horizon.min(self.horizon())) {
            seen_pos |= g > 0.0;
            seen_neg |= g < 0.0;
        }
        seen_pos && seen_neg
    }
}

/// Decay-rate law shared by the amplitude-damping and dephasing models.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayLaw {
    Constant(f64),
    NonMarkov(NonMarkovRate),
    Tabulated(TabulatedRate),
}

impl DecayLaw {
    pub fn rate(&self, t: f64) -> Result<f64> {
        match self {
            DecayLaw::Constant(g) => Ok(*g),
            DecayLaw::NonMarkov(r) => nonmarkov_gamma(*r, t),
            DecayLaw::Tabulated(tab) => tab.rate(t),
        }
    }

    /// `q_t = exp(−∫₀ᵗ γ)`; for the non-Markovian law the closed form
    /// `e^{−λt} G(t)²`, which stays finite through the rate's poles.
    pub fn survival(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time {t} must be finite and >= 0")));
        }
        Ok(match self {
            DecayLaw::Constant(g) => (-g * t).exp(),
            DecayLaw::NonMarkov(r) => r.survival(t),
            DecayLaw::Tabulated(tab) => (-tab.integral(t)?).exp(),
        })
    }

    /// `dq/dt`.
    pub fn survival_rate(&self, t: f64) -> Result<f64> {
        Ok(match self {
            DecayLaw::Constant(g) => -g * (-g * t).exp(),
            DecayLaw::NonMarkov(r) => r.survival_rate(t),
            DecayLaw::Tabulated(tab) => -tab.rate(t)? * (-tab.integral(t)?).exp(),
        })
    }

    /// Whether the law guarantees a non-increasing `q_t` for every horizon.
    pub fn is_markovian(&self) -> bool {
        match self {
            DecayLaw::Constant(g) => *g >= 0.0,
            DecayLaw::NonMarkov(r) => r.is_markovian(),
            DecayLaw::Tabulated(tab) => tab.rates.iter().all(|&g| g >= 0.0),
        }
    }

    /// Whether `q_t` is monotone on `[0, horizon]`.
    pub fn is_monotone_on(&self, horizon: f64) -> bool {
        match self {
            DecayLaw::Constant(_) => true,
            DecayLaw::NonMarkov(r) => r.poles(horizon).is_empty(),
            DecayLaw::Tabulated(tab) => !tab.sign_changes_before(horizon),
        }
    }
}

//! Potential models, turning points and region classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of probe points used to bracket turning points.
pub const PROBE_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase")]
pub enum Potential {
    /// `V = m ω² x² / 2`
    Harmonic { omega: f64 },
    /// `V = λ x⁴`
    Quartic { lambda: f64 },
    /// `V = Σ c_k x^k`
    Polynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    pub potential: Potential,
    pub mass: f64,
    pub hbar: f64,
}

/// Key-value model description as read from a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: Option<String>,
    pub m: Option<f64>,
    pub omega: Option<f64>,
    pub lambda: Option<f64>,
    pub hbar: Option<f64>,
    pub coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum Region {
    I,
    II,
    III,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        })
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_deriv(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..c.len()).rev() {
        acc = acc * x + k as f64 * c[k];
    }
    acc
}

impl PotentialModel {
    pub fn harmonic(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        Self::new(Potential::Harmonic { omega }, mass, hbar)
    }

    pub fn quartic(mass: f64, lambda: f64, hbar: f64) -> Result<Self> {
        Self::new(Potential::Quartic { lambda }, mass, hbar)
    }

    pub fn polynomial(mass: f64, coefficients: Vec<f64>, hbar: f64) -> Result<Self> {
        Self::new(Potential::Polynomial { coefficients }, mass, hbar)
    }

    /// Natural-unit oscillator `m = ω = ħ = 1`.
    pub fn unit_oscillator() -> Self {
        Self::harmonic(1.0, 1.0, 1.0).unwrap()
    }

    pub fn new(potential: Potential, mass: f64, hbar: f64) -> Result<Self> {
        positive("m", mass)?;
        positive("hbar", hbar)?;
        let potential = match potential {
            Potential::Harmonic { omega } => Potential::Harmonic {
                omega: positive("omega", omega)?,
            },
            Potential::Quartic { lambda } => Potential::Quartic {
                lambda: positive("lambda", lambda)?,
            },
            Potential::Polynomial { mut coefficients } => {
                while coefficients.last() == Some(&0.0) {
                    coefficients.pop();
                }
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidModel(
                        "non-finite polynomial coefficient".into(),
                    ));
                }
                let deg = coefficients.len().saturating_sub(1);
                if deg < 2 || !deg.is_multiple_of(2) || coefficients[deg] <= 0.0 {
                    return Err(Error::InvalidModel(
                        "polynomial must have even degree >= 2 and a positive leading coefficient"
                            .into(),
                    ));
                }
                Potential::Polynomial { coefficients }
            }
        };
        let model = Self {
            potential,
            mass,
            hbar,
        };
        model.check_confining()?;
        Ok(model)
    }

    fn check_confining(&self) -> Result<()> {
        let (xm, vm) = self.min_potential();
        let scale = self.probe_half_width(vm + 1.0);
        let mut last = vm;
        for k in 1..=8 {
            let x = scale * (1u32 << k) as f64;
            let v = self.potential(xm + x).min(self.potential(xm - x));
            if !(v > last) {
                return Err(Error::InvalidModel(
                    "potential is not confining on the probe grid".into(),
                ));
            }
            last = v;
        }
        Ok(())
    }

    /// Reads a model from TOML key-value text (`model`, `m`, `omega`,
    /// `lambda`, `hbar`, `coefficients`).
    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg: ModelConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_config(&cfg)
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        let m = cfg.m.unwrap_or(1.0);
        let hbar = cfg.hbar.unwrap_or(1.0);
        match cfg.model.as_deref().unwrap_or("harmonic") {
            "harmonic" | "oscillator" | "ho" => Self::harmonic(m, cfg.omega.unwrap_or(1.0), hbar),
            "quartic" => Self::quartic(m, cfg.lambda.unwrap_or(1.0), hbar),
            "polynomial" => {
                let c = cfg.coefficients.clone().ok_or_else(|| {
                    Error::InvalidModel("polynomial model needs coefficients".into())
                })?;
                Self::polynomial(m, c, hbar)
            }
            other => Err(Error::InvalidModel(format!("unknown model id {other:?}"))),
        }
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.potential.clone(), self.mass, hbar)
    }

    pub fn id(&self) -> &'static str {
        match self.potential {
            Potential::Harmonic { .. } => "harmonic",
            Potential::Quartic { .. } => "quartic",
            Potential::Polynomial { .. } => "polynomial",
        }
    }

    /// Oscillator frequency, if this is the harmonic model.
    pub fn omega(&self) -> Option<f64> {
        match self.potential {
            Potential::Harmonic { omega } => Some(omega),
            _ => None,
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match &self.potential {
            Potential::Harmonic { omega } => 0.5 * self.mass * omega * omega * x * x,
            Potential::Quartic { lambda } => lambda * x * x * x * x,
            Potential::Polynomial { coefficients } => poly(coefficients, x),
        }
    }

    /// `dV/dx`
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.potential {
            Potential::Harmonic { omega } => self.mass * omega * omega * x,
            Potential::Quartic { lambda } => 4.0 * lambda * x * x * x,
            Potential::Polynomial { coefficients } => poly_deriv(coefficients, x),
        }
    }

    /// Power-series coefficients of `V`, lowest order first.
    pub fn coefficients(&self) -> Vec<f64> {
        match &self.potential {
            Potential::Harmonic { omega } => vec![0.0, 0.0, 0.5 * self.mass * omega * omega],
            Potential::Quartic { lambda } => vec![0.0, 0.0, 0.0, 0.0, *lambda],
            Potential::Polynomial { coefficients } => coefficients.clone(),
        }
    }

    /// Taylor coefficients of `V(x0 + s)` in powers of `s`.
    pub fn taylor(&self, x0: f64) -> Vec<f64> {
        let mut c = self.coefficients();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += x0 * c[j + 1];
            }
        }
        c
    }

    /// Location and value of the global minimum of `V`.
    pub fn min_potential(&self) -> (f64, f64) {
        match &self.potential {
            Potential::Harmonic { .. } | Potential::Quartic { .. } => (0.0, 0.0),
            Potential::Polynomial { coefficients } => {
                // every critical point lies within the Cauchy bound of V'
                let d: Vec<f64> = (1..coefficients.len())
                    .map(|k| k as f64 * coefficients[k])
                    .collect();
                let lead = *d.last().unwrap();
                let r = 1.0
                    + d[..d.len() - 1]
                        .iter()
                        .map(|c| (c / lead).abs())
                        .fold(0.0, f64::max);
                let n = PROBE_POINTS;
                let mut best = (0.0, f64::INFINITY);
                for i in 0..=n {
                    let x = -r + 2.0 * r * i as f64 / n as f64;
                    let v = poly(coefficients, x);
                    if v < best.1 {
                        best = (x, v);
                    }
                }
                let h = 2.0 * r / n as f64;
                let (mut a, mut b) = (best.0 - h, best.0 + h);
                let g = (5f64.sqrt() - 1.0) / 2.0;
                for _ in 0..200 {
                    let c = b - g * (b - a);
                    let e = a + g * (b - a);
                    if poly(coefficients, c) < poly(coefficients, e) {
                        b = e;
                    } else {
                        a = c;
                    }
                    if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
                        break;
                    }
                }
                let x = 0.5 * (a + b);
                (x, poly(coefficients, x))
            }
        }
    }

    fn probe_half_width(&self, e: f64) -> f64 {
        let (xm, _) = self.min_potential();
        let mut l = 1.0 + xm.abs();
        for _ in 0..200 {
            if self.potential(l) > e && self.potential(-l) > e {
                break;
            }
            l *= 2.0;
        }
        l
    }

    /// The two roots of `V(x) = E` bounding the classical region.
    pub fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        let (xm, vm) = self.min_potential();
        if !e.is_finite() || e <= vm {
            return Err(Error::NoClassicalRegion {
                energy: e,
                min_potential: vm,
            });
        }
        let l = self.probe_half_width(e) * 1.01;
        let g = |x: f64| self.potential(x) - e;
        let xs: Vec<f64> = (0..PROBE_POINTS)
            .map(|i| -l + 2.0 * l * i as f64 / (PROBE_POINTS - 1) as f64)
            .collect();
        let mut changes = Vec::new();
        for w in xs.windows(2) {
            if (g(w[0]) < 0.0) != (g(w[1]) < 0.0) {
                changes.push((w[0], w[1]));
            }
        }
        let (left, right) = match changes.len() {
            2 => (changes[0], changes[1]),
            0 => ((-l, xm), (xm, l)),
            k => return Err(Error::MultiWell { sign_changes: k }),
        };
        let x1 = self.root(left.0, left.1, e);
        let x2 = self.root(right.0, right.1, e);
        if !(x1 < x2) {
            return Err(Error::NoClassicalRegion {
                energy: e,
                min_potential: vm,
            });
        }
        Ok((x1, x2))
    }

    fn root(&self, a: f64, b: f64, e: f64) -> f64 {
        let g = |x: f64| self.potential(x) - e;
        let (mut lo, mut hi) = (a, b);
        let glo = g(lo);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let gm = g(mid);
            if gm == 0.0 {
                return mid;
            }
            if (gm < 0.0) == (glo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        // Newton polish, accepted only when it reduces |V - E|
        for _ in 0..3 {
            let d = self.derivative(x);
            if d == 0.0 {
                break;
            }
            let xn = x - g(x) / d;
            if g(xn).abs() < g(x).abs() {
                x = xn;
            } else {
                break;
            }
        }
        x
    }

    pub fn slice(&self, e: f64) -> Result<EnergySlice> {
        let (x1, x2) = self.turning_points(e)?;
        Ok(EnergySlice {
            energy: e,
            x1,
            x2,
            model: self.clone(),
        })
    }

    /// Oscillator eigenvalue `ħω(n + 1/2)`.
    pub fn oscillator_energy(&self, n: usize) -> Option<f64> {
        self.omega().map(|w| self.hbar * w * (n as f64 + 0.5))
    }
}

/// A fixed energy with its turning points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySlice {
    pub energy: f64,
    pub x1: f64,
    pub x2: f64,
    pub model: PotentialModel,
}

impl EnergySlice {
    pub fn new(model: &PotentialModel, e: f64) -> Result<Self> {
        model.slice(e)
    }

    pub fn classify(&self, x: f64) -> Region {
        if x < self.x1 {
            Region::I
        } else if x <= self.x2 {
            Region::II
        } else {
            Region::III
        }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    /// `V(x) - E`
    pub fn excess(&self, x: f64) -> f64 {
        self.model.potential(x) - self.energy
    }

    /// `V(tp + s) - E` for a turning point `tp`, evaluated from the Taylor
    /// expansion about `tp` so that small `s` keeps full relative accuracy.
    pub fn excess_near(&self, tp: f64, s: f64) -> f64 {
        let c = self.model.taylor(tp);
        c[1..].iter().rev().fold(0.0, |acc, &a| acc * s + a) * s
    }

    pub fn mass(&self) -> f64 {
        self.model.mass
    }

    pub fn hbar(&self) -> f64 {
        self.model.hbar
    }

    /// Airy wavenumber `(2m|V'|/ħ²)^{1/3}` at a turning point.
    pub fn turning_wavenumber(&self, x: f64) -> f64 {
        let h = self.hbar();
        (2.0 * self.mass() * self.model.derivative(x).abs() / (h * h)).cbrt()
    }

    /// Matching offset `ε = 1e-3 (x2 - x1)`.
    pub fn matching_offset(&self) -> f64 {
        1e-3 * self.width()
    }
}

/// Region tag of `x` for the slice.
pub fn classify_region(slice: &EnergySlice, x: f64) -> Region {
    slice.classify(x)
}

pub fn turning_points(model: &PotentialModel, e: f64) -> Result<(f64, f64)> {
    model.turning_points(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_turning_points() {
        let m = PotentialModel::unit_oscillator();
        let (a, b) = m.turning_points(0.5).unwrap();
        assert!((a + 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let (a, b) = m.turning_points(2.5).unwrap();
        assert!((a + 5f64.sqrt()).abs() < 1e-12 && (b - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quartic_turning_points() {
        let m = PotentialModel::quartic(1.0, 1.0, 1.0).unwrap();
        let (a, b) = m.turning_points(1.0).unwrap();
        assert!((a + 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let m = PotentialModel::unit_oscillator();
        assert!(matches!(
            m.turning_points(0.0),
            Err(Error::NoClassicalRegion { .. })
        ));
        assert!(matches!(
            m.turning_points(-1.0),
            Err(Error::NoClassicalRegion { .. })
        ));
        // double well x^4 - 2x^2 at E = -0.5 has four turning points
        let dw = PotentialModel::polynomial(1.0, vec![0.0, 0.0, -2.0, 0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            dw.turning_points(-0.5),
            Err(Error::MultiWell { sign_changes: 4 })
        ));
        assert!(dw.turning_points(0.5).is_ok());
        assert!(PotentialModel::polynomial(1.0, vec![0.0, 0.0, 0.0, 1.0], 1.0).is_err());
        assert!(PotentialModel::harmonic(-1.0, 1.0, 1.0).is_err());
        assert!(PotentialModel::harmonic(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn shifted_polynomial_minimum() {
        // (x - 1)^2 + 3
        let p = PotentialModel::polynomial(1.0, vec![4.0, -2.0, 1.0], 1.0).unwrap();
        let (xm, vm) = p.min_potential();
        assert!((xm - 1.0).abs() < 1e-7 && (vm - 3.0).abs() < 1e-12);
        let (a, b) = p.turning_points(4.0).unwrap();
        assert!((a - 0.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_shift() {
        let p = PotentialModel::polynomial(1.0, vec![1.0, -2.0, 0.5, 0.3, 2.0], 1.0).unwrap();
        let s = p.slice(3.0).unwrap();
        for ds in [1e-9, 1e-3, 0.4, -0.7] {
            let direct = p.potential(s.x2 + ds) - 3.0;
            assert!((s.excess_near(s.x2, ds) - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn regions() {
        let s = PotentialModel::unit_oscillator().slice(0.5).unwrap();
        assert_eq!(s.classify(0.0), Region::II);
        assert_eq!(s.classify(-2.0), Region::I);
        assert_eq!(s.classify(1.0), Region::II);
        assert_eq!(s.classify(1.0 + 1e-15 * 4.0), Region::III);
    }

    #[test]
    fn config_text() {
        let m = PotentialModel::from_config_str("model = \"quartic\"\nlambda = 2.0\nhbar = 0.5\n")
            .unwrap();
        assert_eq!(m.potential, Potential::Quartic { lambda: 2.0 });
        assert_eq!(m.hbar, 0.5);
        assert!(PotentialModel::from_config_str("model = \"coulomb\"").is_err());
        assert!(PotentialModel::from_config_str("bogus = 1").is_err());
    }
}

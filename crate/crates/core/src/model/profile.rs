use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretization::{Field, GridSpec};
use crate::error::{Error, Result};
use crate::integrator::Manufactured;
use crate::model::StringParams;

/// Spatial modes carried by the bounded-noise forcing.
pub const NOISE_MODES: usize = 4;

/// Initial displacement or velocity profile on `[0, 1]`.
///
/// Every variant evaluates to exactly zero at `x = 0` and `x = 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    /// `sum a_k sin(m_k pi x)` from `(amplitude, mode)` pairs.
    SineModes { modes: Vec<(f64, u32)> },
    /// Smooth compactly supported bump, peak `amplitude` at `center`.
    Bump {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * x (1 - x)`.
    PolyBump { amplitude: f64 },
    /// Nodal values on a uniform grid of `values.len() - 1` cells, linearly
    /// interpolated.
    Sampled { values: Vec<f64> },
}

impl ProfileSpec {
    pub fn sine(amplitude: f64, mode: u32) -> Self {
        ProfileSpec::SineModes {
            modes: vec![(amplitude, mode)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        match self {
            ProfileSpec::Zero => Ok(()),
            ProfileSpec::SineModes { modes } => {
                for &(a, m) in modes {
                    if m == 0 || !a.is_finite() {
                        return bad(format!("sine mode ({a}, {m}) needs m >= 1 and finite amplitude"));
                    }
                }
                Ok(())
            }
            ProfileSpec::Bump {
                center,
                width,
                amplitude,
            } => {
                if !(width.is_finite() && *width > 0.0 && amplitude.is_finite()) {
                    return bad(format!("bump width {width} / amplitude {amplitude}"));
                }
                if center - width < 0.0 || center + width > 1.0 {
                    return bad(format!(
                        "bump support [{}, {}] leaves [0, 1]",
                        center - width,
                        center + width
                    ));
                }
                Ok(())
            }
            ProfileSpec::PolyBump { amplitude } => {
                if amplitude.is_finite() {
                    Ok(())
                } else {
                    bad("poly_bump amplitude must be finite".into())
                }
            }
            ProfileSpec::Sampled { values } => {
                if values.len() < 2 {
                    return bad("sampled profile needs at least two values".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("sampled profile has non-finite values".into());
                }
                if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
                    return bad("sampled profile must vanish at both ends".into());
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        match self {
            ProfileSpec::Zero => 0.0,
            ProfileSpec::SineModes { modes } => modes
                .iter()
                .map(|&(a, m)| a * (m as f64 * PI * x).sin())
                .sum(),
            ProfileSpec::Bump {
                center,
                width,
                amplitude,
            } => {
                let r = (x - center) / width;
                if r.abs() < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
            ProfileSpec::PolyBump { amplitude } => amplitude * x * (1.0 - x),
            ProfileSpec::Sampled { values } => {
                let cells = values.len() - 1;
                let pos = x * cells as f64;
                let i = (pos.floor() as usize).min(cells - 1);
                let frac = pos - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    pub fn sample(&self, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x| self.eval(x))
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            ProfileSpec::Zero => true,
            ProfileSpec::SineModes { modes } => modes.iter().all(|&(a, _)| a == 0.0),
            ProfileSpec::Bump { amplitude, .. } | ProfileSpec::PolyBump { amplitude } => {
                *amplitude == 0.0
            }
            ProfileSpec::Sampled { values } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// An upper bound on `sup_x |profile|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            ProfileSpec::Zero => 0.0,
            ProfileSpec::SineModes { modes } => modes.iter().map(|(a, _)| a.abs()).sum(),
            ProfileSpec::Bump { amplitude, .. } => amplitude.abs(),
            ProfileSpec::PolyBump { amplitude } => 0.25 * amplitude.abs(),
            ProfileSpec::Sampled { values } => values.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
        }
    }
}

fn default_switch_rate() -> f64 {
    100.0
}

/// Distributed transverse load `F(x, t)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// `amplitude * profile(x) * sin(frequency t)`, frequency in rad per unit time.
    Separable {
        profile: ProfileSpec,
        amplitude: f64,
        frequency: f64,
    },
    /// `amplitude * sin(frequency t)` on the whole span.
    UniformSinusoid { amplitude: f64, frequency: f64 },
    /// Piecewise constant in time on bins of width `1 / switch_rate`; inside a
    /// bin `F = amplitude * sum_m c_m sin(m pi x)` with seeded coefficients
    /// `sum |c_m| <= 1`, so `|F| <= amplitude`.
    BoundedNoise {
        amplitude: f64,
        seed: u64,
        #[serde(default = "default_switch_rate")]
        switch_rate: f64,
    },
    /// Source that makes a closed-form field an exact solution.
    Manufactured {
        solution: Manufactured,
        params: StringParams,
    },
}

pub(crate) fn noise_coefficients(seed: u64, bin: u64) -> [f64; NOISE_MODES] {
    let mixed = seed ^ bin.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    let mut c = [0.0; NOISE_MODES];
    for ci in c.iter_mut() {
        *ci = rng.gen_range(-1.0..=1.0) / NOISE_MODES as f64;
    }
    c
}

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidProfile(format!("forcing {name} = {v} is not finite")))
            }
        };
        match self {
            ForcingSpec::Zero | ForcingSpec::Manufactured { .. } => Ok(()),
            ForcingSpec::Separable {
                profile,
                amplitude,
                frequency,
            } => {
                profile.validate()?;
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)
            }
            ForcingSpec::UniformSinusoid {
                amplitude,
                frequency,
            } => {
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)
            }
            ForcingSpec::BoundedNoise {
                amplitude,
                switch_rate,
                ..
            } => {
                finite("amplitude", *amplitude)?;
                if !(*amplitude >= 0.0 && *switch_rate > 0.0 && switch_rate.is_finite()) {
                    return Err(Error::InvalidProfile(
                        "bounded_noise needs amplitude >= 0 and switch_rate > 0".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ForcingSpec::Zero => true,
            ForcingSpec::Separable {
                profile, amplitude, ..
            } => *amplitude == 0.0 || profile.is_identically_zero(),
            ForcingSpec::UniformSinusoid { amplitude, .. }
            | ForcingSpec::BoundedNoise { amplitude, .. } => *amplitude == 0.0,
            ForcingSpec::Manufactured { solution, .. } => solution.is_zero(),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Separable {
                profile,
                amplitude,
                frequency,
            } => amplitude * profile.eval(x) * (frequency * t).sin(),
            ForcingSpec::UniformSinusoid {
                amplitude,
                frequency,
            } => amplitude * (frequency * t).sin(),
            ForcingSpec::BoundedNoise {
                amplitude,
                seed,
                switch_rate,
            } => {
                let c = noise_coefficients(*seed, noise_bin(t, *switch_rate));
                amplitude * noise_shape(&c, x)
            }
            ForcingSpec::Manufactured { solution, params } => solution.source(params, x, t),
        }
    }

    /// Nodal samples of `F(., t)`.
    pub fn sample(&self, grid: GridSpec, t: f64) -> Field {
        match self {
            ForcingSpec::Zero => Field::zeros(grid),
            ForcingSpec::BoundedNoise {
                amplitude,
                seed,
                switch_rate,
            } => {
                let c = noise_coefficients(*seed, noise_bin(t, *switch_rate));
                Field::from_fn(grid, |x| amplitude * noise_shape(&c, x))
            }
            _ => Field::from_fn(grid, |x| self.eval(x, t)),
        }
    }

    /// An upper bound on `sup_{x,t} |F|` known without sampling.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            ForcingSpec::Zero => Some(0.0),
            ForcingSpec::Separable {
                profile, amplitude, ..
            } => Some(amplitude.abs() * profile.sup_bound()),
            ForcingSpec::UniformSinusoid { amplitude, .. }
            | ForcingSpec::BoundedNoise { amplitude, .. } => Some(amplitude.abs()),
            ForcingSpec::Manufactured { .. } => None,
        }
    }
}

fn noise_bin(t: f64, switch_rate: f64) -> u64 {
    (t.max(0.0) * switch_rate).floor() as u64
}

fn noise_shape(c: &[f64; NOISE_MODES], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(m, cm)| cm * ((m + 1) as f64 * PI * x).sin())
        .sum()
}

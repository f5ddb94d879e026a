//! Compact-binary mass/spin combinations and a leading-order inspiral chirp.
//!
//! The waveform is the Newtonian quadrupole chirp: frequency and amplitude
//! depend only on the chirp mass, the luminosity distance and the
//! inclination. Spins are carried on [`BinaryParams`] as metadata and do not
//! enter the waveform. The signal is truncated at the lower of the ISCO
//! frequency and 90% of Nyquist; merger and ringdown are not modelled.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Newtonian constant of gravitation [m^3 kg^-1 s^-2].
pub const G_SI: f64 = 6.674_30e-11;
/// Speed of light in vacuum [m/s].
pub const C_SI: f64 = 299_792_458.0;
/// Solar mass [kg].
pub const MSUN_SI: f64 = 1.988_409_870_698_051e30;
/// One megaparsec [m].
pub const MPC_SI: f64 = 3.085_677_581_491_367e22;

/// Default low-frequency cutoff [Hz].
pub const DEFAULT_F_MIN: f64 = 20.0;
/// Default luminosity distance [Mpc].
pub const DEFAULT_DISTANCE_MPC: f64 = 410.0;

/// Fraction of Nyquist above which the chirp is cut off.
const NYQUIST_FRACTION: f64 = 0.9;

/// `G M / c^3` for a mass given in solar masses, in seconds.
fn mass_in_seconds(mass_solar: f64) -> f64 {
    G_SI * mass_solar * MSUN_SI / (C_SI * C_SI * C_SI)
}

fn check_masses(m1: f64, m2: f64) -> Result<()> {
    if !(m1 > 0.0 && m1.is_finite()) || !(m2 > 0.0 && m2.is_finite()) {
        return Err(Error::Domain(format!(
            "masses must be positive and finite, got m1={m1}, m2={m2}"
        )));
    }
    Ok(())
}

/// Source parameters for one template.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryParams {
    /// Primary mass [M☉], always `>= m2`.
    pub m1: f64,
    /// Secondary mass [M☉].
    pub m2: f64,
    pub spin1: f64,
    pub spin2: f64,
    /// Luminosity distance [Mpc].
    pub distance: f64,
    /// Inclination [rad].
    pub inclination: f64,
    /// Starting gravitational-wave frequency [Hz].
    pub f_min: f64,
}

impl BinaryParams {
    /// Validates and canonicalises the parameters. If `m2 > m1` the two
    /// bodies (masses and spins) are swapped.
    pub fn new(
        m1: f64,
        m2: f64,
        spin1: f64,
        spin2: f64,
        distance: f64,
        inclination: f64,
        f_min: f64,
    ) -> Result<Self> {
        check_masses(m1, m2)?;
        for (name, s) in [("spin1", spin1), ("spin2", spin2)] {
            if !(s.abs() < 1.0) {
                return Err(Error::Domain(format!("{name} must satisfy |chi| < 1, got {s}")));
            }
        }
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::Domain(format!("distance must be positive, got {distance}")));
        }
        if !(f_min > 0.0 && f_min.is_finite()) {
            return Err(Error::Domain(format!("f_min must be positive, got {f_min}")));
        }
        if !inclination.is_finite() {
            return Err(Error::Domain("inclination must be finite".into()));
        }
        let (m1, m2, spin1, spin2) = if m1 >= m2 {
            (m1, m2, spin1, spin2)
        } else {
            (m2, m1, spin2, spin1)
        };
        Ok(Self {
            m1,
            m2,
            spin1,
            spin2,
            distance,
            inclination,
            f_min,
        })
    }

    /// GW150914-like defaults: spins 0.7/0.9, 410 Mpc, face-on, 20 Hz.
    pub fn with_masses(m1: f64, m2: f64) -> Result<Self> {
        Self::new(m1, m2, 0.7, 0.9, DEFAULT_DISTANCE_MPC, 0.0, DEFAULT_F_MIN)
    }

    pub fn chirp_mass(&self) -> f64 {
        raw_chirp_mass(self.m1, self.m2)
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }
}

/// Sampled plus/cross polarizations. `t` is time relative to coalescence,
/// so every entry is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedWaveform {
    pub sample_rate: f64,
    pub t: Vec<f64>,
    pub h_plus: Vec<f64>,
    pub h_cross: Vec<f64>,
}

impl PolarizedWaveform {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn raw_chirp_mass(m1: f64, m2: f64) -> f64 {
    (m1 * m2).powf(0.6) / (m1 + m2).powf(0.2)
}

/// Chirp mass `(m1 m2)^(3/5) / (m1 + m2)^(1/5)` in the units of the inputs.
pub fn chirp_mass(m1: f64, m2: f64) -> Result<f64> {
    check_masses(m1, m2)?;
    Ok(raw_chirp_mass(m1, m2))
}

/// Symmetric mass ratio `m1 m2 / (m1 + m2)^2`, in `(0, 0.25]`.
pub fn symmetric_mass_ratio(m1: f64, m2: f64) -> Result<f64> {
    check_masses(m1, m2)?;
    let total = m1 + m2;
    Ok(m1 * m2 / (total * total))
}

/// Dimensionless spin `c S / (G m^2)` for a mass in solar masses and an
/// angular momentum in kg m^2 / s.
pub fn dimensionless_spin(mass_solar: f64, angular_momentum: f64) -> Result<f64> {
    if !(mass_solar > 0.0 && mass_solar.is_finite()) {
        return Err(Error::Domain(format!("mass must be positive, got {mass_solar}")));
    }
    let m = mass_solar * MSUN_SI;
    Ok(C_SI * angular_momentum / (G_SI * m * m))
}

/// GW frequency at the innermost stable circular orbit of the total mass [Hz].
pub fn isco_frequency(m1: f64, m2: f64) -> Result<f64> {
    check_masses(m1, m2)?;
    Ok(1.0 / (6f64.powf(1.5) * PI * mass_in_seconds(m1 + m2)))
}

/// Leading-order GW frequency at time-to-coalescence `tau` [s] for chirp
/// mass `mc` [M☉].
pub fn gw_frequency_at(tau: f64, mc: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("time to coalescence must be positive, got {tau}")));
    }
    if !(mc > 0.0) {
        return Err(Error::Domain(format!("chirp mass must be positive, got {mc}")));
    }
    Ok(frequency_at(tau, mass_in_seconds(mc)))
}

/// Leading-order time to coalescence from GW frequency `f` [Hz].
pub fn time_to_coalescence(f: f64, mc: f64) -> Result<f64> {
    if !(f > 0.0) || !(mc > 0.0) {
        return Err(Error::Domain(format!(
            "frequency and chirp mass must be positive, got f={f}, mc={mc}"
        )));
    }
    Ok(tau_at(f, mass_in_seconds(mc)))
}

fn frequency_at(tau: f64, mc_seconds: f64) -> f64 {
    mc_seconds.powf(-5.0 / 8.0) * (5.0 / (256.0 * tau)).powf(3.0 / 8.0) / PI
}

fn tau_at(f: f64, mc_seconds: f64) -> f64 {
    5.0 / 256.0 * mc_seconds.powf(-5.0 / 3.0) * (PI * f).powf(-8.0 / 3.0)
}

/// Frequency at which the chirp is cut off for this sample rate.
pub fn termination_frequency(params: &BinaryParams, sample_rate: f64) -> Result<f64> {
    let f_isco = isco_frequency(params.m1, params.m2)?;
    Ok(f_isco.min(0.5 * sample_rate * NYQUIST_FRACTION))
}

/// Synthesizes the inspiral from `f_min` up to the termination frequency.
///
/// Samples sit on the grid `t = -j / sample_rate` with coalescence at
/// `t = 0`; the final sample is the last grid point whose frequency is
/// still below the termination frequency.
pub fn generate_chirp(params: &BinaryParams, sample_rate: f64) -> Result<PolarizedWaveform> {
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::Config(format!("sample rate must be positive, got {sample_rate}")));
    }
    let f_isco = isco_frequency(params.m1, params.m2)?;
    if sample_rate < 2.0 * f_isco {
        return Err(Error::Config(format!(
            "sample rate {sample_rate} Hz is below twice the ISCO frequency {f_isco:.3} Hz"
        )));
    }
    let unviable = |reason: String| Error::UnviableTemplate {
        m1: params.m1,
        m2: params.m2,
        reason,
    };
    if params.f_min >= f_isco {
        return Err(unviable(format!(
            "f_min {} Hz is not below the ISCO frequency {f_isco:.3} Hz",
            params.f_min
        )));
    }
    let f_end = termination_frequency(params, sample_rate)?;
    if params.f_min >= f_end {
        return Err(unviable(format!(
            "f_min {} Hz is not below the termination frequency {f_end:.3} Hz",
            params.f_min
        )));
    }

    let mc_s = mass_in_seconds(params.chirp_mass());
    let tau_start = tau_at(params.f_min, mc_s);
    let tau_end = tau_at(f_end, mc_s);
    let j_start = (tau_start * sample_rate).floor() as i64;
    let j_end = (tau_end * sample_rate).floor() as i64 + 1;
    if j_end > j_start {
        return Err(unviable("chirp is shorter than one sample".into()));
    }
    let n = (j_start - j_end + 1) as usize;

    let distance_m = params.distance * MPC_SI;
    let amp_scale = 4.0 * C_SI * mc_s.powf(5.0 / 3.0) / distance_m;
    let cos_i = params.inclination.cos();
    let plus_geom = 0.5 * (1.0 + cos_i * cos_i);
    let cross_geom = cos_i;

    let mut t = Vec::with_capacity(n);
    let mut h_plus = Vec::with_capacity(n);
    let mut h_cross = Vec::with_capacity(n);
    for j in (j_end..=j_start).rev() {
        let tau = j as f64 / sample_rate;
        let f = frequency_at(tau, mc_s);
        let phase = -2.0 * (tau / (5.0 * mc_s)).powf(5.0 / 8.0);
        let amp = amp_scale * (PI * f).powf(2.0 / 3.0);
        t.push(-tau);
        h_plus.push(amp * (plus_geom * phase.cos()));
        h_cross.push(amp * (cross_geom * phase.sin()));
    }

    Ok(PolarizedWaveform {
        sample_rate,
        t,
        h_plus,
        h_cross,
    })
}

//! Welch spectral estimates and power-ratio SNR metrics.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Sub;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::detector::StrainSeries;
use crate::error::{Error, Result};
use crate::format::format_sample;

pub const DEFAULT_SEGMENT_SECONDS: f64 = 1.0;
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Estimator settings recorded alongside a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchParams {
    pub segment_length: usize,
    /// Samples shared by consecutive segments.
    pub overlap: usize,
    pub segments: usize,
}

/// One-sided spectrum on `freqs = k * fs / segment_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub psd: Vec<f64>,
    pub asd: Vec<f64>,
    /// `None` when the spectrum was read back from CSV.
    pub params: Option<WelchParams>,
}

/// Periodic Hann window.
fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch PSD/ASD with a Hann window and per-segment mean removal.
///
/// Normalised one-sided so that `sum(psd) * df` approximates the variance
/// of the input.
pub fn welch_asd(series: &StrainSeries, segment_seconds: f64, overlap_fraction: f64) -> Result<Spectrum> {
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::Domain(format!(
            "overlap fraction must lie in [0, 1), got {overlap_fraction}"
        )));
    }
    if !(segment_seconds > 0.0 && segment_seconds.is_finite()) {
        return Err(Error::Domain(format!("segment length must be positive, got {segment_seconds}")));
    }
    let fs = series.sample_rate;
    let seg = (segment_seconds * fs).round() as usize;
    if seg < 2 {
        return Err(Error::Domain(format!("segment of {seg} samples is too short")));
    }
    if series.len() < seg {
        return Err(Error::Domain(format!(
            "series of {} samples is shorter than one {seg}-sample segment",
            series.len()
        )));
    }
    let overlap = ((overlap_fraction * seg as f64).round() as usize).min(seg - 1);
    let hop = seg - overlap;
    let segments = (series.len() - seg) / hop + 1;

    let window = hann(seg);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg);
    let bins = seg / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex::new(0.0, 0.0); seg];

    for s in 0..segments {
        let chunk = &series.values[s * hop..s * hop + seg];
        let mean = chunk.iter().sum::<f64>() / seg as f64;
        for ((b, x), w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
    }

    let norm = 1.0 / (fs * window_power * segments as f64);
    let psd: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = if k == 0 || (seg.is_multiple_of(2) && k == seg / 2) { 1.0 } else { 2.0 };
            p * norm * one_sided
        })
        .collect();
    let freqs = (0..bins).map(|k| k as f64 * fs / seg as f64).collect();
    let asd = psd.iter().map(|p| p.sqrt()).collect();
    Ok(Spectrum {
        freqs,
        psd,
        asd,
        params: Some(WelchParams {
            segment_length: seg,
            overlap,
            segments,
        }),
    })
}

impl Spectrum {
    pub fn df(&self) -> f64 {
        if self.freqs.len() < 2 {
            0.0
        } else {
            self.freqs[1] - self.freqs[0]
        }
    }

    /// CSV with header `freq_hz,psd,asd`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,psd,asd\n");
        for ((f, p), a) in self.freqs.iter().zip(&self.psd).zip(&self.asd) {
            out.push_str(&format!("{},{},{}\n", format_sample(*f), format_sample(*p), format_sample(*a)));
        }
        out
    }

    /// Parses [`Spectrum::to_csv`] output and checks the spectrum invariants.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("freq_hz,psd,asd") {
            return Err(Error::Domain("spectrum CSV must start with `freq_hz,psd,asd`".into()));
        }
        let mut s = Spectrum {
            freqs: Vec::new(),
            psd: Vec::new(),
            asd: Vec::new(),
            params: None,
        };
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Domain(format!("row {}: invalid number", i + 1)))?;
            if row.len() != 3 || row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("row {}: expected three finite values", i + 1)));
            }
            s.freqs.push(row[0]);
            s.psd.push(row[1]);
            s.asd.push(row[2]);
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.freqs.len() < 2 || self.psd.len() != self.freqs.len() || self.asd.len() != self.freqs.len() {
            return Err(Error::Domain("spectrum needs at least two consistent bins".into()));
        }
        if self.freqs[0] != 0.0 {
            return Err(Error::Domain("frequency grid must start at 0 Hz".into()));
        }
        let df = self.df();
        for (k, f) in self.freqs.iter().enumerate() {
            if (f - k as f64 * df).abs() > 1e-9 * df.max(1.0) * k as f64 {
                return Err(Error::Domain(format!("frequency grid is not uniform at bin {k}")));
            }
        }
        for (p, a) in self.psd.iter().zip(&self.asd) {
            if *p < 0.0 || (a - p.sqrt()).abs() > 1e-15 * a.abs() {
                return Err(Error::Domain("psd must be non-negative with asd = sqrt(psd)".into()));
            }
        }
        Ok(())
    }
}

/// A decibel value, with explicit sentinels for infinite ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decibels {
    Finite(f64),
    PositiveInfinity,
    NegativeInfinity,
}

impl Decibels {
    fn from_powers(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Decibels::PositiveInfinity
        } else if num == 0.0 {
            Decibels::NegativeInfinity
        } else {
            Decibels::Finite(10.0 * (num / den).log10())
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Decibels::Finite(v) => v,
            Decibels::PositiveInfinity => f64::INFINITY,
            Decibels::NegativeInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Decibels::Finite(_))
    }
}

impl Sub for Decibels {
    type Output = Decibels;

    /// Equal sentinels cancel to 0 dB.
    fn sub(self, rhs: Self) -> Self {
        use Decibels::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a - b),
            (PositiveInfinity, PositiveInfinity) | (NegativeInfinity, NegativeInfinity) => Finite(0.0),
            (PositiveInfinity, _) | (_, NegativeInfinity) => PositiveInfinity,
            (NegativeInfinity, _) | (_, PositiveInfinity) => NegativeInfinity,
        }
    }
}

impl fmt::Display for Decibels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decibels::Finite(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Decibels::PositiveInfinity => f.write_str("+inf"),
            Decibels::NegativeInfinity => f.write_str("-inf"),
        }
    }
}

fn mean_square(x: impl Iterator<Item = f64>, n: usize) -> f64 {
    x.map(|v| v * v).sum::<f64>() / n as f64
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: format!("{} samples", a.len()),
            got: b.len().to_string(),
        });
    }
    if a.is_empty() {
        return Err(Error::Domain("series are empty".into()));
    }
    Ok(())
}

/// `10 log10(P(output) / P(input - output))`. No clean reference needed.
pub fn residual_snr_db(input: &[f64], output: &[f64]) -> Result<Decibels> {
    check_lengths(input, output)?;
    let n = input.len();
    let residual = mean_square(input.iter().zip(output).map(|(i, o)| i - o), n);
    let signal = mean_square(output.iter().copied(), n);
    Ok(Decibels::from_powers(signal, residual))
}

/// `10 log10(P(clean) / P(estimate - clean))` against a known injection.
pub fn oracle_snr_db(clean: &[f64], estimate: &[f64]) -> Result<Decibels> {
    check_lengths(clean, estimate)?;
    let n = clean.len();
    let signal = mean_square(clean.iter().copied(), n);
    if signal == 0.0 {
        return Err(Error::Domain("clean reference has zero power".into()));
    }
    let error = mean_square(estimate.iter().zip(clean).map(|(e, c)| e - c), n);
    Ok(Decibels::from_powers(signal, error))
}

/// SNR improvement of `denoised` over `noisy_input`, both against `clean`.
pub fn snr_gain_db(clean: &[f64], noisy_input: &[f64], denoised: &[f64]) -> Result<Decibels> {
    Ok(oracle_snr_db(clean, denoised)? - oracle_snr_db(clean, noisy_input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn series(fs: f64, values: Vec<f64>) -> StrainSeries {
        StrainSeries::new(fs, values).unwrap()
    }

    #[test]
    fn sinusoid_peaks_at_its_bin() {
        let fs = 256.0;
        let f0 = 20.0;
        let x = (0..1024).map(|i| (2.0 * PI * f0 * i as f64 / fs).sin()).collect();
        let s = welch_asd(&series(fs, x), 1.0, 0.5).unwrap();
        let peak = s
            .psd
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, (f0 * 1.0) as usize);
        assert_eq!(s.freqs.len(), 129);
        assert_eq!(*s.freqs.last().unwrap(), 128.0);
        assert_eq!(s.params.unwrap().segments, 7);
    }

    #[test]
    fn zero_signal_zero_psd() {
        let s = welch_asd(&series(64.0, vec![0.0; 256]), 1.0, 0.5).unwrap();
        assert!(s.psd.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn short_series_rejected() {
        assert!(welch_asd(&series(64.0, vec![0.0; 63]), 1.0, 0.5).is_err());
        assert!(welch_asd(&series(64.0, vec![0.0; 64]), 1.0, 1.0).is_err());
    }

    #[test]
    fn white_noise_level_and_parseval() {
        let fs = 4096.0;
        let x = noise(4096 * 40, 5);
        let s = welch_asd(&series(fs, x.clone()), 1.0, 0.5).unwrap();
        assert!(s.params.unwrap().segments >= 32);
        let mean_psd = s.psd.iter().sum::<f64>() / s.psd.len() as f64;
        let expected = 2.0 / fs;
        assert!((mean_psd - expected).abs() < 0.1 * expected, "mean psd {mean_psd}");

        let m = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64;
        let integral: f64 = s.psd.iter().sum::<f64>() * s.df();
        assert!((integral - var).abs() < 0.02 * var, "integral {integral} var {var}");
    }

    #[test]
    fn csv_round_trip() {
        let s = welch_asd(&series(128.0, noise(1024, 1)), 1.0, 0.5).unwrap();
        let back = Spectrum::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.freqs, s.freqs);
        assert_eq!(back.psd, s.psd);
        assert_eq!(back.asd, s.asd);
        assert!(Spectrum::from_csv("f,p,a\n0,1,1\n").is_err());
        assert!(Spectrum::from_csv("freq_hz,psd,asd\n0,1,1\n1,-1,1\n").is_err());
    }

    #[test]
    fn residual_snr_examples() {
        let x = noise(500, 2);
        let half: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
        assert!(residual_snr_db(&x, &half).unwrap().value().abs() < 1e-12);
        let nine: Vec<f64> = x.iter().map(|v| 0.9 * v).collect();
        assert!((residual_snr_db(&x, &nine).unwrap().value() - 19.084_850_188_786_497).abs() < 1e-9);
        assert_eq!(residual_snr_db(&x, &vec![0.0; 500]).unwrap(), Decibels::NegativeInfinity);
        assert_eq!(residual_snr_db(&x, &x).unwrap(), Decibels::PositiveInfinity);
        assert!(residual_snr_db(&x, &x[..10]).is_err());
    }

    #[test]
    fn oracle_snr_examples() {
        let clean = noise(400, 3);
        assert_eq!(oracle_snr_db(&clean, &clean).unwrap(), Decibels::PositiveInfinity);
        // A noise vector scaled to the exact power of the clean signal.
        let raw = noise(400, 4);
        let pc = clean.iter().map(|v| v * v).sum::<f64>();
        let pn = raw.iter().map(|v| v * v).sum::<f64>();
        for (ratio, expected) in [(1.0, 0.0), (0.01, 20.0)] {
            let k = (ratio * pc / pn).sqrt();
            let est: Vec<f64> = clean.iter().zip(&raw).map(|(c, n)| c + k * n).collect();
            assert!((oracle_snr_db(&clean, &est).unwrap().value() - expected).abs() < 1e-9);
        }
        assert!(oracle_snr_db(&[0.0; 4], &[1.0; 4]).is_err());
    }

    #[test]
    fn gain_examples() {
        let clean = noise(300, 6);
        let noisy: Vec<f64> = clean.iter().zip(noise(300, 7)).map(|(c, n)| c + n).collect();
        assert_eq!(snr_gain_db(&clean, &noisy, &noisy).unwrap(), Decibels::Finite(0.0));
        assert_eq!(snr_gain_db(&clean, &noisy, &clean).unwrap(), Decibels::PositiveInfinity);
    }

    #[test]
    fn decibel_display() {
        assert_eq!(format!("{:.2}", Decibels::Finite(0.0)), "0.00");
        assert_eq!(format!("{:.2}", Decibels::PositiveInfinity), "+inf");
        assert_eq!(format!("{}", Decibels::NegativeInfinity), "-inf");
        assert_eq!(Decibels::Finite(3.0) - Decibels::PositiveInfinity, Decibels::NegativeInfinity);
    }

    proptest! {
        #[test]
        fn psd_scales_quadratically(k in 0.01f64..100.0, seed in 0u64..1000) {
            let x = noise(512, seed);
            let kx: Vec<f64> = x.iter().map(|v| k * v).collect();
            let a = welch_asd(&series(64.0, x), 1.0, 0.5).unwrap();
            let b = welch_asd(&series(64.0, kx), 1.0, 0.5).unwrap();
            for (p, q) in a.psd.iter().zip(&b.psd) {
                prop_assert!((q - k * k * p).abs() <= 1e-10 * q.abs().max(1e-300));
            }
        }

        #[test]
        fn oracle_snr_scale_invariant(k in 1e-3f64..1e3, seed in 0u64..1000) {
            let clean = noise(64, seed);
            let est: Vec<f64> = noise(64, seed + 1).iter().zip(&clean).map(|(n, c)| c + 0.3 * n).collect();
            let a = oracle_snr_db(&clean, &est).unwrap().value();
            let kc: Vec<f64> = clean.iter().map(|v| k * v).collect();
            let ke: Vec<f64> = est.iter().map(|v| k * v).collect();
            let b = oracle_snr_db(&kc, &ke).unwrap().value();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

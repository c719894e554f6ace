//! Training energy and emissions estimation, and inference-runtime summaries.
//!
//! Units are fixed: power in kW, durations in hours, energy in kWh, emissions
//! in kg CO2, carbon intensity in kg CO2 per kWh, latencies in seconds.
//! Ingestion rejects files declaring anything else.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Accelerator fleet and datacenter parameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingHardwareSpec {
    /// Number of accelerators.
    pub n_gpu: u64,
    /// Average per-accelerator power draw, kW.
    pub w_gpu: f64,
    /// Training duration, hours.
    pub t_train: f64,
    /// Power usage effectiveness of the datacenter (>= 1).
    pub pue: f64,
    /// Carbon intensity of the region, kg CO2 per kWh.
    pub c_region: f64,
}

impl TrainingHardwareSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_gpu < 1 {
            return Err(Error::invalid("n_gpu must be at least 1"));
        }
        for (name, value, min) in [
            ("w_gpu", self.w_gpu, f64::MIN_POSITIVE),
            ("t_train", self.t_train, f64::MIN_POSITIVE),
            ("pue", self.pue, 1.0),
            ("c_region", self.c_region, 0.0),
        ] {
            if !value.is_finite() || value < min {
                return Err(Error::invalid(format!(
                    "{name} = {value} is out of bounds (minimum {min})"
                )));
            }
        }
        Ok(())
    }
}

/// Step-function inference runtime model: encode latency per prompt-size
/// bucket plus a per-output-token slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeModel {
    /// Prompt-size bucket (tokens) -> encode latency (seconds). The BTreeMap
    /// keeps bucket keys strictly increasing.
    pub encode_table: BTreeMap<u64, f64>,
    /// Generation latency per output token, seconds.
    pub per_token: f64,
}

impl RuntimeModel {
    pub fn validate(&self) -> Result<()> {
        if self.encode_table.is_empty() {
            return Err(Error::invalid("encode_table must not be empty"));
        }
        for (&bucket, &latency) in &self.encode_table {
            if !latency.is_finite() || latency <= 0.0 {
                return Err(Error::invalid(format!(
                    "encode latency for bucket {bucket} must be positive, got {latency}"
                )));
            }
        }
        if !self.per_token.is_finite() || self.per_token <= 0.0 {
            return Err(Error::invalid(format!(
                "per_token latency must be positive, got {}",
                self.per_token
            )));
        }
        Ok(())
    }
}

/// An idealized runtime estimate; `bucket_exceeded` warns that the prompt was
/// larger than every bucket and the largest one was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealizedRuntime {
    pub seconds: f64,
    pub bucket: u64,
    pub bucket_exceeded: bool,
}

/// Total training energy in kWh: `n_gpu * w_gpu * t_train * pue`.
///
/// The product is evaluated left to right in exactly that order, so documented
/// examples reproduce bit-for-bit.
pub fn training_energy(spec: &TrainingHardwareSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.n_gpu as f64 * spec.w_gpu * spec.t_train * spec.pue)
}

/// Emissions in kg CO2 for a given energy draw and regional carbon intensity.
pub fn training_emissions(energy_kwh: f64, c_region: f64) -> Result<f64> {
    for (name, value) in [("energy_kwh", energy_kwh), ("c_region", c_region)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid(format!(
                "{name} must be finite and >= 0, got {value}"
            )));
        }
    }
    Ok(energy_kwh * c_region)
}

/// Contention-free runtime estimate for one request: encode latency of the
/// smallest bucket holding the prompt, plus `per_token` per output token.
pub fn idealized_runtime(
    prompt_tokens: u64,
    output_tokens: u64,
    model: &RuntimeModel,
) -> Result<IdealizedRuntime> {
    model.validate()?;
    let (bucket, encode) = match model.encode_table.range(prompt_tokens..).next() {
        Some((&bucket, &latency)) => (bucket, latency),
        None => {
            let (&bucket, &latency) = model.encode_table.iter().next_back().expect("non-empty");
            return Ok(IdealizedRuntime {
                seconds: latency + model.per_token * output_tokens as f64,
                bucket,
                bucket_exceeded: true,
            });
        }
    };
    Ok(IdealizedRuntime {
        seconds: encode + model.per_token * output_tokens as f64,
        bucket,
        bucket_exceeded: false,
    })
}

/// Nearest-rank lower percentile of observed latencies; percentile 0 is the
/// minimum, the contention-free reading of noisy samples.
pub fn denoised_runtime(samples: &[f64], percentile: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("denoised runtime needs at least one sample"));
    }
    if !(0.0..=100.0).contains(&percentile) || !percentile.is_finite() {
        return Err(Error::invalid(format!(
            "percentile must lie in [0, 100], got {percentile}"
        )));
    }
    for (i, &s) in samples.iter().enumerate() {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::invalid(format!(
                "latency sample at index {i} must be positive, got {s}"
            )));
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

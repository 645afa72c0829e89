//! Deterministic synthetic traces in the trace-file schema.
//!
//! Demand has diurnal and seasonal shape plus autocorrelated noise; wind is a
//! logistic transform of a spatially correlated AR(1) process; solar is a
//! clear-sky envelope times a daily cloudiness factor. The numbers are
//! plausible for the four mainland NEM regions but are not measurements.

use super::traces::{HourlyTraceSet, RegionTrace};
use crate::region::RegionId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Shape parameters of one synthetic region.
#[derive(Debug, Clone)]
pub struct RegionProfile {
    pub region: RegionId,
    pub mean_demand: f64,
    /// Offset of the logistic wind transform; lower means calmer.
    pub wind_bias: f64,
    /// Latitude proxy: larger values give longer winter nights.
    pub season_swing: f64,
}

pub fn nem_profiles() -> Vec<RegionProfile> {
    vec![
        RegionProfile { region: "QLD".into(), mean_demand: 6_900.0, wind_bias: -0.85, season_swing: 0.6 },
        RegionProfile { region: "NSW".into(), mean_demand: 8_800.0, wind_bias: -0.80, season_swing: 0.9 },
        RegionProfile { region: "VIC".into(), mean_demand: 5_500.0, wind_bias: -0.70, season_swing: 1.2 },
        RegionProfile { region: "SA".into(), mean_demand: 1_500.0, wind_bias: -0.65, season_swing: 1.1 },
    ]
}

/// NEM-shaped traces for `hours` hours starting 1 January 00:00.
pub fn nem_traces(hours: usize, seed: u64) -> HourlyTraceSet {
    generate(&nem_profiles(), hours, seed)
}

fn diurnal(hour_of_day: f64) -> f64 {
    let bump = |centre: f64, width: f64| (-((hour_of_day - centre) / width).powi(2)).exp();
    0.16 * bump(18.5, 2.5) + 0.08 * bump(8.0, 1.8) - 0.16 * bump(3.5, 3.0) + 0.03 * bump(13.0, 3.0)
}

fn seasonal(day: f64) -> f64 {
    // Winter (mid-year) and summer peaks, shoulder-season troughs.
    0.05 * (2.0 * PI * (day - 196.0) / 365.0).cos() + 0.04 * (4.0 * PI * (day - 15.0) / 365.0).cos()
}

pub fn generate(profiles: &[RegionProfile], hours: usize, seed: u64) -> HourlyTraceSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = profiles.len();
    let mut out: Vec<RegionTrace> = (0..n).map(|_| RegionTrace::with_hours(hours)).collect();

    let phi_wind: f64 = 0.97;
    let rho_wind: f64 = 0.6;
    let phi_load: f64 = 0.9;
    let mut wind_state: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut load_state = vec![0.0_f64; n];
    let mut cloud = vec![0.0_f64; n];
    let mut cloud_common = 0.0_f64;

    for h in 0..hours {
        let day = (h / 24) as f64;
        let hod = (h % 24) as f64;
        if h % 24 == 0 {
            let e: f64 = rng.sample(StandardNormal);
            cloud_common = 0.5 * cloud_common + e;
            for c in cloud.iter_mut() {
                let e: f64 = rng.sample(StandardNormal);
                *c = 0.6 * cloud_common + 0.8 * e;
            }
        }
        let common: f64 = rng.sample(StandardNormal);
        for (i, p) in profiles.iter().enumerate() {
            let idio: f64 = rng.sample(StandardNormal);
            let shock = rho_wind.sqrt() * common + (1.0 - rho_wind).sqrt() * idio;
            wind_state[i] = phi_wind * wind_state[i] + (1.0 - phi_wind * phi_wind).sqrt() * shock;
            let wind = 1.0 / (1.0 + (-(p.wind_bias + 1.6 * wind_state[i])).exp());

            // Day length: ~14 h in summer, ~10 h in winter, scaled by region.
            let half_day = 6.0 + p.season_swing * (2.0 * PI * (day - 355.0) / 365.0).cos();
            let x = (hod + 0.5 - 12.5) / half_day;
            let clear = if x.abs() < 1.0 { (0.5 * PI * x).cos().powf(1.3) } else { 0.0 };
            let clearness = 1.0 / (1.0 + (-(1.2 - 0.9 * cloud[i])).exp());
            let solar = (0.92 * clear * clearness).clamp(0.0, 1.0);
            let rooftop = (0.85 * solar).clamp(0.0, 1.0);

            let e: f64 = rng.sample(StandardNormal);
            load_state[i] = phi_load * load_state[i] + (1.0 - phi_load * phi_load).sqrt() * e;
            let demand = p.mean_demand * (1.0 + diurnal(hod) + seasonal(day) + 0.03 * load_state[i]);

            let t = &mut out[i];
            t.demand.push(demand.max(0.2 * p.mean_demand));
            t.wind_cf.push(wind.clamp(0.0, 1.0));
            t.solar_cf.push(solar);
            t.rooftop_pv_cf.push(rooftop);
        }
    }
    HourlyTraceSet::new(profiles.iter().map(|p| p.region.clone()).collect(), out)
        .expect("synthetic traces are in range by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(nem_traces(200, 7), nem_traces(200, 7));
        assert_ne!(nem_traces(200, 7), nem_traces(200, 8));
    }

    #[test]
    fn plausible_annual_statistics() {
        let t = nem_traces(8760, 1);
        for (i, p) in nem_profiles().iter().enumerate() {
            let tr = &t.traces()[i];
            let mean_d = tr.demand.iter().sum::<f64>() / 8760.0;
            assert!((mean_d / p.mean_demand - 1.0).abs() < 0.05, "{mean_d}");
            let mean_w = tr.wind_cf.iter().sum::<f64>() / 8760.0;
            assert!((0.25..0.45).contains(&mean_w), "{mean_w}");
            let mean_s = tr.solar_cf.iter().sum::<f64>() / 8760.0;
            assert!((0.12..0.30).contains(&mean_s), "{mean_s}");
            // No sun at 2 am.
            assert!(tr.solar_cf.iter().skip(2).step_by(24).all(|&s| s == 0.0));
        }
    }
}

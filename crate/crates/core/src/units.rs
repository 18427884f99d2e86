//! Physical constants and dB helpers.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

pub fn db_to_linear_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn db_to_linear_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// `10 log10(p)`; zero power maps to negative infinity.
pub fn power_to_db(p: f64) -> f64 {
    if p > 0.0 {
        10.0 * p.log10()
    } else {
        f64::NEG_INFINITY
    }
}

pub fn kmh_to_ms(v: f64) -> f64 {
    v / 3.6
}

/// Free-space path loss in dB (Friis, isotropic antennas).
pub fn free_space_path_loss_db(distance_m: f64, frequency_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m / wavelength(frequency_hz)).log10()
}

/// Neumaier compensated sum. Reductions over path powers use this so the
/// result does not depend on accumulation order beyond rounding of the
/// final value.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Wrap an angle in degrees to `(-180, 180]`.
pub fn wrap_deg(a: f64) -> f64 {
    let mut w = a % 360.0;
    if w <= -180.0 {
        w += 360.0;
    } else if w > 180.0 {
        w -= 360.0;
    }
    w
}

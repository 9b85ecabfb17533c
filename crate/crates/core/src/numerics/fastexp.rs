//! Branch-free `exp` that the compiler can vectorize over slices.
//!
//! Relative error is within a few ulp of `f64::exp` on `[-708, 709]`; inputs
//! below that range return 0 and inputs above saturate at `exp(709)`.

const MAGIC: f64 = 6755399441055744.0; // 1.5 * 2^52
const LOG2E: f64 = std::f64::consts::LOG2_E;
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
const LOWER: f64 = -708.0;
const UPPER: f64 = 709.0;

// Taylor coefficients 1/k! for k = 0..=12.
const C: [f64; 13] = [
    1.0,
    1.0,
    0.5,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
];

#[inline(always)]
pub fn exp(x: f64) -> f64 {
    let xc = x.clamp(LOWER, UPPER);
    let t = xc * LOG2E + MAGIC;
    let k = t - MAGIC;
    let r = (xc - k * LN2_HI) - k * LN2_LO;
    let mut p = C[12];
    p = p * r + C[11];
    p = p * r + C[10];
    p = p * r + C[9];
    p = p * r + C[8];
    p = p * r + C[7];
    p = p * r + C[6];
    p = p * r + C[5];
    p = p * r + C[4];
    p = p * r + C[3];
    p = p * r + C[2];
    p = p * r + C[1];
    p = p * r + C[0];
    let ki = (t.to_bits() as i64).wrapping_sub(MAGIC.to_bits() as i64);
    let scale = f64::from_bits((ki.wrapping_add(1023) << 52) as u64);
    let v = p * scale;
    if x < LOWER {
        0.0
    } else {
        v
    }
}

/// Replaces every element with its exponential.
pub fn exp_in_place(xs: &mut [f64]) {
    for v in xs.iter_mut() {
        *v = exp(*v);
    }
}

/// Applies [`sigmoid`] to every element.
pub fn sigmoid_in_place(xs: &mut [f64]) {
    for v in xs.iter_mut() {
        *v = sigmoid(*v);
    }
}

/// Logistic sigmoid built on [`exp`].
#[inline(always)]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + exp(-z))
}

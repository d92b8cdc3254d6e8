//! Special functions and complex helpers.

use num_complex::Complex64;

pub use statrs::function::erf::erfc;
pub use statrs::function::gamma::{gamma, ln_gamma};

/// `ln(1 + z)` accurate for small `|z|`.
pub fn ln1p_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        // z - z²/2 + z³/3 - z⁴/4
        let z2 = z * z;
        z - z2 * 0.5 + z2 * z / 3.0 - z2 * z2 * 0.25
    } else {
        (Complex64::new(1.0, 0.0) + z).ln()
    }
}

/// `exp(z) - 1` accurate for small `|z|`.
pub fn expm1_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        z + z2 * 0.5 + z2 * z / 6.0 + z2 * z2 / 24.0
    } else {
        z.exp() - 1.0
    }
}

/// Principal power `z^p` with `0^p = 0` for `p > 0`.
pub fn cpow(z: Complex64, p: f64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    (z.ln() * p).exp()
}

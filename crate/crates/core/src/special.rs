//! Thin wrappers over libm's Gamma and complementary error function.

/// Γ(x).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// 1/Γ(z), returning an exact zero at the poles z = 0, −1, −2, …
pub fn recip_gamma(z: f64) -> f64 {
    if z <= 0.0 && z.fract() == 0.0 {
        return 0.0;
    }
    1.0 / libm::tgamma(z)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

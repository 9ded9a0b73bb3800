//! Closed-form solutions used as references by the experiments.

/// Diffusive Fermi-Dirac profile 1/(1 + e^{(x−5)/(2+t)}).
pub fn fermi_dirac_diffusive(x: f64, t: f64) -> f64 {
    fermi((x - 5.0) / (2.0 + t))
}

/// Fermi-Dirac profile translating at speed 5.
pub fn fermi_dirac_moving(x: f64, t: f64) -> f64 {
    fermi((x - 5.0 * t) / 2.0)
}

/// Wave of period 2π left of x = 10t, Gaussian decay right of it.
pub fn oscillating_front(x: f64, t: f64) -> f64 {
    let s = x - 10.0 * t;
    if s <= 0.0 {
        s.cos()
    } else {
        (-s * s).exp()
    }
}

/// Two-dimensional profile with oscillation, drift and spreading.
pub fn drifting_2d(x: f64, y: f64, t: f64) -> f64 {
    let fx = fermi((x - 6.0 * t - 2.0 - t * t.cos()) / (2.0 + 0.3 * t));
    let fy = fermi((y - 4.0 * t - 2.0 - t * t.sin()) / (2.0 + 0.4 * t));
    (x * y / 400.0).cos() * fx * fy
}

/// Exact solution of the variable-speed transport problem.
pub fn transport_exact(x: f64, t: f64) -> f64 {
    fermi((x - 2.0 * t) / (2.0 + t))
}

/// Heat kernel (1+t)^{-1/2} e^{−x²/(4(1+t))}.
pub fn heat_kernel(x: f64, t: f64) -> f64 {
    (-(x * x) / (4.0 * (1.0 + t))).exp() / (1.0 + t).sqrt()
}

/// Exact cell density e^t e^{−2a} e^{−x/(5+t)}.
pub fn cell_density(a: f64, x: f64, t: f64) -> f64 {
    (t - 2.0 * a - x / (5.0 + t)).exp()
}

/// 1/(1+e^z), written to avoid overflow for large z.
pub fn fermi(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(fermi_dirac_diffusive(5.0, 0.0), 0.5);
        let t = 0.7;
        assert_eq!(oscillating_front(10.0 * t, t), 1.0);
        let want = 1.0 / (1.0 + (-1f64).exp()).powi(2);
        assert!((drifting_2d(0.0, 0.0, 0.0) - want).abs() < 1e-15);
        assert!((transport_exact(0.0, 1.0) - 1.0 / (1.0 + (-2.0f64 / 3.0).exp())).abs() < 1e-15);
    }
}

/// Cox-Ross-Rubinstein American put with continuous dividend yield; the
/// reference for the pure-diffusion case.
pub fn binomial_put(spot: f64, strike: f64, r: f64, delta: f64, sigma: f64, t: f64, steps: usize) -> f64 {
    let dt = t / steps as f64;
    let u = (sigma * dt.sqrt()).exp();
    let d = 1.0 / u;
    let p = (((r - delta) * dt).exp() - d) / (u - d);
    let disc = (-r * dt).exp();
    let mut v: Vec<f64> = (0..=steps)
        .map(|j| (strike - spot * u.powi(j as i32) * d.powi((steps - j) as i32)).max(0.0))
        .collect();
    for n in (0..steps).rev() {
        for j in 0..=n {
            let s = spot * u.powi(j as i32) * d.powi((n - j) as i32);
            let cont = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
            v[j] = cont.max(strike - s);
        }
    }
    v[0]
}

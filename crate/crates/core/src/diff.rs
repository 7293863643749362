//! Central differences with Richardson extrapolation.

/// Step used for derivatives with respect to `n`: `max(1e-6, 1e-7·n)`.
pub fn default_step(n: f64) -> f64 {
    (1e-7 * n.abs()).max(1e-6)
}

/// `f'(x)` from central differences at `h`, `h/2`, `h/4`, combined with two
/// Richardson levels (error `O(h⁶)` in exact arithmetic).
pub fn richardson_central<F, E>(mut f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut d = [0.0; 3];
    for (i, di) in d.iter_mut().enumerate() {
        let step = h / (1u32 << i) as f64;
        *di = (f(x + step)? - f(x - step)?) / (2.0 * step);
    }
    let r1a = (4.0 * d[1] - d[0]) / 3.0;
    let r1b = (4.0 * d[2] - d[1]) / 3.0;
    Ok((16.0 * r1b - r1a) / 15.0)
}

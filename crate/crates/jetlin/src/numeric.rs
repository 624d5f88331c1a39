//! Fixed-step integration and finite differences for the numeric oracles.

/// Classical fixed-step fourth-order Runge-Kutta. Returns the full trajectory
/// including the initial state: steps+1 pairs (t, state).
pub fn rk4_path<F>(deriv: F, y0: Vec<f64>, t0: f64, t1: f64, steps: usize) -> Vec<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    assert!(steps > 0);
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut t = t0;
    let mut y = y0;
    out.push((t, y.clone()));
    for _ in 0..steps {
        let k1 = deriv(t, &y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = deriv(t + 0.5 * h, &y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = deriv(t + 0.5 * h, &y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = deriv(t + h, &y4);
        for ((a, (k1, k4)), (k2, k3)) in
            y.iter_mut().zip(k1.iter().zip(&k4)).zip(k2.iter().zip(&k3))
        {
            *a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t += h;
        out.push((t, y.clone()));
    }
    out
}

/// Endpoint-only variant of `rk4_path`.
pub fn rk4<F>(deriv: F, y0: Vec<f64>, t0: f64, t1: f64, steps: usize) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    rk4_path(deriv, y0, t0, t1, steps).pop().unwrap().1
}

/// Finite-difference weights on arbitrarily spaced nodes (Fornberg's
/// recursion): `weights[m][j]` is the coefficient of the value at `nodes[j]`
/// in the order-m derivative at `z`, for m = 0..=max_order. Exact for
/// polynomials of degree < nodes.len().
pub fn fd_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > max_order, "need more nodes than the derivative order");
    let m = max_order;
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (0..=m).map(|k| (0..n).map(|j| c[j][k]).collect()).collect()
}

/// Applies precomputed weights to sampled values.
pub fn apply_weights(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

/// Symmetric difference quotient (f(+dt) - f(-dt)) / (2 dt).
pub fn central_diff(plus: f64, minus: f64, dt: f64) -> f64 {
    (plus - minus) / (2.0 * dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_integrates_harmonic_oscillator() {
        // y'' = -y from (1, 0): y(t) = cos t
        let end = rk4(
            |_, s| vec![s[1], -s[0]],
            vec![1.0, 0.0],
            0.0,
            1.0,
            1000,
        );
        assert!((end[0] - 1.0f64.cos()).abs() < 1e-10);
        assert!((end[1] + 1.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn fornberg_uniform_five_point() {
        let h = 0.1;
        let nodes: Vec<f64> = (-2..=2).map(|k| k as f64 * h).collect();
        let w = fd_weights(0.0, &nodes, 2);
        let expect1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (got, want) in w[1].iter().zip(expect1) {
            assert!((got - want / h).abs() < 1e-9, "{got} vs {}", want / h);
        }
        let expect2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for (got, want) in w[2].iter().zip(expect2) {
            assert!((got - want / (h * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn fornberg_nonuniform_is_exact_on_polynomials() {
        let nodes = [0.0, 0.3, 0.7, 1.1, 1.6];
        let w = fd_weights(0.7, &nodes, 2);
        // f(x) = x^3 - 2x: f'(0.7) = 3*0.49 - 2, f''(0.7) = 4.2
        let vals: Vec<f64> = nodes.iter().map(|x| x.powi(3) - 2.0 * x).collect();
        assert!((apply_weights(&w[1], &vals) - (3.0 * 0.49 - 2.0)).abs() < 1e-12);
        assert!((apply_weights(&w[2], &vals) - 4.2).abs() < 1e-11);
        // interpolation row reproduces the value
        assert!((apply_weights(&w[0], &vals) - (0.7f64.powi(3) - 1.4)).abs() < 1e-12);
    }
}

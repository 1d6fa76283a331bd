//! Gauss–Legendre rules on `[0, 1]` and a product rule on the simplex.

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule. Nodes are points of the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Rescales the weights so they sum to one.
    pub fn normalized(mut self) -> Self {
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= total;
        }
        self
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the Legendre recurrence from the Chebyshev-like
/// initial guesses.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::input("Gauss-Legendre rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        if n == 1 {
            // dp formula is singular only at x = ±1; for n = 1 the node is 0
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Gauss–Legendre rule on `[0, 1]` with weights summing to one.
pub fn unit_interval_rule(n: usize) -> Result<QuadratureRule> {
    let (x, w) = gauss_legendre(n)?;
    let nodes = x.iter().map(|&xi| vec![0.5 * (xi + 1.0)]).collect();
    let weights = w.iter().map(|&wi| 0.5 * wi).collect();
    Ok(QuadratureRule { nodes, weights }.normalized())
}

/// Quadrature for the normalized surface measure of the simplex
/// `{t >= 0, t_1 + ... + t_d = 1}`.
///
/// `d = 2` uses the segment parametrization `(s, 1 - s)`. For `d >= 3` the
/// collapsed-coordinate (Duffy) product rule maps the unit cube onto the
/// simplex; the Jacobian is folded into the weights before normalization.
pub fn simplex_rule(d: usize, resolution: usize) -> Result<QuadratureRule> {
    if d < 2 {
        return Err(Error::input(format!("simplex dimension must be >= 2, got {d}")));
    }
    if resolution == 0 {
        return Err(Error::input("simplex resolution must be >= 1"));
    }
    let (x, w) = gauss_legendre(resolution)?;
    let u: Vec<f64> = x.iter().map(|&xi| 0.5 * (xi + 1.0)).collect();
    let wu: Vec<f64> = w.iter().map(|&wi| 0.5 * wi).collect();
    if d == 2 {
        let nodes = u.iter().map(|&s| vec![s, 1.0 - s]).collect();
        return Ok(QuadratureRule { nodes, weights: wu }.normalized());
    }

    let k = d - 1;
    let count = resolution.pow(k as u32);
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut idx = vec![0usize; k];
    loop {
        // t_1 = u_1, t_j = u_j * prod_{l<j} (1 - u_l), t_d = prod (1 - u_l)
        let mut remaining = 1.0;
        let mut weight = 1.0;
        let mut point = Vec::with_capacity(d);
        for &ij in &idx {
            let uj = u[ij];
            point.push(uj * remaining);
            weight *= wu[ij];
            remaining *= 1.0 - uj;
        }
        point.push(remaining);
        // Jacobian of the collapsed map: prod_j (1 - u_j)^(k - 1 - j)
        let mut jac = 1.0;
        for (j, &ij) in idx.iter().enumerate() {
            jac *= (1.0 - u[ij]).powi((k - 1 - j) as i32);
        }
        nodes.push(point);
        weights.push(weight * jac);

        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(QuadratureRule { nodes, weights }.normalized());
            }
            idx[pos] += 1;
            if idx[pos] < resolution {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

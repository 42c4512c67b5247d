//! Finite-difference residual of the split equations
//! `X'² - Y'² + ħY'' = 2m(E - V)` and `X'Y' - ħX''/2 = 0`.

use serde::{Deserialize, Serialize};

use super::ActionField;

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `x`
/// (Fornberg's algorithm). `w[k][j]` multiplies `f(x[j])` for order `k`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QhjeResidual {
    /// max over interior samples of `|X'² - Y'² + ħY'' - 2m(E - V)|`
    pub real_part: f64,
    /// max over interior samples of `|X'Y' - ħX''/2|`
    pub imag_part: f64,
}

impl QhjeResidual {
    pub fn max(&self) -> f64 {
        self.real_part.max(self.imag_part)
    }
}

/// Residual of the field using seven-point derivatives of `X` and `Y`.
pub fn qhje_residual(field: &ActionField) -> QhjeResidual {
    let g = &field.grid;
    let h = field.hbar();
    let m = field.slice.mass();
    let mut out = QhjeResidual {
        real_part: 0.0,
        imag_part: 0.0,
    };
    if g.len() < 7 {
        return out;
    }
    for i in 3..g.len() - 3 {
        let w = fornberg_weights(g[i], &g[i - 3..=i + 3], 2);
        let d = |f: &[f64], k: usize| -> f64 { (0..7).map(|j| w[k][j] * f[i - 3 + j]).sum() };
        let x1 = d(&field.real, 1);
        let x2 = d(&field.real, 2);
        let y1 = d(&field.imag, 1);
        let y2 = d(&field.imag, 2);
        let kin = -2.0 * m * field.slice.excess(g[i]);
        out.real_part = out.real_part.max((x1 * x1 - y1 * y1 + h * y2 - kin).abs());
        out.imag_part = out.imag_part.max((x1 * y1 - 0.5 * h * x2).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_polynomials() {
        let x = [0.0, 0.3, 0.7, 1.2, 1.3];
        let w = fornberg_weights(0.6, &x, 2);
        let f: Vec<f64> = x.iter().map(|t| t * t * t - 2.0 * t).collect();
        let d1: f64 = w[1].iter().zip(&f).map(|(a, b)| a * b).sum();
        let d2: f64 = w[2].iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((d1 - (3.0 * 0.36 - 2.0)).abs() < 1e-12);
        assert!((d2 - 6.0 * 0.6).abs() < 1e-11);
    }
}

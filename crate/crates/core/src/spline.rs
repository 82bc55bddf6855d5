//! Not-a-knot cubic spline interpolation on a strictly increasing grid.
//!
//! Not-a-knot end conditions reproduce cubic polynomials exactly, so
//! polynomial paths survive a round trip through a sample table.

#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// Requires at least four points and strictly increasing `x`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 4 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // unknowns M_1 .. M_{n-2}
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            sub[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * (d[i] - d[i - 1]);
        }
        // M_0 = ((h0 + h1) M_1 − h0 M_2) / h1
        diag[0] += h[0] * (h[0] + h[1]) / h[1];
        sup[0] -= h[0] * h[0] / h[1];
        // M_{n-1} = ((h_{n-3} + h_{n-2}) M_{n-2} − h_{n-2} M_{n-3}) / h_{n-3}
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb * (ha + hb) / ha;
        sub[k - 1] -= hb * hb / ha;

        // Thomas algorithm
        for r in 1..k {
            let w = sub[r] / diag[r - 1];
            diag[r] -= w * sup[r - 1];
            rhs[r] -= w * rhs[r - 1];
        }
        let mut inner = vec![0.0; k];
        inner[k - 1] = rhs[k - 1] / diag[k - 1];
        for r in (0..k - 1).rev() {
            inner[r] = (rhs[r] - sup[r] * inner[r + 1]) / diag[r];
        }

        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&inner);
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
        Some(Self { x, y, m })
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = self.x[i + 1] - t;
        let b = t - self.x[i];
        self.m[i] * a.powi(3) / (6.0 * h)
            + self.m[i + 1] * b.powi(3) / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = self.x[i + 1] - t;
        let b = t - self.x[i];
        -self.m[i] * a * a / (2.0 * h) + self.m[i + 1] * b * b / (2.0 * h)
            - (self.y[i] / h - self.m[i] * h / 6.0)
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        let f = |x: f64| 0.3 - 1.2 * x + 0.7 * x * x - 0.25 * x.powi(3);
        let df = |x: f64| -1.2 + 1.4 * x - 0.75 * x * x;
        let x: Vec<f64> = [0.0, 0.3, 0.35, 1.0, 1.7, 2.0, 3.1].to_vec();
        let y = x.iter().map(|&v| f(v)).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for k in 0..=60 {
            let t = -0.2 + 3.5 * k as f64 / 60.0;
            assert!((s.eval(t) - f(t)).abs() < 1e-11, "t = {t}");
            assert!((s.derivative(t) - df(t)).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn four_points_suffice() {
        let x = vec![0.0, 1.0, 2.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let s = CubicSpline::new(x, y).unwrap();
        assert!((s.eval(3.0) - 9.0).abs() < 1e-12);
        assert!((s.derivative(3.0) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).is_none());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_none());
    }
}

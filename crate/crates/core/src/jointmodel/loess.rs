//! Local linear regression (LOESS, degree 1) with tricube weights.

use crate::error::{ensure, Error, Result};

const MIN_POINTS: usize = 10;
const DEGREE: usize = 1;

/// A fitted smoother; evaluation happens lazily at requested points.
#[derive(Debug, Clone)]
pub struct LoessFit {
    x: Vec<f64>,
    y: Vec<f64>,
    neighbours: usize,
}

/// Fits a degree-1 LOESS smoother of `y` on `x` using the
/// `floor(span * n)` nearest neighbours of each evaluation point.
pub fn loess_fit(x: &[f64], y: &[f64], span: f64) -> Result<LoessFit> {
    ensure!(
        x.len() == y.len(),
        InvalidArgument,
        "loess: x and y have different lengths ({} and {})",
        x.len(),
        y.len()
    );
    ensure!(
        x.len() >= MIN_POINTS,
        InvalidArgument,
        "loess: need at least {MIN_POINTS} points, got {}",
        x.len()
    );
    ensure!(
        span > 0.0 && span <= 1.0,
        InvalidArgument,
        "loess: span must lie in (0, 1], got {span}"
    );
    ensure!(
        x.iter().chain(y).all(|v| v.is_finite()),
        InvalidArgument,
        "loess: data must be finite"
    );
    let neighbours = (span * x.len() as f64).floor() as usize;
    ensure!(
        neighbours >= DEGREE + 2,
        InvalidArgument,
        "loess: span {span} covers {neighbours} points, need at least {}",
        DEGREE + 2
    );

    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    if xs[0] == xs[xs.len() - 1] {
        return Err(Error::InvalidArgument("loess: all x values are equal".to_string()));
    }
    Ok(LoessFit {
        x: xs,
        y: ys,
        neighbours,
    })
}

#[inline]
fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

impl LoessFit {
    pub fn span_points(&self) -> usize {
        self.neighbours
    }

    /// Window `[lo, hi)` of the `neighbours` points nearest to `x0`.
    fn window(&self, x0: f64) -> (usize, usize) {
        let n = self.x.len();
        let mut hi = self.x.partition_point(|&v| v < x0);
        let mut lo = hi;
        while hi - lo < self.neighbours {
            let take_left = if lo == 0 {
                false
            } else if hi == n {
                true
            } else {
                x0 - self.x[lo - 1] <= self.x[hi] - x0
            };
            if take_left {
                lo -= 1;
            } else {
                hi += 1;
            }
        }
        (lo, hi)
    }

    pub fn predict(&self, x0: f64) -> f64 {
        let (lo, hi) = self.window(x0);
        let xs = &self.x[lo..hi];
        let ys = &self.y[lo..hi];
        let h = (x0 - xs[0]).abs().max((xs[xs.len() - 1] - x0).abs());

        let weights: Vec<f64> = if h == 0.0 {
            vec![1.0; xs.len()]
        } else {
            xs.iter().map(|&xi| tricube((xi - x0).abs() / h)).collect()
        };
        let sw: f64 = weights.iter().sum();
        let xm = weights.iter().zip(xs).map(|(w, x)| w * x).sum::<f64>() / sw;
        let ym = weights.iter().zip(ys).map(|(w, y)| w * y).sum::<f64>() / sw;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for ((w, x), y) in weights.iter().zip(xs).zip(ys) {
            sxx += w * (x - xm) * (x - xm);
            sxy += w * (x - xm) * (y - ym);
        }
        let scale = h.max(f64::MIN_POSITIVE);
        if sxx <= 1e-12 * sw * scale * scale {
            ym
        } else {
            ym + sxy / sxx * (x0 - xm)
        }
    }

    pub fn predict_many(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&p| self.predict(p)).collect()
    }
}

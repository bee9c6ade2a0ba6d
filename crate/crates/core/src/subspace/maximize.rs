//! Numerical maximizer for the online sensitivity when `p != 2`.
//!
//! The objective `|c.y|^p / (sum_k w_k |b_k.y|^p + lambda |Q y|_p^p)` is
//! homogeneous of degree 0, so it is maximized on the unit sphere. The
//! search runs in whitened coordinates `z = L^T y`, where `L L^T` is the
//! `p = 2` denominator, which makes the `p = 2` landscape isotropic.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Random restarts on top of the `p = 2` warm start.
pub const RESTARTS: usize = 20;

/// Multiplier applied to the best value found; overestimates only cost samples.
pub const SAFETY_FACTOR: f64 = 1.25;

const MAX_ITERS: usize = 150;

/// Problem data in reduced coordinates: `c = Q^T a`, kept rows `b_k = Q^T a_k`
/// with weights `w_k`, and `Q` itself for the ridge term.
pub(crate) struct Problem<'a> {
    pub c: &'a DVector<f64>,
    pub rows: &'a [(DVector<f64>, f64)],
    pub q: &'a DMatrix<f64>,
    pub lambda: f64,
    pub p: f64,
}

fn abs_pow(t: f64, p: f64) -> f64 {
    t.abs().powf(p)
}

/// `d/dt |t|^p`, taken as 0 at `t = 0`.
fn abs_pow_grad(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        p * t.signum() * t.abs().powf(p - 1.0)
    }
}

impl Problem<'_> {
    pub fn value(&self, y: &DVector<f64>) -> f64 {
        let num = abs_pow(self.c.dot(y), self.p);
        let den = self.denominator(y);
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    fn denominator(&self, y: &DVector<f64>) -> f64 {
        let x = self.q * y;
        let rows: f64 = self.rows.iter().map(|(b, w)| w * abs_pow(b.dot(y), self.p)).sum();
        rows + self.lambda * x.iter().map(|&t| abs_pow(t, self.p)).sum::<f64>()
    }

    /// Gradient of `ln value` with respect to `y`.
    fn log_gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        let cy = self.c.dot(y);
        let mut g = self.c * (abs_pow_grad(cy, self.p) / abs_pow(cy, self.p));
        let mut dg = DVector::zeros(y.len());
        for (b, w) in self.rows {
            dg += b * (w * abs_pow_grad(b.dot(y), self.p));
        }
        let x = self.q * y;
        let gx = x.map(|t| abs_pow_grad(t, self.p));
        dg += self.q.tr_mul(&gx) * self.lambda;
        g -= dg / self.denominator(y);
        g
    }
}

/// `M_r + lambda I`, the `p = 2` denominator matrix in reduced coordinates.
pub(crate) fn quadratic_form(rows: &[(DVector<f64>, f64)], r: usize, lambda: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(r, r) * lambda;
    for (b, w) in rows {
        m.ger(*w, b, b, 1.0);
    }
    m
}

/// Best value found by whitened projected gradient ascent from the `p = 2`
/// optimum and [`RESTARTS`] random starts. Not multiplied by the safety factor.
pub(crate) fn maximize<R: Rng + ?Sized>(problem: &Problem<'_>, rng: &mut R) -> f64 {
    let r = problem.c.len();
    let quad = quadratic_form(problem.rows, r, problem.lambda);
    let Some(chol) = Cholesky::new(quad) else {
        return 1.0;
    };
    let l = chol.l();
    let l_inv_t = match l.clone().try_inverse() {
        Some(inv) => inv.transpose(),
        None => return 1.0,
    };
    // y = L^{-T} z
    let to_y = |z: &DVector<f64>| &l_inv_t * z;

    let warm = chol.solve(problem.c);
    let mut starts = vec![l.tr_mul(&warm)];
    for _ in 0..RESTARTS {
        starts.push(DVector::from_iterator(r, (0..r).map(|_| rng.sample::<f64, _>(StandardNormal))));
    }

    let mut best = 0.0f64;
    for mut z in starts {
        if z.norm() == 0.0 {
            continue;
        }
        z.normalize_mut();
        let mut value = problem.value(&to_y(&z));
        let mut step = 0.5;
        for _ in 0..MAX_ITERS {
            // chain rule through y = L^{-T} z
            let gy = problem.log_gradient(&to_y(&z));
            let mut gz = l_inv_t.tr_mul(&gy);
            // project onto the tangent space of the sphere
            gz -= &z * z.dot(&gz);
            let gnorm = gz.norm();
            if !(gnorm > 1e-12) {
                break;
            }
            let mut improved = false;
            while step > 1e-10 {
                let cand = (&z + &gz * (step / gnorm)).normalize();
                let v = problem.value(&to_y(&cand));
                if v > value {
                    z = cand;
                    value = v;
                    step = (step * 1.5).min(1.0);
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.max(value);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;

    fn random_problem(
        r: usize,
        k: usize,
        seed: u64,
    ) -> (DVector<f64>, Vec<(DVector<f64>, f64)>, DMatrix<f64>) {
        let mut rng = stream_rng(seed);
        let mut normal = || rng.sample::<f64, _>(StandardNormal);
        let c = DVector::from_fn(r, |_, _| normal());
        let rows: Vec<(DVector<f64>, f64)> = (0..k)
            .map(|_| (DVector::from_fn(r, |_, _| normal()), 1.0 + normal().abs()))
            .collect();
        (c, rows, DMatrix::identity(r, r))
    }

    #[test]
    fn p2_reaches_the_closed_form() {
        for seed in 0..20 {
            let (c, rows, q) = random_problem(3, 6, seed);
            let lambda = 0.1;
            let closed = quadratic_form(&rows, 3, lambda).cholesky().unwrap().solve(&c).dot(&c);
            let prob = Problem { c: &c, rows: &rows, q: &q, lambda, p: 2.0 };
            let got = maximize(&prob, &mut stream_rng(seed));
            assert!((got - closed).abs() <= 1e-9 * closed, "{got} vs {closed}");
        }
    }

    #[test]
    fn one_dimensional_value_is_exact() {
        let c = DVector::from_vec(vec![2.0]);
        let rows = vec![(DVector::from_vec(vec![1.0]), 3.0), (DVector::from_vec(vec![-2.0]), 0.5)];
        let q = DMatrix::from_vec(1, 1, vec![1.0]);
        for p in [1.0, 1.5, 3.0] {
            let prob = Problem { c: &c, rows: &rows, q: &q, lambda: 0.25, p };
            let expected = 2f64.powf(p) / (3.0 + 0.5 * 2f64.powf(p) + 0.25);
            assert!((maximize(&prob, &mut stream_rng(1)) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_an_angle_sweep_in_two_dimensions() {
        for seed in 0..10 {
            let (c, rows, q) = random_problem(2, 5, seed + 50);
            for p in [1.0, 3.0, 4.0] {
                let prob = Problem { c: &c, rows: &rows, q: &q, lambda: 0.01, p };
                let sweep = (0..200_000)
                    .map(|i| {
                        let t = std::f64::consts::PI * i as f64 / 200_000.0;
                        prob.value(&DVector::from_vec(vec![t.cos(), t.sin()]))
                    })
                    .fold(0.0, f64::max);
                let got = maximize(&prob, &mut stream_rng(seed));
                // The sweep is a lower bound; the ascent must reach it up to grid resolution.
                assert!(got >= sweep * (1.0 - 1e-6), "p={p}: {got} < {sweep}");
                assert!(got <= sweep * (1.0 + 1e-3), "p={p}: {got} > {sweep}");
            }
        }
    }
}

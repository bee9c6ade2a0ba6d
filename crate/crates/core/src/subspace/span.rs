use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// How span membership is decided.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanMode {
    /// Exact rational elimination on the integer rows.
    #[default]
    Exact,
    /// In span iff the residual after projection has norm at most `tol * |a|`.
    Tolerance(f64),
}


/// Default tolerance for [`SpanMode::Tolerance`].
pub const SPAN_TOLERANCE: f64 = 1e-9;

/// Row space of a set of integer vectors, kept in reduced row echelon form
/// with each row scaled to coprime integer entries.
#[derive(Debug, Clone)]
pub struct IntSpan {
    d: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn normalize(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return;
    }
    let first_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if first_negative {
        g = -g;
    }
    for x in v.iter_mut() {
        *x /= &g;
    }
}

impl IntSpan {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// A scaled copy of `a` minus its component in the span, with zeros at
    /// every pivot column.
    fn residual(&self, a: &[i64]) -> Vec<BigInt> {
        assert_eq!(a.len(), self.d, "row length must match the span dimension");
        let mut v: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let (vc, rc) = (v[c].clone(), &row[c]);
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x * rc - &vc * r;
            }
            normalize(&mut v);
        }
        v
    }

    pub fn contains(&self, a: &[i64]) -> bool {
        self.residual(a).iter().all(Zero::is_zero)
    }

    /// Adds `a` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, a: &[i64]) -> bool {
        let mut v = self.residual(a);
        let Some(c) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        normalize(&mut v);
        for row in &mut self.rows {
            if row[c].is_zero() {
                continue;
            }
            let (rc, vc) = (row[c].clone(), &v[c]);
            for (x, y) in row.iter_mut().zip(&v) {
                *x = &*x * vc - &rc * y;
            }
            normalize(row);
        }
        self.rows.push(v);
        self.pivots.push(c);
        true
    }

    /// Echelon rows as floats, each scaled to unit max-norm.
    pub fn basis_f64(&self) -> Vec<DVector<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let vals: Vec<f64> = row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
                let scale = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                DVector::from_iterator(self.d, vals.into_iter().map(|x| x / scale))
            })
            .collect()
    }
}

/// Orthonormal basis of the span of the rows inserted so far, with the
/// membership test chosen by [`SpanMode`].
#[derive(Debug, Clone)]
pub struct SpanTracker {
    mode: SpanMode,
    exact: IntSpan,
    q: DMatrix<f64>,
}

impl SpanTracker {
    pub fn new(d: usize, mode: SpanMode) -> Self {
        Self {
            mode,
            exact: IntSpan::new(d),
            q: DMatrix::zeros(d, 0),
        }
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    /// `d x rank` matrix with orthonormal columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.q
    }

    fn float_residual(&self, a: &DVector<f64>) -> DVector<f64> {
        let mut r = a.clone();
        // Two passes of Gram-Schmidt keep the residual orthogonal to working precision.
        for _ in 0..2 {
            let coeffs = self.q.tr_mul(&r);
            r -= &self.q * coeffs;
        }
        r
    }

    pub fn contains(&self, a: &[i64]) -> bool {
        match self.mode {
            SpanMode::Exact => self.exact.contains(a),
            SpanMode::Tolerance(tol) => {
                let v = DVector::from_iterator(a.len(), a.iter().map(|&x| x as f64));
                self.float_residual(&v).norm() <= tol * v.norm()
            }
        }
    }

    /// Adds `a`; returns whether the span grew.
    pub fn insert(&mut self, a: &[i64]) -> bool {
        match self.mode {
            SpanMode::Exact => {
                if !self.exact.insert(a) {
                    return false;
                }
                let basis = self.exact.basis_f64();
                let m = DMatrix::from_columns(&basis);
                self.q = m.qr().q();
                true
            }
            SpanMode::Tolerance(tol) => {
                let v = DVector::from_iterator(a.len(), a.iter().map(|&x| x as f64));
                let r = self.float_residual(&v);
                if r.norm() <= tol * v.norm() {
                    return false;
                }
                let col = r.normalize();
                let k = self.q.ncols();
                self.q = self.q.clone().insert_column(k, 0.0);
                self.q.set_column(k, &col);
                true
            }
        }
    }
}

/// Exact rank of a set of integer rows.
pub fn exact_rank(rows: &[Vec<i64>], d: usize) -> usize {
    let mut span = IntSpan::new(d);
    for r in rows {
        span.insert(r);
    }
    span.rank()
}

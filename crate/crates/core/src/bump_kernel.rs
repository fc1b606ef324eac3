//! The smooth bump `h` and its derivatives of arbitrary order.
//!
//! `h(x) = exp(-1/x^2) exp(-1/(x-1)^2)` on (0,1) and 0 elsewhere; it is
//! C-infinity on all of R and positive exactly on (0,1). Derivatives are
//! computed with truncated-power-series (Taylor jet) arithmetic on the
//! exponent, which stays bounded in memory where a symbolic recurrence
//! would swell.

use std::sync::RwLock;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Default cap on derivative orders; override via `CUTSET_MAX_ORDER`.
pub const DEFAULT_MAX_ORDER: usize = 16;

/// Jets closer than this to an endpoint are flushed to exactly zero: the
/// leading factor exp(-1/d^2) is below 1e-1085 there, far under any float.
const ENDPOINT_CUTOFF: f64 = 0.02;

/// Derivative values `[f(x), f'(x), ..., f^{(p)}(x)]` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    values: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(order: usize) -> Self {
        Jet { values: vec![S::zero(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// The k-th derivative value.
    pub fn get(&self, k: usize) -> S {
        self.values[k]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == S::zero())
    }
}

/// Taylor coefficients a_k = f^{(k)}(x)/k! used internally.
#[derive(Clone, Debug)]
struct Series<S> {
    c: Vec<S>,
}

impl<S: Scalar> Series<S> {
    fn add(&self, other: &Series<S>) -> Series<S> {
        let c = self.c.iter().zip(&other.c).map(|(a, b)| *a + *b).collect();
        Series { c }
    }

    fn neg(&self) -> Series<S> {
        Series { c: self.c.iter().map(|a| -*a).collect() }
    }

    /// Coefficients of exp(u) via the standard recurrence
    /// b_k = (1/k) sum_{j=1..k} j a_j b_{k-j}.
    fn exp(&self) -> Series<S> {
        let n = self.c.len();
        let mut b = vec![S::zero(); n];
        b[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..=k {
                acc += S::of(j as f64) * self.c[j] * b[k - j];
            }
            b[k] = acc / S::of(k as f64);
        }
        Series { c: b }
    }
}

/// Taylor coefficients of t -> 1/(v + t)^2 around t = 0:
/// d^k/dt^k (v^{-2}) = (-1)^k (k+1)! v^{-(k+2)}, so a_k = (-1)^k (k+1) v^{-(k+2)}.
fn inv_square_series<S: Scalar>(v: S, n: usize) -> Series<S> {
    let mut c = vec![S::zero(); n];
    let inv = v.recip();
    let mut pw = inv * inv; // v^{-2}
    for (k, ck) in c.iter_mut().enumerate() {
        let mag = S::of((k + 1) as f64) * pw;
        *ck = if k % 2 == 0 { mag } else { -mag };
        pw = pw * inv;
    }
    Series { c }
}

/// `h(x)`: positive exactly on (0,1).
pub fn h_eval<S: Scalar>(x: S) -> S {
    if x <= S::zero() || x >= S::one() {
        return S::zero();
    }
    let ix = x.recip();
    let ix1 = (x - S::one()).recip();
    (-(ix * ix) - ix1 * ix1).exp()
}

/// Jet of `h` at `x` up to order `p`.
///
/// Outside (0,1) all entries are exactly zero; within `ENDPOINT_CUTOFF` of
/// either endpoint the whole jet underflows any float format and is flushed
/// to exact zero as well.
pub fn h_jet<S: Scalar>(x: S, p: usize) -> Jet<S> {
    let cutoff = S::of(ENDPOINT_CUTOFF);
    if x <= cutoff || x >= S::one() - cutoff {
        return Jet::zero(p);
    }
    let n = p + 1;
    // exponent u(t) = -(x+t)^{-2} - (x+t-1)^{-2}
    let u = inv_square_series(x, n).neg().add(&inv_square_series(x - S::one(), n).neg());
    let e = u.exp();
    // convert Taylor coefficients to derivative values: f^{(k)} = k! a_k
    let mut values = Vec::with_capacity(n);
    let mut fact = S::one();
    for (k, a) in e.c.iter().enumerate() {
        if k > 0 {
            fact = fact * S::of(k as f64);
        }
        let v = *a * fact;
        values.push(if v.is_finite() { v } else { S::zero() });
    }
    Jet { values }
}

/// Which envelope constant of the two sup-norm chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeVariant {
    /// `M_p = ||h^{(p)}|| * sup_{x in (0,1]} e^{-1/x} x^{-p}`.
    Main,
    /// `M_p = (2 pi)^p sum_{k<=p} C(p,k) (2 pi)^{-k} ||h^{(k)}||`.
    Sine,
}

/// `sup_{x in (0,1]} e^{-1/x} x^{-p}`, via the critical point x = 1/p.
pub fn exp_inv_sup<S: Scalar>(p: usize) -> S {
    if p == 0 {
        // increasing on (0,1]; sup at x = 1
        (-S::one()).exp()
    } else {
        // critical point x = 1/p: value e^{-p} p^p
        let pf = S::of(p as f64);
        (-pf).exp() * pf.powi(p as i32)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Cached sup norms of `h^{(k)}` and the derived envelope constants.
///
/// Estimates come from adaptive grid refinement (4097 seed points, then
/// repeated local refinement around the maximum until the relative change
/// drops below 1e-6, plus extra rounds that converge it to roundoff).
/// They are numerical estimates, not certified enclosures.
pub struct EnvelopeTable<S> {
    sup_norms: RwLock<Vec<Option<S>>>,
    max_order: usize,
}

impl<S: Scalar> EnvelopeTable<S> {
    pub fn new() -> Self {
        Self::with_max_order(max_order_from_env())
    }

    pub fn with_max_order(max_order: usize) -> Self {
        EnvelopeTable {
            sup_norms: RwLock::new(vec![None; max_order + 1]),
            max_order,
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn check_order(&self, p: usize) -> Result<()> {
        if p > self.max_order {
            return Err(Error::OrderOverflow { requested: p, max: self.max_order });
        }
        Ok(())
    }

    /// `||h^{(k)}||` over [0,1].
    pub fn h_sup_norm(&self, k: usize) -> Result<S> {
        self.check_order(k)?;
        if let Some(v) = self.sup_norms.read().unwrap()[k] {
            return Ok(v);
        }
        let v = estimate_sup_norm(k);
        self.sup_norms.write().unwrap()[k] = Some(v);
        Ok(v)
    }

    /// Precompute all sup norms up to `p` (single-threaded warm-up).
    pub fn warm(&self, p: usize) -> Result<()> {
        for k in 0..=p.min(self.max_order) {
            self.h_sup_norm(k)?;
        }
        Ok(())
    }

    pub fn envelope_constant(&self, p: usize, variant: EnvelopeVariant) -> Result<S> {
        self.check_order(p)?;
        match variant {
            EnvelopeVariant::Main => Ok(self.h_sup_norm(p)? * exp_inv_sup::<S>(p)),
            EnvelopeVariant::Sine => {
                let two_pi = S::two_pi();
                let mut acc = S::zero();
                for k in 0..=p {
                    acc += S::of(binomial(p, k)) * two_pi.powi(-(k as i32)) * self.h_sup_norm(k)?;
                }
                Ok(two_pi.powi(p as i32) * acc)
            }
        }
    }
}

impl<S: Scalar> Default for EnvelopeTable<S> {
    fn default() -> Self {
        Self::new()
    }
}

pub fn max_order_from_env() -> usize {
    std::env::var("CUTSET_MAX_ORDER")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

fn abs_deriv<S: Scalar>(x: S, k: usize) -> S {
    h_jet(x, k).get(k).abs()
}

fn estimate_sup_norm<S: Scalar>(k: usize) -> S {
    let n = 1 << 12;
    let mut best_x = S::zero();
    let mut best = S::zero();
    for i in 0..=n {
        let x = S::of(i as f64 / n as f64);
        let v = abs_deriv(x, k);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // local refinement around the argmax; stop once the relative change is
    // below 1e-6, then run three more rounds to squeeze it to roundoff
    let mut radius = S::of(1.0 / n as f64);
    let mut bonus = 3;
    loop {
        let prev = best;
        let m = 64;
        for i in 0..=m {
            let x = best_x - radius + S::of(2.0 * i as f64 / m as f64) * radius;
            let v = abs_deriv(x, k);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        radius = radius / S::of(16.0);
        let rel = if best > S::zero() { (best - prev) / best } else { S::zero() };
        if rel < S::of(1e-6) {
            if bonus == 0 {
                break;
            }
            bonus -= 1;
        }
    }
    best
}

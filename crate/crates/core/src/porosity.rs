//! Ball-inclusion experiment in C[0,1].
//!
//! For any f and eps, a sawtooth witness g with ||g|| = eps/2 and enough
//! vertices satisfies B(f+g, eps/8) ⊂ B(f, eps) ∩ {partition sum > n}. The
//! experiment samples perturbations of g, checks both memberships, and
//! reports the implied hole-radius ratio: gamma >= eps/8 at every scale, so
//! the porosity bound is 2 (eps/8)/eps = 1/4 independent of eps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::scalar::Scalar;

/// Piecewise linear function given by its vertices; x strictly increasing,
/// first 0 and last 1.
#[derive(Clone, Debug, Serialize)]
pub struct PolygonalFunction<S> {
    pub vertices: Vec<(S, S)>,
}

impl<S: Scalar> PolygonalFunction<S> {
    pub fn new(vertices: Vec<(S, S)>) -> Self {
        debug_assert!(vertices.len() >= 2);
        debug_assert!(vertices.windows(2).all(|w| w[0].0 < w[1].0));
        PolygonalFunction { vertices }
    }

    /// The sawtooth `x -> eps * dist((k/2) x, Z)` on vertices i/k: values
    /// alternate 0, eps/2, 0, ..., 0 (k even).
    pub fn sawtooth(k: usize, eps: S) -> Self {
        assert!(k >= 2 && k % 2 == 0, "k must be even and >= 2");
        let half = eps * S::of(0.5);
        let vertices = (0..=k)
            .map(|i| {
                let x = S::of(i as f64 / k as f64);
                let v = if i % 2 == 0 { S::zero() } else { half };
                (x, v)
            })
            .collect();
        PolygonalFunction { vertices }
    }

    pub fn eval(&self, x: S) -> S {
        let v = &self.vertices;
        if x <= v[0].0 {
            return v[0].1;
        }
        if x >= v[v.len() - 1].0 {
            return v[v.len() - 1].1;
        }
        // binary search for the segment
        let mut lo = 0usize;
        let mut hi = v.len() - 1;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if v[mid].0 <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x0, y0) = v[lo];
        let (x1, y1) = v[lo + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Exact total variation: sum of |vertex increments|.
    pub fn variation(&self) -> S {
        self.vertices.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
    }

    /// Sup norm (attained at a vertex for piecewise linear functions).
    pub fn sup_norm(&self) -> S {
        self.vertices.iter().map(|(_, v)| v.abs()).fold(S::zero(), S::max)
    }

    pub fn xs(&self) -> Vec<S> {
        self.vertices.iter().map(|(x, _)| *x).collect()
    }
}

/// A variation figure for the base function, with its provenance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VariationEstimate<S> {
    pub value: S,
    /// True when `value` is the exact variation, not a grid estimate.
    pub exact: bool,
}

impl<S: Scalar> VariationEstimate<S> {
    pub fn exact(value: S) -> Self {
        VariationEstimate { value, exact: true }
    }

    /// Grid partition lower bound (the caller supplies sampling density).
    pub fn from_grid(f: &dyn Fn(S) -> S, grid: usize) -> Self {
        let mut sum = S::zero();
        let mut last = f(S::zero());
        for i in 1..=grid {
            let v = f(S::of(i as f64 / grid as f64));
            sum += (v - last).abs();
            last = v;
        }
        VariationEstimate { value: sum, exact: false }
    }

    /// Margin used when choosing the witness: exact values stand as they
    /// are, grid estimates are doubled to absorb unseen oscillation.
    fn margin(&self) -> S {
        if self.exact {
            self.value
        } else {
            self.value * S::of(2.0)
        }
    }
}

/// Smallest even k with `k eps / 4 > margin(V) + n`, and the sawtooth on it.
pub fn build_polygonal_witness<S: Scalar>(var_f: &VariationEstimate<S>, eps: S, n: usize) -> PolygonalFunction<S> {
    assert!(eps > S::zero());
    let target = var_f.margin() + S::of(n as f64);
    let mut k = 2usize;
    while S::of(k as f64) * eps / S::of(4.0) <= target {
        k += 2;
    }
    PolygonalFunction::sawtooth(k, eps)
}

/// `sum |h(x_i) - h(x_{i-1})|` over a strictly increasing partition.
pub fn partition_sum<S: Scalar>(h: &dyn Fn(S) -> S, partition: &[S]) -> S {
    let mut sum = S::zero();
    for w in partition.windows(2) {
        sum += (h(w[1]) - h(w[0])).abs();
    }
    sum
}

#[derive(Clone, Debug, Serialize)]
pub struct PorosityReport<S> {
    pub eps: S,
    pub n: usize,
    pub k: usize,
    pub var_f: VariationEstimate<S>,
    pub trials: usize,
    pub successes: usize,
    /// gamma >= eps/8: the guaranteed hole radius inside B(f, eps).
    pub gamma: S,
    /// 2 gamma / eps; equals 1/4 exactly when all trials succeeded.
    pub porosity_bound: Option<S>,
    pub witness_sup: S,
    pub witness_variation: S,
    /// Exact check of the witness inequality Var(g) = k eps/2 > Var(f) + n.
    pub witness_inequality: bool,
}

/// Sample `trials` perturbations h with ||h - g|| <= 0.99 eps/8 (uniform
/// vertex noise, linear in between) and check both inclusion conditions:
/// ||f + h - f|| < eps and partition sum of f + h over the witness vertices
/// > n. Failures count; the bound is emitted only on a perfect score.
pub fn verify_inclusion<S: Scalar>(
    f: &dyn Fn(S) -> S,
    var_f: VariationEstimate<S>,
    eps: S,
    n: usize,
    trials: usize,
    seed: u64,
) -> PorosityReport<S> {
    let g = build_polygonal_witness(&var_f, eps, n);
    let k = g.vertices.len() - 1;
    let xs = g.xs();
    let noise_bound = eps.to_f64().unwrap_or(0.0) * 0.99 / 8.0;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut successes = 0usize;
    for _ in 0..trials {
        let h = PolygonalFunction::new(
            g.vertices
                .iter()
                .map(|&(x, v)| (x, v + S::of(rng.gen_range(-noise_bound..noise_bound))))
                .collect(),
        );
        // ||f + h - f|| = ||h||, a vertex max for polygonal h
        let inside_ball = h.sup_norm() < eps;
        let sum = partition_sum(&|x| f(x) + h.eval(x), &xs);
        if inside_ball && sum > S::of(n as f64) {
            successes += 1;
        }
    }
    let gamma = eps / S::of(8.0);
    let porosity_bound = if successes == trials && trials > 0 {
        Some(S::of(2.0) * gamma / eps)
    } else {
        None
    };
    let witness_variation = g.variation();
    let witness_inequality = witness_variation > var_f.value + S::of(n as f64);
    PorosityReport {
        eps,
        n,
        k,
        var_f,
        trials,
        successes,
        gamma,
        porosity_bound,
        witness_sup: g.sup_norm(),
        witness_variation,
        witness_inequality,
    }
}

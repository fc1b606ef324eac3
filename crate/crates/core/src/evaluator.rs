//! Evaluation of built functions and their convergence bounds.
//!
//! Supports are pairwise disjoint, so at most one term contributes at any
//! point: evaluation is point location plus one scaled kernel jet. Rational
//! probes go through exact arithmetic up to the final kernel call, so the
//! relative position inside a deep support never suffers cancellation.

use crate::bump_kernel::{h_jet, EnvelopeTable, EnvelopeVariant};
use crate::function_builder::{Construction, Kernel, PiecewiseFunction, SignedBumpTerm};
use crate::rat::Rat;
use crate::scalar::Scalar;
use crate::set_model::ValidatedSet;
use crate::Result;

/// A single evaluation: the value, the term that produced it (if any), and
/// the derivative order.
#[derive(Clone, Debug)]
pub struct EvalResult<S> {
    pub value: S,
    /// Index into `pf.terms` of the unique contributing term.
    pub term: Option<usize>,
    pub order: usize,
    /// True when the probe lies in the structural zero set (exact for
    /// rational probes).
    pub on_zero_set: bool,
}

/// The zero function over the same zero set, for metric comparisons.
pub fn zero_function(vs: &ValidatedSet) -> PiecewiseFunction {
    PiecewiseFunction {
        terms: Vec::new(),
        zero_set: vs.clone(),
        construction: Construction::Prescribed,
        depth: 0,
        budget: 0,
        truncated: false,
    }
}

/// Evaluate one term's p-th derivative at relative position `t` in [0,1].
pub fn eval_term_rel<S: Scalar>(term: &SignedBumpTerm, t: S, p: usize) -> S {
    let len = term.support.len().to_scalar::<S>();
    let c = term.coefficient::<S>();
    let sign = S::of(term.sign as f64);
    let two_pi = S::two_pi();
    let v = match term.kernel {
        Kernel::Bump => {
            let jet = h_jet(t, p);
            let hv = jet.get(p);
            if hv == S::zero() {
                return S::zero();
            }
            sign * c * hv * len.powi(-(p as i32))
        }
        Kernel::BumpSine => {
            // Leibniz: sum_k C(p,k) h^{(k)}(t) (2pi)^{p-k} sin(2pi t + (p-k) pi/2)
            let jet = h_jet(t, p);
            let mut acc = S::zero();
            let mut binom = 1.0f64;
            for k in 0..=p {
                if k > 0 {
                    binom = binom * (p - k + 1) as f64 / k as f64;
                }
                let m = p - k;
                let phase = two_pi * t + S::of(m as f64) * S::of(std::f64::consts::FRAC_PI_2);
                acc += S::of(binom) * jet.get(k) * two_pi.powi(m as i32) * phase.sin();
            }
            sign * c * acc * len.powi(-(p as i32))
        }
        Kernel::PlainSine => {
            if t <= S::zero() || t >= S::one() {
                return S::zero();
            }
            let phase = two_pi * t + S::of(p as f64) * S::of(std::f64::consts::FRAC_PI_2);
            sign * c * (two_pi / len).powi(p as i32) * phase.sin()
        }
    };
    if v.is_finite() {
        v
    } else {
        S::zero()
    }
}

/// Index of the term whose open support contains the exact rational `x`.
pub fn find_term_rational(pf: &PiecewiseFunction, x: &Rat) -> Option<usize> {
    let terms = &pf.terms;
    let mut lo = 0usize;
    let mut hi = terms.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if &terms[mid].support.lo < x {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    // candidate: the last term with support.lo < x
    if lo == 0 {
        return None;
    }
    let t = &terms[lo - 1];
    if x < &t.support.hi {
        Some(lo - 1)
    } else {
        None
    }
}

/// Exact-probe evaluation: zero-set membership and point location are done
/// in rational arithmetic; only the kernel jet is floating point.
pub fn eval_rational<S: Scalar>(pf: &PiecewiseFunction, x: &Rat, p: usize) -> Result<EvalResult<S>> {
    if pf.zero_set.membership(x)?.in_set() {
        return Ok(EvalResult { value: S::zero(), term: None, order: p, on_zero_set: true });
    }
    match find_term_rational(pf, x) {
        Some(i) => {
            let t = &pf.terms[i];
            let rel = (x - &t.support.lo) / t.support.len();
            let value = eval_term_rel(&pf.terms[i], rel.to_scalar::<S>(), p);
            Ok(EvalResult { value, term: Some(i), order: p, on_zero_set: false })
        }
        None => Ok(EvalResult { value: S::zero(), term: None, order: p, on_zero_set: false }),
    }
}

/// Float-grid evaluator with cached converted support endpoints.
pub struct Sampler<'a, S> {
    pub pf: &'a PiecewiseFunction,
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<'a, S: Scalar> Sampler<'a, S> {
    pub fn new(pf: &'a PiecewiseFunction) -> Self {
        let lo = pf.terms.iter().map(|t| t.support.lo.to_scalar::<S>()).collect();
        let hi = pf.terms.iter().map(|t| t.support.hi.to_scalar::<S>()).collect();
        Sampler { pf, lo, hi }
    }

    pub fn find_term(&self, x: S) -> Option<usize> {
        let n = self.lo.len();
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.lo[mid] < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            return None;
        }
        let i = lo - 1;
        if x < self.hi[i] {
            Some(i)
        } else {
            None
        }
    }

    pub fn eval(&self, x: S, p: usize) -> EvalResult<S> {
        match self.find_term(x) {
            Some(i) => {
                let t = &self.pf.terms[i];
                let len = self.hi[i] - self.lo[i];
                let rel = (x - self.lo[i]) / len;
                EvalResult {
                    value: eval_term_rel(t, rel, p),
                    term: Some(i),
                    order: p,
                    on_zero_set: false,
                }
            }
            None => EvalResult { value: S::zero(), term: None, order: p, on_zero_set: false },
        }
    }

    pub fn value(&self, x: S, p: usize) -> S {
        self.eval(x, p).value
    }
}

/// The two right-hand members of the per-term sup bound chain.
#[derive(Clone, Copy, Debug)]
pub struct TermBound<S> {
    /// `c ||kernel^{(p)}|| / len^p`: the scaled-kernel bound.
    pub mid: S,
    /// The envelope bound `M_p * factor` that absorbs `exp(-1/len)/len^p`.
    pub right: S,
}

/// Sup bound for one term's p-th derivative; `mid <= right` always.
pub fn term_bound<S: Scalar>(term: &SignedBumpTerm, p: usize, env: &EnvelopeTable<S>) -> Result<TermBound<S>> {
    let len = term.support.len().to_scalar::<S>();
    let c = term.coefficient::<S>();
    let factor = term.coeff.factor.to_scalar::<S>();
    let sup_scale = crate::bump_kernel::exp_inv_sup::<S>(p);
    Ok(match term.kernel {
        Kernel::Bump => {
            let hp = env.h_sup_norm(p)?;
            TermBound { mid: c * hp * len.powi(-(p as i32)), right: factor * hp * sup_scale }
        }
        Kernel::BumpSine => {
            let mp = env.envelope_constant(p, EnvelopeVariant::Sine)?;
            TermBound { mid: c * mp * len.powi(-(p as i32)), right: factor * mp * sup_scale }
        }
        Kernel::PlainSine => {
            let b = c * (S::two_pi() / len).powi(p as i32);
            TermBound { mid: b, right: b }
        }
    })
}

/// Upper bound for `sum_{k >= k0} 1/k^2` (partial sum plus integral remainder).
pub fn inv_square_tail(k0: usize) -> f64 {
    let cap = 200_000usize.max(k0 + 1);
    let mut s = 0.0;
    for k in k0..=cap {
        s += 1.0 / (k as f64 * k as f64);
    }
    s + 1.0 / cap as f64
}

/// Weierstrass bound on everything past level `n` (exclusive), order `p`.
///
/// Disjoint supports make the per-level sup the maximum over its terms, and
/// the level bounds sum to the stated tails:
/// prescribed `M_p sum_{n > N} (n+1)^{-2}`, bump-sine
/// `M_p S_p sum_{n > N} n^{-2}`, plain sine `sum_{n > N} c_n` (order 0 only;
/// higher orders have no finite bound for that construction).
pub fn tail_bound<S: Scalar>(pf: &PiecewiseFunction, after_level: usize, p: usize, env: &EnvelopeTable<S>) -> Result<S> {
    let n = after_level;
    Ok(match &pf.construction {
        Construction::Prescribed => {
            let mp = env.envelope_constant(p, EnvelopeVariant::Main)?;
            mp * S::of(inv_square_tail(n + 2))
        }
        Construction::BumpSine => {
            let mp = env.envelope_constant(p, EnvelopeVariant::Sine)?;
            mp * crate::bump_kernel::exp_inv_sup::<S>(p) * S::of(inv_square_tail(n + 1))
        }
        Construction::SineC0 { rule } => {
            if p > 0 {
                S::infinity()
            } else {
                S::of(rule.tail_sum(n))
            }
        }
    })
}

/// Smallest `N` with `tail_bound(N, p) < eps`, if any exists below `cap`.
pub fn levels_for_tolerance<S: Scalar>(
    pf: &PiecewiseFunction,
    p: usize,
    eps: S,
    cap: usize,
    env: &EnvelopeTable<S>,
) -> Result<Option<usize>> {
    // tail bounds are monotone decreasing in N; exponential search then binary
    let mut lo = 0usize;
    let mut hi = 1usize;
    if tail_bound(pf, lo, p, env)? < eps {
        return Ok(Some(0));
    }
    loop {
        if hi >= cap {
            if tail_bound(pf, cap, p, env)? >= eps {
                return Ok(None);
            }
            hi = cap;
            break;
        }
        if tail_bound(pf, hi, p, env)? < eps {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if tail_bound(pf, mid, p, env)? < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Truncated metric distance between two built functions.
#[derive(Clone, Copy, Debug)]
pub struct MetricDistance<S> {
    /// `sum_{n <= P} 2^{-n} min(1, grid-sup |f^{(n)} - g^{(n)}|)`.
    pub value: S,
    /// The ignored tail `2^{-P}` of the metric series.
    pub truncation_slack: S,
}

/// Grid over [0,1] refined near every support boundary of both functions.
pub fn comparison_grid<S: Scalar>(a: &PiecewiseFunction, b: &PiecewiseFunction, base: usize) -> Vec<S> {
    let mut xs: Vec<S> = (0..=base).map(|i| S::of(i as f64 / base as f64)).collect();
    for pf in [a, b] {
        for t in &pf.terms {
            let lo = t.support.lo.to_scalar::<S>();
            let hi = t.support.hi.to_scalar::<S>();
            let len = hi - lo;
            for frac in [1.0 / 64.0, 1.0 / 256.0, 1.0 / 1024.0] {
                let d = len * S::of(frac);
                xs.push(lo + d);
                xs.push(hi - d);
            }
            xs.push(lo + len * S::of(0.5));
        }
    }
    xs.retain(|x| *x >= S::zero() && *x <= S::one());
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup();
    xs
}

/// Approximate the C-infinity metric `sum 2^{-n} min(1, ||f^{(n)} - g^{(n)}||)`
/// truncated at order `max_order`, with sup norms taken over a grid.
pub fn cinf_distance<S: Scalar>(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    max_order: usize,
    grid: usize,
) -> MetricDistance<S> {
    let xs = comparison_grid::<S>(f, g, grid);
    let fs = Sampler::new(f);
    let gs = Sampler::new(g);
    let mut value = S::zero();
    for p in 0..=max_order {
        let mut sup = S::zero();
        for &x in &xs {
            let d = (fs.value(x, p) - gs.value(x, p)).abs();
            if d > sup {
                sup = d;
            }
        }
        value += S::of(0.5f64.powi(p as i32)) * sup.min(S::one());
    }
    MetricDistance { value, truncation_slack: S::of(0.5f64.powi(max_order as i32)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_builder::{build_bump_sine_cinf, build_prescribed_cutset, build_sine_c0, CoeffRule};
    use crate::set_model::{validate_spec, SetSpec};
    use approx::assert_relative_eq;

    fn ternary_fn(depth: usize) -> PiecewiseFunction {
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        build_prescribed_cutset(&vs, depth, 16).unwrap()
    }

    #[test]
    fn prescribed_value_at_half_matches_plugin() {
        // + (1/2) e^{-3} * e^{-8} = (1/2) e^{-11}
        let pf = ternary_fn(3);
        let r: EvalResult<f64> = eval_rational(&pf, &Rat::new(1, 2), 0).unwrap();
        assert_relative_eq!(r.value, 0.5 * (-11.0f64).exp(), max_relative = 1e-12);
        assert!(r.term.is_some());
        assert!(!r.on_zero_set);
    }

    #[test]
    fn zero_on_the_set_and_first_derivative_zero_at_midpoint() {
        let pf = ternary_fn(3);
        for x in [Rat::new(1, 3), Rat::new(1, 4), Rat::zero(), Rat::one()] {
            for p in 0..=3 {
                let r: EvalResult<f64> = eval_rational(&pf, &x, p).unwrap();
                assert_eq!(r.value, 0.0, "x = {}, p = {}", x, p);
                assert_eq!(r.term, None);
                assert!(r.on_zero_set);
            }
        }
        // pure bump: h'(1/2) = 0 and the midpoint of the root gap maps to t = 1/2
        let r: EvalResult<f64> = eval_rational(&pf, &Rat::new(1, 2), 1).unwrap();
        assert!(r.value.abs() < 1e-16);
    }

    #[test]
    fn sampler_agrees_with_exact_path_on_rationals() {
        let pf = ternary_fn(5);
        let s = Sampler::<f64>::new(&pf);
        for q in [7i64, 11, 13, 100, 729] {
            for p_num in 0..=q {
                let x = Rat::new(p_num, q);
                let exact: EvalResult<f64> = eval_rational(&pf, &x, 2).unwrap();
                let float = s.eval(x.to_f64(), 2);
                if exact.on_zero_set {
                    // the float path may sit on a support boundary; values agree anyway
                    assert!(float.value.abs() <= 1e-12);
                } else {
                    assert_relative_eq!(exact.value, float.value, max_relative = 1e-6, epsilon = 1e-300);
                }
            }
        }
    }

    #[test]
    fn single_term_property_on_random_probes() {
        let pf = ternary_fn(6);
        let mut state = 0xabcdef12u64;
        for _ in 0..10_000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = (state >> 11) as f64 / (1u64 << 53) as f64;
            let mut hits = 0;
            for t in &pf.terms {
                let lo = t.support.lo.to_f64();
                let hi = t.support.hi.to_f64();
                if x > lo && x < hi {
                    let rel = (x - lo) / (hi - lo);
                    if eval_term_rel::<f64>(t, rel, 0) != 0.0 {
                        hits += 1;
                    }
                }
            }
            assert!(hits <= 1);
        }
    }

    #[test]
    fn derivative_matches_finite_differences_inside_supports() {
        let pf = ternary_fn(4);
        let s = Sampler::<f64>::new(&pf);
        let step = 1e-6;
        let mut state = 0x7777_1234u64;
        let mut checked = 0;
        while checked < 1000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = (state >> 11) as f64 / (1u64 << 53) as f64;
            // keep away from support endpoints
            let near_edge = pf.terms.iter().any(|t| {
                let lo = t.support.lo.to_f64();
                let hi = t.support.hi.to_f64();
                (x - lo).abs() < 1e-3 || (x - hi).abs() < 1e-3
            });
            if near_edge {
                continue;
            }
            for p in 1..=5usize {
                let fd = (s.value(x + step, p - 1) - s.value(x - step, p - 1)) / (2.0 * step);
                let v = s.value(x, p);
                let tol = 1e-8 + 1e-4 * v.abs();
                assert!((v - fd).abs() <= tol, "x = {}, p = {}: {} vs {}", x, p, v, fd);
            }
            checked += 1;
        }
    }

    #[test]
    fn term_bound_chain_and_example() {
        let env = EnvelopeTable::<f64>::new();
        let pf = ternary_fn(2);
        let root = pf
            .terms
            .iter()
            .find(|t| t.support.len() == Rat::new(1, 3))
            .unwrap();
        let b = term_bound(root, 0, &env).unwrap();
        // right member: M_0 / (1 * 2) with M_0 = e^{-9}
        assert_relative_eq!(b.right, (-9.0f64).exp() / 2.0, max_relative = 1e-6);
        assert!(b.mid <= b.right);
        assert!(b.mid > 0.0);
        // exact sup of a pure bump is c * e^{-8}, below mid
        let sup = root.coefficient::<f64>() * (-8.0f64).exp();
        assert!(sup <= b.mid * (1.0 + 1e-9));
        for p in 0..=5 {
            for t in &pf.terms {
                let b = term_bound(t, p, &env).unwrap();
                assert!(b.mid <= b.right * (1.0 + 1e-12), "p = {}", p);
                assert!(b.right > 0.0);
            }
        }
    }

    #[test]
    fn tail_bound_example_and_monotonicity() {
        let env = EnvelopeTable::<f64>::new();
        let pf = ternary_fn(4);
        let t10: f64 = tail_bound(&pf, 10, 0, &env).unwrap();
        let m0: f64 = env.envelope_constant(0, EnvelopeVariant::Main).unwrap();
        // sum_{n > 10} (n+1)^{-2} = sum_{k >= 12} k^{-2} ~ 0.0869
        let oracle: f64 = (12..400_000).map(|k: u64| 1.0 / (k as f64 * k as f64)).sum();
        assert_relative_eq!(t10, m0 * oracle, max_relative = 1e-3);
        assert!((t10 / m0 - 0.0869).abs() < 2e-3);
        let mut prev = f64::INFINITY;
        for n in [0usize, 2, 4, 8, 16, 32] {
            let b = tail_bound(&pf, n, 0, &env).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn tail_bound_dominates_omitted_terms_on_grid() {
        let env = EnvelopeTable::<f64>::new();
        let pf = ternary_fn(6);
        let s = Sampler::<f64>::new(&pf);
        for after in [2usize, 4] {
            for p in 0..=3 {
                let bound = tail_bound(&pf, after, p, &env).unwrap();
                // grid sup over supports of terms deeper than `after`
                let mut sup: f64 = 0.0;
                for (i, t) in pf.terms.iter().enumerate() {
                    if t.level <= after {
                        continue;
                    }
                    let lo = t.support.lo.to_f64();
                    let hi = t.support.hi.to_f64();
                    for j in 1..64 {
                        let x = lo + (hi - lo) * j as f64 / 64.0;
                        let v = s.eval(x, p);
                        if v.term == Some(i) {
                            sup = sup.max(v.value.abs());
                        }
                    }
                }
                assert!(sup <= bound, "after = {}, p = {}: {} > {}", after, p, sup, bound);
            }
        }
    }

    #[test]
    fn sine_c0_tail_bound_orders() {
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        let (pf, _) = build_sine_c0(&vs, 3, CoeffRule::InvPower { k: 2 }).unwrap();
        let env = EnvelopeTable::<f64>::new();
        let t0: f64 = tail_bound(&pf, 5, 0, &env).unwrap();
        assert!(t0.is_finite() && t0 > 0.0);
        let t1: f64 = tail_bound(&pf, 5, 1, &env).unwrap();
        assert!(t1.is_infinite());
        // divergent rule: infinite even at order 0
        let (pf_bad, _) = build_sine_c0(&vs, 3, CoeffRule::InvPower { k: 0 }).unwrap();
        assert!(tail_bound::<f64>(&pf_bad, 5, 0, &env).unwrap().is_infinite());
    }

    #[test]
    fn levels_for_tolerance_finds_minimal_n() {
        let env = EnvelopeTable::<f64>::new();
        let pf = ternary_fn(4);
        for eps in [1e-2, 1e-4, 1e-6] {
            let n = levels_for_tolerance(&pf, 0, eps, 1 << 20, &env).unwrap().unwrap();
            let at: f64 = tail_bound(&pf, n, 0, &env).unwrap();
            assert!(at < eps);
            if n > 0 {
                let before: f64 = tail_bound(&pf, n - 1, 0, &env).unwrap();
                assert!(before >= eps);
            }
        }
    }

    #[test]
    fn metric_identity_symmetry_and_zero_distance() {
        let pf = ternary_fn(4);
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        let z = zero_function(&vs);
        let d_ff: MetricDistance<f64> = cinf_distance(&pf, &pf, 5, 512);
        assert_eq!(d_ff.value, 0.0);
        assert_relative_eq!(d_ff.truncation_slack, 1.0 / 32.0);
        let d_fz: MetricDistance<f64> = cinf_distance(&pf, &z, 5, 512);
        let d_zf: MetricDistance<f64> = cinf_distance(&z, &pf, 5, 512);
        assert_eq!(d_fz.value, d_zf.value);
        // sup |f| is attained at the root-gap midpoint: (1/2) e^{-11}
        // the order-0 contribution alone is min(1, sup) = sup
        assert!(d_fz.value >= 0.5 * (-11.0f64).exp());
        assert!(d_fz.value > 0.0);
    }

    #[test]
    fn bump_sine_term_attains_both_signs_and_leibniz_consistent() {
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        let pf = build_bump_sine_cinf(&vs, 2).unwrap();
        let s = Sampler::<f64>::new(&pf);
        // values on the root gap (1/3, 2/3)
        let mut pos = false;
        let mut neg = false;
        for i in 1..200 {
            let x = 1.0 / 3.0 + (i as f64 / 200.0) / 3.0;
            let v = s.value(x, 0);
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
        assert!(pos && neg);
        // gap midpoint: sin(pi) = 0
        let mid: EvalResult<f64> = eval_rational(&pf, &Rat::new(1, 2), 0).unwrap();
        assert!(mid.value.abs() < 1e-18);
        // derivative via finite differences on the sine kernel
        let x = 0.45;
        let step = 1e-6;
        for p in 1..=3usize {
            let fd = (s.value(x + step, p - 1) - s.value(x - step, p - 1)) / (2.0 * step);
            let v = s.value(x, p);
            assert!((v - fd).abs() <= 1e-8 + 1e-4 * v.abs(), "p = {}", p);
        }
    }
}

//! Cutting-set detection, structural verification, series conditions,
//! variation, and the zero-set-measure probe.
//!
//! Two verification routes never collapse into one: the sampling detector
//! treats a function as a black box and is resolution-bounded by
//! construction, while `verify_ground_truth` certifies sign witnesses from
//! the exact term structure. Agreement between the two is a test, not an
//! assumption.

use serde::Serialize;

use crate::bump_kernel::EnvelopeTable;
use crate::evaluator::{
    find_term_rational, levels_for_tolerance, Sampler,
};
use crate::function_builder::{Construction, Kernel, PiecewiseFunction};
use crate::gap_tree::build_gap_tree;
use crate::rat::Rat;
use crate::scalar::Scalar;
use crate::set_model::Membership;
use crate::Result;

// ---------------------------------------------------------------------------
// sampling detector

#[derive(Clone, Copy, Debug)]
pub struct DetectorConfig<S> {
    /// Window resolution: rings (x-r, x+r) for r = delta, 2 delta, 4 delta, 8 delta.
    pub delta: S,
    /// Zero tolerance on |f(x)|.
    pub zeta: S,
    /// Samples per ring window.
    pub samples_per_ring: usize,
}

impl<S: Scalar> Default for DetectorConfig<S> {
    fn default() -> Self {
        DetectorConfig { delta: S::of(1e-4), zeta: S::of(1e-12), samples_per_ring: 48 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlaggedPoint<S> {
    pub x: S,
    /// Witnesses from the tightest ring: f(neg_at) < 0 < f(pos_at).
    pub neg_at: S,
    pub pos_at: S,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutsetReport<S> {
    pub delta: S,
    pub zeta: S,
    pub probes: usize,
    pub flagged: Vec<FlaggedPoint<S>>,
}

/// Flag probe points where |f| <= zeta and every ring around them shows both
/// strict signs among its samples.
pub fn detect_cutting_set<S: Scalar>(
    f: &dyn Fn(S) -> S,
    cfg: &DetectorConfig<S>,
    probes: &[S],
) -> CutsetReport<S> {
    let mut flagged = Vec::new();
    'probe: for &x in probes {
        if f(x).abs() > cfg.zeta {
            continue;
        }
        let mut tight: Option<(S, S)> = None;
        for k in 0..4 {
            let r = cfg.delta * S::of((1u32 << k) as f64);
            match ring_signs(f, x, r, cfg.samples_per_ring) {
                Some((neg, pos)) => {
                    if k == 0 {
                        tight = Some((neg, pos));
                    }
                }
                None => continue 'probe,
            }
        }
        let (neg_at, pos_at) = tight.expect("k = 0 ring recorded");
        flagged.push(FlaggedPoint { x, neg_at, pos_at });
    }
    CutsetReport { delta: cfg.delta, zeta: cfg.zeta, probes: probes.len(), flagged }
}

/// Sample the window (x-r, x+r) clipped to [0,1]; return witness points for
/// both strict signs if found.
fn ring_signs<S: Scalar>(f: &dyn Fn(S) -> S, x: S, r: S, samples: usize) -> Option<(S, S)> {
    let lo = (x - r).max(S::zero());
    let hi = (x + r).min(S::one());
    let width = hi - lo;
    if width <= S::zero() {
        return None;
    }
    let mut neg = None;
    let mut pos = None;
    for j in 0..samples {
        let y = lo + width * S::of((j as f64 + 0.5) / samples as f64);
        let v = f(y);
        if v < S::zero() && neg.is_none() {
            neg = Some(y);
        } else if v > S::zero() && pos.is_none() {
            pos = Some(y);
        }
        if let (Some(n), Some(p)) = (neg, pos) {
            return Some((n, p));
        }
    }
    None
}

/// Uniform probe grid over [0,1] (endpoints included).
pub fn uniform_probes<S: Scalar>(n: usize) -> Vec<S> {
    (0..=n).map(|i| S::of(i as f64 / n as f64)).collect()
}

/// Upper bound on the distance from `x` to the true cutting set of `pf`
/// (the structural zero set plus interior sine zeros).
pub fn cutting_set_distance_bound(pf: &PiecewiseFunction, x: &Rat) -> Result<Rat> {
    let mut best = pf.zero_set.distance_upper_bound(x)?;
    for t in &pf.terms {
        if matches!(t.kernel, Kernel::BumpSine | Kernel::PlainSine) {
            best = best.min((x - &t.support.midpoint()).abs());
        }
    }
    Ok(best)
}

/// Structural detectability of an in-set probe at the detector's resolution:
/// within every ring there must be, for each sign, a term whose
/// quarter-to-three-quarter core overlaps the window in at least four sample
/// spacings and whose peak is representable.
pub fn certify_detectable(pf: &PiecewiseFunction, x: &Rat, delta: f64, samples_per_ring: usize) -> bool {
    let xf = x.to_f64();
    for k in 0..4u32 {
        let r = delta * (1u32 << k) as f64;
        let lo = (xf - r).max(0.0);
        let hi = (xf + r).min(1.0);
        let spacing = (hi - lo) / samples_per_ring as f64;
        let mut pos = false;
        let mut neg = false;
        for t in &pf.terms {
            let tlo = t.support.lo.to_f64();
            let thi = t.support.hi.to_f64();
            let len = thi - tlo;
            let core = (tlo + 0.25 * len, thi - 0.25 * len);
            let olap = core.1.min(hi) - core.0.max(lo);
            if olap < 4.0 * spacing {
                continue;
            }
            // representability: peak value c * h(1/4) must be a normal float
            let peak = t.coefficient::<f64>() * 1.9e-8;
            if peak < 1e-300 {
                continue;
            }
            let both = !matches!(t.kernel, Kernel::Bump);
            if both || t.sign > 0 {
                pos = true;
            }
            if both || t.sign < 0 {
                neg = true;
            }
        }
        if !(pos && neg) {
            return false;
        }
    }
    true
}

/// Testable forms of the closed/nowhere-dense/boundary-accumulation
/// properties of a flagged set at resolution delta.
#[derive(Clone, Debug, Serialize)]
pub struct ResolutionProperties {
    pub closed_at_resolution: bool,
    pub nowhere_dense_at_resolution: bool,
    pub endpoint_accumulation: bool,
    pub max_flag_distance: f64,
    pub longest_flagged_run: f64,
}

pub fn resolution_properties(
    pf: &PiecewiseFunction,
    report: &CutsetReport<f64>,
    probes: &[f64],
) -> Result<ResolutionProperties> {
    let delta = report.delta;
    // closedness at resolution: every flagged point within delta of the set
    // (limits of flagged sequences then stay within delta, the set is closed)
    let mut max_dist = 0.0f64;
    for fp in &report.flagged {
        let d = cutting_set_distance_bound(pf, &Rat::from_f64(fp.x))?.to_f64();
        max_dist = max_dist.max(d);
    }
    let closed = max_dist <= delta * (1.0 + 1e-9);

    // nowhere density at resolution: no stretch of consecutive probes longer
    // than 4 delta is entirely flagged
    let flagged: Vec<f64> = report.flagged.iter().map(|f| f.x).collect();
    let mut longest = 0.0f64;
    let mut run_start: Option<f64> = None;
    let mut prev = f64::NEG_INFINITY;
    for &x in probes {
        if flagged.binary_search_by(|a| a.partial_cmp(&x).unwrap()).is_ok() {
            if run_start.is_none() {
                run_start = Some(x);
            }
            longest = longest.max(x - run_start.unwrap());
        } else {
            run_start = None;
        }
        prev = prev.max(x);
    }
    let nowhere_dense = longest <= 4.0 * delta;

    // endpoint accumulation: a flagged endpoint needs company within every
    // radius down to delta, i.e. another flagged point within delta of it
    let mut endpoint_ok = true;
    for e in [0.0f64, 1.0] {
        let e_flagged = flagged.iter().any(|&x| x == e);
        if e_flagged {
            let near = flagged.iter().any(|&x| x != e && (x - e).abs() < delta);
            endpoint_ok &= near;
        }
    }
    Ok(ResolutionProperties {
        closed_at_resolution: closed,
        nowhere_dense_at_resolution: nowhere_dense,
        endpoint_accumulation: endpoint_ok,
        max_flag_distance: max_dist,
        longest_flagged_run: longest,
    })
}

// ---------------------------------------------------------------------------
// structural ground-truth verification

#[derive(Clone, Debug, Serialize)]
pub enum Certification {
    /// In-set probe with +/- term witnesses inside every scheduled window.
    CutPoint {
        /// Witness term indices (neg, pos) for the tightest radius.
        tightest: (usize, usize),
        /// For isolated points, the two components sharing the probe.
        neighbour_pair: Option<(usize, usize)>,
    },
    /// Off-set probe strictly inside a term support: nonzero with this sign.
    NonZero { term: usize, sign: i8 },
    /// Truncation too shallow to decide at some radius (reported, not failed).
    TooShallow { radius: Rat },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeVerdict {
    pub x: Rat,
    pub in_set: bool,
    pub membership: Membership,
    pub certification: Certification,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AgreementStats {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub verdicts: Vec<ProbeVerdict>,
    pub stats: AgreementStats,
    pub radii: Vec<Rat>,
    pub exact_agreement: bool,
}

/// Dyadic radius schedule 2^{-1} .. 2^{-k}.
pub fn dyadic_radii(k: u32) -> Vec<Rat> {
    (1..=k).map(Rat::pow2_neg).collect()
}

/// Structured probes: basic-interval endpoints to `endpoint_levels`, all gap
/// midpoints, component midpoints and shared endpoints, cluster limits.
pub fn standard_probes(pf: &PiecewiseFunction, endpoint_levels: usize) -> Result<Vec<Rat>> {
    let vs = &pf.zero_set;
    let mut probes = Vec::new();
    if vs.has_kernel() {
        let gt = build_gap_tree(vs, endpoint_levels.max(1))?;
        for (s, iv) in &gt.basic {
            if s.len() <= endpoint_levels {
                probes.push(iv.lo.clone());
                probes.push(iv.hi.clone());
            }
        }
    }
    for t in &pf.terms {
        probes.push(t.support.midpoint());
        // shared component endpoints are isolated points of F
        if vs.membership(&t.support.lo)? == Membership::IsolatedPoint {
            probes.push(t.support.lo.clone());
        }
        if vs.membership(&t.support.hi)? == Membership::IsolatedPoint {
            probes.push(t.support.hi.clone());
        }
    }
    for c in vs.clusters() {
        if let crate::set_model::Cluster::Geometric { y, .. } = c {
            probes.push(y.clone());
        }
    }
    probes.sort();
    probes.dedup();
    Ok(probes)
}

/// Certify `E(f) = F` on the probe set: every in-set probe must exhibit
/// opposite-sign terms within every scheduled radius, every off-set probe a
/// single containing term (hence a strict sign).
pub fn verify_ground_truth(
    pf: &PiecewiseFunction,
    probes: &[Rat],
    radii: &[Rat],
) -> Result<VerificationReport> {
    let vs = &pf.zero_set;
    let mut verdicts = Vec::new();
    let mut stats = AgreementStats::default();
    for x in probes {
        let membership = vs.membership(x)?;
        let in_set = membership.in_set();
        let certification = if in_set {
            certify_cut_point(pf, x, radii, &membership)
        } else {
            match find_term_rational(pf, x) {
                Some(i) => Certification::NonZero { term: i, sign: pf.terms[i].sign },
                None => Certification::TooShallow { radius: Rat::zero() },
            }
        };
        match (&certification, in_set) {
            (Certification::CutPoint { .. }, true) => stats.true_positive += 1,
            (Certification::CutPoint { .. }, false) => stats.false_positive += 1,
            (Certification::NonZero { .. }, false) => stats.true_negative += 1,
            (Certification::NonZero { .. }, true) => stats.false_positive += 1,
            (Certification::TooShallow { .. }, true) => stats.false_negative += 1,
            (Certification::TooShallow { .. }, false) => stats.false_negative += 1,
        }
        verdicts.push(ProbeVerdict { x: x.clone(), in_set, membership, certification });
    }
    let exact = stats.false_positive == 0 && stats.false_negative == 0;
    Ok(VerificationReport { verdicts, stats, radii: radii.to_vec(), exact_agreement: exact })
}

fn certify_cut_point(
    pf: &PiecewiseFunction,
    x: &Rat,
    radii: &[Rat],
    membership: &Membership,
) -> Certification {
    // isolated points: the two incident components are opposite-signed
    let neighbour_pair = if *membership == Membership::IsolatedPoint {
        let left = pf.terms.iter().position(|t| &t.support.hi == x);
        let right = pf.terms.iter().position(|t| &t.support.lo == x);
        match (left, right) {
            (Some(l), Some(r)) if pf.terms[l].sign * pf.terms[r].sign == -1 => Some((l, r)),
            _ => None,
        }
    } else {
        None
    };
    let mut tightest = None;
    for r in radii {
        let lo = x - r;
        let hi = x + r;
        let mut neg = None;
        let mut pos = None;
        for (i, t) in pf.terms.iter().enumerate() {
            // open-window intersection with the open support
            if t.support.lo < hi && lo < t.support.hi {
                let both = !matches!(t.kernel, Kernel::Bump);
                if (both || t.sign > 0) && pos.is_none() {
                    pos = Some(i);
                }
                if (both || t.sign < 0) && neg.is_none() {
                    neg = Some(i);
                }
            }
            if neg.is_some() && pos.is_some() {
                break;
            }
        }
        match (neg, pos) {
            (Some(n), Some(p)) => tightest = Some((n, p)),
            _ => return Certification::TooShallow { radius: r.clone() },
        }
    }
    match tightest {
        Some(t) => Certification::CutPoint { tightest: t, neighbour_pair },
        // no radii requested: vacuous certification via the neighbour pair
        None => match neighbour_pair {
            Some(pair) => Certification::CutPoint { tightest: pair, neighbour_pair },
            None => Certification::TooShallow { radius: Rat::zero() },
        },
    }
}

// ---------------------------------------------------------------------------
// series conditions

#[derive(Clone, Debug, Serialize)]
pub struct OrderRow {
    pub order: usize,
    /// (eps, minimal N with tail bound < eps) for eps = 1e-2, 1e-4, 1e-6.
    pub n_for_eps: Vec<(f64, Option<usize>)>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    /// Uniform-convergence certificates per order (Weierstrass tail bounds).
    pub cond_i: Vec<OrderRow>,
    pub cond_i_pass: bool,
    /// Basic intervals scanned for sign-attaining terms of both signs.
    pub cond_ii_checked: usize,
    pub cond_ii_failures: Vec<String>,
    pub cond_ii_pass: bool,
    /// Distance-adequacy radius: the longest scanned basic interval.
    pub cond_ii_radius: f64,
    pub smooth_order: usize,
}

/// Check the uniform-convergence certificate (i) for orders 0..=P and the
/// both-signs-per-basic-interval scan (ii).
pub fn check_conditions(
    pf: &PiecewiseFunction,
    smooth_order: usize,
    env: &EnvelopeTable<f64>,
) -> Result<ConditionReport> {
    let mut cond_i = Vec::new();
    let mut all_pass = true;
    for p in 0..=smooth_order {
        let mut n_for_eps = Vec::new();
        let mut pass = true;
        for eps in [1e-2, 1e-4, 1e-6] {
            let n = levels_for_tolerance(pf, p, eps, 1 << 22, env)?;
            pass &= n.is_some();
            n_for_eps.push((eps, n));
        }
        all_pass &= pass;
        cond_i.push(OrderRow { order: p, n_for_eps, pass });
    }

    // condition (ii): scan basic intervals that can contain enough terms
    let vs = &pf.zero_set;
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut radius = 0.0f64;
    if vs.has_kernel() && pf.depth >= 2 {
        let gt = build_gap_tree(vs, pf.depth)?;
        let both_per_term = pf.terms.iter().all(|t| !matches!(t.kernel, Kernel::Bump));
        let max_level = if both_per_term { pf.depth - 1 } else { pf.depth.saturating_sub(2) };
        for (s, iv) in &gt.basic {
            if s.len() > max_level {
                continue;
            }
            checked += 1;
            radius = radius.max(iv.len().to_f64());
            let mut pos = false;
            let mut neg = false;
            for t in &pf.terms {
                if iv.lo <= t.support.lo && t.support.hi <= iv.hi {
                    let both = !matches!(t.kernel, Kernel::Bump);
                    pos |= both || t.sign > 0;
                    neg |= both || t.sign < 0;
                }
            }
            if !(pos && neg) {
                failures.push(s.clone());
            }
        }
    }
    Ok(ConditionReport {
        cond_i,
        cond_i_pass: all_pass,
        cond_ii_checked: checked,
        cond_ii_failures: failures.clone(),
        cond_ii_pass: failures.is_empty(),
        cond_ii_radius: radius,
        smooth_order,
    })
}

// ---------------------------------------------------------------------------
// variation

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum VariationStatus {
    Converged,
    /// Partial sums exceeded the divergence bound at this series level.
    DivergesPastBound { level: usize },
    /// Refinement stopped at the budget; the value is a lower bound.
    LowerBoundOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationResult {
    pub value: f64,
    pub status: VariationStatus,
    pub refinement_depth: usize,
    /// Reported alongside: twice the per-term amplitude sum, the figure some
    /// derivations quote for a full-period arch (the refined value is 4c).
    pub half_convention_value: Option<f64>,
    pub note: String,
}

/// Variation of `f` over [a,b] by dyadic partition refinement until the
/// increment drops below `tol` (or the depth budget is hit).
pub fn refine_variation(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: usize) -> (f64, usize, bool) {
    let mut prev = 0.0f64;
    let mut depth = 6usize;
    loop {
        let n = 1usize << depth;
        let mut sum = 0.0;
        let mut last = f(a);
        for i in 1..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            let v = f(x);
            sum += (v - last).abs();
            last = v;
        }
        if depth > 6 && (sum - prev).abs() < tol {
            return (sum, depth, true);
        }
        if depth >= max_depth {
            return (sum, depth, false);
        }
        prev = sum;
        depth += 1;
    }
}

/// Exact-by-shape variation of one term over its whole support.
pub fn term_variation(t: &crate::function_builder::SignedBumpTerm, tol: f64) -> f64 {
    let c = t.coefficient::<f64>();
    match t.kernel {
        // unimodal rise and fall: 2 c ||h||
        Kernel::Bump => 2.0 * c * (-8.0f64).exp(),
        _ => {
            if c == 0.0 {
                return 0.0;
            }
            let lo = t.support.lo.to_f64();
            let hi = t.support.hi.to_f64();
            let len = hi - lo;
            let term = t.clone();
            let g = move |x: f64| crate::evaluator::eval_term_rel::<f64>(&term, (x - lo) / len, 0);
            refine_variation(&g, lo, hi, tol * c.max(1e-300), 16).0
        }
    }
}

/// Sum per-term variations level by level with a divergence certificate:
/// the sum diverges past `bound` at the reported level. For the plain sine
/// construction the certificate extrapolates through the coefficient rule
/// when the materialized terms alone stay under the bound.
pub fn variation_report(pf: &PiecewiseFunction, tol: f64, bound: f64) -> VariationResult {
    let mut by_level: Vec<(usize, f64)> = Vec::new();
    for t in &pf.terms {
        let v = term_variation(t, tol);
        match by_level.iter_mut().find(|(l, _)| *l == t.level) {
            Some((_, acc)) => *acc += v,
            None => by_level.push((t.level, v)),
        }
    }
    by_level.sort_by_key(|&(l, _)| l);
    let mut total = 0.0;
    let amplitude_sum: f64 = pf.terms.iter().map(|t| t.coefficient::<f64>()).sum();
    let half_convention = match pf.construction {
        Construction::SineC0 { .. } => Some(2.0 * amplitude_sum),
        _ => None,
    };
    for &(level, v) in &by_level {
        total += v;
        if total > bound {
            return VariationResult {
                value: total,
                status: VariationStatus::DivergesPastBound { level },
                refinement_depth: 0,
                half_convention_value: half_convention,
                note: "partial sums exceeded the bound within the materialized terms".into(),
            };
        }
    }
    // extrapolate through the rule for the plain sine construction
    if let Construction::SineC0 { rule } = &pf.construction {
        let mut acc = 0.0f64;
        for step in 1..4096usize {
            // 2^{step-1} gaps at step `step`, each contributing 4 c_step
            acc += (2.0f64).powi(step as i32 - 1) * 4.0 * rule.value(step).to_f64();
            if acc > bound {
                if step > pf.max_level() {
                    return VariationResult {
                        value: total,
                        status: VariationStatus::DivergesPastBound { level: step },
                        refinement_depth: 0,
                        half_convention_value: half_convention,
                        note: "certificate extrapolated from the coefficient rule beyond the materialized depth".into(),
                    };
                }
                break;
            }
        }
    }
    VariationResult {
        value: total,
        status: VariationStatus::Converged,
        refinement_depth: 0,
        half_convention_value: half_convention,
        note: "sum of per-term variations over materialized terms".into(),
    }
}

// ---------------------------------------------------------------------------
// zero-set-measure probe

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZcVerdict {
    ConsistentWithMembership,
    Inconsistent,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZcReport {
    pub alpha: f64,
    pub zero_exists: bool,
    pub interior_empty: bool,
    /// True when `interior_empty` came from set structure, not samples.
    pub interior_structural: bool,
    /// Bracket on the zero-set measure.
    pub measure_lower: f64,
    pub measure_upper: f64,
    /// (zeta, fraction of grid with |f| <= zeta).
    pub upper_by_zeta: Vec<(f64, f64)>,
    pub verdict: ZcVerdict,
    /// Always true: sampling can bracket, never decide.
    pub heuristic: bool,
}

fn zc_verdict(alpha: f64, zero_exists: bool, interior_empty: bool, lower: f64, upper: f64) -> ZcVerdict {
    if !zero_exists || !interior_empty || upper < alpha {
        ZcVerdict::Inconsistent
    } else if lower >= alpha {
        ZcVerdict::ConsistentWithMembership
    } else {
        ZcVerdict::Undetermined
    }
}

/// Membership probe for the class "has zeros, zero set with empty interior,
/// zero-set measure >= alpha", on a black-box function.
pub fn zc_alpha_probe_blackbox(
    f: &dyn Fn(f64) -> f64,
    alpha: f64,
    grid: usize,
    zeta_schedule: &[f64],
) -> ZcReport {
    let xs: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let zmin = zeta_schedule.iter().cloned().fold(f64::INFINITY, f64::min);
    let zero_exists = vals.iter().any(|v| v.abs() <= zmin)
        || vals.windows(2).any(|w| w[0] * w[1] < 0.0);
    // longest stretch of consecutive near-zero samples
    let spacing = 1.0 / grid as f64;
    let mut longest = 0usize;
    let mut run = 0usize;
    for v in &vals {
        if v.abs() <= zmin {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    let interior_empty = (longest as f64) * spacing <= 8.0 * spacing;
    let mut upper_by_zeta = Vec::new();
    let mut upper: f64 = 1.0;
    for &z in zeta_schedule {
        let frac = vals.iter().filter(|v| v.abs() <= z).count() as f64 / vals.len() as f64;
        // outer estimate: covered fraction plus one spacing of slack
        let est = (frac + 2.0 * spacing).min(1.0);
        upper = upper.min(est);
        upper_by_zeta.push((z, frac));
    }
    let verdict = zc_verdict(alpha, zero_exists, interior_empty, 0.0, upper);
    ZcReport {
        alpha,
        zero_exists,
        interior_empty,
        interior_structural: false,
        measure_lower: 0.0,
        measure_upper: upper,
        upper_by_zeta,
        verdict,
        heuristic: true,
    }
}

/// Same probe for a built function: the lower measure bound and the empty
/// interior come from the set structure, the upper bound from sampling.
pub fn zc_alpha_probe(pf: &PiecewiseFunction, alpha: f64, grid: usize, zeta_schedule: &[f64]) -> Result<ZcReport> {
    let s = Sampler::<f64>::new(pf);
    let mut report = zc_alpha_probe_blackbox(&|x| s.value(x, 0), alpha, grid, zeta_schedule);
    let m = pf.zero_set.measure()?;
    report.measure_lower = m.lo.to_f64();
    // nowhere dense by construction
    report.interior_empty = true;
    report.interior_structural = true;
    // structural zeros exist whenever the set is nonempty
    report.zero_exists = report.zero_exists || !pf.zero_set.spec().parts.is_empty();
    report.verdict = zc_verdict(
        alpha,
        report.zero_exists,
        report.interior_empty,
        report.measure_lower,
        report.measure_upper,
    );
    Ok(report)
}

// ---------------------------------------------------------------------------

/// Convenience: evaluate a built function at order 0 as a black-box closure.
pub fn as_blackbox(pf: &PiecewiseFunction) -> impl Fn(f64) -> f64 + '_ {
    let s = Sampler::<f64>::new(pf);
    move |x| s.value(x, 0)
}

/// Agreement check between the sampling detector and structural verification:
/// detector flags must sit within delta of the true cutting set, and every
/// structurally certified-detectable in-set probe must be flagged.
#[derive(Clone, Debug, Serialize)]
pub struct DetectorAgreement {
    pub flags: usize,
    pub sound: bool,
    pub certified_probes: usize,
    pub missed_certified: usize,
}

pub fn detector_agreement(
    pf: &PiecewiseFunction,
    report: &CutsetReport<f64>,
    in_set_probes: &[Rat],
) -> Result<DetectorAgreement> {
    let mut sound = true;
    for fp in &report.flagged {
        let d = cutting_set_distance_bound(pf, &Rat::from_f64(fp.x))?;
        sound &= d.to_f64() <= report.delta * (1.0 + 1e-9);
    }
    let s = Sampler::<f64>::new(pf);
    let cfg = DetectorConfig { delta: report.delta, zeta: report.zeta, samples_per_ring: 48 };
    let mut certified = 0usize;
    let mut missed = 0usize;
    for x in in_set_probes {
        if certify_detectable(pf, x, report.delta, cfg.samples_per_ring) {
            certified += 1;
            let single = detect_cutting_set(&|y| s.value(y, 0), &cfg, &[x.to_f64()]);
            if single.flagged.is_empty() {
                missed += 1;
            }
        }
    }
    Ok(DetectorAgreement {
        flags: report.flagged.len(),
        sound,
        certified_probes: certified,
        missed_certified: missed,
    })
}

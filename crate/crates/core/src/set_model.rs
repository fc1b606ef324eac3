//! Finitely-described closed nowhere dense subsets of [0,1].
//!
//! A set is assembled from central Cantor parts (the perfect kernel `D`)
//! and point clusters (the countable part `Q`). All endpoint arithmetic is
//! exact; the only concession to finiteness is a truncation depth `N` that
//! bounds how far Cantor recursions are unrolled. Every answer that depends
//! on truncation says so.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::rat::{Rat, RatInterval};
use crate::{Error, Result};

pub const DEFAULT_DEPTH: usize = 12;

/// Rule producing the constituent-interval lengths `xi_n` of a central
/// Cantor set. `xi_0 = 1` and `0 < xi_{n+1} < xi_n / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiRule {
    /// `xi_{n+1} = rho_n * xi_n` with `rho_n` read from `head`, then from
    /// `tail` cyclically. An empty tail bounds the representable depth.
    Ratios { head: Vec<Rat>, tail: Vec<Rat> },
    /// `xi_n = (alpha + (1 - alpha) 2^{-n}) / 2^n`, so `2^n xi_n -> alpha`.
    AlphaForm { alpha: Rat },
}

impl XiRule {
    /// The classical middle-thirds rule.
    pub fn ternary() -> Self {
        XiRule::Ratios {
            head: vec![],
            tail: vec![Rat::new(1, 3)],
        }
    }

    pub fn ratio_at(&self, n: usize) -> Result<Rat> {
        match self {
            XiRule::Ratios { head, tail } => {
                if n < head.len() {
                    Ok(head[n].clone())
                } else if tail.is_empty() {
                    Err(Error::DepthUnrepresentable {
                        requested: n + 1,
                        max: head.len(),
                    })
                } else {
                    Ok(tail[(n - head.len()) % tail.len()].clone())
                }
            }
            XiRule::AlphaForm { alpha } => {
                // xi_{n+1} / xi_n with xi_n = (alpha + (1-alpha) 2^{-n}) / 2^n.
                let num = alpha + &(Rat::one() - alpha) * Rat::pow2_neg(n as u32 + 1);
                let den = alpha + &(Rat::one() - alpha) * Rat::pow2_neg(n as u32);
                Ok(num / (den * Rat::int(2)))
            }
        }
    }

    pub fn xi(&self, n: usize) -> Result<Rat> {
        match self {
            XiRule::Ratios { .. } => {
                let mut xi = Rat::one();
                for k in 0..n {
                    xi = xi * self.ratio_at(k)?;
                }
                Ok(xi)
            }
            XiRule::AlphaForm { alpha } => {
                let n = n as u32;
                Ok((alpha + &(Rat::one() - alpha) * Rat::pow2_neg(n)) * Rat::pow2_neg(n))
            }
        }
    }

    /// Exact value of `lim 2^n xi_n` (the unit-carrier measure of the set).
    ///
    /// For a repeating-ratio rule every cycle multiplies `2^n xi_n` by a
    /// factor < 1, so the limit is 0; for the alpha form it is `alpha`.
    pub fn limit_measure(&self) -> Rat {
        match self {
            XiRule::Ratios { .. } => Rat::zero(),
            XiRule::AlphaForm { alpha } => alpha.clone(),
        }
    }

    /// Largest depth for which `xi` is defined, if bounded.
    pub fn max_depth(&self) -> Option<usize> {
        match self {
            XiRule::Ratios { head, tail } if tail.is_empty() => Some(head.len()),
            _ => None,
        }
    }

    fn validate(&self, depth: usize) -> Result<()> {
        let half = Rat::new(1, 2);
        let check_depth = match self.max_depth() {
            Some(m) => m.min(depth),
            None => depth,
        };
        for n in 0..check_depth {
            let rho = self.ratio_at(n)?;
            if !rho.is_positive() || rho >= half {
                return Err(Error::XiInvariant {
                    level: n,
                    detail: format!("ratio xi_{}/xi_{} = {} is not in (0, 1/2)", n + 1, n, rho),
                });
            }
        }
        if let XiRule::AlphaForm { alpha } = self {
            if alpha.is_negative() || alpha >= &Rat::one() {
                return Err(Error::XiInvariant {
                    level: 0,
                    detail: format!("alpha = {} is not in [0, 1)", alpha),
                });
            }
        }
        Ok(())
    }
}

/// Which side(s) of the limit a geometric cluster occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Both,
}

impl Direction {
    pub fn has_left(self) -> bool {
        matches!(self, Direction::Left | Direction::Both)
    }
    pub fn has_right(self) -> bool {
        matches!(self, Direction::Right | Direction::Both)
    }
}

/// One component of a set description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PartSpec {
    /// A central Cantor set affinely mapped onto `carrier`.
    CentralCantor { xi_rule: XiRule, carrier: RatInterval },
    /// Finitely many isolated points.
    FinitePoints { points: Vec<Rat> },
    /// `{y} ∪ {y ± a r^k : k ≥ 0}` restricted to the chosen side(s).
    Geometric { y: Rat, a: Rat, r: Rat, direction: Direction },
}

/// Finite description of a closed nowhere dense subset of [0,1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    pub parts: Vec<PartSpec>,
}

impl SetSpec {
    pub fn ternary() -> Self {
        SetSpec {
            parts: vec![PartSpec::CentralCantor {
                xi_rule: XiRule::ternary(),
                carrier: RatInterval::unit(),
            }],
        }
    }
}

/// A central Cantor part with validated carrier and rule.
#[derive(Clone, Debug)]
pub struct CantorPart {
    pub rule: XiRule,
    pub carrier: RatInterval,
}

/// Where a point sits relative to one Cantor part.
#[derive(Clone, Debug, PartialEq)]
pub enum PartVerdict {
    /// Not in the carrier at all.
    Outside,
    /// Strictly inside a removed gap; the gap and its removal level.
    InGap { level: usize, gap: RatInterval },
    /// Provably in the set (basic-interval endpoint or periodic orbit).
    InKernelExact,
    /// Inside a depth-`N` basic interval; membership certified only to `N`.
    AtDepth(usize),
}

impl CantorPart {
    pub fn width(&self) -> Rat {
        self.carrier.len()
    }

    pub fn scaled_xi(&self, n: usize) -> Result<Rat> {
        Ok(self.width() * self.rule.xi(n)?)
    }

    /// Children of a level-`level` basic interval plus the removed gap.
    pub fn split(&self, iv: &RatInterval, level: usize) -> Result<(RatInterval, RatInterval, RatInterval)> {
        let w_next = self.scaled_xi(level + 1)?;
        let left = RatInterval::new(iv.lo.clone(), &iv.lo + &w_next);
        let right = RatInterval::new(&iv.hi - &w_next, iv.hi.clone());
        let gap = RatInterval::new(left.hi.clone(), right.lo.clone());
        Ok((left, gap, right))
    }

    /// Classify `x` against this part, descending at most `depth` levels.
    pub fn locate(&self, x: &Rat, depth: usize) -> Result<PartVerdict> {
        if !self.carrier.contains_closed(x) {
            return Ok(PartVerdict::Outside);
        }
        let mut iv = self.carrier.clone();
        // Orbit states for periodicity detection (Ratios rules only): the
        // position of x rescaled to the unit interval, with the phase of the
        // ratio cycle. A repeated state descends forever, so x is in D.
        let mut seen: HashSet<(Rat, usize)> = HashSet::new();
        let cycle = match &self.rule {
            XiRule::Ratios { head, tail } if !tail.is_empty() => Some((head.len(), tail.len())),
            _ => None,
        };
        for level in 0..depth {
            if x == &iv.lo || x == &iv.hi {
                return Ok(PartVerdict::InKernelExact);
            }
            if let Some((head_len, tail_len)) = cycle {
                if level >= head_len {
                    let t = (x - &iv.lo) / iv.len();
                    let phase = (level - head_len) % tail_len;
                    if !seen.insert((t, phase)) {
                        return Ok(PartVerdict::InKernelExact);
                    }
                }
            }
            let (left, gap, right) = match self.split(&iv, level) {
                Ok(v) => v,
                // Rule ran out of ratios: the deepest certified statement.
                Err(Error::DepthUnrepresentable { .. }) => return Ok(PartVerdict::AtDepth(level)),
                Err(e) => return Err(e),
            };
            if gap.contains_open(x) {
                return Ok(PartVerdict::InGap { level, gap });
            }
            iv = if x <= &left.hi { left } else { right };
        }
        Ok(PartVerdict::AtDepth(depth))
    }

    /// All removed gaps of length >= `min_len` contained in `query`.
    ///
    /// `query` must have both endpoints outside every gap (basic-interval
    /// endpoints or carrier-exterior points), so a gap meeting its interior
    /// is contained in it. Gaps shorter than `min_len` are pruned using
    /// `len(gap at level l) < scaled xi_l`.
    pub fn gaps_within(&self, query: &RatInterval, min_len: &Rat, out: &mut Vec<(usize, RatInterval)>) -> Result<()> {
        let mut stack = vec![(self.carrier.clone(), 0usize)];
        while let Some((iv, level)) = stack.pop() {
            if iv.hi <= query.lo || query.hi <= iv.lo {
                continue;
            }
            if &self.scaled_xi(level)? < min_len {
                continue;
            }
            let (left, gap, right) = match self.split(&iv, level) {
                Ok(v) => v,
                Err(Error::DepthUnrepresentable { .. }) => continue,
                Err(e) => return Err(e),
            };
            if &gap.len() >= min_len && query.lo <= gap.lo && gap.hi <= query.hi {
                out.push((level, gap.clone()));
            }
            stack.push((left, level + 1));
            stack.push((right, level + 1));
        }
        Ok(())
    }

    /// Exact distance from `x` to the part, `None` when unresolved at `depth`.
    pub fn distance(&self, x: &Rat, depth: usize) -> Result<Option<Rat>> {
        if x < &self.carrier.lo {
            return Ok(Some(&self.carrier.lo - x));
        }
        if x > &self.carrier.hi {
            return Ok(Some(x - &self.carrier.hi));
        }
        match self.locate(x, depth)? {
            PartVerdict::InGap { gap, .. } => Ok(Some((x - &gap.lo).min(&gap.hi - x))),
            PartVerdict::InKernelExact => Ok(Some(Rat::zero())),
            PartVerdict::AtDepth(_) => Ok(None),
            PartVerdict::Outside => unreachable!("carrier containment checked above"),
        }
    }

    /// Length of the kernel-free open interval to the right of `y`
    /// (capped at the carrier), `None` if unresolved at `depth`.
    fn free_right(&self, y: &Rat, depth: usize) -> Result<Option<Rat>> {
        if y >= &self.carrier.hi {
            return Ok(Some(Rat::int(2))); // no constraint inside [0,1]
        }
        if y < &self.carrier.lo {
            return Ok(Some(&self.carrier.lo - y));
        }
        let mut iv = self.carrier.clone();
        for level in 0..depth {
            let (left, gap, right) = match self.split(&iv, level) {
                Ok(v) => v,
                Err(Error::DepthUnrepresentable { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            if y < &left.hi {
                iv = left;
            } else if y < &right.lo {
                return Ok(Some(&right.lo - y));
            } else {
                if y == &right.hi {
                    return Ok(Some(Rat::zero()));
                }
                iv = right;
            }
            let _ = gap;
        }
        Ok(None)
    }

    /// Mirror image of [`CantorPart::free_right`].
    fn free_left(&self, y: &Rat, depth: usize) -> Result<Option<Rat>> {
        if y <= &self.carrier.lo {
            return Ok(Some(Rat::int(2)));
        }
        if y > &self.carrier.hi {
            return Ok(Some(y - &self.carrier.hi));
        }
        let mut iv = self.carrier.clone();
        for level in 0..depth {
            let (left, gap, right) = match self.split(&iv, level) {
                Ok(v) => v,
                Err(Error::DepthUnrepresentable { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            if y > &right.lo {
                iv = right;
            } else if y > &left.hi {
                return Ok(Some(y - &left.hi));
            } else {
                if y == &left.lo {
                    return Ok(Some(Rat::zero()));
                }
                iv = left;
            }
            let _ = gap;
        }
        Ok(None)
    }
}

/// A geometric tail `{y ± a r^k : k ≥ k_start}` known to avoid the kernel.
#[derive(Clone, Debug)]
pub struct Tail {
    pub y: Rat,
    pub a: Rat,
    pub r: Rat,
    /// +1 for points right of `y`, -1 for left.
    pub side: i8,
    pub k_start: usize,
}

impl Tail {
    pub fn point(&self, k: usize) -> Rat {
        let mut off = self.a.clone();
        for _ in 0..k {
            off = off * self.r.clone();
        }
        if self.side > 0 {
            &self.y + &off
        } else {
            &self.y - &off
        }
    }

    /// Indices `k >= k_start` with `point(k)` strictly inside `iv`,
    /// as `(first_k, Option<last_k>)`; `None` means all `k >= first_k`.
    pub fn range_in(&self, iv: &RatInterval) -> Option<(usize, Option<usize>)> {
        // offsets decrease strictly with k
        let mut k = self.k_start;
        let mut first = None;
        let mut off = {
            let mut o = self.a.clone();
            for _ in 0..self.k_start {
                o = o * self.r.clone();
            }
            o
        };
        // lower offset bound (exclusive) where points leave iv toward y
        let near_bound = if self.side > 0 { iv.lo.clone() - &self.y } else { &self.y - iv.hi.clone() };
        loop {
            let p = if self.side > 0 { &self.y + &off } else { &self.y - &off };
            let inside = iv.contains_open(&p);
            if inside && first.is_none() {
                first = Some(k);
            }
            if !inside && first.is_some() {
                return Some((first.unwrap(), Some(k - 1)));
            }
            // Once offsets drop to/below the near bound, every later point is
            // outside on the y side; if y side is inside, the tail stays in.
            if &off <= &near_bound {
                return first.map(|f| (f, Some(k)));
            }
            if !near_bound.is_positive() && inside {
                // remaining points converge to y inside iv: infinite tail
                return Some((first.unwrap(), None));
            }
            off = off * self.r.clone();
            k += 1;
            if k > self.k_start + 4096 {
                // Unreachable for valid data: offsets decay geometrically.
                return first.map(|f| (f, Some(k)));
            }
        }
    }
}

/// Validated cluster with its certified tail decomposition.
#[derive(Clone, Debug)]
pub enum Cluster {
    Finite { points: Vec<Rat> },
    Geometric {
        y: Rat,
        /// Points that precede the certified tails, each individually checked.
        head: Vec<Rat>,
        tails: Vec<Tail>,
    },
}

/// Classification returned by [`ValidatedSet::membership`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Membership {
    /// In the perfect kernel D. `exact` is false when the verdict is only
    /// "inside every basic interval down to the truncation depth".
    InKernel { exact: bool },
    /// An isolated point x_n of F.
    IsolatedPoint,
    /// An accumulation point y_m of the isolated points.
    AccumulationPoint,
    /// Not in F (exact).
    Outside,
}

impl Membership {
    pub fn in_set(&self) -> bool {
        !matches!(self, Membership::Outside)
    }
}

/// Status of 0 or 1 relative to F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointStatus {
    NotInSet,
    AccumulationPoint,
    IsolatedPoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub zero: EndpointStatus,
    pub one: EndpointStatus,
}

/// Exact bracket on the Lebesgue measure of F at a truncation depth.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureBracket {
    pub lo: Rat,
    pub hi: Rat,
    pub depth: usize,
}

/// A [`SetSpec`] that passed validation, with its Cantor–Bendixson data.
#[derive(Clone, Debug)]
pub struct ValidatedSet {
    spec: SetSpec,
    depth: usize,
    parts: Vec<CantorPart>,
    clusters: Vec<Cluster>,
    hull: Option<RatInterval>,
    boundary: BoundaryReport,
}

/// Validate `spec` at the default truncation depth.
pub fn validate_spec(spec: &SetSpec) -> Result<ValidatedSet> {
    validate_spec_at(spec, DEFAULT_DEPTH)
}

/// Validate `spec`, certifying Cantor-part statements to depth `depth`.
pub fn validate_spec_at(spec: &SetSpec, depth: usize) -> Result<ValidatedSet> {
    let unit = RatInterval::unit();
    let mut parts = Vec::new();
    let mut raw_clusters = Vec::new();
    for p in &spec.parts {
        match p {
            PartSpec::CentralCantor { xi_rule, carrier } => {
                if carrier.is_degenerate() || !unit.contains_interval(carrier) {
                    return Err(Error::InvalidSpec(format!(
                        "carrier {} is not a nondegenerate subinterval of [0,1]",
                        carrier
                    )));
                }
                xi_rule.validate(depth)?;
                parts.push(CantorPart { rule: xi_rule.clone(), carrier: carrier.clone() });
            }
            PartSpec::FinitePoints { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidSpec("finite_points part with no points".into()));
                }
                raw_clusters.push(p.clone());
            }
            PartSpec::Geometric { a, r, .. } => {
                if !a.is_positive() || !r.is_positive() || r >= &Rat::one() {
                    return Err(Error::InvalidSpec(format!(
                        "geometric cluster needs a > 0 and 0 < r < 1, got a = {}, r = {}",
                        a, r
                    )));
                }
                raw_clusters.push(p.clone());
            }
        }
    }

    // Carriers occupy pairwise disjoint interiors.
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !parts[i].carrier.interior_disjoint(&parts[j].carrier) {
                return Err(Error::Overlap(format!(
                    "carriers {} and {} overlap",
                    parts[i].carrier, parts[j].carrier
                )));
            }
        }
    }

    let hull = if parts.is_empty() {
        None
    } else {
        let lo = parts.iter().map(|p| p.carrier.lo.clone()).min().unwrap();
        let hi = parts.iter().map(|p| p.carrier.hi.clone()).max().unwrap();
        Some(RatInterval::new(lo, hi))
    };

    let ctx = PartsCtx { parts: &parts, depth };

    // Resolve clusters: every candidate isolated point must be certified
    // outside the kernel, and geometric tails must enter a kernel-free zone.
    let mut clusters = Vec::new();
    let mut limits: Vec<Rat> = Vec::new();
    let mut sides_seen: Vec<(Rat, i8)> = Vec::new();
    for p in &raw_clusters {
        match p {
            PartSpec::CentralCantor { .. } => unreachable!("only clusters are queued"),
            PartSpec::FinitePoints { points } => {
                for x in points {
                    ctx.check_isolated_candidate(x)?;
                }
                clusters.push(Cluster::Finite { points: points.clone() });
            }
            PartSpec::Geometric { y, a, r, direction } => {
                if !unit.contains_closed(y) {
                    return Err(Error::InvalidSpec(format!("cluster limit {} outside [0,1]", y)));
                }
                let mut head = Vec::new();
                let mut tails = Vec::new();
                for side in [-1i8, 1i8] {
                    if (side < 0 && !direction.has_left()) || (side > 0 && !direction.has_right()) {
                        continue;
                    }
                    if sides_seen.iter().any(|(l, s)| l == y && *s == side) {
                        return Err(Error::Overlap(format!(
                            "two geometric clusters approach {} from the same side",
                            y
                        )));
                    }
                    sides_seen.push((y.clone(), side));
                    let free = if side > 0 {
                        ctx.free_right(y)?
                    } else {
                        ctx.free_left(y)?
                    };
                    let free = free.ok_or_else(|| Error::ClusterUnresolvable {
                        point: y.to_string(),
                        depth,
                    })?;
                    // first k with a r^k < free: all later points certified
                    let mut k0 = 0usize;
                    let mut off = a.clone();
                    while off >= free {
                        off = off * r.clone();
                        k0 += 1;
                        if k0 > 4096 {
                            return Err(Error::ClusterUnresolvable {
                                point: y.to_string(),
                                depth,
                            });
                        }
                    }
                    let tail = Tail { y: y.clone(), a: a.clone(), r: r.clone(), side, k_start: k0 };
                    // points before the tail are checked one by one
                    for k in 0..k0 {
                        let pt = tail_point(y, a, r, side, k);
                        if !unit.contains_closed(&pt) {
                            return Err(Error::InvalidSpec(format!(
                                "cluster point {} outside [0,1]",
                                pt
                            )));
                        }
                        ctx.check_isolated_candidate(&pt)?;
                        head.push(pt);
                    }
                    tails.push(tail);
                }
                limits.push(y.clone());
                clusters.push(Cluster::Geometric { y: y.clone(), head, tails });
            }
        }
    }

    // No candidate isolated point may coincide with another isolated point
    // or with a cluster limit.
    let vsd = ValidatedSetDraft { parts: &parts, clusters: &clusters, depth };
    vsd.check_distinctness(&limits)?;

    let boundary = vsd.boundary_report(&limits)?;
    for (x, status) in [(Rat::zero(), boundary.zero), (Rat::one(), boundary.one)] {
        if status == EndpointStatus::IsolatedPoint {
            return Err(Error::IsolatedEndpoint { endpoint: x.to_string() });
        }
    }

    Ok(ValidatedSet { spec: spec.clone(), depth, parts, clusters, hull, boundary })
}

fn tail_point(y: &Rat, a: &Rat, r: &Rat, side: i8, k: usize) -> Rat {
    let mut off = a.clone();
    for _ in 0..k {
        off = off * r.clone();
    }
    if side > 0 {
        y + &off
    } else {
        y - &off
    }
}

struct PartsCtx<'a> {
    parts: &'a [CantorPart],
    depth: usize,
}

impl PartsCtx<'_> {
    fn check_isolated_candidate(&self, x: &Rat) -> Result<()> {
        if x < &Rat::zero() || x > &Rat::one() {
            return Err(Error::InvalidSpec(format!("point {} outside [0,1]", x)));
        }
        for part in self.parts {
            match part.locate(x, self.depth)? {
                PartVerdict::Outside | PartVerdict::InGap { .. } => {}
                PartVerdict::InKernelExact => {
                    return Err(Error::ClusterPointInKernel { point: x.to_string() })
                }
                PartVerdict::AtDepth(_) => {
                    return Err(Error::ClusterUnresolvable { point: x.to_string(), depth: self.depth })
                }
            }
        }
        Ok(())
    }

    fn free_right(&self, y: &Rat) -> Result<Option<Rat>> {
        let mut best = Rat::one() - y;
        if !best.is_positive() {
            // y = 1: nothing to the right inside [0,1]; side invalid
            return Ok(Some(Rat::zero()));
        }
        for part in self.parts {
            match part.free_right(y, self.depth)? {
                Some(f) => best = best.min(f),
                None => return Ok(None),
            }
        }
        Ok(Some(best))
    }

    fn free_left(&self, y: &Rat) -> Result<Option<Rat>> {
        let mut best = y.clone();
        if !best.is_positive() {
            return Ok(Some(Rat::zero()));
        }
        for part in self.parts {
            match part.free_left(y, self.depth)? {
                Some(f) => best = best.min(f),
                None => return Ok(None),
            }
        }
        Ok(Some(best))
    }
}

struct ValidatedSetDraft<'a> {
    parts: &'a [CantorPart],
    clusters: &'a [Cluster],
    depth: usize,
}

impl ValidatedSetDraft<'_> {
    /// Pairwise distinctness of isolated points, and isolated points vs
    /// cluster limits. Tails are compared down to the scale where they are
    /// separated by their limits, which decides all remaining pairs.
    fn check_distinctness(&self, limits: &[Rat]) -> Result<()> {
        let mut explicit: Vec<Rat> = Vec::new();
        let mut tails: Vec<&Tail> = Vec::new();
        for c in self.clusters {
            match c {
                Cluster::Finite { points } => explicit.extend(points.iter().cloned()),
                Cluster::Geometric { head, tails: t, .. } => {
                    explicit.extend(head.iter().cloned());
                    tails.extend(t.iter());
                }
            }
        }
        let mut seen: HashSet<Rat> = HashSet::new();
        for x in &explicit {
            if !seen.insert(x.clone()) {
                return Err(Error::Overlap(format!("duplicate isolated point {}", x)));
            }
            if limits.contains(x) {
                return Err(Error::Overlap(format!(
                    "point {} coincides with a cluster limit (it is not isolated)",
                    x
                )));
            }
        }
        // explicit point inside some tail?
        for x in &explicit {
            for t in &tails {
                if tail_contains(t, x) {
                    return Err(Error::Overlap(format!(
                        "point {} duplicates a geometric cluster point",
                        x
                    )));
                }
            }
        }
        // tail vs tail with distinct limits: materialize both past the
        // half-distance of the limits; beyond that they cannot collide.
        for i in 0..tails.len() {
            for j in i + 1..tails.len() {
                let (t1, t2) = (tails[i], tails[j]);
                if t1.y == t2.y && t1.side == t2.side {
                    // rejected earlier; defensive
                    continue;
                }
                let sep = if t1.y == t2.y {
                    // opposite sides: points are separated by y itself
                    continue;
                } else {
                    (&t1.y - &t2.y).abs() * Rat::new(1, 2)
                };
                let p1 = materialize_until(t1, &sep);
                let p2: Vec<Rat> = materialize_until(t2, &sep);
                for x in &p1 {
                    if p2.contains(x) || tail_contains(t2, x) {
                        return Err(Error::Overlap(format!(
                            "geometric clusters share the point {}",
                            x
                        )));
                    }
                }
                for x in &p2 {
                    if tail_contains(t1, x) {
                        return Err(Error::Overlap(format!(
                            "geometric clusters share the point {}",
                            x
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn boundary_report(&self, limits: &[Rat]) -> Result<BoundaryReport> {
        let zero = self.endpoint_status(&Rat::zero(), limits)?;
        let one = self.endpoint_status(&Rat::one(), limits)?;
        Ok(BoundaryReport { zero, one })
    }

    fn endpoint_status(&self, x: &Rat, limits: &[Rat]) -> Result<EndpointStatus> {
        for part in self.parts {
            if !matches!(part.locate(x, self.depth)?, PartVerdict::Outside | PartVerdict::InGap { .. }) {
                // carrier endpoints belong to the kernel, which is perfect
                return Ok(EndpointStatus::AccumulationPoint);
            }
        }
        if limits.contains(x) {
            return Ok(EndpointStatus::AccumulationPoint);
        }
        for c in self.clusters {
            match c {
                Cluster::Finite { points } => {
                    if points.contains(x) {
                        return Ok(EndpointStatus::IsolatedPoint);
                    }
                }
                Cluster::Geometric { head, tails, .. } => {
                    if head.contains(x) || tails.iter().any(|t| tail_contains(t, x)) {
                        return Ok(EndpointStatus::IsolatedPoint);
                    }
                }
            }
        }
        Ok(EndpointStatus::NotInSet)
    }
}

/// Exact test for `x ∈ {y ± a r^k : k ≥ k_start}`.
fn tail_contains(t: &Tail, x: &Rat) -> bool {
    let target = if t.side > 0 { x - &t.y } else { &t.y - x };
    if !target.is_positive() {
        return false;
    }
    let mut off = {
        let mut o = t.a.clone();
        for _ in 0..t.k_start {
            o = o * t.r.clone();
        }
        o
    };
    while off >= target {
        if off == target {
            return true;
        }
        off = off * t.r.clone();
    }
    false
}

fn materialize_until(t: &Tail, scale: &Rat) -> Vec<Rat> {
    let mut pts = Vec::new();
    let mut off = {
        let mut o = t.a.clone();
        for _ in 0..t.k_start {
            o = o * t.r.clone();
        }
        o
    };
    while &off > scale {
        pts.push(if t.side > 0 { &t.y + &off } else { &t.y - &off });
        off = off * t.r.clone();
    }
    pts
}

/// Isolated points and limits of one cluster that fall strictly inside `iv`.
#[derive(Clone, Debug, Default)]
pub struct PointsInInterval {
    /// Isolated points, exact, finite.
    pub isolated: Vec<Rat>,
    /// Tails with infinitely many points inside `iv`, converging to their limit.
    pub infinite_tails: Vec<Tail>,
    /// Cluster limits strictly inside `iv`.
    pub limits: Vec<Rat>,
}

impl ValidatedSet {
    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parts(&self) -> &[CantorPart] {
        &self.parts
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Minimal closed interval containing the perfect kernel, if any.
    pub fn hull(&self) -> Option<&RatInterval> {
        self.hull.as_ref()
    }

    pub fn boundary_accumulation_check(&self) -> &BoundaryReport {
        &self.boundary
    }

    pub fn has_kernel(&self) -> bool {
        !self.parts.is_empty()
    }

    /// Exact membership classification at the validation depth.
    pub fn membership(&self, x: &Rat) -> Result<Membership> {
        if x < &Rat::zero() || x > &Rat::one() {
            return Err(Error::InvalidSpec(format!("probe {} outside [0,1]", x)));
        }
        let mut at_depth = false;
        for part in &self.parts {
            match part.locate(x, self.depth)? {
                PartVerdict::InKernelExact => return Ok(Membership::InKernel { exact: true }),
                PartVerdict::AtDepth(_) => at_depth = true,
                PartVerdict::Outside | PartVerdict::InGap { .. } => {}
            }
        }
        for c in &self.clusters {
            match c {
                Cluster::Finite { points } => {
                    if points.contains(x) {
                        return Ok(Membership::IsolatedPoint);
                    }
                }
                Cluster::Geometric { y, head, tails } => {
                    if y == x {
                        return Ok(Membership::AccumulationPoint);
                    }
                    if head.contains(x) || tails.iter().any(|t| tail_contains(t, x)) {
                        return Ok(Membership::IsolatedPoint);
                    }
                }
            }
        }
        if at_depth {
            return Ok(Membership::InKernel { exact: false });
        }
        Ok(Membership::Outside)
    }

    /// Measure bracket `[lim 2^n xi_n, 2^N xi_N]` summed over parts.
    pub fn measure(&self) -> Result<MeasureBracket> {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for part in &self.parts {
            let w = part.width();
            lo += &(&w * &part.rule.limit_measure());
            let n = match part.rule.max_depth() {
                Some(m) => m.min(self.depth),
                None => self.depth,
            };
            let mut scale = Rat::one();
            for _ in 0..n {
                scale = scale * Rat::int(2);
            }
            hi += &(w * part.rule.xi(n)? * scale);
        }
        Ok(MeasureBracket { lo, hi, depth: self.depth })
    }

    /// The Cantor–Bendixson split: kernel parts and the tagged countable part.
    pub fn cantor_bendixson_split(&self) -> (&[CantorPart], &[Cluster]) {
        (&self.parts, &self.clusters)
    }

    /// Cluster material strictly inside the open interval `iv`.
    ///
    /// `iv` must be kernel-free (a gap or a flank); then the result is the
    /// entire trace of Q on `iv`, with infinite tails kept symbolic.
    pub fn cluster_points_in(&self, iv: &RatInterval) -> PointsInInterval {
        let mut out = PointsInInterval::default();
        for c in &self.clusters {
            match c {
                Cluster::Finite { points } => {
                    out.isolated.extend(points.iter().filter(|p| iv.contains_open(p)).cloned());
                }
                Cluster::Geometric { y, head, tails } => {
                    if iv.contains_open(y) {
                        out.limits.push(y.clone());
                    }
                    out.isolated.extend(head.iter().filter(|p| iv.contains_open(p)).cloned());
                    for t in tails {
                        match t.range_in(iv) {
                            None => {}
                            Some((first, Some(last))) => {
                                for k in first..=last {
                                    out.isolated.push(t.point(k));
                                }
                            }
                            Some((first, None)) => {
                                let mut t2 = t.clone();
                                t2.k_start = first;
                                out.infinite_tails.push(t2);
                            }
                        }
                    }
                }
            }
        }
        out.isolated.sort();
        out.isolated.dedup();
        out.limits.sort();
        out.limits.dedup();
        out
    }

    /// Exact distance from `x` to the kernel, `None` when unresolved.
    pub fn kernel_distance(&self, x: &Rat) -> Result<Option<Rat>> {
        let mut best: Option<Rat> = None;
        for part in &self.parts {
            match part.distance(x, self.depth)? {
                Some(d) => {
                    best = Some(match best {
                        Some(b) => b.min(d),
                        None => d,
                    })
                }
                None => return Ok(None),
            }
        }
        Ok(best)
    }

    /// Upper bound on the distance from `x` to F via explicit witnesses.
    pub fn distance_upper_bound(&self, x: &Rat) -> Result<Rat> {
        let mut best = (x - &Rat::zero()).abs().max((x - &Rat::one()).abs()).max(Rat::int(2));
        if let Some(d) = self.kernel_distance(x)? {
            best = best.min(d);
        }
        for c in &self.clusters {
            match c {
                Cluster::Finite { points } => {
                    for p in points {
                        best = best.min((x - p).abs());
                    }
                }
                Cluster::Geometric { y, head, tails } => {
                    best = best.min((x - y).abs());
                    for p in head {
                        best = best.min((x - p).abs());
                    }
                    for t in tails {
                        // nearest tail point: scan until offsets pass x
                        let mut off = {
                            let mut o = t.a.clone();
                            for _ in 0..t.k_start {
                                o = o * t.r.clone();
                            }
                            o
                        };
                        for _ in 0..256 {
                            let p = if t.side > 0 { &t.y + &off } else { &t.y - &off };
                            best = best.min((x - &p).abs());
                            off = off * t.r.clone();
                            if &best < &off {
                                continue;
                            }
                        }
                    }
                }
            }
        }
        Ok(best)
    }
}

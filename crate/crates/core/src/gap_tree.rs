//! Basic-interval/gap tree of a validated set, and per-gap component tables.
//!
//! The tree splits the kernel hull recursively at the leftmost longest
//! connected component of `I_s \ D`; those removed components are the gaps
//! `J_s`. When the hull is not all of [0,1], the two flanking intervals act
//! as level-0 gaps, and when there is no kernel at all the single interval
//! (0,1) does. Component tables then subtract the countable part from each
//! gap: the open pieces `J_{s,(i)}`, grouped into maximal chains (blocks)
//! separated by accumulation points, each chain tagged with its order type.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rat::{Rat, RatInterval};
use crate::set_model::{Membership, Tail, ValidatedSet};
use crate::{Error, Result};

/// Identifier of a gap. Tree gaps carry their binary path; the hull flanks
/// and the kernel-free unit interval act as pseudo-gaps of level 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GapId {
    Node(String),
    FlankLeft,
    FlankRight,
    Unit,
}

impl GapId {
    pub fn level(&self) -> usize {
        match self {
            GapId::Node(s) => s.len(),
            _ => 0,
        }
    }
}

impl fmt::Display for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapId::Node(s) if s.is_empty() => write!(f, "J[root]"),
            GapId::Node(s) => write!(f, "J[{}]", s),
            GapId::FlankLeft => write!(f, "flank-left"),
            GapId::FlankRight => write!(f, "flank-right"),
            GapId::Unit => write!(f, "unit"),
        }
    }
}

/// The exact basic-interval/gap structure truncated at `depth`.
#[derive(Clone, Debug)]
pub struct GapTree {
    pub hull: Option<RatInterval>,
    /// Basic intervals `I_s` for all binary strings with `|s| <= depth`.
    pub basic: BTreeMap<String, RatInterval>,
    /// Gaps `J_s` for `|s| < depth`, plus flank/unit pseudo-gaps.
    pub gaps: BTreeMap<GapId, RatInterval>,
    pub depth: usize,
}

/// Build the tree for `vs`, materializing basic intervals to `depth`.
pub fn build_gap_tree(vs: &ValidatedSet, depth: usize) -> Result<GapTree> {
    if depth == 0 {
        return Err(Error::InvalidArgument("tree depth must be >= 1".into()));
    }
    let mut tree = GapTree {
        hull: vs.hull().cloned(),
        basic: BTreeMap::new(),
        gaps: BTreeMap::new(),
        depth,
    };
    let unit = RatInterval::unit();
    match vs.hull() {
        None => {
            tree.gaps.insert(GapId::Unit, unit);
        }
        Some(hull) => {
            if hull.lo > unit.lo {
                tree.gaps.insert(GapId::FlankLeft, RatInterval::new(unit.lo.clone(), hull.lo.clone()));
            }
            if hull.hi < unit.hi {
                tree.gaps.insert(GapId::FlankRight, RatInterval::new(hull.hi.clone(), unit.hi.clone()));
            }
            build_node(vs, &mut tree, String::new(), hull.clone(), depth)?;
        }
    }
    Ok(tree)
}

fn build_node(vs: &ValidatedSet, tree: &mut GapTree, s: String, iv: RatInterval, depth: usize) -> Result<()> {
    if s.len() < depth {
        let gap = leftmost_longest_component(vs, &iv)?;
        let left = RatInterval::new(iv.lo.clone(), gap.lo.clone());
        let right = RatInterval::new(gap.hi.clone(), iv.hi.clone());
        tree.gaps.insert(GapId::Node(s.clone()), gap);
        build_node(vs, tree, format!("{s}0"), left, depth)?;
        build_node(vs, tree, format!("{s}1"), right, depth)?;
    }
    tree.basic.insert(s, iv);
    Ok(())
}

/// The leftmost longest connected component of `iv \ D`, exactly.
///
/// Candidates of length >= L are materialized for decreasing L; once any are
/// found, all unmaterialized components are shorter, so the maximum is
/// global. `iv` must have both endpoints in D.
fn leftmost_longest_component(vs: &ValidatedSet, iv: &RatInterval) -> Result<RatInterval> {
    let inter = inter_carrier_components(vs);
    let mut min_len = iv.len() * Rat::new(1, 2);
    for _ in 0..300 {
        let mut candidates: Vec<RatInterval> = Vec::new();
        for c in &inter {
            if &c.len() >= &min_len && iv.lo <= c.lo && c.hi <= iv.hi {
                candidates.push(c.clone());
            }
        }
        for part in vs.parts() {
            let mut out = Vec::new();
            part.gaps_within(iv, &min_len, &mut out)?;
            candidates.extend(out.into_iter().map(|(_, g)| g));
        }
        if !candidates.is_empty() {
            let best_len = candidates.iter().map(|c| c.len()).max().unwrap();
            let best = candidates
                .into_iter()
                .filter(|c| c.len() == best_len)
                .min_by(|a, b| a.lo.cmp(&b.lo))
                .unwrap();
            return Ok(best);
        }
        min_len = min_len * Rat::new(1, 4);
    }
    Err(Error::InvalidSpec(format!(
        "no gap found inside {} within the representable depth",
        iv
    )))
}

/// Open intervals between consecutive carriers (components of hull \ D).
fn inter_carrier_components(vs: &ValidatedSet) -> Vec<RatInterval> {
    let mut carriers: Vec<RatInterval> = vs.parts().iter().map(|p| p.carrier.clone()).collect();
    carriers.sort();
    carriers
        .windows(2)
        .filter(|w| w[0].hi < w[1].lo)
        .map(|w| RatInterval::new(w[0].hi.clone(), w[1].lo.clone()))
        .collect()
}

/// Order type of a block of chained components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderType {
    /// 1°: finitely many components.
    Finite,
    /// 2°: isomorphic to -N; isolated points accumulate at the left end.
    ReverseOmega,
    /// 3°: isomorphic to N; isolated points accumulate at the right end.
    Omega,
    /// 4°: isomorphic to Z; accumulation at both ends.
    Zeta,
}

/// One open component `J_{s,(i)}` of a gap minus the countable part.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Component {
    /// 1-based index `i` within the gap (drives the coefficient 2^{-i}).
    pub index: usize,
    pub interval: RatInterval,
    /// Which block of the row the component belongs to.
    pub block: usize,
    /// Chain position within the block: Finite/Omega count 1,2,... from the
    /// left; ReverseOmega counts ...,-2,-1,0 ending right; Zeta is centered
    /// at the anchor component 0.
    pub chain_pos: i64,
}

/// A maximal chain `V_m` of components between accumulation boundaries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Block {
    /// The open span of the block.
    pub span: RatInterval,
    pub order_type: OrderType,
    /// Positions (into `ComponentRow::components`) in left-to-right order.
    pub members: Vec<usize>,
    /// True when an infinite family got cut at the budget on that side.
    pub truncated_left: bool,
    pub truncated_right: bool,
}

/// All components of one gap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentRow {
    pub gap: GapId,
    pub interval: RatInterval,
    pub blocks: Vec<Block>,
    pub components: Vec<Component>,
    pub budget: usize,
}

impl ComponentRow {
    pub fn truncated(&self) -> bool {
        self.blocks.iter().any(|b| b.truncated_left || b.truncated_right)
    }
}

/// Component rows for every gap of a tree.
#[derive(Clone, Debug)]
pub struct ComponentTable {
    pub rows: BTreeMap<GapId, ComponentRow>,
}

impl ComponentTable {
    pub fn build(gt: &GapTree, vs: &ValidatedSet, budget: usize) -> Result<ComponentTable> {
        let mut rows = BTreeMap::new();
        for id in gt.gaps.keys() {
            rows.insert(id.clone(), enumerate_components(gt, vs, id, budget)?);
        }
        Ok(ComponentTable { rows })
    }

    pub fn component(&self, gap: &GapId, index: usize) -> Option<&Component> {
        self.rows
            .get(gap)
            .and_then(|row| row.components.iter().find(|c| c.index == index))
    }
}

/// Enumerate the components of `J \ Q` for the gap `gap`, with blocks and
/// order types. Infinite families are materialized up to `budget` components
/// per accumulating side and flagged as truncated, never silently cut.
pub fn enumerate_components(gt: &GapTree, vs: &ValidatedSet, gap: &GapId, budget: usize) -> Result<ComponentRow> {
    let interval = gt
        .gaps
        .get(gap)
        .ok_or_else(|| Error::UnknownGap { gap: gap.to_string() })?
        .clone();
    let pts = vs.cluster_points_in(&interval);

    // Block boundaries: gap ends plus interior accumulation points.
    let mut bounds = vec![interval.lo.clone()];
    bounds.extend(pts.limits.iter().cloned());
    bounds.push(interval.hi.clone());

    let mut row = ComponentRow {
        gap: gap.clone(),
        interval: interval.clone(),
        blocks: Vec::new(),
        components: Vec::new(),
        budget,
    };

    let mut next_index = 1usize;
    for w in bounds.windows(2) {
        let span = RatInterval::new(w[0].clone(), w[1].clone());
        let block_id = row.blocks.len();

        // Isolated points inside the span.
        let mut xs: Vec<Rat> = pts
            .isolated
            .iter()
            .filter(|p| span.contains_open(p))
            .cloned()
            .collect();

        // Tails anchored at the span boundaries.
        let mut left_acc = false;
        let mut right_acc = false;
        for t in &pts.infinite_tails {
            if t.side > 0 && t.y == span.lo {
                left_acc = true;
                xs.extend(materialize_tail(t, &span, budget));
            } else if t.side < 0 && t.y == span.hi {
                right_acc = true;
                xs.extend(materialize_tail(t, &span, budget));
            }
        }
        xs.sort();
        xs.dedup();

        let order_type = match (left_acc, right_acc) {
            (false, false) => OrderType::Finite,
            (true, false) => OrderType::ReverseOmega,
            (false, true) => OrderType::Omega,
            (true, true) => OrderType::Zeta,
        };

        // Component intervals between consecutive materialized points. On an
        // accumulating side, the interval between the boundary and the first
        // materialized point is not a component (it hides the cut tail).
        let mut cuts = vec![span.lo.clone()];
        cuts.extend(xs.iter().cloned());
        cuts.push(span.hi.clone());
        let mut intervals: Vec<RatInterval> =
            cuts.windows(2).map(|w| RatInterval::new(w[0].clone(), w[1].clone())).collect();
        if left_acc {
            intervals.remove(0);
        }
        if right_acc {
            intervals.pop();
        }
        if intervals.is_empty() {
            return Err(Error::BudgetExhausted { gap: gap.to_string(), budget });
        }

        // Index assignment order per block type; chain positions are fixed
        // by the left-to-right layout.
        let m = intervals.len();
        let anchor = match order_type {
            OrderType::Zeta => {
                let mid = span.midpoint();
                intervals
                    .iter()
                    .position(|iv| iv.contains_closed(&mid))
                    .unwrap_or(m / 2)
            }
            _ => 0,
        };
        let order: Vec<usize> = match order_type {
            OrderType::Finite | OrderType::Omega => (0..m).collect(),
            OrderType::ReverseOmega => (0..m).rev().collect(),
            OrderType::Zeta => {
                let mut o = vec![anchor];
                for d in 1..m {
                    if anchor + d < m {
                        o.push(anchor + d);
                    }
                    if anchor >= d {
                        o.push(anchor - d);
                    }
                }
                o
            }
        };

        let base = row.components.len();
        let mut assigned: Vec<Option<usize>> = vec![None; m];
        for pos in &order {
            assigned[*pos] = Some(next_index);
            next_index += 1;
        }
        let mut members = Vec::with_capacity(m);
        for (pos, iv) in intervals.into_iter().enumerate() {
            let chain_pos = match order_type {
                OrderType::Finite | OrderType::Omega => pos as i64 + 1,
                OrderType::ReverseOmega => pos as i64 - m as i64 + 1,
                OrderType::Zeta => pos as i64 - anchor as i64,
            };
            members.push(base + pos);
            row.components.push(Component {
                index: assigned[pos].unwrap(),
                interval: iv,
                block: block_id,
                chain_pos,
            });
        }

        row.blocks.push(Block {
            span,
            order_type,
            members,
            truncated_left: left_acc,
            truncated_right: right_acc,
        });
    }
    Ok(row)
}

/// Materialize the first points of a tail inside `span`, extending past the
/// budget only as far as needed so the cut remainder stays strictly between
/// the accumulation boundary and the innermost materialized point.
fn materialize_tail(t: &Tail, span: &RatInterval, budget: usize) -> Vec<Rat> {
    let mut pts = Vec::new();
    let mut k = t.k_start;
    loop {
        let p = t.point(k);
        let inside = span.contains_open(&p);
        if inside {
            pts.push(p.clone());
        }
        k += 1;
        if pts.len() >= budget.max(1) {
            // remainder must lie inside the span, next to the boundary
            let next = t.point(k);
            if span.contains_open(&next) {
                break;
            }
        }
        if pts.len() > budget.max(1) + 4096 {
            break;
        }
    }
    pts
}

/// Result of point location against a tree plus component table.
#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    /// The probe is in F.
    InSet(Membership),
    /// Inside a materialized component.
    Component { gap: GapId, index: usize },
    /// Inside a truncated stretch of an infinite family (not in F, but the
    /// containing component was not materialized at this budget).
    Unmaterialized { gap: GapId, block: usize },
}

/// Exact point location, consistent with [`ValidatedSet::membership`].
pub fn locate(gt: &GapTree, ct: &ComponentTable, vs: &ValidatedSet, x: &Rat) -> Result<Location> {
    let m = vs.membership(x)?;
    if m.in_set() {
        return Ok(Location::InSet(m));
    }
    // find the containing gap: flanks/unit first, then descend the tree
    let gap_id = containing_gap(gt, x)?;
    let row = ct
        .rows
        .get(&gap_id)
        .ok_or_else(|| Error::UnknownGap { gap: gap_id.to_string() })?;
    for c in &row.components {
        if c.interval.contains_open(x) {
            return Ok(Location::Component { gap: gap_id, index: c.index });
        }
    }
    for (bi, b) in row.blocks.iter().enumerate() {
        if b.span.contains_open(x) {
            return Ok(Location::Unmaterialized { gap: gap_id, block: bi });
        }
    }
    Err(Error::InvalidSpec(format!(
        "probe {} in gap {} matched no component or block",
        x, gap_id
    )))
}

/// The gap whose open interval contains `x`; `x` must not be in D.
pub fn containing_gap(gt: &GapTree, x: &Rat) -> Result<GapId> {
    for (id, iv) in &gt.gaps {
        if matches!(id, GapId::FlankLeft | GapId::FlankRight | GapId::Unit) && iv.contains_open(x) {
            return Ok(id.clone());
        }
    }
    let mut s = String::new();
    loop {
        if s.len() >= gt.depth {
            return Err(Error::InvalidSpec(format!(
                "probe {} lies below the materialized tree depth {}",
                x, gt.depth
            )));
        }
        let gap = gt
            .gaps
            .get(&GapId::Node(s.clone()))
            .ok_or_else(|| Error::UnknownGap { gap: GapId::Node(s.clone()).to_string() })?;
        if gap.contains_open(x) {
            return Ok(GapId::Node(s));
        }
        s.push(if x <= &gap.lo { '0' } else { '1' });
    }
}

/// Up to two components sharing an endpoint with `c` inside the same block.
pub fn neighbours<'a>(row: &'a ComponentRow, c: &Component) -> (Option<&'a Component>, Option<&'a Component>) {
    let block = &row.blocks[c.block];
    let mut left = None;
    let mut right = None;
    for &m in &block.members {
        let other = &row.components[m];
        if other.interval.hi == c.interval.lo {
            left = Some(other);
        } else if other.interval.lo == c.interval.hi {
            right = Some(other);
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_model::{validate_spec, Direction, PartSpec, SetSpec, XiRule};

    fn ternary_tree(depth: usize) -> (ValidatedSet, GapTree) {
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        let gt = build_gap_tree(&vs, depth).unwrap();
        (vs, gt)
    }

    #[test]
    fn ternary_depth_2_matches_hand_computation() {
        let (_vs, gt) = ternary_tree(2);
        assert_eq!(gt.gaps[&GapId::Node("".into())], RatInterval::new(Rat::new(1, 3), Rat::new(2, 3)));
        assert_eq!(gt.gaps[&GapId::Node("0".into())], RatInterval::new(Rat::new(1, 9), Rat::new(2, 9)));
        assert_eq!(gt.gaps[&GapId::Node("1".into())], RatInterval::new(Rat::new(7, 9), Rat::new(8, 9)));
        assert_eq!(gt.basic["0"], RatInterval::new(Rat::zero(), Rat::new(1, 3)));
        assert_eq!(gt.basic["1"], RatInterval::new(Rat::new(2, 3), Rat::one()));
        assert_eq!(gt.basic["01"], RatInterval::new(Rat::new(2, 9), Rat::new(1, 3)));
        assert!(!gt.gaps.contains_key(&GapId::FlankLeft));
    }

    #[test]
    fn off_unit_carrier_produces_flank_gaps() {
        let spec = SetSpec {
            parts: vec![PartSpec::CentralCantor {
                xi_rule: XiRule::ternary(),
                carrier: RatInterval::new(Rat::new(1, 4), Rat::new(3, 4)),
            }],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 2).unwrap();
        assert_eq!(gt.gaps[&GapId::FlankLeft], RatInterval::new(Rat::zero(), Rat::new(1, 4)));
        assert_eq!(gt.gaps[&GapId::FlankRight], RatInterval::new(Rat::new(3, 4), Rat::one()));
        // scaled root gap: (1/4 + 1/6, 3/4 - 1/6)
        assert_eq!(
            gt.gaps[&GapId::Node("".into())],
            RatInterval::new(Rat::new(5, 12), Rat::new(7, 12))
        );
    }

    #[test]
    fn empty_kernel_degenerates_to_unit_gap() {
        let spec = SetSpec {
            parts: vec![PartSpec::FinitePoints { points: vec![Rat::new(1, 2)] }],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 3).unwrap();
        assert_eq!(gt.gaps.len(), 1);
        assert_eq!(gt.gaps[&GapId::Unit], RatInterval::unit());
        assert!(gt.basic.is_empty());
    }

    #[test]
    fn rebuild_is_deterministic() {
        let (_, a) = ternary_tree(5);
        let (_, b) = ternary_tree(5);
        assert_eq!(a.basic, b.basic);
        assert_eq!(a.gaps, b.gaps);
    }

    #[test]
    fn leftmost_longest_property_exhaustive_depth_6() {
        let (_vs, gt) = ternary_tree(6);
        for (id, gap) in &gt.gaps {
            let s = match id {
                GapId::Node(s) => s,
                _ => continue,
            };
            let iv = &gt.basic[s];
            for (id2, gap2) in &gt.gaps {
                let s2 = match id2 {
                    GapId::Node(s2) => s2,
                    _ => continue,
                };
                if s2.len() > s.len() && s2.starts_with(s.as_str()) {
                    assert!(
                        gap.len() > gap2.len()
                            || (gap.len() == gap2.len() && gap.lo < gap2.lo),
                        "gap {} should dominate {}",
                        id,
                        id2
                    );
                    assert!(iv.contains_interval(gap2));
                }
            }
        }
    }

    #[test]
    fn gaps_are_pairwise_disjoint() {
        let (_vs, gt) = ternary_tree(6);
        let gaps: Vec<&RatInterval> = gt.gaps.values().collect();
        for i in 0..gaps.len() {
            for j in i + 1..gaps.len() {
                assert!(!gaps[i].intersects_open(gaps[j]));
            }
        }
    }

    #[test]
    fn two_part_kernel_splits_at_middle_free_interval() {
        let spec = SetSpec {
            parts: vec![
                PartSpec::CentralCantor {
                    xi_rule: XiRule::ternary(),
                    carrier: RatInterval::new(Rat::zero(), Rat::new(1, 4)),
                },
                PartSpec::CentralCantor {
                    xi_rule: XiRule::ternary(),
                    carrier: RatInterval::new(Rat::new(3, 4), Rat::one()),
                },
            ],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 2).unwrap();
        assert_eq!(
            gt.gaps[&GapId::Node("".into())],
            RatInterval::new(Rat::new(1, 4), Rat::new(3, 4))
        );
        assert_eq!(gt.basic["0"], RatInterval::new(Rat::zero(), Rat::new(1, 4)));
    }

    #[test]
    fn whole_gap_is_single_component_type_finite() {
        let (vs, gt) = ternary_tree(3);
        let row = enumerate_components(&gt, &vs, &GapId::Node("".into()), 64).unwrap();
        assert_eq!(row.components.len(), 1);
        assert_eq!(row.components[0].index, 1);
        assert_eq!(row.components[0].interval, row.interval);
        assert_eq!(row.blocks[0].order_type, OrderType::Finite);
        assert!(!row.truncated());
    }

    #[test]
    fn split_gap_two_components_sharing_the_point() {
        let spec = SetSpec {
            parts: vec![
                PartSpec::CentralCantor { xi_rule: XiRule::ternary(), carrier: RatInterval::unit() },
                PartSpec::FinitePoints { points: vec![Rat::new(1, 2)] },
            ],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 2).unwrap();
        let row = enumerate_components(&gt, &vs, &GapId::Node("".into()), 64).unwrap();
        assert_eq!(row.components.len(), 2);
        assert_eq!(row.components[0].interval, RatInterval::new(Rat::new(1, 3), Rat::new(1, 2)));
        assert_eq!(row.components[1].interval, RatInterval::new(Rat::new(1, 2), Rat::new(2, 3)));
        assert_eq!(row.blocks[0].order_type, OrderType::Finite);
        let (l, r) = neighbours(&row, &row.components[0]);
        assert!(l.is_none());
        assert_eq!(r.unwrap().index, row.components[1].index);
    }

    #[test]
    fn right_side_cluster_gives_reverse_omega_block() {
        // points 1/2 + (1/12) 2^{-k} accumulate at 1/2 from the right
        let spec = SetSpec {
            parts: vec![
                PartSpec::CentralCantor { xi_rule: XiRule::ternary(), carrier: RatInterval::unit() },
                PartSpec::Geometric {
                    y: Rat::new(1, 2),
                    a: Rat::new(1, 12),
                    r: Rat::new(1, 2),
                    direction: Direction::Right,
                },
            ],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 2).unwrap();
        let row = enumerate_components(&gt, &vs, &GapId::Node("".into()), 16).unwrap();
        assert_eq!(row.blocks.len(), 2);
        // left of 1/2: a single whole component (1/3, 1/2)
        assert_eq!(row.blocks[0].order_type, OrderType::Finite);
        assert_eq!(row.components[row.blocks[0].members[0]].interval,
            RatInterval::new(Rat::new(1, 3), Rat::new(1, 2)));
        // right of 1/2: reverse-omega, truncated on the left
        let b = &row.blocks[1];
        assert_eq!(b.order_type, OrderType::ReverseOmega);
        assert!(b.truncated_left);
        assert!(!b.truncated_right);
        assert!(b.members.len() >= 16);
        // rightmost component is (7/12, 2/3)
        let last = &row.components[*b.members.last().unwrap()];
        assert_eq!(last.interval, RatInterval::new(Rat::new(7, 12), Rat::new(2, 3)));
        assert_eq!(last.chain_pos, 0);
        // consecutive members share exactly one endpoint
        for w in b.members.windows(2) {
            let a = &row.components[w[0]];
            let c = &row.components[w[1]];
            assert_eq!(a.interval.hi, c.interval.lo);
            assert_eq!(
                vs.membership(&a.interval.hi).unwrap(),
                Membership::IsolatedPoint
            );
        }
    }

    #[test]
    fn both_side_cluster_gives_zeta_block() {
        let spec = SetSpec {
            parts: vec![PartSpec::Geometric {
                y: Rat::new(1, 2),
                a: Rat::new(1, 8),
                r: Rat::new(1, 2),
                direction: Direction::Both,
            }],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 1).unwrap();
        let row = enumerate_components(&gt, &vs, &GapId::Unit, 8).unwrap();
        // blocks: (0, 1/2) and (1/2, 1)
        assert_eq!(row.blocks.len(), 2);
        assert_eq!(row.blocks[0].order_type, OrderType::Omega);
        assert_eq!(row.blocks[1].order_type, OrderType::ReverseOmega);
    }

    #[test]
    fn interior_limit_splits_blocks_zeta_when_tails_from_both_sides() {
        // two clusters approaching 1/2 from both sides within (0,1), no kernel
        let spec = SetSpec {
            parts: vec![PartSpec::Geometric {
                y: Rat::new(1, 2),
                a: Rat::new(1, 8),
                r: Rat::new(1, 2),
                direction: Direction::Both,
            },
            PartSpec::FinitePoints { points: vec![Rat::new(49, 50)] }],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 1).unwrap();
        let row = enumerate_components(&gt, &vs, &GapId::Unit, 8).unwrap();
        // 1/2 is an interior limit: the blocks meet at it
        assert_eq!(row.blocks[0].span.hi, Rat::new(1, 2));
        assert_eq!(row.blocks[1].span.lo, Rat::new(1, 2));
        // rightmost block contains the extra isolated point 49/50
        let b1 = &row.blocks[1];
        assert!(b1.members.len() >= 2);
    }

    #[test]
    fn locate_agrees_with_membership_on_random_rationals() {
        let spec = SetSpec {
            parts: vec![
                PartSpec::CentralCantor { xi_rule: XiRule::ternary(), carrier: RatInterval::unit() },
                PartSpec::Geometric {
                    y: Rat::new(1, 2),
                    a: Rat::new(1, 12),
                    r: Rat::new(1, 2),
                    direction: Direction::Right,
                },
            ],
        };
        let vs = validate_spec(&spec).unwrap();
        let gt = build_gap_tree(&vs, 6).unwrap();
        let ct = ComponentTable::build(&gt, &vs, 32).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut checked = 0;
        for _ in 0..10_000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let denom = 1 + (state % 4096) as i64;
            let numer = ((state >> 17) % (denom as u64 + 1)) as i64;
            let x = Rat::new(numer, denom);
            let m = vs.membership(&x).unwrap();
            match locate(&gt, &ct, &vs, &x) {
                Ok(Location::InSet(m2)) => assert_eq!(m, m2),
                Ok(Location::Component { .. }) | Ok(Location::Unmaterialized { .. }) => {
                    assert_eq!(m, Membership::Outside)
                }
                Err(_) => {
                    // probe below tree depth: must still be outside F or kernel-deep
                    assert!(matches!(m, Membership::Outside | Membership::InKernel { .. }));
                }
            }
            checked += 1;
        }
        assert_eq!(checked, 10_000);
    }

    #[test]
    fn unknown_gap_is_an_error() {
        let (vs, gt) = ternary_tree(2);
        let err = enumerate_components(&gt, &vs, &GapId::Node("000000".into()), 4);
        assert!(matches!(err, Err(Error::UnknownGap { .. })));
    }
}

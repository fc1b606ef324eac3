//! File formats: set specs and built functions as JSON, samples as CSV.
//!
//! Rationals travel as `"p/q"` strings everywhere, so a save/load round trip
//! reproduces endpoints bit for bit. Function files embed the originating
//! set spec and are revalidated on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::evaluator::eval_rational;
use crate::function_builder::{Construction, PiecewiseFunction, SignedBumpTerm};
use crate::rat::Rat;
use crate::set_model::{validate_spec_at, SetSpec};
use crate::Result;

pub const FUNCTION_FORMAT: &str = "cutset-function-v1";

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    format: String,
    construction: Construction,
    depth: usize,
    budget: usize,
    truncated: bool,
    set_depth: usize,
    zero_set: SetSpec,
    deviations: Vec<String>,
    terms: Vec<SignedBumpTerm>,
}

pub fn load_spec(path: &Path) -> Result<SetSpec> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_spec(spec: &SetSpec, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(spec)?)?;
    Ok(())
}

pub fn save_function(pf: &PiecewiseFunction, path: &Path) -> Result<()> {
    let file = FunctionFile {
        format: FUNCTION_FORMAT.into(),
        construction: pf.construction.clone(),
        depth: pf.depth,
        budget: pf.budget,
        truncated: pf.truncated,
        set_depth: pf.zero_set.depth(),
        zero_set: pf.zero_set.spec().clone(),
        deviations: pf.deviations(),
        terms: pf.terms.clone(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_function(path: &Path) -> Result<PiecewiseFunction> {
    let text = fs::read_to_string(path)?;
    let file: FunctionFile = serde_json::from_str(&text)?;
    if file.format != FUNCTION_FORMAT {
        return Err(crate::Error::InvalidArgument(format!(
            "unsupported function file format {:?}",
            file.format
        )));
    }
    let vs = validate_spec_at(&file.zero_set, file.set_depth)?;
    let pf = PiecewiseFunction {
        terms: file.terms,
        zero_set: vs,
        construction: file.construction,
        depth: file.depth,
        budget: file.budget,
        truncated: file.truncated,
    };
    pf.assert_invariants();
    Ok(pf)
}

/// Exact sample grid: i/grid for i = 0..=grid plus refinement points near
/// every support boundary (all rational, so classification is exact and the
/// grid is stable under doubling).
pub fn sample_grid(pf: &PiecewiseFunction, grid: usize) -> Vec<Rat> {
    let mut xs: Vec<Rat> = (0..=grid as i64).map(|i| Rat::new(i, grid as i64)).collect();
    for t in &pf.terms {
        let len = t.support.len();
        for denom in [64i64, 256] {
            let d = &len * &Rat::new(1, denom);
            xs.push(&t.support.lo + &d);
            xs.push(&t.support.hi - &d);
        }
        xs.push(t.support.midpoint());
    }
    xs.retain(|x| x >= &Rat::zero() && x <= &Rat::one());
    xs.sort();
    xs.dedup();
    xs
}

/// CSV with header `x,f0,...,fP`, evaluated on the exact sample grid.
pub fn sample_csv(pf: &PiecewiseFunction, grid: usize, orders: usize) -> Result<String> {
    let xs = sample_grid(pf, grid);
    let mut out = String::from("x");
    for p in 0..=orders {
        out.push_str(&format!(",f{}", p));
    }
    out.push('\n');
    for x in &xs {
        out.push_str(&format!("{}", x.to_f64()));
        for p in 0..=orders {
            let v: f64 = eval_rational::<f64>(pf, x, p)?.value;
            out.push_str(&format!(",{}", v));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_builder::build_prescribed_cutset;
    use crate::set_model::{validate_spec, Direction, PartSpec, SetSpec, XiRule};
    use crate::rat::RatInterval;

    fn mixed_spec() -> SetSpec {
        SetSpec {
            parts: vec![
                PartSpec::CentralCantor { xi_rule: XiRule::ternary(), carrier: RatInterval::unit() },
                PartSpec::Geometric {
                    y: Rat::new(1, 2),
                    a: Rat::new(1, 12),
                    r: Rat::new(1, 2),
                    direction: Direction::Right,
                },
                PartSpec::FinitePoints { points: vec![Rat::new(1, 6)] },
            ],
        }
    }

    #[test]
    fn spec_json_round_trip_preserves_rationals() {
        let spec = mixed_spec();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"1/12\""));
        assert!(text.contains("central_cantor"));
        let back: SetSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn function_file_round_trip_is_bit_identical() {
        let dir = std::env::temp_dir().join("cutset-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let vs = validate_spec(&mixed_spec()).unwrap();
        let pf = build_prescribed_cutset(&vs, 5, 12).unwrap();
        let path = dir.join("f.json");
        save_function(&pf, &path).unwrap();
        let back = load_function(&path).unwrap();
        assert_eq!(pf.terms.len(), back.terms.len());
        // bit-identical evaluation on a thousand probes
        let mut state = 0x51a9_c0deu64;
        for _ in 0..1000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let denom = 1 + (state % 9973) as i64;
            let numer = ((state >> 20) % (denom as u64 + 1)) as i64;
            let x = Rat::new(numer, denom);
            let a: f64 = eval_rational::<f64>(&pf, &x, 2).unwrap().value;
            let b: f64 = eval_rational::<f64>(&back, &x, 2).unwrap().value;
            assert!(a == b || (a.is_nan() && b.is_nan()), "x = {}: {} vs {}", x, a, b);
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_format_is_rejected() {
        let dir = std::env::temp_dir().join("cutset-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"format":"something-else"}"#).unwrap();
        assert!(load_function(&path).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_zero_rows_on_the_set_and_stable_under_doubling() {
        let vs = validate_spec(&SetSpec::ternary()).unwrap();
        let pf = build_prescribed_cutset(&vs, 3, 8).unwrap();
        let csv = sample_csv(&pf, 3, 0).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,f0");
        // x = 0 and x = 1 are in the set: f0 exactly 0
        for line in csv.lines().skip(1) {
            let mut parts = line.split(',');
            let x: f64 = parts.next().unwrap().parse().unwrap();
            let f0: f64 = parts.next().unwrap().parse().unwrap();
            if x == 0.0 || x == 1.0 {
                assert_eq!(f0, 0.0);
            }
        }
        // doubling the grid keeps shared abscissas identical
        let coarse = sample_csv(&pf, 8, 1).unwrap();
        let fine = sample_csv(&pf, 16, 1).unwrap();
        let fine_rows: std::collections::HashMap<&str, &str> = fine
            .lines()
            .skip(1)
            .map(|l| (l.split_once(',').unwrap().0, l))
            .collect();
        for row in coarse.lines().skip(1) {
            let (x, _) = row.split_once(',').unwrap();
            assert_eq!(fine_rows.get(x).copied().unwrap(), row, "row for x = {}", x);
        }
    }
}

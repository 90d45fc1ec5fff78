//! The refinement partial order on splittings, essentiality and maximality.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::splitting::Splitting;

/// Threshold policy for deciding whether a numeric matrix product is zero.
///
/// Masked parts carry exact copies of the source entries, so products that
/// vanish structurally come out as exact floating zeros: `Exact` is the
/// right default. `Scaled` guards accumulated rounding when the source
/// entries were themselves computed (the threshold is
/// `eps * ||later||_inf * ||earlier||_inf`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ProductTolerance {
    #[default]
    Exact,
    Scaled(f64),
}

impl ProductTolerance {
    pub fn scaled() -> Self {
        ProductTolerance::Scaled(1e-14)
    }

    fn threshold(&self, later: &Matrix, earlier: &Matrix) -> f64 {
        match self {
            ProductTolerance::Exact => 0.0,
            ProductTolerance::Scaled(eps) => eps * later.inf_norm() * earlier.inf_norm(),
        }
    }

    /// Whether the numeric product `later * earlier` is nonzero.
    pub fn product_nonzero(&self, later: &Matrix, earlier: &Matrix) -> bool {
        later.matmul(earlier).max_abs() > self.threshold(later, earlier)
    }
}

/// Evidence that one splitting refines another in a single step: the shift
/// pair under which the defining conditions hold, the (0-based) index of the
/// coarse part that was divided, and, for multi-step refinements, the chain
/// of intermediate splittings.
#[derive(Debug, Clone)]
pub struct OrderWitness {
    pub coarse_shift: usize,
    pub fine_shift: usize,
    pub split_index: usize,
    pub chain: Option<Vec<Splitting>>,
}

/// One-step refinement test.
///
/// Searches every shift pair `r` in `0..=d-1` of the coarse splitting and
/// `s` in `0..=d` of the fine one (all rotations of either tuple) and
/// returns a witness for the first pair under which: the leading `d-1`
/// shifted parts agree, the last coarse part equals the sum of the two last
/// fine parts, and the numeric product (last fine) * (second-to-last fine)
/// is nonzero.
pub fn refinement_step(
    fine: &Splitting,
    coarse: &Splitting,
    tol: ProductTolerance,
) -> Result<Option<OrderWitness>> {
    if fine.order() != coarse.order() + 1 {
        return Err(Error::InvalidSplitting(format!(
            "one-step refinement needs orders d+1 and d, got {} and {}",
            fine.order(),
            coarse.order()
        )));
    }
    if !fine.same_source(coarse) {
        return Err(Error::SourceMismatch);
    }
    let d = coarse.order();
    for r in 0..d {
        let shifted_coarse = coarse.cyclic_shift(r);
        for s in 0..=d {
            let shifted_fine = fine.cyclic_shift(s);
            if step_conditions_hold(&shifted_fine, &shifted_coarse, tol) {
                return Ok(Some(OrderWitness {
                    coarse_shift: r,
                    fine_shift: s,
                    // The divided coarse part sits last after r shifts,
                    // i.e. at original position d-1-r (mod d).
                    split_index: (d - 1 + d - r) % d,
                    chain: None,
                }));
            }
        }
    }
    Ok(None)
}

fn step_conditions_hold(fine: &Splitting, coarse: &Splitting, tol: ProductTolerance) -> bool {
    let d = coarse.order();
    for p in 0..d - 1 {
        if fine.part(p) != coarse.part(p) {
            return false;
        }
    }
    // Disjoint supports make the sum exact, so equality can be literal.
    let merged = fine.part(d - 1).add(fine.part(d));
    if &merged != coarse.part(d - 1) {
        return false;
    }
    tol.product_nonzero(fine.part(d), fine.part(d - 1))
}

/// Verify a caller-supplied chain of intermediate splittings connecting
/// `coarse` to `fine` one order at a time. An empty chain delegates to the
/// one-step test. Any violation (orders not consecutive, differing sources,
/// a failing step) yields `false`.
pub fn verify_refinement_chain(
    fine: &Splitting,
    coarse: &Splitting,
    chain: &[Splitting],
    tol: ProductTolerance,
) -> bool {
    let mut sequence: Vec<&Splitting> = Vec::with_capacity(chain.len() + 2);
    sequence.push(coarse);
    sequence.extend(chain.iter());
    sequence.push(fine);
    for pair in sequence.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi.order() != lo.order() + 1 {
            return false;
        }
        match refinement_step(hi, lo, tol) {
            Ok(Some(_)) => {}
            _ => return false,
        }
    }
    true
}

/// The canonical telescoping chain from the order-1 splitting of the source
/// down to `fine`: element `p` groups the tail parts `p..d` into one.
/// Returns splittings of orders `1..=d` (endpoints included).
pub fn telescoping_chain(fine: &Splitting) -> Vec<Splitting> {
    let d = fine.order();
    let mut chain = Vec::with_capacity(d);
    for order in 1..=d {
        let mut parts: Vec<Matrix> = fine.parts()[..order - 1].to_vec();
        let mut tail = fine.part(order - 1).clone();
        for q in order..d {
            tail = tail.add(fine.part(q));
        }
        parts.push(tail);
        chain.push(Splitting::new(parts).expect("telescoped parts stay disjoint and nonzero"));
    }
    chain
}

/// Multi-step refinement through the canonical telescoping route: succeeds
/// when, modulo rotations of both tuples, `coarse` groups consecutive runs
/// of `fine`'s parts and every telescoping step passes the one-step test.
/// Returns the verified chain of intermediates (orders between the two).
pub fn refinement_via_telescoping(
    fine: &Splitting,
    coarse: &Splitting,
    tol: ProductTolerance,
) -> Result<Option<Vec<Splitting>>> {
    if !fine.same_source(coarse) {
        return Err(Error::SourceMismatch);
    }
    if fine.order() <= coarse.order() {
        return Ok(None);
    }
    if fine.order() == coarse.order() + 1 {
        return Ok(refinement_step(fine, coarse, tol)?.map(|_| Vec::new()));
    }
    for s in 0..fine.order() {
        let f = fine.cyclic_shift(s);
        for r in 0..coarse.order() {
            let c = coarse.cyclic_shift(r);
            if let Some(chain) = try_contiguous_chain(&f, &c, tol) {
                return Ok(Some(chain));
            }
        }
    }
    Ok(None)
}

fn try_contiguous_chain(
    fine: &Splitting,
    coarse: &Splitting,
    tol: ProductTolerance,
) -> Option<Vec<Splitting>> {
    // Align coarse parts with consecutive runs of fine parts.
    let mut runs: Vec<(usize, usize)> = Vec::with_capacity(coarse.order());
    let mut start = 0;
    for q in 0..coarse.order() {
        let target = coarse.part(q);
        if start >= fine.order() {
            return None;
        }
        let mut acc = fine.part(start).clone();
        let mut end = start + 1;
        loop {
            if &acc == target {
                runs.push((start, end));
                start = end;
                break;
            }
            if end >= fine.order() {
                return None;
            }
            acc = acc.add(fine.part(end));
            end += 1;
        }
    }
    if start != fine.order() {
        return None;
    }
    let build = |groups: &[(usize, usize)]| -> Splitting {
        let parts: Vec<Matrix> = groups
            .iter()
            .map(|&(a, b)| {
                let mut m = fine.part(a).clone();
                for q in a + 1..b {
                    m = m.add(fine.part(q));
                }
                m
            })
            .collect();
        Splitting::new(parts).expect("runs of disjoint nonzero parts stay disjoint and nonzero")
    };
    // Split one fine part off the leftmost unfinished run at a time.
    let mut groups = runs;
    let mut current = build(&groups);
    let mut chain: Vec<Splitting> = Vec::new();
    while let Some(pos) = groups.iter().position(|&(a, b)| b - a > 1) {
        let (a, b) = groups[pos];
        groups.splice(pos..=pos, [(a, a + 1), (a + 1, b)]);
        let next = build(&groups);
        match refinement_step(&next, &current, tol) {
            Ok(Some(_)) => {}
            _ => return None,
        }
        chain.push(next.clone());
        current = next;
    }
    // The loop ends with `current == fine`; keep only the intermediates.
    chain.pop();
    Some(chain)
}

/// A splitting is essential when every cyclically consecutive numeric
/// product (next part) * (part) is nonzero, wrap-around pair included.
/// Order-1 splittings are essential.
pub fn is_essential(s: &Splitting, tol: ProductTolerance) -> bool {
    let d = s.order();
    if d == 1 {
        return true;
    }
    (0..d).all(|p| tol.product_nonzero(s.part((p + 1) % d), s.part(p)))
}

/// A splitting is maximal when no part admits a one-step subdivision, i.e.
/// no part contains two distinct entries at positions (i, k) and (k, j):
/// putting the (k, j) entry alone in the earlier sub-part would make the
/// (rest) * (singleton) product nonzero through the exact term
/// B[i][k] * B[k][j].
pub fn is_maximal(s: &Splitting) -> bool {
    s.parts().iter().all(|part| !part_admits_split(part))
}

fn part_admits_split(part: &Matrix) -> bool {
    let n = part.rows();
    for k in 0..n {
        let col_entries: Vec<usize> = (0..n).filter(|&i| part.at(i, k) != 0.0).collect();
        if col_entries.is_empty() {
            continue;
        }
        let row_entries: Vec<usize> = (0..n).filter(|&j| part.at(k, j) != 0.0).collect();
        if row_entries.is_empty() {
            continue;
        }
        // Only a lone diagonal entry serving as both ends fails distinctness.
        if col_entries == [k] && row_entries == [k] {
            continue;
        }
        return true;
    }
    false
}

/// Essential and maximal.
pub fn is_potentially_optimal(s: &Splitting, tol: ProductTolerance) -> bool {
    is_essential(s, tol) && is_maximal(s)
}

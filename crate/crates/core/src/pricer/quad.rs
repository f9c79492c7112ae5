//! Adaptive refinement driver shared by all pricing forms.
//!
//! A partition over forced nodes (payoff kinks, curve grid strikes, domain
//! ends) is refined in rounds: each round compares the partition's value
//! with its midpoint refinement and, if they disagree by more than the
//! tolerance, bisects every cell whose local two-level error exceeds its
//! equidistributed share. Before the rounds start, cells wider than 1/64 of
//! the integration span are subdivided unconditionally; without that, a
//! feature of the curve narrower than a forced cell can sit between the
//! probe points of both refinement levels and the comparison converges on
//! the wrong value. Cells are kept in ascending order throughout and summed
//! with compensated accumulation, so the result is deterministic.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::market::CallCurve;
use crate::math::kahan_sum;

use super::PriceError;

/// Memoizing wrapper for the (possibly expensive) call curve. Keyed on the
/// exact bit pattern of the strike, so repeated partition nodes are
/// evaluated once.
pub(crate) struct CachedCurve<'a> {
    inner: &'a dyn CallCurve,
    lambda: RefCell<BTreeMap<u64, f64>>,
}

impl<'a> CachedCurve<'a> {
    pub fn new(inner: &'a dyn CallCurve) -> Self {
        Self {
            inner,
            lambda: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn lambda(&self, a: f64) -> f64 {
        let key = a.to_bits();
        if let Some(&v) = self.lambda.borrow().get(&key) {
            return v;
        }
        let v = self.inner.lambda(a);
        self.lambda.borrow_mut().insert(key, v);
        v
    }
}

/// Result of one adaptive integration.
#[derive(Debug)]
pub(crate) struct QuadOutcome {
    /// Value on the midpoint refinement of the final partition.
    pub value: f64,
    /// Ascending nodes of the partition `value` was computed on: the leaf
    /// edges of the final partition plus every leaf midpoint. Re-summing
    /// `cell` over consecutive pairs reproduces `value` up to summation
    /// rounding, which lets callers price several curves on one shared
    /// partition.
    pub nodes: Vec<f64>,
    /// Cell count of that partition, `nodes.len() − 1`.
    pub cells: usize,
}

struct Leaf {
    a: f64,
    b: f64,
    coarse: f64,
    left: f64,
    right: f64,
    err: f64,
}

fn midpoint(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

fn make_leaf(a: f64, b: f64, coarse: f64, cell: &mut dyn FnMut(f64, f64) -> f64) -> Leaf {
    let m = midpoint(a, b);
    let (left, right) = if m > a && m < b {
        (cell(a, m), cell(m, b))
    } else {
        // Degenerate width: no interior midpoint representable.
        (coarse, 0.0)
    };
    let err = libm::fabs(left + right - coarse);
    Leaf {
        a,
        b,
        coarse,
        left,
        right,
        err,
    }
}

/// Width below which a cell is never bisected.
fn unsplittable(a: f64, b: f64) -> bool {
    b - a <= 1e-13 * libm::fabs(b).max(1.0)
}

/// Seed cell count: no cell enters the adaptive rounds wider than
/// `span / MIN_SEED_CELLS`.
const MIN_SEED_CELLS: f64 = 64.0;

/// Integrates `cell` over the forced partition, bisecting until two
/// successive refinement levels agree within `tol` or the cell budget is
/// exhausted. `forced` must be strictly increasing with at least two
/// entries.
pub(crate) fn adaptive_refine(
    forced: &[f64],
    tol: f64,
    max_cells: usize,
    cell: &mut dyn FnMut(f64, f64) -> f64,
) -> Result<QuadOutcome, PriceError> {
    debug_assert!(forced.len() >= 2);
    debug_assert!(forced.windows(2).all(|w| w[0] < w[1]));

    let mut leaves: Vec<Leaf> = forced
        .windows(2)
        .map(|w| {
            let coarse = cell(w[0], w[1]);
            make_leaf(w[0], w[1], coarse, cell)
        })
        .collect();

    let min_width = (forced[forced.len() - 1] - forced[0]) / MIN_SEED_CELLS;
    loop {
        if leaves.len() >= max_cells {
            break;
        }
        let mut next = Vec::with_capacity(leaves.len());
        let mut split_any = false;
        for leaf in leaves {
            if leaf.b - leaf.a > min_width && !unsplittable(leaf.a, leaf.b) {
                let m = midpoint(leaf.a, leaf.b);
                next.push(make_leaf(leaf.a, m, leaf.left, cell));
                next.push(make_leaf(m, leaf.b, leaf.right, cell));
                split_any = true;
            } else {
                next.push(leaf);
            }
        }
        leaves = next;
        if !split_any {
            break;
        }
    }

    loop {
        // Flat half-cell order: re-summing the cells over `nodes` after
        // convergence reproduces this value bit for bit.
        let fine_total = kahan_sum(leaves.iter().flat_map(|l| [l.left, l.right]));
        let coarse_total = kahan_sum(leaves.iter().map(|l| l.coarse));
        let delta = libm::fabs(fine_total - coarse_total);
        if delta <= tol {
            let mut nodes = Vec::with_capacity(2 * leaves.len() + 1);
            nodes.push(leaves[0].a);
            for l in &leaves {
                let m = midpoint(l.a, l.b);
                if m > l.a && m < l.b {
                    nodes.push(m);
                }
                nodes.push(l.b);
            }
            let cells = nodes.len() - 1;
            return Ok(QuadOutcome {
                value: fine_total,
                nodes,
                cells,
            });
        }
        if leaves.len() >= max_cells {
            return Err(PriceError::QuadratureNoConvergence(format!(
                "refinement levels still differ by {delta:.3e} (tolerance {tol:.3e}) \
                 at the budget of {max_cells} cells"
            )));
        }

        // Every cell below its equidistributed error share can stay; if no
        // cell exceeds the share, the totals would already have agreed.
        let share = 0.5 * tol / leaves.len() as f64;
        let mut next = Vec::with_capacity(leaves.len() + 16);
        let mut split_any = false;
        for leaf in leaves {
            if leaf.err > share && !unsplittable(leaf.a, leaf.b) {
                let m = midpoint(leaf.a, leaf.b);
                next.push(make_leaf(leaf.a, m, leaf.left, cell));
                next.push(make_leaf(m, leaf.b, leaf.right, cell));
                split_any = true;
            } else {
                next.push(leaf);
            }
        }
        if !split_any {
            return Err(PriceError::QuadratureNoConvergence(format!(
                "refinement levels differ by {delta:.3e} (tolerance {tol:.3e}) but every \
                 remaining cell is at the width floor"
            )));
        }
        leaves = next;
    }
}

//! The groups `G1 = SO-(2,q)`, `G2 = O-(2,q)` and `G3 = SO-(4,q)`.
//!
//! `O-(2n,q)` is the group of `w` with `w^t J w = J`, where
//!
//! ```text
//!     [ 0  1  0  0  ]
//! J = [ 1  0  0  0  ]      (n = 2; for n = 1 only the lower 2x2 block,
//!     [ 0  0  1  0  ]       diag(1, -eps), remains)
//!     [ 0  0  0 -eps]
//! ```
//!
//! and `eps` is the field's fixed nonsquare. Elements are always listed in
//! ascending row-major order of their entry indices; the codes module takes
//! its coordinate order from this.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::charsums::{delta_count, delta_one_by_cases};
use crate::error::{Error, Result};
use crate::gf3r::{FieldContext, FieldElement};
use crate::limits::{pow_sat, WorkLimits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    /// SO-(2,q)
    So2,
    /// O-(2,q)
    O2,
    /// SO-(4,q)
    So4,
}

impl GroupId {
    pub const ALL: [GroupId; 3] = [GroupId::So2, GroupId::O2, GroupId::So4];

    pub fn name(self) -> &'static str {
        match self {
            GroupId::So2 => "so2",
            GroupId::O2 => "o2",
            GroupId::So4 => "so4",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            GroupId::So2 => "SO-(2,q)",
            GroupId::O2 => "O-(2,q)",
            GroupId::So4 => "SO-(4,q)",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            GroupId::So2 | GroupId::O2 => 2,
            GroupId::So4 => 4,
        }
    }

    /// `q + 1`, `2(q + 1)` and `q^2 (q^4 - 1)`.
    pub fn order(self, q: u32) -> u128 {
        let q = q as u128;
        match self {
            GroupId::So2 => q + 1,
            GroupId::O2 => 2 * (q + 1),
            GroupId::So4 => q * q * (q.pow(4) - 1),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so2" | "g1" => Ok(GroupId::So2),
            "o2" | "g2" => Ok(GroupId::O2),
            "so4" | "g3" => Ok(GroupId::So4),
            _ => Err(Error::Parse(format!("unknown group {s:?} (expected so2, o2 or so4)"))),
        }
    }
}

/// `|O-(2n,q)| = 2 q^(n^2-n) (q^n + 1) prod_{j<n} (q^2j - 1)`.
pub fn orthogonal_order(n: u32, q: u32) -> u128 {
    2 * special_orthogonal_order(n, q)
}

/// `|SO-(2n,q)| = q^(n^2-n) (q^n + 1) prod_{j<n} (q^2j - 1)`.
pub fn special_orthogonal_order(n: u32, q: u32) -> u128 {
    let q = q as u128;
    let mut acc = q.pow(n * n - n) * (q.pow(n) + 1);
    for j in 1..n {
        acc *= q.pow(2 * j) - 1;
    }
    acc
}

/// A square matrix over the field, row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroupElement {
    pub dim: usize,
    pub entries: Vec<FieldElement>,
}

impl GroupElement {
    pub fn new(dim: usize, entries: Vec<FieldElement>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        GroupElement { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![FieldElement::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = FieldElement::ONE;
        }
        GroupElement { dim, entries }
    }

    pub fn diag(values: &[FieldElement]) -> Self {
        let mut m = Self::identity(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.dim + j]
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let entries = (0..d * d).map(|k| self.get(k % d, k / d)).collect();
        GroupElement { dim: d, entries }
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim);
        let mut entries = vec![FieldElement::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = FieldElement::ZERO;
                for k in 0..d {
                    s = ctx.add(s, ctx.mul(self.get(i, k), other.get(k, j)));
                }
                entries[i * d + j] = s;
            }
        }
        GroupElement { dim: d, entries }
    }

    pub fn trace(&self, ctx: &FieldContext) -> FieldElement {
        (0..self.dim).fold(FieldElement::ZERO, |s, i| ctx.add(s, self.get(i, i)))
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, ctx: &FieldContext) -> FieldElement {
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut det = FieldElement::ONE;
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| !m[r * d + col].is_zero()) else {
                return FieldElement::ZERO;
            };
            if piv != col {
                for c in 0..d {
                    m.swap(piv * d + c, col * d + c);
                }
                det = ctx.neg(det);
            }
            let p = m[col * d + col];
            det = ctx.mul(det, p);
            let p_inv = ctx.inv(p).expect("pivot is nonzero");
            for row in col + 1..d {
                let f = ctx.mul(m[row * d + col], p_inv);
                if f.is_zero() {
                    continue;
                }
                for c in col..d {
                    let v = ctx.sub(m[row * d + c], ctx.mul(f, m[col * d + c]));
                    m[row * d + c] = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self, ctx: &FieldContext) -> Option<Self> {
        let d = self.dim;
        let w = 2 * d;
        let mut m = vec![FieldElement::ZERO; d * w];
        for i in 0..d {
            for j in 0..d {
                m[i * w + j] = self.get(i, j);
            }
            m[i * w + d + i] = FieldElement::ONE;
        }
        for col in 0..d {
            let piv = (col..d).find(|&r| !m[r * w + col].is_zero())?;
            for c in 0..w {
                m.swap(piv * w + c, col * w + c);
            }
            let p_inv = ctx.inv(m[col * w + col]).ok()?;
            for c in 0..w {
                m[col * w + c] = ctx.mul(m[col * w + c], p_inv);
            }
            for row in 0..d {
                if row == col {
                    continue;
                }
                let f = m[row * w + col];
                if f.is_zero() {
                    continue;
                }
                for c in 0..w {
                    let v = ctx.sub(m[row * w + c], ctx.mul(f, m[col * w + c]));
                    m[row * w + c] = v;
                }
            }
        }
        let entries = (0..d * d).map(|k| m[(k / d) * w + d + k % d]).collect();
        Some(GroupElement { dim: d, entries })
    }

    /// Whether `w^t form w = form`.
    pub fn preserves(&self, ctx: &FieldContext, form: &GroupElement) -> bool {
        self.transpose().mul(ctx, form).mul(ctx, self) == *form
    }
}

/// `delta_eps = diag(1, -eps)`.
pub fn delta_eps(ctx: &FieldContext) -> GroupElement {
    GroupElement::diag(&[FieldElement::ONE, ctx.neg(ctx.epsilon())])
}

/// `delta_1 = diag(1, -1)`.
pub fn delta_one(ctx: &FieldContext) -> GroupElement {
    GroupElement::diag(&[FieldElement::ONE, ctx.neg(FieldElement::ONE)])
}

/// The form `J` of `O-(2n,q)` for `n = 1, 2`.
pub fn form_matrix(ctx: &FieldContext, n: usize) -> GroupElement {
    let d = 2 * n;
    let mut j = GroupElement::identity(d);
    j.entries.iter_mut().for_each(|e| *e = FieldElement::ZERO);
    for i in 0..n - 1 {
        j.entries[i * d + (n - 1 + i)] = FieldElement::ONE;
        j.entries[(n - 1 + i) * d + i] = FieldElement::ONE;
    }
    let base = 2 * (n - 1);
    j.entries[base * d + base] = FieldElement::ONE;
    j.entries[(base + 1) * d + base + 1] = ctx.neg(ctx.epsilon());
    j
}

/// Whether `w` lies in the given group.
pub fn is_member(ctx: &FieldContext, id: GroupId, w: &GroupElement) -> bool {
    if w.dim != id.dim() || !w.preserves(ctx, &form_matrix(ctx, id.dim() / 2)) {
        return false;
    }
    match id {
        GroupId::O2 => true,
        GroupId::So2 | GroupId::So4 => w.det(ctx) == FieldElement::ONE,
    }
}

/// Counts of group elements per trace value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHistogram {
    pub counts: Vec<u128>,
}

impl TraceHistogram {
    pub fn zeros(q: u32) -> Self {
        TraceHistogram { counts: vec![0; q as usize] }
    }

    pub fn from_traces<I: IntoIterator<Item = FieldElement>>(q: u32, traces: I) -> Self {
        let mut h = Self::zeros(q);
        for t in traces {
            h.counts[t.index()] += 1;
        }
        h
    }

    pub fn get(&self, beta: FieldElement) -> u128 {
        self.counts[beta.index()]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// `(beta, count)` for every `beta`, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, u128)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (FieldElement(i as u32), c))
    }

    pub fn to_map(&self) -> BTreeMap<u32, u128> {
        self.iter().map(|(b, c)| (b.0, c)).collect()
    }
}

/// A full listing of a group in canonical order.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub group: GroupId,
    pub elements: Vec<GroupElement>,
    pub histogram: TraceHistogram,
}

impl Enumeration {
    fn new(ctx: &FieldContext, group: GroupId, mut elements: Vec<GroupElement>) -> Self {
        elements.sort();
        let histogram = TraceHistogram::from_traces(ctx.q(), elements.iter().map(|w| w.trace(ctx)));
        Enumeration { group, elements, histogram }
    }

    pub fn traces(&self, ctx: &FieldContext) -> Vec<FieldElement> {
        self.elements.iter().map(|w| w.trace(ctx)).collect()
    }
}

/// Estimated cost of enumerating `id`: the parameter plane for the 2x2
/// groups, the full matrix space `q^16` for `SO-(4,q)`.
pub fn enumeration_cost(ctx: &FieldContext, id: GroupId) -> u128 {
    let q = ctx.q() as u128;
    match id {
        GroupId::So2 | GroupId::O2 => q * q,
        GroupId::So4 => pow_sat(q, 16),
    }
}

/// Lists every element of `id` in canonical order.
pub fn enumerate_group(ctx: &FieldContext, id: GroupId, limits: &WorkLimits) -> Result<Enumeration> {
    limits.check(
        &format!("enumerating {} over GF({})", id.display_name(), ctx.q()),
        enumeration_cost(ctx, id),
        "use the closed-form histogram instead (groups histogram)",
    )?;
    let elements = match id {
        GroupId::So2 => so2_elements(ctx),
        GroupId::O2 => {
            let so2 = so2_elements(ctx);
            let d1 = delta_one(ctx);
            let coset: Vec<_> = so2.iter().map(|w| d1.mul(ctx, w)).collect();
            so2.into_iter().chain(coset).collect()
        }
        GroupId::So4 => isometries_by_rows(ctx, &form_matrix(ctx, 2))
            .into_iter()
            .filter(|w| w.det(ctx) == FieldElement::ONE)
            .collect(),
    };
    let e = Enumeration::new(ctx, id, elements);
    let expected = id.order(ctx.q());
    if e.elements.len() as u128 != expected {
        return Err(Error::Consistency(format!(
            "{} over GF({}) has {} elements, expected {expected}",
            id.display_name(),
            ctx.q(),
            e.elements.len()
        )));
    }
    Ok(e)
}

/// `[[a, b eps], [b, a]]` for every solution of `a^2 - eps b^2 = 1`.
fn so2_elements(ctx: &FieldContext) -> Vec<GroupElement> {
    let eps = ctx.epsilon();
    let mut out = Vec::new();
    for a in ctx.elements() {
        for b in ctx.elements() {
            let norm = ctx.sub(ctx.mul(a, a), ctx.mul(eps, ctx.mul(b, b)));
            if norm == FieldElement::ONE {
                out.push(GroupElement::new(2, vec![a, ctx.mul(b, eps), b, a]));
            }
        }
    }
    out
}

/// Every `w` with `w^t J w = J`, found row by row in lexicographic order.
///
/// `w^t J w = J` is equivalent to `w J^-1 w^t = J^-1`, a condition on pairs
/// of rows, so a partial matrix is abandoned as soon as its rows fail it.
/// The search covers the full matrix space, so the result is complete.
pub fn isometries_by_rows(ctx: &FieldContext, form: &GroupElement) -> Vec<GroupElement> {
    let d = form.dim;
    let m = form.inverse(ctx).expect("the form is nondegenerate");
    let q = ctx.q() as usize;
    let count = q.pow(d as u32);
    // vector k has entry 0 as its most significant base-q digit
    let vectors: Vec<Vec<FieldElement>> = (0..count)
        .map(|mut k| {
            let mut v = vec![FieldElement::ZERO; d];
            for slot in v.iter_mut().rev() {
                *slot = FieldElement((k % q) as u32);
                k /= q;
            }
            v
        })
        .collect();
    // m v^t for every v, so that pairing is a single dot product
    let images: Vec<Vec<FieldElement>> = vectors
        .iter()
        .map(|v| {
            (0..d)
                .map(|i| {
                    (0..d).fold(FieldElement::ZERO, |s, j| ctx.add(s, ctx.mul(m.get(i, j), v[j])))
                })
                .collect()
        })
        .collect();
    let dot = |u: &[FieldElement], v: &[FieldElement]| {
        u.iter()
            .zip(v)
            .fold(FieldElement::ZERO, |s, (&a, &b)| ctx.add(s, ctx.mul(a, b)))
    };
    let by_row: Vec<Vec<usize>> = (0..d)
        .map(|i| {
            (0..count)
                .filter(|&k| dot(&vectors[k], &images[k]) == m.get(i, i))
                .collect()
        })
        .collect();

    fn extend(
        rows: &mut Vec<usize>,
        d: usize,
        by_row: &[Vec<usize>],
        fits: &dyn Fn(usize, usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = rows.len();
        if i == d {
            out.push(rows.clone());
            return;
        }
        for &cand in &by_row[i] {
            if rows.iter().enumerate().all(|(j, &prev)| fits(prev, cand, j * d + i)) {
                rows.push(cand);
                extend(rows, d, by_row, fits, out);
                rows.pop();
            }
        }
    }

    let fits = |prev: usize, cand: usize, slot: usize| {
        dot(&vectors[prev], &images[cand]) == m.entries[slot]
    };
    let found: Vec<Vec<Vec<usize>>> = by_row[0]
        .par_iter()
        .map(|&first| {
            let mut out = Vec::new();
            extend(&mut vec![first], d, &by_row, &fits, &mut out);
            out
        })
        .collect();
    found
        .into_iter()
        .flatten()
        .map(|rows| {
            let entries = rows.iter().flat_map(|&k| vectors[k].iter().copied()).collect();
            GroupElement::new(d, entries)
        })
        .collect()
}

/// Result of the exhaustive 4x4 matrix scan.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub scanned: u128,
    pub orthogonal: u128,
    pub histogram: TraceHistogram,
}

/// Tests every 4x4 matrix over the field against `w^t J w = J` and
/// `det w = 1`. Only feasible for `q = 3` (3^16 matrices).
pub fn scan_so4_exhaustive(ctx: &FieldContext, limits: &WorkLimits) -> Result<ScanResult> {
    let q = ctx.q() as usize;
    let space = pow_sat(q as u128, 16);
    limits.check("exhaustive SO-(4,q) matrix scan", space, "only q = 3 is practical")?;
    let form = form_matrix(ctx, 2);
    // nonzero entries of J as (k, l, J_kl)
    let terms: Vec<(usize, usize, FieldElement)> = (0..4)
        .flat_map(|k| (0..4).map(move |l| (k, l)))
        .filter_map(|(k, l)| {
            let v = form.get(k, l);
            (!v.is_zero()).then_some((k, l, v))
        })
        .collect();

    // entries 0 and 1 fix a chunk; the remaining 14 run as an odometer
    let chunks: Vec<(u128, u128, Vec<u128>)> = (0..q * q)
        .into_par_iter()
        .map(|chunk| {
            let mut w = [FieldElement::ZERO; 16];
            w[0] = FieldElement((chunk / q) as u32);
            w[1] = FieldElement((chunk % q) as u32);
            let mut scanned = 0u128;
            let mut hits = 0u128;
            let mut hist = vec![0u128; q];
            loop {
                scanned += 1;
                if is_isometry4(ctx, &w, &terms, &form) {
                    hits += 1;
                    let m = GroupElement::new(4, w.to_vec());
                    if m.det(ctx) == FieldElement::ONE {
                        hist[m.trace(ctx).index()] += 1;
                    }
                }
                // odometer over entries 2..16, last entry fastest
                let mut pos = 15;
                loop {
                    let next = w[pos].0 + 1;
                    if (next as usize) < q {
                        w[pos] = FieldElement(next);
                        break;
                    }
                    w[pos] = FieldElement::ZERO;
                    if pos == 2 {
                        return (scanned, hits, hist);
                    }
                    pos -= 1;
                }
            }
        })
        .collect();

    let mut histogram = TraceHistogram::zeros(ctx.q());
    let mut scanned = 0;
    let mut orthogonal = 0;
    for (s, h, hist) in chunks {
        scanned += s;
        orthogonal += h;
        for (slot, c) in histogram.counts.iter_mut().zip(hist) {
            *slot += c;
        }
    }
    Ok(ScanResult { scanned, orthogonal, histogram })
}

/// `(w^t J w)_{ij} = sum_{k,l} w_ki J_kl w_lj`, checked entry by entry with
/// early exit.
#[inline]
fn is_isometry4(
    ctx: &FieldContext,
    w: &[FieldElement; 16],
    terms: &[(usize, usize, FieldElement)],
    form: &GroupElement,
) -> bool {
    for i in 0..4 {
        for j in i..4 {
            let mut s = FieldElement::ZERO;
            for &(k, l, v) in terms {
                s = ctx.add(s, ctx.mul(ctx.mul(w[k * 4 + i], v), w[l * 4 + j]));
            }
            if s != form.get(i, j) {
                return false;
            }
        }
    }
    true
}

/// `n_i(beta)` from the closed forms in terms of `delta(1)` and `delta(2)`.
pub fn histogram_closed_form(ctx: &FieldContext, id: GroupId) -> Result<TraceHistogram> {
    let q = ctx.q() as u128;
    let minus_one = ctx.neg(FieldElement::ONE);
    let classify = |beta: FieldElement| ctx.sub(ctx.mul(beta, beta), FieldElement::ONE);
    let counts: Vec<u128> = match id {
        GroupId::So2 => {
            let d1 = delta_one_by_cases(ctx);
            ctx.elements().map(|b| 2 - d1.get(b)).collect()
        }
        GroupId::O2 if ctx.r().is_multiple_of(2) => ctx
            .elements()
            .map(|b| {
                let disc = classify(b);
                if disc == minus_one {
                    q + 1
                } else if disc.is_zero() {
                    1
                } else if ctx.is_square(disc) {
                    0
                } else {
                    2
                }
            })
            .collect(),
        GroupId::O2 => ctx
            .elements()
            .map(|b| {
                let disc = classify(b);
                if disc.is_zero() {
                    1
                } else if ctx.is_square(disc) {
                    0
                } else if disc != minus_one {
                    2
                } else {
                    q + 3
                }
            })
            .collect(),
        GroupId::So4 => {
            let d2 = delta_count(ctx, 2)?;
            let q = q as i128;
            let q2 = q * q;
            ctx.elements()
                .map(|b| {
                    let d = d2.get(b) as i128;
                    let v = if b.is_zero() {
                        -q2 * d + q2 * q2 + 2 * q2 * q - 3 * q2
                    } else {
                        -q2 * d + q2 * q2 * q + q2 * q2 + q2 * q - 3 * q2
                    };
                    u128::try_from(v).map_err(|_| {
                        Error::Consistency(format!("negative trace count {v} at beta={b}"))
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let h = TraceHistogram { counts };
    if h.total() != id.order(ctx.q()) {
        return Err(Error::Consistency(format!(
            "closed-form histogram of {} sums to {}, expected {}",
            id.display_name(),
            h.total(),
            id.order(ctx.q())
        )));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(r: u32) -> FieldContext {
        FieldContext::with_default(r).unwrap()
    }

    fn hist(v: &[u128]) -> TraceHistogram {
        TraceHistogram { counts: v.to_vec() }
    }

    #[test]
    fn orders_from_general_formula() {
        for q in [3u32, 9, 27] {
            assert_eq!(special_orthogonal_order(1, q), GroupId::So2.order(q));
            assert_eq!(orthogonal_order(1, q), GroupId::O2.order(q));
            assert_eq!(special_orthogonal_order(2, q), GroupId::So4.order(q));
            assert_eq!(orthogonal_order(2, q), 2 * special_orthogonal_order(2, q));
        }
        assert_eq!(GroupId::So4.order(3), 720);
    }

    #[test]
    fn so2_over_f3() {
        let f = field(1);
        let e = enumerate_group(&f, GroupId::So2, &WorkLimits::default()).unwrap();
        assert_eq!(e.elements.len(), 4);
        let mut traces: Vec<u32> = e.traces(&f).iter().map(|t| t.0).collect();
        // canonical order is ascending entry tuples
        assert_eq!(traces, vec![0, 0, 2, 1]);
        traces.sort();
        assert_eq!(traces, vec![0, 0, 1, 2]);
        assert_eq!(e.histogram, hist(&[2, 1, 1]));
    }

    #[test]
    fn o2_over_f3() {
        let f = field(1);
        let e = enumerate_group(&f, GroupId::O2, &WorkLimits::default()).unwrap();
        assert_eq!(e.elements.len(), 8);
        assert_eq!(e.histogram, hist(&[6, 1, 1]));
        assert!(e.elements.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn closed_forms_over_f3() {
        let f = field(1);
        assert_eq!(histogram_closed_form(&f, GroupId::So2).unwrap(), hist(&[2, 1, 1]));
        assert_eq!(histogram_closed_form(&f, GroupId::O2).unwrap(), hist(&[6, 1, 1]));
        assert_eq!(histogram_closed_form(&f, GroupId::So4).unwrap(), hist(&[90, 315, 315]));
    }

    #[test]
    fn so4_over_f3_by_rows() {
        let f = field(1);
        let e = enumerate_group(&f, GroupId::So4, &WorkLimits::default()).unwrap();
        assert_eq!(e.elements.len(), 720);
        assert_eq!(e.histogram, hist(&[90, 315, 315]));
        assert!(e.elements.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn so4_beyond_f3_needs_budget() {
        let f = field(2);
        let err = enumerate_group(&f, GroupId::So4, &WorkLimits::default()).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
        assert!(err.to_string().contains("closed-form"));
    }

    #[test]
    fn enumeration_matches_closed_form_small_fields() {
        for r in 1..=4 {
            let f = field(r);
            for id in [GroupId::So2, GroupId::O2] {
                let e = enumerate_group(&f, id, &WorkLimits::default()).unwrap();
                assert_eq!(e.histogram, histogram_closed_form(&f, id).unwrap(), "{id} r={r}");
            }
        }
    }

    #[test]
    fn parameterisation_agrees_with_row_search() {
        for r in 1..=3 {
            let f = field(r);
            let o2 = enumerate_group(&f, GroupId::O2, &WorkLimits::default()).unwrap();
            let rows = isometries_by_rows(&f, &delta_eps(&f));
            assert_eq!(o2.elements, rows, "r={r}");
            let so2 = enumerate_group(&f, GroupId::So2, &WorkLimits::default()).unwrap();
            let det_one: Vec<_> = rows.into_iter().filter(|w| w.det(&f) == FieldElement::ONE).collect();
            assert_eq!(so2.elements, det_one);
        }
    }

    #[test]
    fn members_satisfy_relations_and_close_under_products() {
        let limits = WorkLimits::default();
        for (r, id) in [(1, GroupId::So2), (2, GroupId::O2), (1, GroupId::So4), (3, GroupId::So2)] {
            let f = field(r);
            let e = enumerate_group(&f, id, &limits).unwrap();
            for w in &e.elements {
                assert!(is_member(&f, id, w));
            }
            let n = e.elements.len();
            for k in 0..50 {
                let a = &e.elements[(k * 7) % n];
                let b = &e.elements[(k * 13 + 5) % n];
                assert!(is_member(&f, id, &a.mul(&f, b)));
            }
        }
    }

    #[test]
    fn coset_elements_have_zero_trace() {
        for r in 1..=3 {
            let f = field(r);
            let so2 = enumerate_group(&f, GroupId::So2, &WorkLimits::default()).unwrap();
            let d1 = delta_one(&f);
            for w in &so2.elements {
                let c = d1.mul(&f, w);
                assert_eq!(c.trace(&f), FieldElement::ZERO);
                assert!(is_member(&f, GroupId::O2, &c));
                assert!(!is_member(&f, GroupId::So2, &c));
            }
        }
    }

    #[test]
    fn det_and_inverse() {
        let f = field(2);
        let j = form_matrix(&f, 2);
        let inv = j.inverse(&f).unwrap();
        assert_eq!(j.mul(&f, &inv), GroupElement::identity(4));
        // det J = -1 * 1 * (-eps) = eps
        assert_eq!(j.det(&f), f.epsilon());
        let singular = GroupElement::new(2, vec![FieldElement(1); 4]);
        assert_eq!(singular.det(&f), FieldElement::ZERO);
        assert!(singular.inverse(&f).is_none());
    }

    #[test]
    fn so4_closed_form_totals() {
        for r in 1..=4 {
            let f = field(r);
            let h = histogram_closed_form(&f, GroupId::So4).unwrap();
            assert_eq!(h.total(), GroupId::So4.order(f.q()));
            assert!(h.counts.iter().all(|&c| c > 0));
        }
    }

    #[test]
    fn parse_group_names() {
        assert_eq!("so4".parse::<GroupId>().unwrap(), GroupId::So4);
        assert_eq!("O2".parse::<GroupId>().unwrap(), GroupId::O2);
        assert!("sp4".parse::<GroupId>().is_err());
    }
}

//! Gauss sums `sum_{w in G} psi(Tr w)` for the orthogonal groups.
//!
//! Every nontrivial additive character is `psi(x) = lambda(a x)` for a unique
//! nonzero `a`. Under that substitution the Kloosterman sum `K(psi; 1)`
//! appearing in the closed forms equals `K(lambda; a^2)`, and likewise
//! `K_GL(t)(psi; 1) = K_GL(t)(lambda; a^2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::charsums::{kloosterman, weighted_character_sum};
use crate::error::{Error, Result};
use crate::gf3r::{FieldContext, FieldElement};
use crate::limits::{pow_sat, WorkLimits};
use crate::ogroups::{enumerate_group, GroupElement, GroupId, TraceHistogram};

/// `[n choose r]_q = prod_{j<r} (q^(n-j) - 1) / (q^(r-j) - 1)`.
pub fn q_binomial(n: i64, r: i64, q: u64) -> Result<BigInt> {
    if r < 0 || r > n {
        return Err(Error::Domain(format!("q-binomial needs 0 <= r <= n, got n={n}, r={r}")));
    }
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..r {
        num *= q.pow((n - j) as u32) - 1;
        den *= q.pow((r - j) as u32) - 1;
    }
    if !(&num % &den).is_zero() {
        return Err(Error::Consistency(format!("q-binomial [{n} {r}]_q is not integral")));
    }
    Ok(num / den)
}

/// `prod_{j=1}^{m} (q^(2j-1) - 1)`.
fn odd_power_product(q: &BigInt, m: u32) -> BigInt {
    (1..=m).map(|j| q.pow(2 * j - 1) - 1).product()
}

/// The sum of `psi(Tr delta_eps h^t B h)` over nonsingular symmetric r x r
/// `B` and all `h` in `F_q^{r x 2}`, in closed form. `b_0 = 1`.
pub fn b_r_closed(r: u32, q: u64) -> BigInt {
    let qb = BigInt::from(q);
    if r.is_multiple_of(2) {
        qb.pow(r * (r + 6) / 4) * odd_power_product(&qb, r / 2)
    } else {
        -(qb.pow((r * r + 4 * r - 1) / 4) * odd_power_product(&qb, r.div_ceil(2)))
    }
}

/// `K_GL(t)` from the three-term recursion, given `K = K_GL(1)`.
pub fn kloosterman_gl_from(k: &BigInt, t: u32, q: u64) -> BigInt {
    let q = BigInt::from(q);
    let mut prev = BigInt::one(); // t - 2
    if t == 0 {
        return prev;
    }
    let mut cur = k.clone(); // t - 1
    for s in 2..=t {
        let next = q.pow(s - 1) * &cur * k + q.pow(2 * s - 2) * (q.pow(s - 1) - 1) * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `K_GL(t,q)(lambda; a) = sum_{w in GL(t,q)} lambda(Tr w + a Tr w^-1)`.
pub fn kloosterman_gl(ctx: &FieldContext, t: u32, a: FieldElement) -> Result<BigInt> {
    let k = kloosterman(ctx, a)?;
    Ok(kloosterman_gl_from(&BigInt::from(k), t, ctx.q() as u64))
}

/// `K_GL(t)` by summing over an explicit listing of `GL(t,q)`, `t <= 2`.
pub fn kloosterman_gl_enumerated(
    ctx: &FieldContext,
    t: u32,
    a: FieldElement,
    limits: &WorkLimits,
) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::Domain("Kloosterman sum needs a nonzero argument".into()));
    }
    let mut acc = crate::charsums::OmegaSum::default();
    for w in general_linear(ctx, t, limits)? {
        let inv = w.inverse(ctx).expect("invertible");
        let s = ctx.add(w.trace(ctx), ctx.mul(a, inv.trace(ctx)));
        acc.push(ctx.trace(s));
    }
    Ok(BigInt::from(acc.to_integer()?))
}

/// Every invertible t x t matrix in ascending row-major order, `t <= 2`.
pub fn general_linear(ctx: &FieldContext, t: u32, limits: &WorkLimits) -> Result<Vec<GroupElement>> {
    if t > 2 {
        return Err(Error::Capacity(format!("GL({t},q) listing is only provided for t <= 2")));
    }
    let q = ctx.q() as u128;
    limits.check("GL(t,q) listing", pow_sat(q, t * t), "")?;
    let t = t as usize;
    if t == 0 {
        return Ok(vec![GroupElement::new(0, Vec::new())]);
    }
    let cells = t * t;
    let total = (ctx.q() as usize).pow(cells as u32);
    let mut out = Vec::new();
    for mut k in 0..total {
        let mut entries = vec![FieldElement::ZERO; cells];
        for slot in entries.iter_mut().rev() {
            *slot = FieldElement((k % ctx.q() as usize) as u32);
            k /= ctx.q() as usize;
        }
        let m = GroupElement::new(t, entries);
        if !m.det(ctx).is_zero() {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    So,
    O,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so" => Ok(Variant::So),
            "o" => Ok(Variant::O),
            _ => Err(Error::Parse(format!("unknown variant {s:?} (expected so or o)"))),
        }
    }
}

/// A Gauss sum of `SO-(2n,q)` or `O-(2n,q)` with `psi = lambda(a .)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussSumRequest {
    pub n: u32,
    pub variant: Variant,
    pub a: FieldElement,
}

impl GaussSumRequest {
    pub fn for_group(id: GroupId, a: FieldElement) -> Self {
        let (n, variant) = match id {
            GroupId::So2 => (1, Variant::So),
            GroupId::O2 => (1, Variant::O),
            GroupId::So4 => (2, Variant::So),
        };
        GaussSumRequest { n, variant, a }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("Gauss sums need n >= 1".into()));
        }
        if self.n > 20 {
            return Err(Error::Capacity(format!("n={} exceeds the supported n <= 20", self.n)));
        }
        if self.a.is_zero() {
            return Err(Error::Domain("the character scale a must be nonzero".into()));
        }
        Ok(())
    }
}

/// Closed form of the Gauss sum in terms of `K = K(lambda; a^2)`.
pub fn gauss_sum_closed(ctx: &FieldContext, req: &GaussSumRequest) -> Result<BigInt> {
    req.validate()?;
    let qu = ctx.q() as u64;
    let q = BigInt::from(qu);
    let k = BigInt::from(kloosterman(ctx, ctx.mul(req.a, req.a))?);
    let n = req.n;
    let mut even = BigInt::zero();
    let mut odd = BigInt::zero();
    for r in 0..n {
        let kgl = kloosterman_gl_from(&k, n - 1 - r, qu);
        let binom = q_binomial((n - 1) as i64, r as i64, qu)?;
        if r % 2 == 0 {
            even += binom * q.pow(r * n - r * r / 4) * odd_power_product(&q, r / 2) * kgl;
        } else {
            odd += binom * q.pow(r * n - (r + 1) * (r + 1) / 4) * odd_power_product(&q, r.div_ceil(2)) * kgl;
        }
    }
    let lead = q.pow((n - 1) * (n + 2) / 2);
    Ok(match req.variant {
        Variant::So => -(lead * (&k * even + (&q + 1u32) * odd)),
        Variant::O => lead * (-&k + &q + 1u32) * (even - odd),
    })
}

/// The same Gauss sum assembled from `b_r` and the coset counts
/// `|B_r \ Q| = [n-1 choose r]_q q^(r(r+3)/2)`, before simplification.
pub fn gauss_sum_from_b_r(ctx: &FieldContext, req: &GaussSumRequest) -> Result<BigInt> {
    req.validate()?;
    let qu = ctx.q() as u64;
    let q = BigRational::from_integer(BigInt::from(qu));
    let k = BigInt::from(kloosterman(ctx, ctx.mul(req.a, req.a))?);
    let n = req.n as i64;
    // sums of psi(Tr i) and psi(Tr delta_1 i) over SO-(2,q)
    let so2_plain = BigRational::from_integer(-k.clone());
    let so2_twisted = BigRational::from_integer(BigInt::from(qu + 1));
    let mut even = BigRational::zero();
    let mut odd = BigRational::zero();
    for r in 0..n {
        let cosets = BigRational::from_integer(q_binomial(n - 1, r, qu)?) * q.pow((r * (r + 3) / 2) as i32);
        let term = cosets
            * q.pow((r * (n - r - 3)) as i32)
            * BigRational::from_integer(b_r_closed(r as u32, qu))
            * BigRational::from_integer(kloosterman_gl_from(&k, (n - 1 - r) as u32, qu));
        if r % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
    }
    let lead = q.pow(((n - 1) * (n + 2) / 2) as i32);
    let value = match req.variant {
        Variant::So => lead * (so2_plain * even + so2_twisted * odd),
        Variant::O => lead * (so2_plain + so2_twisted) * (even + odd),
    };
    if !value.is_integer() {
        return Err(Error::Consistency(format!("Gauss sum {value} is not an integer")));
    }
    Ok(value.to_integer())
}

/// `sum_beta n(beta) lambda(a beta)`.
pub fn gauss_sum_from_histogram(
    ctx: &FieldContext,
    hist: &TraceHistogram,
    a: FieldElement,
) -> Result<BigInt> {
    let weights: Vec<(FieldElement, BigInt)> = hist.iter().map(|(b, c)| (b, BigInt::from(c))).collect();
    weighted_character_sum(ctx, a, weights.iter().map(|(b, c)| (*b, c))).to_integer()
}

/// `sum_{w in G} lambda(a Tr w)` over an explicit enumeration of `G`.
pub fn gauss_sum_enumerated(
    ctx: &FieldContext,
    id: GroupId,
    a: FieldElement,
    limits: &WorkLimits,
) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::Domain("the character scale a must be nonzero".into()));
    }
    let e = enumerate_group(ctx, id, limits)?;
    gauss_sum_from_histogram(ctx, &e.histogram, a)
}

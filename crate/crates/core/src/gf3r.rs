//! Arithmetic in GF(3^r).
//!
//! An element is stored as its canonical index: the coefficient vector
//! `(c_0, .., c_{r-1})` of `c_0 + c_1 x + .. + c_{r-1} x^{r-1}` read as a
//! base-3 integer with `c_0` the least significant digit. Index 0 is the
//! additive identity and index 1 the multiplicative identity.
//!
//! Multiplication goes through log/antilog tables built once per context.
//! Addition splits each index into a low and a high half and looks both up
//! in a small digit-wise addition table.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 12;

/// Irreducible moduli shipped for r = 1..=8, ascending coefficients.
const DEFAULT_MODULI: [&[u8]; 8] = [
    &[0, 1],
    &[2, 2, 1],
    &[1, 2, 0, 1],
    &[2, 0, 0, 2, 1],
    &[1, 2, 0, 0, 0, 1],
    &[2, 2, 1, 0, 2, 0, 1],
    &[1, 0, 2, 0, 0, 0, 0, 1],
    &[2, 2, 2, 0, 1, 2, 0, 0, 1],
];

/// A polynomial over F_3 with coefficients in ascending degree order.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly3(Vec<u8>);

impl Poly3 {
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut v: Vec<u8> = coeffs.iter().map(|c| c.rem_euclid(3) as u8).collect();
        trim(&mut v);
        Poly3(v)
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.0
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last() == Some(&1)
    }

    /// Remainder of `self` modulo `divisor` (which must be nonzero).
    pub fn rem(&self, divisor: &Poly3) -> Poly3 {
        let d = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.0.clone();
        // leading coefficient is 1 or 2, and both are self-inverse mod 3
        let lead_inv = divisor.0[d];
        while rem.len() > d {
            let top = rem.len() - 1;
            let factor = (rem[top] * lead_inv) % 3;
            if factor != 0 {
                let shift = top - d;
                for (i, &c) in divisor.0.iter().enumerate() {
                    rem[shift + i] = (rem[shift + i] + 3 - (factor * c) % 3) % 3;
                }
            }
            rem.pop();
            trim(&mut rem);
        }
        trim(&mut rem);
        Poly3(rem)
    }

    /// Irreducibility over F_3 by trial division against every monic
    /// polynomial of degree 1..=deg/2.
    pub fn is_irreducible(&self) -> bool {
        let Some(deg) = self.degree() else {
            return false;
        };
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            for low in 0..3usize.pow(d as u32) {
                let mut c = digits(low as u32, d);
                c.push(1);
                if Poly3(c).rem_is_zero(self) {
                    return false;
                }
            }
        }
        true
    }

    fn rem_is_zero(&self, dividend: &Poly3) -> bool {
        dividend.rem(self).0.is_empty()
    }
}

fn trim(v: &mut Vec<u8>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// The `len` base-3 digits of `x`, least significant first.
fn digits(mut x: u32, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % 3) as u8);
        x /= 3;
    }
    out
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c, i) {
                (_, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (_, 1) => write!(f, "{c}x")?,
                (1, _) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly3({self})")
    }
}

/// Parses either a comma/space separated coefficient list in ascending
/// degree order (`"2,2,1"`) or an expression in `x` (`"x^2+2x+2"`).
impl FromStr for Poly3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('x') || s.contains('X') {
            parse_expression(s)
        } else {
            let coeffs = s
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {t:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if coeffs.is_empty() {
                return Err(Error::Parse("empty polynomial".into()));
            }
            Ok(Poly3::from_coeffs(&coeffs))
        }
    }
}

fn parse_expression(s: &str) -> Result<Poly3> {
    let bad = || Error::Parse(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.to_lowercase();
    let mut terms = Vec::new();
    let mut current = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !current.is_empty() {
            terms.push(std::mem::take(&mut current));
        }
        current.push(ch);
    }
    if !current.is_empty() {
        terms.push(current);
    }
    let mut coeffs: Vec<i64> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coef, power) = match body.find('x') {
            None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let coef = if head.is_empty() {
                    1
                } else {
                    head.parse::<i64>().map_err(|_| bad())?
                };
                let tail = &body[pos + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')
                        .ok_or_else(bad)?
                        .parse::<usize>()
                        .map_err(|_| bad())?
                };
                (coef, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] += sign * coef;
    }
    Ok(Poly3::from_coeffs(&coeffs))
}

/// The shipped modulus for `r`, if any.
pub fn default_modulus(r: u32) -> Option<Poly3> {
    let idx = (r as usize).checked_sub(1)?;
    DEFAULT_MODULI
        .get(idx)
        .map(|c| Poly3(c.to_vec()))
}

/// An element of some GF(3^r), by canonical index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field GF(3^r) for one fixed irreducible modulus.
///
/// Immutable after construction; share it freely between threads.
#[derive(Clone)]
pub struct FieldContext {
    r: u32,
    q: u32,
    modulus: Poly3,
    half_digits: u32,
    half_base: u32,
    add_half: Vec<u32>,
    neg: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u8>,
    generator: FieldElement,
    squares: Vec<FieldElement>,
    epsilon: FieldElement,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FieldContext {
    /// Builds GF(3^r), using the shipped modulus when `modulus` is `None`.
    pub fn new(r: u32, modulus: Option<Poly3>) -> Result<Self> {
        if r == 0 || r > MAX_DEGREE {
            return Err(Error::Field(format!(
                "extension degree r={r} unsupported (need 1 <= r <= {MAX_DEGREE})"
            )));
        }
        let modulus = match modulus {
            Some(m) => m,
            None => default_modulus(r).ok_or_else(|| {
                Error::Field(format!("no default modulus for r={r}; pass one explicitly"))
            })?,
        };
        if modulus.degree() != Some(r as usize) || !modulus.is_monic() {
            return Err(Error::Field(format!(
                "modulus {modulus} is not monic of degree {r}"
            )));
        }
        if !modulus.is_irreducible() {
            return Err(Error::Field(format!(
                "modulus {modulus} is reducible over F_3"
            )));
        }
        Ok(Self::build(r, modulus))
    }

    /// Shorthand for `new(r, None)`.
    pub fn with_default(r: u32) -> Result<Self> {
        Self::new(r, None)
    }

    fn build(r: u32, modulus: Poly3) -> Self {
        let q = 3u32.pow(r);
        let half_digits = r.div_ceil(2);
        let half_base = 3u32.pow(half_digits);
        let mut add_half = vec![0u32; (half_base * half_base) as usize];
        for x in 0..half_base {
            let dx = digits(x, half_digits as usize);
            for y in 0..half_base {
                let dy = digits(y, half_digits as usize);
                let s: Vec<u8> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % 3).collect();
                add_half[(x * half_base + y) as usize] = encode(&s);
            }
        }
        let neg = (0..q)
            .map(|x| {
                let d: Vec<u8> = digits(x, r as usize).iter().map(|c| (3 - c) % 3).collect();
                encode(&d)
            })
            .collect();

        let mut ctx = FieldContext {
            r,
            q,
            modulus,
            half_digits,
            half_base,
            add_half,
            neg,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            generator: FieldElement::ONE,
            squares: Vec::new(),
            epsilon: FieldElement::ZERO,
        };

        let g = ctx.find_generator();
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; q as usize];
        let mut cur = FieldElement::ONE;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = cur.0;
            log[cur.index()] = i as u32;
            cur = ctx.mul_schoolbook(cur, g);
        }
        debug_assert_eq!(cur, FieldElement::ONE);
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        ctx.exp = exp;
        ctx.log = log;
        ctx.generator = g;

        // trace is F_3-linear: evaluate it on the basis x^i by the Frobenius
        // sum and extend digit by digit
        let basis_traces: Vec<u8> = (0..r)
            .map(|i| ctx.trace_frobenius(FieldElement(3u32.pow(i))))
            .collect();
        ctx.trace = (0..q)
            .map(|x| {
                digits(x, r as usize)
                    .iter()
                    .zip(&basis_traces)
                    .map(|(d, t)| (d * t) as u32)
                    .sum::<u32>() as u8
                    % 3
            })
            .collect();

        ctx.squares = (1..q)
            .map(FieldElement)
            .filter(|&x| ctx.log[x.index()].is_multiple_of(2))
            .collect();
        ctx.epsilon = (1..q)
            .map(FieldElement)
            .find(|&x| ctx.log[x.index()] % 2 == 1)
            .expect("F_q^* has nonsquares for odd q");
        ctx
    }

    fn find_generator(&self) -> FieldElement {
        let order = (self.q - 1) as u64;
        if order == 1 {
            return FieldElement::ONE;
        }
        let primes = prime_factors(order);
        (2..self.q)
            .map(FieldElement)
            .find(|&g| {
                primes
                    .iter()
                    .all(|&p| self.pow_schoolbook(g, order / p) != FieldElement::ONE)
            })
            .expect("the multiplicative group of a finite field is cyclic")
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &Poly3 {
        &self.modulus
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Validates an index against this field.
    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::Domain(format!(
                "index {index} is not an element of GF({})",
                self.q
            )))
        }
    }

    /// The image of an integer under Z -> F_3 -> F_q.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(3) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let b = self.half_base;
        let (xl, xh) = (x.0 % b, x.0 / b);
        let (yl, yh) = (y.0 % b, y.0 / b);
        let lo = self.add_half[(xl * b + yl) as usize];
        let hi = self.add_half[(xh * b + yh) as usize];
        FieldElement(lo + b * hi)
    }

    #[inline]
    pub fn neg(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.neg[x.index()])
    }

    #[inline]
    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[x.index()] + self.log[y.index()]) as usize])
    }

    /// Multiplies by an integer scalar through F_3.
    #[inline]
    pub fn scale(&self, k: u8, x: FieldElement) -> FieldElement {
        match k % 3 {
            0 => FieldElement::ZERO,
            1 => x,
            _ => self.neg(x),
        }
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.0 == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let order = self.q - 1;
        let l = self.log[x.index()];
        Ok(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e`, with `0^0 = 1`.
    pub fn pow(&self, x: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if x.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[x.index()] as u64 * (e % order)) % order;
        FieldElement(self.exp[l as usize])
    }

    /// Absolute trace to F_3, as 0, 1 or 2.
    #[inline]
    pub fn trace(&self, x: FieldElement) -> u8 {
        self.trace[x.index()]
    }

    /// Discrete log to the base [`Self::generator`]. `None` for zero.
    pub fn log(&self, x: FieldElement) -> Option<u32> {
        (x.0 != 0).then(|| self.log[x.index()])
    }

    pub fn is_square(&self, x: FieldElement) -> bool {
        x.0 != 0 && self.log[x.index()].is_multiple_of(2)
    }

    /// Nonzero squares in ascending index order.
    pub fn squares(&self) -> &[FieldElement] {
        &self.squares
    }

    /// The smallest nonsquare by index.
    pub fn epsilon(&self) -> FieldElement {
        self.epsilon
    }

    /// Polynomial multiplication followed by reduction modulo the modulus.
    /// Table-free; used to build the tables and to check them.
    pub fn mul_schoolbook(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let r = self.r as usize;
        let dx = digits(x.0, r);
        let dy = digits(y.0, r);
        let mut prod = vec![0u8; 2 * r];
        for (i, a) in dx.iter().enumerate() {
            for (j, b) in dy.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % 3;
            }
        }
        trim(&mut prod);
        let reduced = Poly3(prod).rem(&self.modulus);
        FieldElement(encode(&reduced.0))
    }

    pub fn pow_schoolbook(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x + x^3 + .. + x^(3^(r-1))` evaluated with table-free arithmetic.
    pub fn trace_frobenius(&self, x: FieldElement) -> u8 {
        let mut term = x;
        let mut acc = vec![0u8; self.r as usize];
        for _ in 0..self.r {
            for (a, d) in acc.iter_mut().zip(digits(term.0, self.r as usize)) {
                *a = (*a + d) % 3;
            }
            term = self.pow_schoolbook(term, 3);
        }
        assert!(
            acc.iter().skip(1).all(|&d| d == 0),
            "trace of {x} left F_3"
        );
        acc[0]
    }

    /// Number of base-3 digits handled by each half of the addition table.
    pub fn half_digits(&self) -> u32 {
        self.half_digits
    }
}

fn encode(d: &[u8]) -> u32 {
    d.iter().rev().fold(0u32, |acc, &c| acc * 3 + c as u32)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

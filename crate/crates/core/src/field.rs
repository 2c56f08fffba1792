//! Arithmetic in GF(p^k).
//!
//! A single [`FieldContext`] carries the largest field of a tower. Subfields
//! are the fixed sets of Frobenius powers inside it, and prime-field residues
//! are the elements whose non-constant coefficients vanish.
//!
//! Elements are stored as the base-p integer whose most significant digit is
//! the constant coefficient. Integer order on that encoding is therefore the
//! lexicographic order on constant-term-first coefficient strings, which is
//! the canonical order used everywhere (smallest generator, sorted subfields).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 62;

/// Default guard for operations that walk the whole field.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 24;

/// Fields up to this size get discrete-log tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// An element of the field described by some [`FieldContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Position of the element in canonical order, in `0..p^k`.
    #[inline]
    pub fn index(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn from_index(index: u64) -> FieldElement {
        FieldElement(index)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
struct LogTables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// Arithmetic context for GF(p^k) built on a monic irreducible modulus.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u32,
    k: u32,
    order: u64,
    /// `place[i]` is the weight of coefficient `i` in the element encoding.
    place: Vec<u64>,
    modulus: Vec<u32>,
    /// Prime divisors of `k`, for the maximal proper subfields.
    k_primes: Vec<u32>,
    /// `p^j mod (order - 1)` for `j < k`.
    frob_exponent: Vec<u64>,
    generator: FieldElement,
    tables: Option<LogTables>,
    enumeration_limit: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `n!`, saturating at `u128::MAX`.
pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).fold(1, |acc, i| acc.saturating_mul(i))
}

fn checked_order(p: u32, k: u32) -> Result<u64> {
    if k == 0 || k as usize > MAX_DEGREE {
        return Err(Error::InvalidField(alloc::format!(
            "extension degree {k} outside 1..={MAX_DEGREE}"
        )));
    }
    (p as u64)
        .checked_pow(k)
        .filter(|&o| o < (1 << 62))
        .ok_or_else(|| Error::InvalidField(alloc::format!("{p}^{k} does not fit in 62 bits")))
}

/// Remainder of `num` modulo the monic polynomial `den` over Z_p.
/// Coefficients are constant term first.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let shift = r.len() - dd;
            for (i, &c) in den[..dd].iter().enumerate() {
                r[shift + i] = (r[shift + i] + lead * (p - c as u64)) % p;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut acc, mut b, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// `a * b mod f` for a monic `f`.
fn poly_mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let pp = p as u64;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % pp;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    trim(poly_rem(&prod, f, p))
}

/// `a^(p^times) mod f` by repeated p-th powers.
fn poly_frobenius_mod(a: &[u32], times: usize, f: &[u32], p: u32) -> Vec<u32> {
    let mut cur = a.to_vec();
    for _ in 0..times {
        let mut acc = vec![1u32];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, f, p);
            }
            base = poly_mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let pp = p as u64;
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let lead = inv_mod(*b.last().unwrap() as u64, pp);
        let monic: Vec<u32> = b.iter().map(|&c| (c as u64 * lead % pp) as u32).collect();
        let r = trim(poly_rem(&a, &monic, p));
        a = monic;
        b = r;
    }
    a
}

/// Rabin's test: a monic `f` of degree k is irreducible iff
/// x^(p^k) = x mod f and gcd(x^(p^(k/l)) - x, f) = 1 for every prime l | k.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let k = modulus.len().saturating_sub(1);
    if k == 0 || modulus[k] != 1 || modulus.iter().any(|&c| c >= p) {
        return false;
    }
    if k == 1 {
        return true;
    }
    if modulus[0] == 0 {
        return false;
    }
    let x = [0u32, 1];
    let minus_x = |mut h: Vec<u32>| -> Vec<u32> {
        h.resize(h.len().max(2), 0);
        h[1] = ((h[1] as u64 + p as u64 - 1) % p as u64) as u32;
        trim(h)
    };
    for l in prime_factors(k as u64) {
        let h = poly_frobenius_mod(&x, k / l as usize, modulus, p);
        if poly_gcd(modulus, &minus_x(h), p).len() != 1 {
            return false;
        }
    }
    minus_x(poly_frobenius_mod(&x, k, modulus, p)).is_empty()
}

/// The lexicographically smallest monic irreducible polynomial of degree `k`
/// over Z_p, constant term first, with the leading 1 included.
pub fn find_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let count = checked_order(p, k)?;
    let k = k as usize;
    let mut poly = vec![0u32; k + 1];
    poly[k] = 1;
    // constant term is the most significant digit; a zero constant term
    // means x divides the polynomial
    let start = if k > 1 { count / p as u64 } else { 0 };
    for idx in start..count {
        let mut x = idx;
        for c in poly[..k].iter_mut().rev() {
            *c = (x % p as u64) as u32;
            x /= p as u64;
        }
        if is_irreducible(&poly, p) {
            return Ok(poly);
        }
    }
    Err(Error::Internal(alloc::format!(
        "no irreducible polynomial of degree {k} over F_{p}"
    )))
}

impl FieldContext {
    /// Builds GF(p^k) on the canonical modulus from [`find_irreducible`].
    pub fn new(p: u32, k: u32) -> Result<FieldContext> {
        let modulus = find_irreducible(p, k)?;
        FieldContext::with_modulus(p, modulus)
    }

    /// Builds a context from an explicit monic modulus (constant term first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<FieldContext> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let k = modulus.len().saturating_sub(1) as u32;
        let order = checked_order(p, k)?;
        if modulus.iter().any(|&c| c >= p) || modulus[k as usize] != 1 {
            return Err(Error::InvalidField(
                "modulus must be monic with residues below p".into(),
            ));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus);
        }
        let place = (0..k).map(|i| (p as u64).pow(k - 1 - i)).collect();
        let n = order - 1;
        let frob_exponent = (0..k)
            .map(|j| {
                if n == 0 {
                    0
                } else {
                    ((p as u128).pow(j) % n as u128) as u64
                }
            })
            .collect();
        let k_primes = prime_factors(k as u64)
            .into_iter()
            .map(|l| l as u32)
            .collect();
        let mut ctx = FieldContext {
            p,
            k,
            order,
            place,
            modulus,
            k_primes,
            frob_exponent,
            generator: FieldElement::ZERO,
            tables: None,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        };
        ctx.generator = ctx.search_generator();
        if order <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    /// Replaces the desk-scale guard used by whole-field enumerations.
    pub fn with_enumeration_limit(mut self, limit: u64) -> FieldContext {
        self.enumeration_limit = limit;
        self
    }

    pub fn enumeration_limit(&self) -> u64 {
        self.enumeration_limit
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements, p^k.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(self.place[0])
    }

    /// The polynomial variable `u`, or `None` for a prime field.
    pub fn variable(&self) -> Option<FieldElement> {
        (self.k >= 2).then(|| FieldElement(self.place[1]))
    }

    /// Embeds a prime-field residue.
    pub fn from_prime(&self, c: u64) -> FieldElement {
        FieldElement((c % self.p as u64) * self.place[0])
    }

    /// The residue of a prime-field element, `None` outside F_p.
    pub fn to_prime(&self, a: FieldElement) -> Option<u32> {
        a.0.is_multiple_of(self.place[0])
            .then(|| (a.0 / self.place[0]) as u32)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.order {
            return Err(Error::InvalidField(alloc::format!(
                "index {index} outside a field of {} elements",
                self.order
            )));
        }
        Ok(FieldElement(index))
    }

    /// Coefficients, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        self.digits(a)[..self.k as usize].to_vec()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidField(alloc::format!(
                "expected {} residues below {}",
                self.k,
                self.p
            )));
        }
        Ok(FieldElement(
            coeffs
                .iter()
                .zip(&self.place)
                .map(|(&c, &w)| c as u64 * w)
                .sum(),
        ))
    }

    #[inline]
    fn digits(&self, a: FieldElement) -> [u32; MAX_DEGREE] {
        let mut out = [0u32; MAX_DEGREE];
        let p = self.p as u64;
        let mut x = a.0;
        for d in out[..self.k as usize].iter_mut().rev() {
            *d = (x % p) as u32;
            x /= p;
        }
        out
    }

    #[inline]
    fn undigits(&self, digits: &[u32]) -> FieldElement {
        let p = self.p as u64;
        FieldElement(
            digits[..self.k as usize]
                .iter()
                .fold(0u64, |acc, &d| acc * p + d as u64),
        )
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let p = self.p as u64;
        let (mut x, mut y, mut w, mut out) = (a.0, b.0, 1u64, 0u64);
        for _ in 0..self.k {
            let s = (x % p + y % p) % p;
            out += s * w;
            w *= p;
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let p = self.p as u64;
        let (mut x, mut w, mut out) = (a.0, 1u64, 0u64);
        for _ in 0..self.k {
            out += ((p - x % p) % p) * w;
            w *= p;
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Schoolbook product reduced modulo the defining polynomial.
    pub fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let k = self.k as usize;
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for deg in (k..2 * k - 1).rev() {
            let lead = prod[deg];
            if lead == 0 {
                continue;
            }
            prod[deg] = 0;
            let shift = deg - k;
            for (i, &c) in self.modulus[..k].iter().enumerate() {
                prod[shift + i] = (prod[shift + i] + lead * (p - c as u64)) % p;
            }
        }
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..k {
            out[i] = prod[i] as u32;
        }
        self.undigits(&out)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElement::ZERO;
                }
                let n = (self.order - 1) as u32;
                let mut e = t.log[a.0 as usize] + t.log[b.0 as usize];
                if e >= n {
                    e -= n;
                }
                FieldElement(t.exp[e as usize] as u64)
            }
            None => self.mul_poly(a, b),
        }
    }

    /// Square-and-multiply on the polynomial representation.
    fn pow_poly(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u128) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = (self.order - 1) as u128;
        match &self.tables {
            Some(t) => {
                let idx = (t.log[a.0 as usize] as u128 * (e % n)) % n;
                FieldElement(t.exp[idx as usize] as u64)
            }
            None => {
                let r = e % n;
                self.pow_poly(a, if r == 0 { n } else { r })
            }
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let n = self.order - 1;
        Ok(match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                FieldElement(t.exp[((n - l) % n) as usize] as u64)
            }
            None => self.pow_poly(a, (n - 1) as u128),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^(p^j)`; `j` is reduced modulo the extension degree.
    #[inline]
    pub fn frobenius(&self, a: FieldElement, j: u64) -> FieldElement {
        let j = (j % self.k as u64) as usize;
        if j == 0 || a.0 == 0 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                let idx = (t.log[a.0 as usize] as u64 * self.frob_exponent[j]) % n;
                FieldElement(t.exp[idx as usize] as u64)
            }
            None => self.pow(a, (self.p as u128).pow(j as u32)),
        }
    }

    /// The absolute norm to F_p as the product of all Frobenius conjugates.
    pub fn norm_to_prime(&self, a: FieldElement) -> u32 {
        let mut acc = self.one();
        for j in 0..self.k as u64 {
            acc = self.mul(acc, self.frobenius(a, j));
        }
        match self.to_prime(acc) {
            Some(c) => c,
            None => unreachable!("norm left the prime field"),
        }
    }

    /// [`norm_to_prime`](Self::norm_to_prime) computed as a single power,
    /// via the discrete log when tables exist.
    pub fn norm(&self, a: FieldElement) -> u32 {
        if a.0 == 0 {
            return 0;
        }
        let n = self.order - 1;
        let e = n / (self.p as u64 - 1);
        let value = match &self.tables {
            Some(t) => FieldElement(
                t.exp[((t.log[a.0 as usize] as u128 * e as u128) % n as u128) as usize] as u64,
            ),
            None => self.pow(a, e as u128),
        };
        match self.to_prime(value) {
            Some(c) => c,
            None => unreachable!("norm left the prime field"),
        }
    }

    /// Membership in GF(p^j).
    pub fn in_subfield(&self, a: FieldElement, j: u32) -> Result<bool> {
        if j == 0 || !self.k.is_multiple_of(j) {
            return Err(Error::NotDivisor {
                sub: j,
                degree: self.k,
            });
        }
        Ok(self.frobenius(a, j as u64) == a)
    }

    /// Membership in the union of all proper subfields.
    #[inline]
    pub fn in_subfield_union(&self, a: FieldElement) -> bool {
        self.k_primes
            .iter()
            .any(|&l| self.frobenius(a, (self.k / l) as u64) == a)
    }

    /// Canonical primitive element: the smallest element of order p^k - 1.
    pub fn find_generator(&self) -> FieldElement {
        self.generator
    }

    fn search_generator(&self) -> FieldElement {
        let n = self.order - 1;
        let cofactors: Vec<u128> = prime_factors(n)
            .into_iter()
            .map(|l| (n / l) as u128)
            .collect();
        let one = self.one();
        (1..self.order)
            .map(FieldElement)
            .find(|&g| cofactors.iter().all(|&c| self.pow_poly(g, c) != one))
            .expect("the multiplicative group is cyclic")
    }

    fn build_tables(&self) -> LogTables {
        let n = (self.order - 1) as usize;
        let mut log = vec![u32::MAX; self.order as usize];
        let mut exp = vec![0u32; n.max(1)];
        let mut x = self.one();
        for (i, slot) in exp.iter_mut().enumerate().take(n) {
            *slot = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, self.generator);
        }
        LogTables { log, exp }
    }

    fn guard(&self, size: u64) -> Result<()> {
        if size > self.enumeration_limit {
            return Err(Error::TooLarge {
                size: size as u128,
                limit: self.enumeration_limit as u128,
            });
        }
        Ok(())
    }

    /// Every element in canonical order, subject to the enumeration guard.
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + Clone> {
        self.guard(self.order)?;
        Ok((0..self.order).map(FieldElement))
    }

    /// GF(p^j) inside this field, sorted canonically.
    pub fn enumerate_subfield(&self, j: u32) -> Result<Vec<FieldElement>> {
        if j == 0 || !self.k.is_multiple_of(j) {
            return Err(Error::NotDivisor {
                sub: j,
                degree: self.k,
            });
        }
        let size = (self.p as u64).pow(j);
        self.guard(size)?;
        let n = self.order - 1;
        let step = n / (size - 1);
        let base = self.pow(self.generator, step as u128);
        let mut out = Vec::with_capacity(size as usize);
        out.push(FieldElement::ZERO);
        let mut x = self.one();
        for _ in 0..size - 1 {
            out.push(x);
            x = self.mul(x, base);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Base-p digit string, constant term first, fixed width k. Residues use
    /// `0-9a-z` when p <= 36 and `:`-separated decimals otherwise.
    pub fn format_element(&self, a: FieldElement) -> String {
        format_digits(&self.digits(a)[..self.k as usize], self.p)
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let digits = parse_digits(s, self.p)?;
        if digits.len() != self.k as usize {
            return Err(Error::Parse(alloc::format!(
                "element {s:?} has {} digits, expected {}",
                digits.len(),
                self.k
            )));
        }
        self.from_coeffs(&digits)
    }

    /// Parses the `p=.. k=.. modulus=..` form produced by `Display`.
    pub fn parse_descriptor(s: &str) -> Result<FieldContext> {
        let (mut p, mut k, mut modulus) = (None, None, None);
        for part in s.split_whitespace() {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(alloc::format!("expected key=value, got {part:?}")))?;
            match key {
                "p" => {
                    p = Some(
                        value
                            .parse::<u32>()
                            .map_err(|e| Error::Parse(alloc::format!("p: {e}")))?,
                    )
                }
                "k" => {
                    k = Some(
                        value
                            .parse::<u32>()
                            .map_err(|e| Error::Parse(alloc::format!("k: {e}")))?,
                    )
                }
                "modulus" => modulus = Some(value),
                other => return Err(Error::Parse(alloc::format!("unknown field key {other:?}"))),
            }
        }
        let p = p.ok_or_else(|| Error::Parse("missing p".into()))?;
        let k = k.ok_or_else(|| Error::Parse("missing k".into()))?;
        let modulus = parse_digits(
            modulus.ok_or_else(|| Error::Parse("missing modulus".into()))?,
            p,
        )?;
        if modulus.len() != k as usize + 1 {
            return Err(Error::Parse("modulus length does not match k".into()));
        }
        FieldContext::with_modulus(p, modulus)
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} k={} modulus={}",
            self.p,
            self.k,
            format_digits(&self.modulus, self.p)
        )
    }
}

fn format_digits(digits: &[u32], p: u32) -> String {
    if p <= 36 {
        digits
            .iter()
            .map(|&d| core::char::from_digit(d, 36).unwrap())
            .collect()
    } else {
        let mut s = String::new();
        for (i, d) in digits.iter().enumerate() {
            if i > 0 {
                s.push(':');
            }
            s.push_str(&alloc::format!("{d}"));
        }
        s
    }
}

fn parse_digits(s: &str, p: u32) -> Result<Vec<u32>> {
    let bad = || Error::Parse(alloc::format!("bad digit string {s:?} for p={p}"));
    let digits: Vec<u32> = if p <= 36 {
        s.chars()
            .map(|c| c.to_digit(36).ok_or_else(bad))
            .collect::<Result<_>>()?
    } else {
        s.split(':')
            .map(|t| t.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if digits.is_empty() || digits.iter().any(|&d| d >= p) {
        return Err(bad());
    }
    Ok(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FieldContext {
        FieldContext::new(2, 2).unwrap()
    }

    #[test]
    fn irreducibles() {
        assert_eq!(find_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(
            FieldContext::new(2, 8).unwrap().to_string(),
            "p=2 k=8 modulus=100011011"
        );
        assert_eq!(find_irreducible(4, 2), Err(Error::NotPrime(4)));
    }

    #[test]
    fn f4_arithmetic() {
        let ctx = f4();
        let u = ctx.variable().unwrap();
        let u1 = ctx.add(u, ctx.one());
        assert_eq!(ctx.mul(u, u1), ctx.one());
        assert_eq!(ctx.mul_poly(u, u1), ctx.one());
        assert_eq!(ctx.inv(u).unwrap(), u1);
        assert_eq!(ctx.frobenius(u, 1), u1);
        assert_eq!(ctx.frobenius(u, 2), u);
        assert_eq!(ctx.frobenius(ctx.zero(), 1), ctx.zero());
        assert_eq!(ctx.inv(ctx.zero()), Err(Error::ZeroInverse));
        for a in ctx.elements().unwrap().filter(|a| !a.is_zero()) {
            assert_eq!(ctx.norm_to_prime(a), 1);
        }
        assert_eq!(ctx.find_generator(), u);
        assert!(ctx.in_subfield(ctx.one(), 1).unwrap());
        assert!(!ctx.in_subfield(u, 1).unwrap());
        assert!(!ctx.in_subfield_union(u));
        assert!(ctx.in_subfield_union(ctx.one()));
        assert!(ctx.in_subfield_union(ctx.zero()));
        assert_eq!(
            ctx.enumerate_subfield(1).unwrap(),
            vec![ctx.zero(), ctx.one()]
        );
    }

    #[test]
    fn f9_norm() {
        let ctx = FieldContext::new(3, 2).unwrap();
        let u = ctx.variable().unwrap();
        assert_eq!(ctx.norm_to_prime(ctx.add(u, ctx.one())), 2);
        assert_eq!(ctx.norm_to_prime(ctx.one()), 1);
    }

    #[test]
    fn prime_field_generators() {
        assert_eq!(FieldContext::new(5, 1).unwrap().find_generator().index(), 2);
        assert_eq!(FieldContext::new(2, 1).unwrap().find_generator().index(), 1);
    }

    #[test]
    fn f16_inside_f256() {
        let ctx = FieldContext::new(2, 8).unwrap();
        let sub = ctx.enumerate_subfield(4).unwrap();
        assert_eq!(sub.len(), 16);
        assert!(sub
            .iter()
            .all(|&a| ctx.pow(a, 16) == a && ctx.in_subfield_union(a)));
        let f4 = ctx.enumerate_subfield(2).unwrap();
        assert_eq!(f4.len(), 4);
        assert!(f4.iter().all(|&a| ctx.pow(a, 4) == a));
        assert_eq!(ctx.enumerate_subfield(8).unwrap().len(), 256);
        assert!(matches!(
            ctx.enumerate_subfield(3),
            Err(Error::NotDivisor { .. })
        ));
        assert!(matches!(
            ctx.in_subfield(ctx.one(), 5),
            Err(Error::NotDivisor { .. })
        ));
    }

    #[test]
    fn serialization() {
        let ctx = FieldContext::new(2, 3).unwrap();
        let a = ctx.parse_element("110").unwrap();
        assert_eq!(a, ctx.add(ctx.one(), ctx.variable().unwrap()));
        assert_eq!(ctx.format_element(a), "110");
        let back = FieldContext::parse_descriptor(&ctx.to_string()).unwrap();
        assert_eq!(back.modulus(), ctx.modulus());
        assert!(ctx.parse_element("11").is_err());
        assert!(ctx.parse_element("112").is_err());
        assert_eq!(
            FieldContext::parse_descriptor("p=2 k=2 modulus=101").unwrap_err(),
            Error::ReducibleModulus
        );
    }

    #[test]
    fn large_prime_digits() {
        let ctx = FieldContext::new(41, 2).unwrap();
        let a = ctx.from_coeffs(&[40, 3]).unwrap();
        assert_eq!(ctx.format_element(a), "40:3");
        assert_eq!(ctx.parse_element("40:3").unwrap(), a);
    }

    #[test]
    fn guard_refuses_large_enumeration() {
        let ctx = FieldContext::new(2, 30).unwrap();
        assert!(!ctx.has_tables());
        assert!(matches!(ctx.elements(), Err(Error::TooLarge { .. })));
        let g = ctx.find_generator();
        assert_eq!(ctx.mul(g, ctx.inv(g).unwrap()), ctx.one());
        assert_eq!(ctx.frobenius(g, 30), g);
        let relaxed = ctx.with_enumeration_limit(u64::MAX);
        assert_eq!(relaxed.enumerate_subfield(5).unwrap().len(), 32);
    }
}

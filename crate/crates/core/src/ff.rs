//! Exact arithmetic in `F_q`, `q = p^e`, `p` an odd prime.
//!
//! Elements are stored as a `u32` holding the integer encoding
//! `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` of the little-endian coefficient
//! vector over `Z_p`. The canonical total order on elements compares the
//! coefficient vectors lexicographically starting from `c_0`; see
//! [`Field::order_key`].
//!
//! All tables (exponentials, logarithms, squares) are built once in
//! [`Field::new`]; afterwards a `Field` is immutable and can be shared freely.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// An element of some [`Field`], identified by its integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u32);

impl FieldElem {
    /// Integer encoding `sum c_i p^i`.
    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binary or unary operation selector for [`Field::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    canonical_modulus: bool,
    /// `exp[i] = g^i` for a fixed primitive element `g`, `0 <= i < q - 1`.
    exp: Vec<u32>,
    /// Discrete logarithm base `g`; entry 0 is unused.
    log: Vec<u32>,
    /// Addition table for small extension fields, row-major `q x q`.
    add_table: Option<Vec<u32>>,
    squares: Vec<bool>,
    nonsquare: FieldElem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for Field {}

/// `(p, e)` with `q = p^e` for a prime `p`, or `None` if `q` is not a prime
/// power.
fn split_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
/// Both are little-endian coefficient lists.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if poly_rem(modulus, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The least monic irreducible of degree `e`, comparing the lower coefficient
/// vectors `(c_0, ..., c_{e-1})` lexicographically.
pub fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(e);
    for idx in 0..count {
        // c_0 is the most significant digit of idx
        let mut coeffs = vec![0u32; e as usize + 1];
        let mut t = idx;
        for i in (0..e as usize).rev() {
            coeffs[i] = (t % p as u64) as u32;
            t /= p as u64;
        }
        coeffs[e as usize] = 1;
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds `F_{p^e}`. Without an explicit modulus the least monic
    /// irreducible of degree `e` is used.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
        if p % 2 == 0 {
            return Err(Error::EvenCharacteristic(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidDegree(e));
        }
        let q64 = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge((p as u64).saturating_pow(e)))?;
        let q = q64 as u32;

        let canonical = least_irreducible(p, e);
        let (modulus, canonical_modulus) = match modulus {
            None => (canonical, true),
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must lie in [0, {p})"
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(m));
                }
                let is_canon = m == canonical;
                (m, is_canon)
            }
        };

        let mut field = Field {
            p,
            e,
            q,
            modulus,
            canonical_modulus,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
            squares: Vec::new(),
            nonsquare: FieldElem(0),
        };
        field.build_tables();
        Ok(field)
    }

    /// Parses a descriptor `"q"` (a prime or prime power) or `"p^e"` and an optional modulus list
    /// `"c0,c1,...,1"`.
    pub fn parse(descriptor: &str, modulus: Option<&str>) -> Result<Field> {
        let descriptor = descriptor.trim();
        let (p, e) = match descriptor.split_once('^') {
            Some((p, e)) => (p.trim(), e.trim()),
            None => (descriptor, "1"),
        };
        let p: u32 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad field characteristic in {descriptor:?}")))?;
        let e: u32 = e
            .parse()
            .map_err(|_| Error::Parse(format!("bad extension degree in {descriptor:?}")))?;
        // a bare prime power such as "9" means 3^2
        let (p, e) = match split_prime_power(p) {
            Some((r, k)) if e == 1 && k > 1 => (r, k),
            _ => (p, e),
        };
        let modulus = match modulus {
            None => None,
            Some(s) => Some(
                s.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad modulus coefficient {c:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Field::new(p, e, modulus)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if self.e > 1 && q <= 256 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_digits(a, b);
                }
            }
            self.add_table = Some(t);
        }

        // primitive element by trial, smallest integer encoding first
        let order = q - 1;
        let factors = prime_factors(order);
        let mut g = None;
        for cand in 1..q {
            let c = self.decode(cand);
            let primitive = factors.iter().all(|&r| {
                let pw = self.slow_pow(&c, (order / r) as u64);
                self.encode(&pw) != 1
            });
            if primitive {
                g = Some(c);
                break;
            }
        }
        let g = g.expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        for i in 0..order {
            let v = self.encode(&cur);
            exp.push(v);
            log[v as usize] = i;
            cur = poly_rem(&poly_mul(&cur, &g, self.p), &self.modulus, self.p);
        }
        self.exp = exp;
        self.log = log;

        let mut squares = vec![false; q as usize];
        for x in 1..q {
            let sq = self.mul(FieldElem(x), FieldElem(x));
            squares[sq.0 as usize] = true;
        }
        self.squares = squares;

        let mut best: Option<FieldElem> = None;
        for x in 1..q {
            let a = FieldElem(x);
            if !self.squares[x as usize] {
                best = match best {
                    Some(b) if self.cmp_canonical(b, a) != Ordering::Greater => Some(b),
                    _ => Some(a),
                };
            }
        }
        self.nonsquare = best.expect("odd q has non-squares");
    }

    fn decode(&self, mut v: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn slow_pow(&self, a: &[u32], mut k: u64) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                result = poly_rem(&poly_mul(&result, &base, self.p), &self.modulus, self.p);
            }
            base = poly_rem(&poly_mul(&base, &base, self.p), &self.modulus, self.p);
            k >>= 1;
        }
        result
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus as little-endian coefficients (length `e + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Whether the modulus is the default one chosen by [`Field::new`].
    pub fn has_canonical_modulus(&self) -> bool {
        self.canonical_modulus
    }

    /// `"p"` or `"p^e"`.
    pub fn descriptor(&self) -> String {
        if self.e == 1 {
            self.p.to_string()
        } else {
            format!("{}^{}", self.p, self.e)
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Checked conversion from an integer encoding.
    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if value < self.q {
            Ok(FieldElem(value))
        } else {
            Err(Error::ForeignElement { value, q: self.q })
        }
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() > self.e as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!(
                "{coeffs:?} is not a coefficient vector over F_{}",
                self.p
            )));
        }
        Ok(FieldElem(self.encode(coeffs)))
    }

    /// Little-endian coefficient vector of length `e`.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        self.decode(a.0)
    }

    /// All elements in increasing integer encoding.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    /// Sort key realising the canonical order: the coefficient vector
    /// `(c_0, c_1, ...)` compared lexicographically.
    pub fn order_key(&self, a: FieldElem) -> u32 {
        if self.e == 1 {
            return a.0;
        }
        let mut v = a.0;
        let mut key = 0;
        for _ in 0..self.e {
            key = key * self.p + v % self.p;
            v /= self.p;
        }
        key
    }

    pub fn cmp_canonical(&self, a: FieldElem, b: FieldElem) -> Ordering {
        self.order_key(a).cmp(&self.order_key(b))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            let s = a.0 + b.0;
            FieldElem(if s >= self.p { s - self.p } else { s })
        } else if let Some(t) = &self.add_table {
            FieldElem(t[(a.0 * self.q + b.0) as usize])
        } else {
            FieldElem(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.e == 1 {
            FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 })
        } else {
            let mut v = a.0;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.e {
                out += ((self.p - v % self.p) % self.p) * place;
                v /= self.p;
                place *= self.p;
            }
            FieldElem(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let order = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElem(self.exp[(if s >= order { s - order } else { s }) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        if k == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return FieldElem(0);
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElem(self.exp[((l * (k % order)) % order) as usize])
    }

    /// Membership-checked arithmetic. Rejects operands that are not
    /// elements of this field.
    pub fn arith(&self, a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem> {
        self.elem(a.0)?;
        self.elem(b.0)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Inv => self.inv(a),
        }
    }

    /// Table lookup; agrees with [`Field::euler_criterion`].
    pub fn is_square(&self, a: FieldElem) -> Result<bool> {
        if a.0 == 0 {
            return Err(Error::ZeroInput);
        }
        self.elem(a.0)?;
        Ok(self.squares[a.0 as usize])
    }

    /// `a^((q-1)/2) == 1`.
    pub fn euler_criterion(&self, a: FieldElem) -> Result<bool> {
        if a.0 == 0 {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(a, ((self.q - 1) / 2) as u64) == self.one())
    }

    /// The non-square that is least in the canonical order.
    #[inline]
    pub fn canonical_nonsquare(&self) -> FieldElem {
        self.nonsquare
    }

    pub fn minus_one_is_square(&self) -> bool {
        self.squares[self.neg(self.one()).0 as usize]
    }

    /// The square root of `a` that is least in the canonical order.
    pub fn sqrt_of_square(&self, a: FieldElem) -> Result<FieldElem> {
        if !self.is_square(a)? {
            return Err(Error::NotASquare(a.0));
        }
        let l = self.log[a.0 as usize];
        let r = FieldElem(self.exp[(l / 2) as usize]);
        let s = self.neg(r);
        Ok(if self.cmp_canonical(r, s) == Ordering::Greater { s } else { r })
    }

    /// `a^(p^j)`, the `j`-th power of the Frobenius automorphism.
    pub fn frobenius(&self, a: FieldElem, j: u32) -> Result<FieldElem> {
        if j >= self.e {
            return Err(Error::FrobeniusOutOfRange { j, e: self.e });
        }
        Ok(self.pow(a, (self.p as u64).pow(j)))
    }

    /// Square class of a nonzero element: `true` for squares.
    pub fn square_class(&self, a: FieldElem) -> Result<bool> {
        self.is_square(a)
    }
}

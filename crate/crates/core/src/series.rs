//! Truncated formal power series in `q`, `x` and commuting color symbols,
//! with exact integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound::{Excluded, Unbounded};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub const MAX_SYMBOLS: usize = 16;

/// `q^q x^x ∏ s_i^colors[i]`. Ordered by `q` first, which the in-place
/// division routines rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub q: i64,
    pub x: u32,
    pub colors: [u16; MAX_SYMBOLS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        q: 0,
        x: 0,
        colors: [0; MAX_SYMBOLS],
    };

    pub fn q(q: i64) -> Self {
        Monomial { q, ..Self::ONE }
    }

    pub fn with_x(mut self, x: u32) -> Self {
        self.x = x;
        self
    }

    pub fn with_q(mut self, q: i64) -> Self {
        self.q = q;
        self
    }

    pub fn with_color(mut self, i: usize, exp: u16) -> Self {
        self.colors[i] += exp;
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut colors = self.colors;
        for (c, o) in colors.iter_mut().zip(other.colors) {
            *c += o;
        }
        Monomial {
            q: self.q + other.q,
            x: self.x + other.x,
            colors,
        }
    }

    pub fn color_degree(&self) -> u32 {
        self.colors.iter().map(|&c| c as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn format(&self, symbols: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.colors.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(symbols[i].clone()),
                _ => parts.push(format!("{}^{e}", symbols[i])),
            }
        }
        match self.q {
            0 => {}
            1 => parts.push("q".into()),
            q => parts.push(format!("q^{q}")),
        }
        match self.x {
            0 => {}
            1 => parts.push("x".into()),
            x => parts.push(format!("x^{x}")),
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// A series truncated to `q`-exponents at most `q_order` and, when set,
/// `x`-degree at most `x_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    symbols: Vec<String>,
    q_order: i64,
    x_order: Option<u32>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    /// The zero series over the given symbols.
    pub fn zero(symbols: &[String], q_order: i64, x_order: Option<u32>) -> Result<Self> {
        if symbols.len() > MAX_SYMBOLS {
            return Err(Error::TooManySymbols {
                max: MAX_SYMBOLS,
                got: symbols.len(),
            });
        }
        Ok(TruncatedSeries {
            symbols: symbols.to_vec(),
            q_order,
            x_order,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(symbols: &[String], q_order: i64, x_order: Option<u32>) -> Result<Self> {
        let mut s = Self::zero(symbols, q_order, x_order)?;
        s.add_term(Monomial::ONE, BigInt::one());
        Ok(s)
    }

    /// Same ring, no terms.
    pub fn empty_like(&self) -> Self {
        TruncatedSeries {
            terms: BTreeMap::new(),
            ..self.clone_ring()
        }
    }

    fn clone_ring(&self) -> Self {
        TruncatedSeries {
            symbols: self.symbols.clone(),
            q_order: self.q_order,
            x_order: self.x_order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one_like(&self) -> Self {
        let mut s = self.empty_like();
        s.add_term(Monomial::ONE, BigInt::one());
        s
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn q_order(&self) -> i64 {
        self.q_order
    }

    pub fn x_order(&self) -> Option<u32> {
        self.x_order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Whether `m` survives truncation.
    pub fn keeps(&self, m: &Monomial) -> bool {
        m.q <= self.q_order && self.x_order.is_none_or(|xo| m.x <= xo)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() || !self.keeps(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-truncates at a lower `q`-order.
    pub fn truncate(&self, q_order: i64) -> Self {
        let mut out = self.clone();
        out.q_order = q_order.min(self.q_order);
        out.terms.retain(|m, _| m.q <= out.q_order);
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.symbols != other.symbols {
            return Err(Error::IncompatibleSeries(format!(
                "symbols {:?} vs {:?}",
                self.symbols, other.symbols
            )));
        }
        if self.x_order != other.x_order {
            return Err(Error::IncompatibleSeries(format!(
                "x-orders {:?} vs {:?}",
                self.x_order, other.x_order
            )));
        }
        Ok(())
    }

    fn joined_ring(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut r = self.clone_ring();
        r.q_order = self.q_order.min(other.q_order);
        Ok(r)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.joined_ring(other)?;
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.joined_ring(other)?;
        let rhs: Vec<(&Monomial, &BigInt)> = other.terms.iter().collect();
        for (m, c) in &self.terms {
            for &(m2, c2) in &rhs {
                // terms are sorted by q, so nothing further fits
                if m.q + m2.q > out.q_order {
                    break;
                }
                out.add_term(m.mul(m2), c * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies in place by `1 + c * m`.
    pub fn mul_binomial(&mut self, c: i64, m: Monomial) {
        let shifted: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(k, v)| (k.mul(&m), v * c))
            .collect();
        for (k, v) in shifted {
            self.add_term(k, v);
        }
    }

    /// Divides in place by `1 - c * m`, i.e. multiplies by `Σ_r (c m)^r`.
    /// `m` must have positive `q`-degree, or positive `x`-degree under a
    /// finite `x`-order.
    pub fn div_one_minus(&mut self, c: i64, m: Monomial) -> Result<()> {
        let finite = m.q > 0 || (m.q == 0 && m.x > 0 && self.x_order.is_some());
        if !finite {
            return Err(Error::NonConvergent(format!(
                "1/(1 - {}) has no finite truncation",
                m.format(&self.symbols)
            )));
        }
        // new[k] = old[k] + c * new[k / m]; visiting keys in increasing order
        // means new[k / m] is final before k is reached.
        let mut cur = self.terms.keys().next().copied();
        while let Some(k) = cur {
            let t = k.mul(&m);
            if self.keeps(&t) {
                let v = &self.terms[&k] * c;
                self.add_term(t, v);
            }
            cur = self
                .terms
                .range((Excluded(k), Unbounded))
                .next()
                .map(|(k, _)| *k);
        }
        Ok(())
    }

    /// `(x; q^step)_m = ∏_{r<m} (1 - x q^{r step})` with `x = sign * base`,
    /// or its reciprocal. `factors = None` multiplies every factor that can
    /// still reach the `q`-order.
    pub fn pochhammer(
        ring: &Self,
        sign: i64,
        base: Monomial,
        q_step: i64,
        factors: Option<usize>,
        reciprocal: bool,
    ) -> Result<Self> {
        let mut out = ring.one_like();
        let count = match factors {
            Some(m) => m,
            None => {
                if q_step <= 0 {
                    return Err(Error::NonConvergent(
                        "infinite product needs a positive q-step".into(),
                    ));
                }
                let span = ring.q_order - base.q;
                if span < 0 {
                    0
                } else {
                    (span / q_step) as usize + 1
                }
            }
        };
        for r in 0..count {
            let f = base.with_q(base.q + r as i64 * q_step);
            if f.q > ring.q_order {
                break;
            }
            if reciprocal {
                out.div_one_minus(sign, f)?;
            } else {
                out.mul_binomial(-sign, f);
            }
        }
        Ok(out)
    }

    /// Substitutes `x -> x q^m`.
    pub fn substitute_x(&self, m: i64) -> Self {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            out.add_term(k.with_q(k.q + m * k.x as i64), c.clone());
        }
        out
    }

    /// Sets `x = 1`.
    pub fn collapse_x(&self) -> Self {
        let mut out = self.empty_like();
        out.x_order = Some(0);
        for (k, c) in &self.terms {
            out.add_term(k.with_x(0), c.clone());
        }
        out
    }

    /// Replaces the ring's `x`-order, dropping terms above it.
    pub fn with_x_order(&self, x_order: Option<u32>) -> Self {
        let mut out = self.empty_like();
        out.x_order = x_order;
        for (k, c) in &self.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    /// Coefficients of `q^0..=q^q_order` of a series without color symbols
    /// or `x`.
    pub fn q_coefficients(&self) -> Result<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); (self.q_order.max(-1) + 1) as usize];
        for (k, c) in &self.terms {
            if k.x != 0 || k.color_degree() != 0 || k.q < 0 {
                return Err(Error::IncompatibleSeries(format!(
                    "term {} is not a plain power of q",
                    k.format(&self.symbols)
                )));
            }
            v[k.q as usize] += c;
        }
        Ok(v)
    }

    /// Builds `Σ c_n q^n` over no symbols.
    pub fn from_q_coefficients(coeffs: &[BigInt], q_order: i64) -> Self {
        let mut s = Self::zero(&[], q_order, None).expect("no symbols");
        for (n, c) in coeffs.iter().enumerate() {
            s.add_term(Monomial::q(n as i64), c.clone());
        }
        s
    }

    /// Applies a dilation/specialization and truncates at `report_order`.
    ///
    /// Terms above the source `q`-order are unknown, so the caller must pick
    /// a source order large enough that none of them could land at or below
    /// `report_order`.
    pub fn specialize(&self, spec: &Specialization, report_order: i64) -> Result<Self> {
        let images: Vec<Image> = self
            .symbols
            .iter()
            .map(|s| {
                spec.image(s)
                    .ok_or_else(|| Error::Parse(format!("specialization has no image for `{s}`")))
            })
            .collect::<Result<_>>()?;
        let mut out = Self::zero(&[], report_order, self.x_order)?;
        'terms: for (k, c) in &self.terms {
            let mut q = spec.q_dilation * k.q;
            for (i, &e) in k.colors.iter().enumerate().take(images.len()) {
                if e == 0 {
                    continue;
                }
                match images[i] {
                    Image::Zero => continue 'terms,
                    Image::One => {}
                    Image::Power(p) => q += p * e as i64,
                }
            }
            if q < 0 {
                return Err(Error::NegativeExponent(format!(
                    "{} maps to q^{q}",
                    k.format(&self.symbols)
                )));
            }
            out.add_term(Monomial::q(q).with_x(k.x), c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // lower q first, then symbols in declaration order
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (m.q, m.x, std::cmp::Reverse(m.colors)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            match (i, c.is_negative()) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", m.format(&self.symbols))?;
            } else {
                write!(f, "{a}*{}", m.format(&self.symbols))?;
            }
        }
        Ok(())
    }
}

/// Image of a color symbol under a specialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Image {
    Power(i64),
    Zero,
    One,
}

/// `q -> q^q_dilation` together with images for the color symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    pub q_dilation: i64,
    pub images: Vec<(String, Image)>,
}

impl Specialization {
    pub fn new(q_dilation: i64, images: &[(&str, Image)]) -> Self {
        Specialization {
            q_dilation,
            images: images.iter().map(|(s, i)| (s.to_string(), *i)).collect(),
        }
    }

    pub fn identity(symbols: &[String]) -> Self {
        Specialization {
            q_dilation: 1,
            images: symbols.iter().map(|s| (s.clone(), Image::One)).collect(),
        }
    }

    pub fn image(&self, symbol: &str) -> Option<Image> {
        self.images
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|(_, i)| *i)
    }
}

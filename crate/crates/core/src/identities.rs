//! Generating-function checks built on enumeration and truncated series,
//! including the mod-16 partition theorems and the colored overpartition
//! identity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::energy::{MinimalEnergy, State};
use crate::error::{Error, Result};
use crate::particle::Particle;
use crate::partition::{self, BoundSpec, Flavor};
use crate::series::{Image, Monomial, Specialization, TruncatedSeries};

fn symbols_of(e: &MinimalEnergy) -> Vec<String> {
    e.states().labels().to_vec()
}

/// Whether the graph of pairs with ε = 0 has a cycle (self-loops included).
fn zero_graph_has_cycle(e: &MinimalEnergy) -> bool {
    let n = e.len();
    // 0 = unvisited, 1 = on stack, 2 = done
    fn dfs(e: &MinimalEnergy, v: usize, mark: &mut [u8]) -> bool {
        mark[v] = 1;
        for w in 0..e.len() {
            if e.get(v, w) == 0 && (mark[w] == 1 || (mark[w] == 0 && dfs(e, w, mark))) {
                return true;
            }
        }
        mark[v] = 2;
        false
    }
    let mut mark = vec![0u8; n];
    (0..n).any(|v| mark[v] == 0 && dfs(e, v, &mut mark))
}

/// Chains `1_{c_1}, .., 1_{c_d}` with ε(c_i, c_{i+1}) = 0 and `d <= max_len`,
/// each contributing `x^d ∏ c_i q^{m d}`.
fn chains(e: &MinimalEnergy, ring: &TruncatedSeries, max_len: u32, m: i64) -> TruncatedSeries {
    let mut out = ring.one_like();
    let mut stack: Vec<(State, u32, Monomial)> = (0..e.len())
        .map(|c| (c, 1, Monomial::q(m).with_x(1).with_color(c, 1)))
        .collect();
    while let Some((c, d, mono)) = stack.pop() {
        if d > max_len || !ring.keeps(&mono) {
            continue;
        }
        out.add_term(mono, BigInt::one());
        for c2 in 0..e.len() {
            if e.get(c, c2) == 0 {
                stack.push((c2, d + 1, mono.mul(&Monomial::q(m).with_x(1).with_color(c2, 1))));
            }
        }
    }
    out
}

/// Generating function of O-side partitions whose potentials all equal 1,
/// by direct enumeration of chains. Without an `x`-order this is only
/// finite when the zero pattern of ε is acyclic.
pub fn base_function(e: &MinimalEnergy, x_order: Option<u32>) -> Result<TruncatedSeries> {
    let ring = TruncatedSeries::zero(&symbols_of(e), 0, x_order)?;
    let max_len = match x_order {
        Some(x) => x,
        None if zero_graph_has_cycle(e) => {
            return Err(Error::NonConvergent(
                "the base function has infinitely many terms".into(),
            ))
        }
        None => e.len() as u32,
    };
    Ok(chains(e, &ring, max_len, 0))
}

/// `∏_{m >= rho} F(ε; x q^m)` truncated at `q_order` and `x_order`.
pub fn euler_product(
    e: &MinimalEnergy,
    rho: i64,
    q_order: i64,
    x_order: Option<u32>,
) -> Result<TruncatedSeries> {
    let ring = TruncatedSeries::zero(&symbols_of(e), q_order, x_order)?;
    let mut out = ring.one_like();
    for m in rho.max(0)..=q_order.max(0) {
        let cap = if m == 0 {
            match x_order {
                Some(x) => x,
                None if zero_graph_has_cycle(e) => {
                    return Err(Error::NonConvergent("non-convergent at m=0".into()))
                }
                None => e.len() as u32,
            }
        } else {
            let by_q = (q_order / m) as u32;
            x_order.map_or(by_q, |x| x.min(by_q))
        };
        let factor = chains(e, &ring, cap, m);
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// `Σ (commutative color word) x^letters q^energy` over all partitions of
/// the given flavor in the ρ+ space with energy at most `q_order`.
pub fn series_from_enumeration(
    e: &MinimalEnergy,
    flavor: Flavor,
    bound: BoundSpec,
    q_order: i64,
    x_order: Option<u32>,
) -> Result<TruncatedSeries> {
    let BoundSpec::Plus(rho) = bound else {
        return Err(Error::Unsupported(
            "series from enumeration needs a ρ+ bound".into(),
        ));
    };
    let mut out = TruncatedSeries::zero(&symbols_of(e), q_order, x_order)?;
    let mut err = None;
    partition::for_each_up_to(
        e,
        flavor,
        rho,
        q_order,
        x_order.map(|x| x as usize),
        &mut |ps| {
            let mut mono = Monomial::ONE;
            let mut word = Vec::new();
            for x in ps {
                x.push_states(&mut word);
                mono.q += x.potential(e);
            }
            mono.x = word.len() as u32;
            for c in word {
                mono = mono.with_color(c, 1);
            }
            if mono.q < 0 {
                err = Some(Error::NegativeExponent(format!("{mono:?}")));
            }
            out.add_term(mono, BigInt::one());
        },
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

// ---------------------------------------------------------------------------
// Mod-16 partition theorems

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiladicVariant {
    /// Distinct odd parts against gap conditions `>= 5`.
    DistinctOdd,
    /// Odd parts against gap conditions on gaps `0..=3`.
    Odd,
}

impl FromStr for SiladicVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct-odd" => Ok(SiladicVariant::DistinctOdd),
            "odd" => Ok(SiladicVariant::Odd),
            _ => Err(Error::Parse(format!("unknown variant `{s}`"))),
        }
    }
}

fn residue_in(sum: i64, allowed: &[i64]) -> bool {
    let r = sum.rem_euclid(16);
    allowed.iter().any(|&a| a.rem_euclid(16) == r)
}

/// Whether the consecutive pair `(big, small)` satisfies the variant's
/// difference and congruence rules.
pub fn pair_allowed(variant: SiladicVariant, big: i64, small: i64) -> bool {
    let (gap, sum) = (big - small, big + small);
    match variant {
        SiladicVariant::DistinctOdd => match gap {
            ..=4 => false,
            5 => residue_in(sum, &[3, -3]),
            6 => residue_in(sum, &[0, 4, -4, 8]),
            7 => residue_in(sum, &[1, -1, 5, -5, 7, -7]),
            8 => residue_in(sum, &[0, 2, -2, 6, -6, 8]),
            _ => true,
        },
        SiladicVariant::Odd => match gap {
            ..0 => false,
            0 => residue_in(sum, &[4, -4]),
            1 => residue_in(sum, &[3, -3]),
            2 => residue_in(sum, &[2, -2, 6, -6]),
            3 => residue_in(sum, &[1, -1, 5, -5, 7, -7]),
            _ => true,
        },
    }
}

/// Partitions of `n` (weakly decreasing parts) satisfying the variant's
/// conditions, in reverse lexicographic order.
pub fn condition_side(variant: SiladicVariant, n: i64) -> Vec<Vec<i64>> {
    fn go(
        variant: SiladicVariant,
        rem: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        let top = cur.last().map_or(rem, |&l| l.min(rem));
        for p in (1..=top).rev() {
            if variant == SiladicVariant::DistinctOdd && p == 2 {
                continue;
            }
            if let Some(&l) = cur.last() {
                if !pair_allowed(variant, l, p) {
                    continue;
                }
            }
            cur.push(p);
            go(variant, rem - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(variant, n, &mut Vec::new(), &mut out);
    out
}

/// Counts of the product side (distinct odd parts, or odd parts) for
/// `0..=n_max`, by dynamic programming over parts.
pub fn euler_side(variant: SiladicVariant, n_max: i64) -> Vec<u64> {
    let n = n_max.max(0) as usize;
    let mut dp = vec![0u64; n + 1];
    dp[0] = 1;
    for part in (1..=n).step_by(2) {
        match variant {
            SiladicVariant::DistinctOdd => {
                for t in (part..=n).rev() {
                    dp[t] += dp[t - part];
                }
            }
            SiladicVariant::Odd => {
                for t in part..=n {
                    dp[t] += dp[t - part];
                }
            }
        }
    }
    dp
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub n: i64,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountReport {
    pub rows: Vec<CountRow>,
}

impl CountReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.lhs == r.rhs)
    }

    /// One `n\tlhs\trhs\tequal|differ` line per row.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let tag = if r.lhs == r.rhs { "equal" } else { "differ" };
            writeln!(s, "{}\t{}\t{}\t{tag}", r.n, r.lhs, r.rhs).unwrap();
        }
        s
    }
}

pub fn check_siladic(variant: SiladicVariant, n_max: i64) -> CountReport {
    let lhs = euler_side(variant, n_max);
    let rows = (1..=n_max)
        .map(|n| CountRow {
            n,
            lhs: lhs[n as usize],
            rhs: condition_side(variant, n).len() as u64,
        })
        .collect();
    CountReport { rows }
}

// ---------------------------------------------------------------------------
// Colored overpartitions

/// The identification of a secondary state of the overpartition energy with
/// a secondary color, an overline flag and a potential parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecondaryClass {
    pub color: &'static str,
    pub overlined: bool,
    pub odd: bool,
}

const fn class(color: &'static str, overlined: bool, odd: bool) -> SecondaryClass {
    SecondaryClass {
        color,
        overlined,
        odd,
    }
}

/// Rows are the upper state, columns the lower state, both in the order
/// `bbar, abar, a, b`.
pub const SECONDARY_CLASSES: [[SecondaryClass; 4]; 4] = [
    [
        class("b2", false, true),
        class("ba", false, true),
        class("ba", true, true),
        class("b2", true, true),
    ],
    [
        class("ab", false, false),
        class("a2", false, true),
        class("a2", true, true),
        class("ab", true, true),
    ],
    [
        class("ab", true, false),
        class("a2", true, false),
        class("a2", false, false),
        class("ab", false, true),
    ],
    [
        class("b2", true, false),
        class("ba", true, false),
        class("ba", false, false),
        class("b2", false, false),
    ],
];

impl SecondaryClass {
    /// Contribution to the overline statistic: 1 for an overlined particle,
    /// 2 for even `ab` and odd `a2`, `ba`, `b2`.
    pub fn weight(&self) -> u32 {
        if self.overlined {
            1
        } else if (self.color == "ab") != self.odd {
            2
        } else {
            0
        }
    }
}

/// Statistics `(n, u, v, w)`: size, number of `a` symbols, number of `b`
/// symbols and the overline statistic.
pub type OverStats = (i64, u32, u32, u32);

const BBAR: State = 0;
const ABAR: State = 1;
const A: State = 2;

fn is_a(c: State) -> bool {
    c == ABAR || c == A
}

fn is_overlined(c: State) -> bool {
    c == BBAR || c == ABAR
}

fn stats_of(e: &MinimalEnergy, ps: &[Particle], via_classes: bool) -> OverStats {
    let (mut n, mut u, mut v, mut w) = (0, 0, 0, 0);
    for x in ps {
        n += x.potential(e);
        let mut letters = Vec::new();
        x.push_states(&mut letters);
        for &c in &letters {
            if is_a(c) {
                u += 1;
            } else {
                v += 1;
            }
        }
        match x {
            Particle::Secondary(s) if via_classes => {
                w += SECONDARY_CLASSES[s.upper][s.lower].weight();
            }
            _ => w += letters.iter().filter(|&&c| is_overlined(c)).count() as u32,
        }
    }
    (n, u, v, w)
}

/// Refined counts of O-side (`A`) or E-side (`B`) overpartitions with
/// positive potentials and size at most `n_max`. The E-side overline
/// statistic is read from [`SECONDARY_CLASSES`].
pub fn overpartition_counts(flavor: Flavor, n_max: i64) -> Result<BTreeMap<OverStats, u64>> {
    let e = MinimalEnergy::overpartition();
    let mut out = BTreeMap::new();
    partition::for_each_up_to(&e, flavor, 1, n_max, None, &mut |ps| {
        *out.entry(stats_of(&e, ps, flavor != Flavor::O)).or_insert(0) += 1;
    })?;
    Ok(out)
}

fn over_symbols() -> Vec<String> {
    ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect()
}

/// `(-acq;q)_∞ (-bcq;q)_∞ / ((adq;q)_∞ (bdq;q)_∞)` over symbols `a, b, c, d`.
pub fn overpartition_product(q_order: i64) -> Result<TruncatedSeries> {
    let ring = TruncatedSeries::one(&over_symbols(), q_order, None)?;
    let (a, b, c, d) = (0, 1, 2, 3);
    let m = |s: usize, t: usize| Monomial::q(1).with_color(s, 1).with_color(t, 1);
    let mut out = ring.clone();
    for (base, reciprocal) in [(m(a, c), false), (m(b, c), false), (m(a, d), true), (m(b, d), true)] {
        let sign = if reciprocal { 1 } else { -1 };
        let f = TruncatedSeries::pochhammer(&ring, sign, base, 1, None, reciprocal)?;
        out = out.mul(&f)?;
    }
    Ok(out)
}

/// `Σ count · a^u b^v c^w d^{u+v-w} q^n`.
pub fn overpartition_series(counts: &BTreeMap<OverStats, u64>, q_order: i64) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::zero(&over_symbols(), q_order, None)?;
    for (&(n, u, v, w), &c) in counts {
        if u + v < w {
            return Err(Error::InvariantViolated(format!(
                "overline statistic {w} exceeds particle count {}",
                u + v
            )));
        }
        let m = Monomial::q(n)
            .with_color(0, u as u16)
            .with_color(1, v as u16)
            .with_color(2, w as u16)
            .with_color(3, (u + v - w) as u16);
        s.add_term(m, BigInt::from(c));
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverpartitionRow {
    pub n: i64,
    pub a_total: u64,
    pub b_total: u64,
    /// `A(n; u, v, w) = B(n; u, v, w)` for every statistic.
    pub refined_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverpartitionReport {
    pub rows: Vec<OverpartitionRow>,
    /// Both refined series agree with the product to the same order.
    pub series_equal: bool,
}

impl OverpartitionReport {
    pub fn passed(&self) -> bool {
        self.series_equal && self.rows.iter().all(|r| r.refined_equal)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let tag = if r.refined_equal { "equal" } else { "differ" };
            writeln!(s, "{}\t{}\t{}\t{tag}", r.n, r.a_total, r.b_total).unwrap();
        }
        s
    }
}

pub fn check_overpartition_corollary(n_max: i64) -> Result<OverpartitionReport> {
    let a = overpartition_counts(Flavor::O, n_max)?;
    let b = overpartition_counts(Flavor::E_STANDARD, n_max)?;
    let rows = (0..=n_max)
        .map(|n| {
            let pick = |m: &BTreeMap<OverStats, u64>| -> BTreeMap<OverStats, u64> {
                m.iter().filter(|(k, _)| k.0 == n).map(|(k, v)| (*k, *v)).collect()
            };
            let (an, bn) = (pick(&a), pick(&b));
            OverpartitionRow {
                n,
                a_total: an.values().sum(),
                b_total: bn.values().sum(),
                refined_equal: an == bn,
            }
        })
        .collect();
    let product = overpartition_product(n_max)?;
    let series_equal =
        overpartition_series(&a, n_max)? == product && overpartition_series(&b, n_max)? == product;
    Ok(OverpartitionReport { rows, series_equal })
}

/// `(q, a, b, c, d) -> (q^4, q^-1, q^-3, 1, 0)`.
pub fn distinct_odd_specialization() -> Specialization {
    Specialization::new(
        4,
        &[
            ("a", Image::Power(-1)),
            ("b", Image::Power(-3)),
            ("c", Image::One),
            ("d", Image::Zero),
        ],
    )
}

/// `(q, a, b, c, d) -> (q^4, q^-3, q^-1, 0, 1)`.
pub fn odd_parts_specialization() -> Specialization {
    Specialization::new(
        4,
        &[
            ("a", Image::Power(-3)),
            ("b", Image::Power(-1)),
            ("c", Image::Zero),
            ("d", Image::One),
        ],
    )
}

/// Specializes the overpartition product and compares with the distinct-odd
/// and odd-parts products, returning `(distinct_odd_ok, odd_ok)`.
///
/// Every part `m` of the product maps to an exponent of at least `m`, so a
/// source order of `q_order` is enough.
pub fn check_specializations(q_order: i64) -> Result<(bool, bool)> {
    let product = overpartition_product(q_order)?;
    let plain = TruncatedSeries::one(&[], q_order, None)?;
    let distinct_odd = TruncatedSeries::pochhammer(&plain, -1, Monomial::q(1), 2, None, false)?;
    let odd = TruncatedSeries::pochhammer(&plain, 1, Monomial::q(1), 2, None, true)?;
    let s1 = product.specialize(&distinct_odd_specialization(), q_order)?;
    let s2 = product.specialize(&odd_parts_specialization(), q_order)?;
    Ok((s1 == distinct_odd, s2 == odd))
}

/// Coefficients `q^0..=q^n` as plain integers, for reports.
pub fn as_counts(s: &TruncatedSeries) -> Result<Vec<BigInt>> {
    let mut v = s.q_coefficients()?;
    while v.last().is_some_and(|c| c.is_zero()) && v.len() > 1 {
        v.pop();
    }
    Ok(v)
}

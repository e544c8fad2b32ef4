//! Generalized colored partitions, bounds, enumeration and difference matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::energy::{ColorWord, MinimalEnergy, State, StateSet};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::particle::{self, Particle, ParticleJson, Relation};

/// O-side partitions are primary sequences under `≻ε`; E-side partitions mix
/// primaries and secondaries under `≫ε` or its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    O,
    E(Relation),
}

impl Flavor {
    pub const E_STANDARD: Flavor = Flavor::E(Relation::Standard);
    pub const E_DUAL: Flavor = Flavor::E(Relation::Dual);

    pub fn tag(self) -> &'static str {
        match self {
            Flavor::O => "O",
            Flavor::E(Relation::Standard) => "E",
            Flavor::E(Relation::Dual) => "E-dual",
        }
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O" => Ok(Flavor::O),
            "E" => Ok(Flavor::E_STANDARD),
            "E-dual" => Ok(Flavor::E_DUAL),
            _ => Err(Error::Parse(format!("unknown flavor `{s}`"))),
        }
    }
}

/// Restriction of potentials to `≥ ρ` or `≤ ρ`, with `ρ ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundSpec {
    #[default]
    Unbounded,
    Plus(i64),
    Minus(i64),
}

impl BoundSpec {
    pub const ALL: [BoundSpec; 4] = [
        BoundSpec::Plus(0),
        BoundSpec::Plus(1),
        BoundSpec::Minus(0),
        BoundSpec::Minus(1),
    ];

    pub fn rho(self) -> Option<i64> {
        match self {
            BoundSpec::Unbounded => None,
            BoundSpec::Plus(r) | BoundSpec::Minus(r) => Some(r),
        }
    }

    /// Whether a single particle lies in the bounded particle set.
    pub fn admits(self, e: &MinimalEnergy, x: &Particle) -> bool {
        match (self, x) {
            (BoundSpec::Unbounded, _) => true,
            (BoundSpec::Plus(r), Particle::Primary(p)) => p.k >= r,
            (BoundSpec::Plus(r), Particle::Secondary(s)) => s.k >= r,
            (BoundSpec::Minus(r), Particle::Primary(p)) => p.k <= r,
            (BoundSpec::Minus(r), Particle::Secondary(s)) => s.k + e.get(s.upper, s.lower) <= r,
        }
    }
}

impl FromStr for BoundSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad bound `{s}`, expected one of 0+ 1+ 0- 1- none"));
        if s == "none" || s == "unbounded" {
            return Ok(BoundSpec::Unbounded);
        }
        let (rho, sign) = s.split_at(s.len().saturating_sub(1));
        let rho: i64 = rho.parse().map_err(|_| bad())?;
        if rho != 0 && rho != 1 {
            return Err(bad());
        }
        match sign {
            "+" => Ok(BoundSpec::Plus(rho)),
            "-" => Ok(BoundSpec::Minus(rho)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSpec::Unbounded => f.write_str("none"),
            BoundSpec::Plus(r) => write!(f, "{r}+"),
            BoundSpec::Minus(r) => write!(f, "{r}-"),
        }
    }
}

/// First violated condition found by [`ColoredPartition::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based particle position.
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "particle {}: {}", self.position, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredPartition {
    pub flavor: Flavor,
    pub particles: Vec<Particle>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    flavor: String,
    particles: Vec<ParticleJson>,
}

impl ColoredPartition {
    pub fn new(flavor: Flavor, particles: Vec<Particle>) -> Self {
        ColoredPartition { flavor, particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn energy(&self, e: &MinimalEnergy) -> i64 {
        self.particles.iter().map(|x| x.potential(e)).sum()
    }

    pub fn color_word(&self) -> ColorWord {
        let mut out = Vec::with_capacity(self.particles.len() * 2);
        for x in &self.particles {
            x.push_states(&mut out);
        }
        ColorWord(out)
    }

    /// Block lengths of the particles, in order.
    pub fn shape(&self) -> Vec<usize> {
        self.particles.iter().map(Particle::degree).collect()
    }

    pub fn validate(
        &self,
        e: &MinimalEnergy,
        bound: BoundSpec,
    ) -> std::result::Result<(), Violation> {
        let states = e.states();
        for (i, x) in self.particles.iter().enumerate() {
            if self.flavor == Flavor::O && x.degree() != 1 {
                return Err(Violation {
                    position: i + 1,
                    reason: format!("{} is not primary", x.format(states)),
                });
            }
            if !bound.admits(e, x) {
                return Err(Violation {
                    position: i + 1,
                    reason: format!("{} violates bound {bound}", x.format(states)),
                });
            }
        }
        for (i, w) in self.particles.windows(2).enumerate() {
            let ok = match self.flavor {
                Flavor::O => {
                    let (p, q) = (w[0].as_primary().unwrap(), w[1].as_primary().unwrap());
                    particle::rel_succ(e, p, q)
                }
                Flavor::E(rel) => particle::related(e, rel, &w[0], &w[1]),
            };
            if !ok {
                return Err(Violation {
                    position: i + 1,
                    reason: format!(
                        "{} and {} are not related",
                        w[0].format(states),
                        w[1].format(states)
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, e: &MinimalEnergy, bound: BoundSpec) -> bool {
        self.validate(e, bound).is_ok()
    }

    /// Comma-separated particle shorthand.
    pub fn format(&self, states: &StateSet) -> String {
        self.particles
            .iter()
            .map(|x| x.format(states))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str, flavor: Flavor, states: &StateSet) -> Result<Self> {
        let text = text.trim();
        let particles = if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|t| Particle::parse(t, states))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(ColoredPartition::new(flavor, particles))
    }

    pub fn to_json(&self, states: &StateSet) -> String {
        let j = PartitionJson {
            flavor: self.flavor.tag().to_string(),
            particles: self.particles.iter().map(|x| x.to_json(states)).collect(),
        };
        serde_json::to_string(&j).expect("partition serializes")
    }

    pub fn from_json(text: &str, states: &StateSet) -> Result<Self> {
        let j: PartitionJson = serde_json::from_str(text)?;
        let particles = j
            .particles
            .iter()
            .map(|p| Particle::from_json(p, states))
            .collect::<Result<Vec<_>>>()?;
        Ok(ColoredPartition::new(j.flavor.parse()?, particles))
    }
}

// ---------------------------------------------------------------------------
// Enumeration

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    P(State),
    S(State, State),
}

impl Block {
    fn eps(self, e: &MinimalEnergy) -> i64 {
        match self {
            Block::P(_) => 0,
            Block::S(c, c2) => e.get(c, c2),
        }
    }

    fn weight(self, e: &MinimalEnergy, x: i64) -> i64 {
        match self {
            Block::P(_) => x,
            Block::S(..) => 2 * x + self.eps(e),
        }
    }

    /// Largest `x` with `weight(x) <= cap`.
    fn x_for_weight_at_most(self, e: &MinimalEnergy, cap: i64) -> i64 {
        match self {
            Block::P(_) => cap,
            Block::S(..) => (cap - self.eps(e)).div_euclid(2),
        }
    }

    /// The `x` with `weight(x) == w`, if any.
    fn x_for_weight(self, e: &MinimalEnergy, w: i64) -> Option<i64> {
        match self {
            Block::P(_) => Some(w),
            Block::S(..) => {
                let r = w - self.eps(e);
                (r.rem_euclid(2) == 0).then_some(r / 2)
            }
        }
    }

    fn particle(self, x: i64) -> Particle {
        match self {
            Block::P(c) => Particle::primary(x, c),
            Block::S(c, c2) => Particle::secondary(x, c, c2),
        }
    }

    /// Range of `x` admitted by the bound, as (lower, upper).
    fn bound_range(self, e: &MinimalEnergy, bound: BoundSpec) -> (Option<i64>, Option<i64>) {
        match bound {
            BoundSpec::Unbounded => (None, None),
            BoundSpec::Plus(r) => (Some(r), None),
            BoundSpec::Minus(r) => (None, Some(r - self.eps(e))),
        }
    }
}

/// Largest admissible `x'` for the block following a block with parameter
/// `x`, in closed form per degree pattern.
fn max_next(e: &MinimalEnergy, flavor: Flavor, a: Block, b: Block, x: i64) -> i64 {
    let rel = match flavor {
        Flavor::O => {
            let (Block::P(c), Block::P(c2)) = (a, b) else {
                unreachable!("O-side blocks are primary")
            };
            return x - e.get(c, c2);
        }
        Flavor::E(rel) => rel,
    };
    let dual = (rel == Relation::Dual) as i64;
    match (a, b) {
        (Block::P(c), Block::P(c2)) => x - e.get(c, c2) - 1,
        (Block::P(c), Block::S(c2, c3)) => {
            (x - e.get(c, c2) - 2 * e.get(c2, c3) - dual).div_euclid(2)
        }
        (Block::S(_, c2), Block::P(c3)) => 2 * x - e.get(c2, c3) - 1 + dual,
        (Block::S(_, c2), Block::S(c3, c4)) => x - e.get(c2, c3) - e.get(c3, c4),
    }
}

/// Segmentations of `len` letters into blocks of 1 and 2, lexicographic
/// with 1 before 2.
pub fn segmentations(len: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for b in [1, 2] {
            if b <= rest {
                cur.push(b);
                go(rest - b, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(len, &mut Vec::new(), &mut out);
    out
}

fn blocks_for(word: &ColorWord, seg: &[usize]) -> Vec<Block> {
    let mut pos = 0;
    seg.iter()
        .map(|&len| {
            let b = if len == 1 {
                Block::P(word.0[pos])
            } else {
                Block::S(word.0[pos], word.0[pos + 1])
            };
            pos += len;
            b
        })
        .collect()
}

struct ShapeSearch<'a> {
    e: &'a MinimalEnergy,
    flavor: Flavor,
    blocks: Vec<Block>,
    lo: Vec<Option<i64>>,
    hi: Vec<Option<i64>>,
    /// Least `x_i` from which a bounded suffix exists (ρ+ only).
    min_x: Vec<i64>,
    /// Least energy of the suffix starting at `i` (ρ+ only).
    min_suffix: Vec<i64>,
}

impl<'a> ShapeSearch<'a> {
    fn new(e: &'a MinimalEnergy, flavor: Flavor, blocks: Vec<Block>, bound: BoundSpec) -> Self {
        let (lo, hi): (Vec<_>, Vec<_>) = blocks.iter().map(|b| b.bound_range(e, bound)).unzip();
        let mut s = ShapeSearch {
            e,
            flavor,
            blocks,
            lo,
            hi,
            min_x: Vec::new(),
            min_suffix: Vec::new(),
        };
        if let BoundSpec::Plus(_) = bound {
            let n = s.blocks.len();
            s.min_x = vec![0; n];
            s.min_suffix = vec![0; n + 1];
            for i in (0..n).rev() {
                let mut x = s.lo[i].unwrap();
                if i + 1 < n {
                    let target = s.min_x[i + 1];
                    // max_next grows at least like x/2, so this terminates quickly
                    // once x exceeds 2*|target| + 4.
                    while s.next_cap(i, x) < target {
                        x = x.max(0) * 2 + 1;
                    }
                    // tighten by bisection over [lo, x]
                    let (mut a, mut b) = (s.lo[i].unwrap(), x);
                    while a < b {
                        let m = a + (b - a) / 2;
                        if s.next_cap(i, m) >= target {
                            b = m;
                        } else {
                            a = m + 1;
                        }
                    }
                    x = a;
                }
                s.min_x[i] = x;
                s.min_suffix[i] = s.min_suffix[i + 1] + s.blocks[i].weight(e, x);
            }
        }
        s
    }

    fn next_cap(&self, i: usize, x: i64) -> i64 {
        max_next(self.e, self.flavor, self.blocks[i], self.blocks[i + 1], x)
    }

    /// Most energy the suffix from `i` can carry if block `i - 1` has `x`.
    fn max_suffix(&self, i: usize, mut prev: i64) -> i64 {
        let mut total = 0;
        for j in i..self.blocks.len() {
            let mut x = self.next_cap(j - 1, prev);
            if let Some(h) = self.hi[j] {
                x = x.min(h);
            }
            total += self.blocks[j].weight(self.e, x);
            prev = x;
        }
        total
    }

    fn run(&self, n: i64, emit: &mut dyn FnMut(&[i64])) {
        if self.blocks.is_empty() {
            if n == 0 {
                emit(&[]);
            }
            return;
        }
        let mut xs = Vec::with_capacity(self.blocks.len());
        self.step(0, n, &mut xs, emit);
    }

    fn step(&self, i: usize, rem: i64, xs: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
        let e = self.e;
        let b = self.blocks[i];
        let last = i + 1 == self.blocks.len();
        let mut ub = self.hi[i];
        if i > 0 {
            let c = self.next_cap(i - 1, xs[i - 1]);
            ub = Some(ub.map_or(c, |u| u.min(c)));
        }
        let mut lb = self.lo[i];
        if !self.min_x.is_empty() {
            lb = Some(self.min_x[i]);
            let cap = b.x_for_weight_at_most(e, rem - self.min_suffix[i + 1]);
            ub = Some(ub.map_or(cap, |u| u.min(cap)));
        }
        if last {
            if let Some(x) = b.x_for_weight(e, rem) {
                if ub.is_none_or(|u| x <= u) && lb.is_none_or(|l| x >= l) {
                    xs.push(x);
                    emit(xs);
                    xs.pop();
                }
            }
            return;
        }
        let Some(ub) = ub else {
            unreachable!("first block of a bounded search always has an upper bound")
        };
        // Collect candidates descending, then visit ascending for lexicographic output.
        let mut cands = Vec::new();
        let mut x = ub;
        while lb.is_none_or(|l| x >= l) {
            let w = b.weight(e, x);
            if w + self.max_suffix(i + 1, x) < rem {
                break;
            }
            cands.push(x);
            x -= 1;
        }
        for &x in cands.iter().rev() {
            xs.push(x);
            self.step(i + 1, rem - b.weight(e, x), xs, emit);
            xs.pop();
        }
    }
}

fn check_bounded(bound: BoundSpec) -> Result<()> {
    if bound == BoundSpec::Unbounded {
        return Err(Error::Unbounded);
    }
    Ok(())
}

/// All partitions of the given flavor with color word `word`, energy `n`
/// and particles within `bound`, ordered by (block lengths, potentials).
pub fn enumerate(
    e: &MinimalEnergy,
    flavor: Flavor,
    word: &ColorWord,
    n: i64,
    bound: BoundSpec,
) -> Result<Vec<ColoredPartition>> {
    enumerate_with(e, flavor, word, n, bound, Execution::default())
}

pub fn enumerate_with(
    e: &MinimalEnergy,
    flavor: Flavor,
    word: &ColorWord,
    n: i64,
    bound: BoundSpec,
    exec: Execution,
) -> Result<Vec<ColoredPartition>> {
    check_bounded(bound)?;
    let segs = match flavor {
        Flavor::O => vec![vec![1; word.len()]],
        Flavor::E(_) => segmentations(word.len()),
    };
    let parts = par::map_ordered(exec, &segs, |seg| {
        let blocks = blocks_for(word, seg);
        let search = ShapeSearch::new(e, flavor, blocks.clone(), bound);
        let mut out = Vec::new();
        search.run(n, &mut |xs| {
            let particles = blocks.iter().zip(xs).map(|(b, &x)| b.particle(x)).collect();
            out.push(ColoredPartition::new(flavor, particles));
        });
        out
    });
    Ok(parts.into_iter().flatten().collect())
}

pub fn count(
    e: &MinimalEnergy,
    flavor: Flavor,
    word: &ColorWord,
    n: i64,
    bound: BoundSpec,
) -> Result<usize> {
    check_bounded(bound)?;
    let segs = match flavor {
        Flavor::O => vec![vec![1; word.len()]],
        Flavor::E(_) => segmentations(word.len()),
    };
    let mut total = 0;
    for seg in &segs {
        let search = ShapeSearch::new(e, flavor, blocks_for(word, seg), bound);
        search.run(n, &mut |_| total += 1);
    }
    Ok(total)
}

/// Least (for ρ+) or greatest (for ρ−) energy of an O-side partition with
/// color word `word`; `None` for the empty word.
pub fn extremal_energy(e: &MinimalEnergy, word: &ColorWord, bound: BoundSpec) -> Result<Option<i64>> {
    check_bounded(bound)?;
    if word.is_empty() {
        return Ok(None);
    }
    let blocks = blocks_for(word, &vec![1; word.len()]);
    let search = ShapeSearch::new(e, Flavor::O, blocks, bound);
    Ok(Some(match bound {
        BoundSpec::Plus(_) => search.min_suffix[0],
        _ => {
            let h = search.hi[0].unwrap();
            h + search.max_suffix(1, h)
        }
    }))
}

/// Visits every partition of the given flavor with particles in the ρ+
/// space, energy at most `max_energy` and at most `max_letters` states.
/// The empty partition is included.
pub fn for_each_up_to(
    e: &MinimalEnergy,
    flavor: Flavor,
    rho: i64,
    max_energy: i64,
    max_letters: Option<usize>,
    visit: &mut dyn FnMut(&[Particle]),
) -> Result<()> {
    if rho < 1 && max_letters.is_none() {
        return Err(Error::Unsupported(
            "enumerating ρ = 0 partitions by energy requires a letter cap".into(),
        ));
    }
    let n = e.len();
    let mut kinds: Vec<Block> = (0..n).map(Block::P).collect();
    if let Flavor::E(_) = flavor {
        for c in 0..n {
            for c2 in 0..n {
                kinds.push(Block::S(c, c2));
            }
        }
    }
    let max_letters = max_letters.unwrap_or(usize::MAX);
    let mut stack: Vec<(Block, i64)> = Vec::new();
    let mut particles: Vec<Particle> = Vec::new();
    visit(&particles);

    struct Ctx<'a> {
        e: &'a MinimalEnergy,
        flavor: Flavor,
        rho: i64,
        kinds: &'a [Block],
        max_letters: usize,
    }

    fn go(
        ctx: &Ctx,
        rem: i64,
        letters: usize,
        stack: &mut Vec<(Block, i64)>,
        particles: &mut Vec<Particle>,
        visit: &mut dyn FnMut(&[Particle]),
    ) {
        for &b in ctx.kinds {
            let deg = if matches!(b, Block::P(_)) { 1 } else { 2 };
            if letters + deg > ctx.max_letters {
                continue;
            }
            let mut ub = b.x_for_weight_at_most(ctx.e, rem);
            if let Some(&(pb, px)) = stack.last() {
                ub = ub.min(max_next(ctx.e, ctx.flavor, pb, b, px));
            }
            let mut x = ctx.rho;
            while x <= ub {
                stack.push((b, x));
                particles.push(b.particle(x));
                visit(particles);
                go(ctx, rem - b.weight(ctx.e, x), letters + deg, stack, particles, visit);
                particles.pop();
                stack.pop();
                x += 1;
            }
        }
    }

    let ctx = Ctx {
        e,
        flavor,
        rho,
        kinds: &kinds,
        max_letters,
    };
    go(&ctx, max_energy, 0, &mut stack, &mut particles, visit);
    Ok(())
}

pub fn enumerate_up_to(
    e: &MinimalEnergy,
    flavor: Flavor,
    rho: i64,
    max_energy: i64,
    max_letters: Option<usize>,
) -> Result<Vec<ColoredPartition>> {
    let mut out = Vec::new();
    for_each_up_to(e, flavor, rho, max_energy, max_letters, &mut |ps| {
        out.push(ColoredPartition::new(flavor, ps.to_vec()))
    })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Difference matrices

/// Minimal potential differences for `≫ε` over primary and secondary states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMatrix {
    /// Primary labels, then secondary labels `upper.lower` in row-major order.
    pub labels: Vec<String>,
    pub entries: Vec<Vec<i64>>,
    /// Potential parity per label; `None` for primary states.
    pub parity: Vec<Option<i64>>,
}

impl DifferenceMatrix {
    pub fn to_json(&self) -> String {
        serde_json::json!({ "states": self.labels, "matrix": self.entries }).to_string()
    }

    /// Reads the same `{"states": [...], "matrix": [[...]]}` layout.
    pub fn from_json(text: &str) -> Result<(Vec<String>, Vec<Vec<i64>>)> {
        #[derive(Deserialize)]
        struct M {
            states: Vec<String>,
            matrix: Vec<Vec<i64>>,
        }
        let m: M = serde_json::from_str(text)?;
        Ok((m.states, m.matrix))
    }
}

fn shape_labels(e: &MinimalEnergy) -> (Vec<Block>, Vec<String>) {
    let n = e.len();
    let st = e.states();
    let mut blocks: Vec<Block> = (0..n).map(Block::P).collect();
    let mut labels: Vec<String> = st.labels().to_vec();
    for c in 0..n {
        for c2 in 0..n {
            blocks.push(Block::S(c, c2));
            labels.push(format!("{}.{}", st.label(c), st.label(c2)));
        }
    }
    (blocks, labels)
}

/// For each ordered pair of shapes, the least realizable potential
/// difference from which `≫ε` holds. Found by scanning both particles, so it
/// doubles as a check that the relation depends only on the difference and
/// is monotone in it.
pub fn difference_matrix(e: &MinimalEnergy, relation: Relation) -> DifferenceMatrix {
    let (blocks, labels) = shape_labels(e);
    const SPAN: i64 = 8;
    let entries = blocks
        .iter()
        .map(|&a| {
            blocks
                .iter()
                .map(|&b| {
                    // difference -> holds
                    let mut seen = std::collections::BTreeMap::new();
                    for x in -SPAN..=SPAN {
                        for y in -SPAN..=SPAN {
                            let (xp, yp) = (a.particle(x), b.particle(y));
                            let holds = particle::related(e, relation, &xp, &yp);
                            let d = xp.potential(e) - yp.potential(e);
                            if *seen.entry(d).or_insert(holds) != holds {
                                panic!("relation is not a function of the difference {d}");
                            }
                        }
                    }
                    let threshold = seen
                        .iter()
                        .find(|(_, &h)| h)
                        .map(|(&d, _)| d)
                        .expect("threshold within scan span");
                    if seen.range(threshold..).any(|(_, &h)| !h) {
                        panic!("relation not monotone between shapes at difference {threshold}");
                    }
                    threshold
                })
                .collect()
        })
        .collect();
    let parity = blocks
        .iter()
        .map(|b| match b {
            Block::P(_) => None,
            Block::S(..) => Some(b.eps(e)),
        })
        .collect();
    DifferenceMatrix {
        labels,
        entries,
        parity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particle::rel_gg;

    fn d() -> MinimalEnergy {
        MinimalEnergy::overpartition()
    }

    fn lambda(e: &MinimalEnergy) -> ColoredPartition {
        ColoredPartition::parse(
            "11:bbar,5:b,5:a,5:a,4:abar,2:a,1:b,1:abar,0:a,0:bbar,-1:b,-2:b",
            Flavor::O,
            e.states(),
        )
        .unwrap()
    }

    fn set(e: &MinimalEnergy, ps: &[ColoredPartition]) -> Vec<String> {
        let mut v: Vec<String> = ps.iter().map(|p| p.format(e.states())).collect();
        v.sort();
        v
    }

    #[test]
    fn validate_examples() {
        let e = d();
        let l = lambda(&e);
        assert!(l.is_valid(&e, BoundSpec::Unbounded));
        assert!(!l.is_valid(&e, BoundSpec::Plus(0)));
        for f in [Flavor::O, Flavor::E_STANDARD, Flavor::E_DUAL] {
            for b in BoundSpec::ALL {
                assert!(ColoredPartition::new(f, vec![]).is_valid(&e, b));
            }
        }
        let bad = ColoredPartition::parse("1:a,5:b", Flavor::O, e.states()).unwrap();
        let v = bad.validate(&e, BoundSpec::Unbounded).unwrap_err();
        assert_eq!(v.position, 1);
        let sec = ColoredPartition::parse("5*b.a", Flavor::O, e.states()).unwrap();
        assert!(!sec.is_valid(&e, BoundSpec::Unbounded));
    }

    #[test]
    fn energy_and_word() {
        let e = d();
        let l = lambda(&e);
        assert_eq!(l.energy(&e), 31);
        assert_eq!(
            e.states().format_word(&l.color_word()),
            "bbar,b,a,a,abar,a,b,abar,a,bbar,b,b"
        );
        let nu = ColoredPartition::parse(
            "11:bbar,5*b.a,3*a.abar,4:a,2:b,0*abar.a,-1:bbar,-1*b.b",
            Flavor::E_STANDARD,
            e.states(),
        )
        .unwrap();
        assert_eq!(nu.energy(&e), 31);
        assert_eq!(nu.color_word(), l.color_word());
        let empty = ColoredPartition::new(Flavor::O, vec![]);
        assert_eq!(empty.energy(&e), 0);
        assert!(empty.color_word().is_empty());
    }

    #[test]
    fn bound_parsing() {
        assert_eq!("0+".parse::<BoundSpec>().unwrap(), BoundSpec::Plus(0));
        assert_eq!("1-".parse::<BoundSpec>().unwrap(), BoundSpec::Minus(1));
        assert!("2+".parse::<BoundSpec>().is_err());
        assert!("1".parse::<BoundSpec>().is_err());
        for b in BoundSpec::ALL {
            assert_eq!(b.to_string().parse::<BoundSpec>().unwrap(), b);
        }
    }

    #[test]
    fn enumeration_refuses_unbounded() {
        let e = d();
        let w = e.states().parse_word("bbar,abar,b,a").unwrap();
        assert!(matches!(
            enumerate(&e, Flavor::O, &w, 10, BoundSpec::Unbounded),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn enumeration_o_side_examples() {
        let e = d();
        let w = e.states().parse_word("bbar,abar,b,a").unwrap();
        let r = enumerate(&e, Flavor::O, &w, 10, BoundSpec::Plus(0)).unwrap();
        assert_eq!(r.len(), 11);
        let r = enumerate(&e, Flavor::O, &w, 10, BoundSpec::Plus(1)).unwrap();
        assert_eq!(
            set(&e, &r),
            vec![
                "4:bbar,3:abar,2:b,1:a",
                "5:bbar,3:abar,1:b,1:a",
                "6:bbar,2:abar,1:b,1:a"
            ]
        );
        assert!(enumerate(&e, Flavor::O, &w, 10, BoundSpec::Minus(1))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumeration_e_side_examples() {
        let e = d();
        let w = e.states().parse_word("bbar,abar,b,a").unwrap();
        let r = enumerate(&e, Flavor::E_STANDARD, &w, -8, BoundSpec::Minus(1)).unwrap();
        assert_eq!(r.len(), 11);
        let f = set(&e, &r);
        assert!(f.contains(&"1:bbar,-1*abar.b,-8:a".to_string()));
        assert!(f.contains(&"0:bbar,-2:abar,-3*b.a".to_string()));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let e = d();
        for word in ["bbar,abar,b,a", "a,a,b", "abar,bbar,a"] {
            let w = e.states().parse_word(word).unwrap();
            for flavor in [Flavor::O, Flavor::E_STANDARD, Flavor::E_DUAL] {
                for bound in BoundSpec::ALL {
                    for n in -8..=8 {
                        let mut got: Vec<String> = enumerate(&e, flavor, &w, n, bound)
                            .unwrap()
                            .iter()
                            .map(|p| p.format(e.states()))
                            .collect();
                        got.sort();
                        let want = brute_all(&e, flavor, &w, n, bound, 12);
                        assert_eq!(got, want, "{word} {flavor:?} {bound} {n}");
                    }
                }
            }
        }
    }

    /// Brute force over a box of potentials, independent of the closed-form caps.
    fn brute_all(
        e: &MinimalEnergy,
        flavor: Flavor,
        word: &ColorWord,
        n: i64,
        bound: BoundSpec,
        span: i64,
    ) -> Vec<String> {
        let segs = match flavor {
            Flavor::O => vec![vec![1; word.len()]],
            _ => segmentations(word.len()),
        };
        let mut out = Vec::new();
        for seg in segs {
            let blocks = blocks_for(word, &seg);
            let mut xs = vec![-span; blocks.len()];
            'outer: loop {
                let ps = ColoredPartition::new(
                    flavor,
                    blocks.iter().zip(&xs).map(|(b, &x)| b.particle(x)).collect(),
                );
                if ps.energy(e) == n && ps.is_valid(e, bound) {
                    out.push(ps.format(e.states()));
                }
                for x in xs.iter_mut() {
                    *x += 1;
                    if *x <= span {
                        continue 'outer;
                    }
                    *x = -span;
                }
                break;
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_is_ordered_and_valid() {
        let e = d();
        let w = e.states().parse_word("bbar,abar,b,a").unwrap();
        let r = enumerate(&e, Flavor::E_STANDARD, &w, 10, BoundSpec::Plus(0)).unwrap();
        let keys: Vec<(Vec<usize>, Vec<i64>)> = r
            .iter()
            .map(|p| (p.shape(), p.particles.iter().map(|x| x.potential(&e)).collect()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for p in &r {
            assert!(p.is_valid(&e, BoundSpec::Plus(0)));
            assert_eq!(p.energy(&e), 10);
            assert_eq!(p.color_word(), w);
        }
        let seq = enumerate_with(&e, Flavor::E_STANDARD, &w, 10, BoundSpec::Plus(0), Execution::Sequential)
            .unwrap();
        assert_eq!(seq, r);
        assert_eq!(count(&e, Flavor::E_STANDARD, &w, 10, BoundSpec::Plus(0)).unwrap(), r.len());
    }

    #[test]
    fn closed_form_caps_match_relations() {
        let e = d();
        let (blocks, _) = shape_labels(&e);
        for flavor in [Flavor::E_STANDARD, Flavor::E_DUAL] {
            let Flavor::E(rel) = flavor else { unreachable!() };
            for &a in &blocks {
                for &b in &blocks {
                    for x in -6..=6 {
                        let cap = max_next(&e, flavor, a, b, x);
                        for y in -16..=16 {
                            let holds =
                                particle::related(&e, rel, &a.particle(x), &b.particle(y));
                            assert_eq!(holds, y <= cap, "{a:?} {b:?} {x} {y}");
                        }
                    }
                }
            }
        }
        for c in 0..4 {
            for c2 in 0..4 {
                for x in -6..=6 {
                    let cap = max_next(&e, Flavor::O, Block::P(c), Block::P(c2), x);
                    for y in -16..=16 {
                        let holds = particle::rel_succ(
                            &e,
                            &crate::Primary::new(x, c),
                            &crate::Primary::new(y, c2),
                        );
                        assert_eq!(holds, y <= cap);
                    }
                }
            }
        }
    }

    #[test]
    fn extremal_energies() {
        let e = d();
        let w = e.states().parse_word("bbar,abar,b,a").unwrap();
        // (2,1,0,0) and (0,-1,-2,-2) are the extreme O-side chains
        assert_eq!(extremal_energy(&e, &w, BoundSpec::Plus(0)).unwrap(), Some(3));
        assert_eq!(extremal_energy(&e, &w, BoundSpec::Minus(0)).unwrap(), Some(-5));
    }

    #[test]
    fn up_to_enumeration() {
        let e = d();
        let all = enumerate_up_to(&e, Flavor::O, 1, 3, None).unwrap();
        for p in &all {
            assert!(p.is_valid(&e, BoundSpec::Plus(1)));
            assert!(p.energy(&e) <= 3);
        }
        // n = 1: one of four states
        assert_eq!(all.iter().filter(|p| p.energy(&e) == 1).count(), 4);
        assert_eq!(all.iter().filter(|p| p.energy(&e) == 0).count(), 1);
        let mut seen = std::collections::HashSet::new();
        assert!(all.iter().all(|p| seen.insert(p.format(e.states()))));
        assert!(enumerate_up_to(&e, Flavor::O, 0, 3, None).is_err());
    }

    #[test]
    fn singleton_difference_matrix() {
        let e = MinimalEnergy::from_fn(StateSet::new(["a"]).unwrap(), |_, _| false);
        let m = difference_matrix(&e, Relation::Standard);
        assert_eq!(m.labels, ["a", "a.a"]);
        assert_eq!(m.entries, vec![vec![1, 0], vec![1, 0]]);
    }

    #[test]
    fn primary_block_is_epsilon_plus_one() {
        let e = d();
        let m = difference_matrix(&e, Relation::Standard);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.entries[i][j], e.get(i, j) + 1);
            }
        }
        assert!(rel_gg(&e, &Particle::primary(3, 0), &Particle::primary(1, 0)));
    }

    #[test]
    fn difference_matrix_matches_formulas() {
        let e = d();
        let m = difference_matrix(&e, Relation::Standard);
        let n = 4;
        let idx = |c: usize, c2: usize| n + c * n + c2;
        for c in 0..n {
            for c2 in 0..n {
                for c3 in 0..n {
                    // primary c before secondary (c2, c3)
                    assert_eq!(m.entries[c][idx(c2, c3)], e.get(c, c2) + e.get(c2, c3));
                    // secondary (c, c2) before primary c3
                    assert_eq!(m.entries[idx(c, c2)][c3], e.get(c, c2) + e.get(c2, c3) + 1);
                    for c4 in 0..n {
                        assert_eq!(
                            m.entries[idx(c, c2)][idx(c3, c4)],
                            e.get(c, c2) + 2 * e.get(c2, c3) + e.get(c3, c4)
                        );
                    }
                }
            }
        }
    }
}

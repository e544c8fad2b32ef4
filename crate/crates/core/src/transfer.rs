//! The energy transfer Λ and the mutually inverse maps Φ (O-side to E-side)
//! and Ψ (E-side to O-side), with position tracking and crossing predictors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{ColorWord, DeltaTable, MinimalEnergy};
use crate::error::{Error, Result};
use crate::particle::{self, rel_gg, rel_succ, Particle, Primary, Relation};
use crate::partition::{BoundSpec, ColoredPartition, Flavor};

/// Applies Λ to an adjacent primary/secondary pair.
pub fn lambda_cross(e: &MinimalEnergy, x: &Particle, y: &Particle) -> Result<(Particle, Particle)> {
    match (x, y) {
        (Particle::Primary(p), Particle::Secondary(s)) => {
            let (c, c1, c2) = (p.state, s.upper, s.lower);
            Ok((
                Particle::secondary(s.k + e.get(c1, c2), c, c1),
                Particle::primary(p.k - e.get(c, c1) - e.get(c1, c2), c2),
            ))
        }
        (Particle::Secondary(s), Particle::Primary(p)) => {
            let (c, c1, c2) = (s.upper, s.lower, p.state);
            Ok((
                Particle::primary(p.k + e.get(c, c1) + e.get(c1, c2), c),
                Particle::secondary(s.k - e.get(c1, c2), c1, c2),
            ))
        }
        _ => Err(Error::MixedDegreesRequired),
    }
}

/// Index sets of upper halves (`I`) and primaries (`J`) at primary-particle
/// granularity; `I`, `I + 1` and `J` partition `1..=s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDecomposition {
    s: usize,
    i_set: Vec<usize>,
    j_set: Vec<usize>,
    /// `j_prefix[t] = |J ∩ [1, t]|`
    j_prefix: Vec<i64>,
}

impl IndexDecomposition {
    pub fn new(s: usize, i_set: Vec<usize>) -> Result<Self> {
        let mut role = vec![0u8; s + 1];
        for &i in &i_set {
            if i == 0 || i >= s || role[i] != 0 || role[i + 1] != 0 {
                return Err(Error::InvalidPartition(format!(
                    "upper-half index {i} does not fit in 1..{s}"
                )));
            }
            role[i] = 1;
            role[i + 1] = 2;
        }
        let j_set: Vec<usize> = (1..=s).filter(|&k| role[k] == 0).collect();
        let mut j_prefix = vec![0; s + 1];
        for k in 1..=s {
            j_prefix[k] = j_prefix[k - 1] + (role[k] == 0) as i64;
        }
        let mut i_set = i_set;
        i_set.sort_unstable();
        Ok(IndexDecomposition {
            s,
            i_set,
            j_set,
            j_prefix,
        })
    }

    /// Decomposition read off an E-side particle sequence.
    pub fn of_particles(particles: &[Particle]) -> Self {
        let mut pos = 1;
        let mut i_set = Vec::new();
        for x in particles {
            if x.degree() == 2 {
                i_set.push(pos);
            }
            pos += x.degree();
        }
        IndexDecomposition::new(pos - 1, i_set).expect("blocks tile the positions")
    }

    pub fn len(&self) -> usize {
        self.s
    }

    pub fn is_empty(&self) -> bool {
        self.s == 0
    }

    pub fn i_set(&self) -> &[usize] {
        &self.i_set
    }

    pub fn j_set(&self) -> &[usize] {
        &self.j_set
    }

    fn check(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.s {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.s,
            });
        }
        Ok(())
    }

    /// Signed `|(k, k2] ∩ J|`.
    pub fn alpha(&self, k: usize, k2: usize) -> Result<i64> {
        self.check(k)?;
        self.check(k2)?;
        Ok(self.j_prefix[k2] - self.j_prefix[k])
    }

    /// Signed `|[k, k2) ∩ J|`.
    pub fn beta(&self, k: usize, k2: usize) -> Result<i64> {
        self.check(k)?;
        self.check(k2)?;
        Ok(self.j_prefix[k2 - 1] - self.j_prefix[k - 1])
    }

    /// The E-side counterpart of α; same formula on the E-side `J`.
    pub fn eta(&self, k: usize, k2: usize) -> Result<i64> {
        self.alpha(k, k2)
    }

    /// 1-based rank of `j` within `J`.
    fn rank_j(&self, j: usize) -> usize {
        self.j_prefix[j] as usize
    }
}

/// The permutation σ of `1..=s` giving each origin's final position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionMap {
    sigma: Vec<usize>,
}

impl PositionMap {
    pub fn identity(s: usize) -> Self {
        PositionMap {
            sigma: (1..=s).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn get(&self, k: usize) -> usize {
        self.sigma[k - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sigma
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.sigma.len() + 1];
        self.sigma.iter().all(|&v| {
            v >= 1 && v <= self.sigma.len() && !std::mem::replace(&mut seen[v], true)
        })
    }
}

/// Which violating pair to cross next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossingStrategy {
    #[default]
    Leftmost,
    Rightmost,
    Random(u64),
}

/// How Φ picks disjoint troublesome pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingMode {
    #[default]
    RightToLeft,
    LeftToRight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    /// Primary-granularity position of the left particle of the pair.
    pub position: usize,
    pub before: (Particle, Particle),
    pub after: (Particle, Particle),
    /// (primary origin, secondary origin)
    pub origins: (usize, usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferTrace {
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TransferOptions {
    pub strategy: CrossingStrategy,
    pub pairing: PairingMode,
    pub trace: bool,
    /// Check the position/potential identity after every crossing.
    pub check_positions: bool,
}

impl TransferOptions {
    pub fn with_strategy(strategy: CrossingStrategy) -> Self {
        TransferOptions {
            strategy,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub partition: ColoredPartition,
    pub sigma: PositionMap,
    /// Realized crossings as (primary origin, secondary origin), in order.
    pub crossings: Vec<(usize, usize)>,
    pub decomposition: IndexDecomposition,
    pub trace: Option<TransferTrace>,
}

impl TransferOutcome {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn sorted_crossings(&self) -> Vec<(usize, usize)> {
        let mut v = self.crossings.clone();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: Particle,
    origin: usize,
}

fn word_of(nodes: &[Node]) -> ColorWord {
    let mut out = Vec::new();
    for n in nodes {
        n.x.push_states(&mut out);
    }
    ColorWord(out)
}

/// Potential at each primary-granularity position, splitting secondaries
/// into their halves.
fn half_potentials(e: &MinimalEnergy, particles: &[Particle]) -> Vec<i64> {
    let mut l = Vec::new();
    for x in particles {
        match x {
            Particle::Primary(p) => l.push(p.k),
            Particle::Secondary(s) => {
                l.push(s.gamma(e).k);
                l.push(s.mu().k);
            }
        }
    }
    l
}

struct Crossing<'a> {
    e: &'a MinimalEnergy,
    delta: DeltaTable,
    /// 1-based origin potentials, index 0 unused.
    l: Vec<i64>,
    opts: TransferOptions,
}

impl Crossing<'_> {
    fn positions(nodes: &[Node]) -> Vec<usize> {
        let mut pos = Vec::with_capacity(nodes.len());
        let mut p = 1;
        for n in nodes {
            pos.push(p);
            p += n.x.degree();
        }
        pos
    }

    fn check_positions(&self, nodes: &[Node]) -> Result<()> {
        let e = self.e;
        for (n, pos) in nodes.iter().zip(Self::positions(nodes)) {
            let ok = match n.x {
                Particle::Primary(p) => p.k == self.l[n.origin] + self.delta.get(pos, n.origin),
                Particle::Secondary(s) => {
                    s.gamma(e).k == self.l[n.origin] + self.delta.get(pos, n.origin)
                        && s.mu().k == self.l[n.origin + 1] + self.delta.get(pos + 1, n.origin + 1)
                }
            };
            if !ok {
                return Err(Error::InvariantViolated(format!(
                    "particle from origin {} at position {pos} has potential {}",
                    n.origin,
                    n.x.potential(e)
                )));
            }
        }
        Ok(())
    }

    fn run(
        &self,
        nodes: &mut Vec<Node>,
        violates: impl Fn(&Particle, &Particle) -> bool,
    ) -> Result<(Vec<(usize, usize)>, Option<TransferTrace>)> {
        let s: usize = nodes.iter().map(|n| n.x.degree()).sum();
        let cap = s * s;
        let mut rng = match self.opts.strategy {
            CrossingStrategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut crossings = Vec::new();
        let mut trace = self.opts.trace.then(TransferTrace::default);
        if self.opts.check_positions {
            self.check_positions(nodes)?;
        }
        loop {
            let candidates: Vec<usize> = (0..nodes.len().saturating_sub(1))
                .filter(|&b| {
                    let (x, y) = (&nodes[b].x, &nodes[b + 1].x);
                    x.degree() != y.degree() && violates(x, y)
                })
                .collect();
            let Some(&first) = candidates.first() else {
                break;
            };
            if crossings.len() >= cap {
                return Err(Error::CrossingCapExceeded {
                    cap,
                    done: crossings.len(),
                });
            }
            let b = match (self.opts.strategy, rng.as_mut()) {
                (CrossingStrategy::Rightmost, _) => *candidates.last().unwrap(),
                (CrossingStrategy::Random(_), Some(r)) => {
                    candidates[r.gen_range(0..candidates.len())]
                }
                _ => first,
            };
            let (l, r) = (nodes[b], nodes[b + 1]);
            let (nx, ny) = lambda_cross(self.e, &l.x, &r.x)?;
            // Each origin follows the particle of its own degree.
            let (lo, ro) = (r.origin, l.origin);
            let origins = if l.x.degree() == 1 {
                (l.origin, r.origin)
            } else {
                (r.origin, l.origin)
            };
            if let Some(t) = trace.as_mut() {
                let position = Self::positions(&nodes[..=b])[b];
                t.events.push(TraceEvent {
                    position,
                    before: (l.x, r.x),
                    after: (nx, ny),
                    origins,
                });
            }
            nodes[b] = Node { x: nx, origin: lo };
            nodes[b + 1] = Node { x: ny, origin: ro };
            crossings.push(origins);
            if self.opts.check_positions {
                self.check_positions(nodes)?;
            }
        }
        Ok((crossings, trace))
    }
}

fn sigma_of(nodes: &[Node], s: usize) -> PositionMap {
    let mut sigma = vec![0; s];
    let mut pos = 1;
    for n in nodes {
        sigma[n.origin - 1] = pos;
        if n.x.degree() == 2 {
            sigma[n.origin] = pos + 1;
        }
        pos += n.x.degree();
    }
    PositionMap { sigma }
}

fn primaries(lam: &ColoredPartition) -> Vec<Primary> {
    lam.particles
        .iter()
        .map(|x| *x.as_primary().expect("validated O-side"))
        .collect()
}

/// Step 1 of Φ: fuse disjoint troublesome pairs.
pub fn phi_step1(
    e: &MinimalEnergy,
    lam: &ColoredPartition,
    mode: PairingMode,
) -> Result<(Vec<Particle>, IndexDecomposition)> {
    require_valid(e, lam, Flavor::O)?;
    let ps = primaries(lam);
    let s = ps.len();
    let troublesome = |k: usize| particle::is_troublesome(e, &ps[k - 1], &ps[k]);
    let mut i_set = Vec::new();
    match mode {
        PairingMode::RightToLeft => {
            let mut k = s.saturating_sub(1);
            while k >= 1 {
                if troublesome(k) {
                    i_set.push(k);
                    k = k.saturating_sub(2);
                } else {
                    k -= 1;
                }
            }
            i_set.reverse();
        }
        PairingMode::LeftToRight => {
            let mut k = 1;
            while k < s {
                if troublesome(k) {
                    i_set.push(k);
                    k += 2;
                } else {
                    k += 1;
                }
            }
        }
    }
    let d = IndexDecomposition::new(s, i_set)?;
    let mut out = Vec::with_capacity(s);
    let mut k = 1;
    let mut it = d.i_set().iter().peekable();
    while k <= s {
        if it.peek() == Some(&&k) {
            it.next();
            let sec = particle::make_secondary(e, ps[k - 1], ps[k])?;
            out.push(Particle::Secondary(sec));
            k += 2;
        } else {
            out.push(Particle::Primary(ps[k - 1]));
            k += 1;
        }
    }
    Ok((out, d))
}

fn require_valid(e: &MinimalEnergy, p: &ColoredPartition, flavor: Flavor) -> Result<()> {
    if p.flavor != flavor {
        return Err(Error::InvalidPartition(format!(
            "expected a {} partition, got {}",
            flavor.tag(),
            p.flavor.tag()
        )));
    }
    p.validate(e, BoundSpec::Unbounded)
        .map_err(|v| Error::InvalidPartition(v.to_string()))
}

fn nodes_of(particles: &[Particle]) -> Vec<Node> {
    let mut pos = 1;
    particles
        .iter()
        .map(|&x| {
            let n = Node { x, origin: pos };
            pos += x.degree();
            n
        })
        .collect()
}

/// Φ: O-side to E-side under `≫ε`.
pub fn phi(e: &MinimalEnergy, lam: &ColoredPartition, strategy: CrossingStrategy) -> Result<TransferOutcome> {
    phi_with(e, lam, TransferOptions::with_strategy(strategy))
}

pub fn phi_with(e: &MinimalEnergy, lam: &ColoredPartition, opts: TransferOptions) -> Result<TransferOutcome> {
    let (mixed, d) = phi_step1(e, lam, opts.pairing)?;
    let word = lam.color_word();
    let mut l = vec![0];
    l.extend(lam.particles.iter().map(|x| x.potential(e)));
    let cx = Crossing {
        e,
        delta: e.delta_table(&word),
        l,
        opts,
    };
    let mut nodes = nodes_of(&mixed);
    let (crossings, trace) = cx.run(&mut nodes, |x, y| !rel_gg(e, x, y))?;
    debug_assert_eq!(word_of(&nodes), word);
    let sigma = sigma_of(&nodes, word.len());
    Ok(TransferOutcome {
        partition: ColoredPartition::new(Flavor::E_STANDARD, nodes.iter().map(|n| n.x).collect()),
        sigma,
        crossings,
        decomposition: d,
        trace,
    })
}

/// Ψ: E-side under `≫ε` to O-side.
pub fn psi(e: &MinimalEnergy, nu: &ColoredPartition, strategy: CrossingStrategy) -> Result<TransferOutcome> {
    psi_with(e, nu, TransferOptions::with_strategy(strategy))
}

pub fn psi_with(e: &MinimalEnergy, nu: &ColoredPartition, opts: TransferOptions) -> Result<TransferOutcome> {
    require_valid(e, nu, Flavor::E_STANDARD)?;
    let d = IndexDecomposition::of_particles(&nu.particles);
    let word = nu.color_word();
    let mut l = vec![0];
    l.extend(half_potentials(e, &nu.particles));
    let cx = Crossing {
        e,
        delta: e.delta_table(&word),
        l,
        opts,
    };
    let mut nodes = nodes_of(&nu.particles);
    let violates = |x: &Particle, y: &Particle| match (x, y) {
        (Particle::Primary(p), Particle::Secondary(s)) => !rel_succ(e, p, &s.gamma(e)),
        (Particle::Secondary(s), Particle::Primary(p)) => {
            !rel_gg(e, &Particle::Primary(s.mu()), &Particle::Primary(*p))
        }
        _ => false,
    };
    let (crossings, trace) = cx.run(&mut nodes, violates)?;
    let sigma = sigma_of(&nodes, word.len());
    let mut out = Vec::with_capacity(word.len());
    for n in &nodes {
        match n.x {
            Particle::Primary(p) => out.push(Particle::Primary(p)),
            Particle::Secondary(s) => {
                out.push(Particle::Primary(s.gamma(e)));
                out.push(Particle::Primary(s.mu()));
            }
        }
    }
    Ok(TransferOutcome {
        partition: ColoredPartition::new(Flavor::O, out),
        sigma,
        crossings,
        decomposition: d,
        trace,
    })
}

/// Reverses a partition and reflects every particle, turning partitions for
/// `e` into partitions for the transpose of `e` (and the dual relation into
/// the standard one).
pub fn reflect_partition(e: &MinimalEnergy, p: &ColoredPartition) -> ColoredPartition {
    let flavor = match p.flavor {
        Flavor::O => Flavor::O,
        Flavor::E(Relation::Standard) => Flavor::E_DUAL,
        Flavor::E(Relation::Dual) => Flavor::E_STANDARD,
    };
    ColoredPartition::new(
        flavor,
        p.particles
            .iter()
            .rev()
            .map(|x| particle::reflect(e, x))
            .collect(),
    )
}

/// O-side to E-side under the dual relation, by conjugating Φ for the
/// transposed energy with reflection.
pub fn phi_dual(e: &MinimalEnergy, lam: &ColoredPartition, strategy: CrossingStrategy) -> Result<ColoredPartition> {
    let t = e.transpose();
    let out = phi(&t, &reflect_partition(e, lam), strategy)?;
    Ok(reflect_partition(&t, &out.partition))
}

pub fn psi_dual(e: &MinimalEnergy, nu: &ColoredPartition, strategy: CrossingStrategy) -> Result<ColoredPartition> {
    require_valid(e, nu, Flavor::E_DUAL)?;
    let t = e.transpose();
    let out = psi(&t, &reflect_partition(e, nu), strategy)?;
    Ok(reflect_partition(&t, &out.partition))
}

// ---------------------------------------------------------------------------
// Predictors

/// Closed-form prediction of a Φ or Ψ run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    /// Row indices (`J`).
    pub rows: Vec<usize>,
    /// Column indices (`I`).
    pub cols: Vec<usize>,
    pub table: Vec<Vec<i64>>,
    pub sigma: PositionMap,
    /// Predicted crossings as (primary origin, secondary origin), sorted.
    pub crossings: Vec<(usize, usize)>,
}

impl Prediction {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    fn from_table(d: &IndexDecomposition, table: Vec<Vec<i64>>) -> Prediction {
        let (rows, cols) = (d.j_set().to_vec(), d.i_set().to_vec());
        let mut sigma = vec![0; d.len()];
        let mut crossings = Vec::new();
        for (r, &j) in rows.iter().enumerate() {
            let below = table[r].iter().filter(|&&v| v < 0).count();
            sigma[j - 1] = d.rank_j(j) + 2 * below;
            for (c, &i) in cols.iter().enumerate() {
                let v = table[r][c];
                if (j > i && v >= 0) || (j < i && v < 0) {
                    crossings.push((j, i));
                }
            }
        }
        for (c, &i) in cols.iter().enumerate() {
            let above = rows.iter().enumerate().filter(|&(r, _)| table[r][c] >= 0).count();
            sigma[i - 1] = 2 * c + 1 + above;
            sigma[i] = sigma[i - 1] + 1;
        }
        crossings.sort_unstable();
        Prediction {
            rows,
            cols,
            table,
            sigma: PositionMap { sigma },
            crossings,
        }
    }
}

/// `φ(j, i) = l_j - 2 l_{i+1} - Δ(j, i+1) - Δ(i+1-β(j, i), i+1)`.
pub fn predict_phi(e: &MinimalEnergy, lam: &ColoredPartition) -> Result<Prediction> {
    let (_, d) = phi_step1(e, lam, PairingMode::RightToLeft)?;
    let l: Vec<i64> = lam.particles.iter().map(|x| x.potential(e)).collect();
    let delta = e.delta_table(&lam.color_word());
    let table = phi_table(&d, &l, &delta)?;
    Ok(Prediction::from_table(&d, table))
}

pub fn phi_table(d: &IndexDecomposition, l: &[i64], delta: &DeltaTable) -> Result<Vec<Vec<i64>>> {
    d.j_set()
        .iter()
        .map(|&j| {
            d.i_set()
                .iter()
                .map(|&i| {
                    let b = d.beta(j, i)?;
                    let k = (i as i64 + 1 - b) as usize;
                    Ok(l[j - 1] - 2 * l[i] - delta.get(j, i + 1) - delta.get(k, i + 1))
                })
                .collect()
        })
        .collect()
}

/// `ψ(j, i) = l_j - l_i - Δ(j, i)`.
pub fn predict_psi(e: &MinimalEnergy, nu: &ColoredPartition) -> Result<Prediction> {
    require_valid(e, nu, Flavor::E_STANDARD)?;
    let d = IndexDecomposition::of_particles(&nu.particles);
    let l = half_potentials(e, &nu.particles);
    let delta = e.delta_table(&nu.color_word());
    let table = d
        .j_set()
        .iter()
        .map(|&j| {
            d.i_set()
                .iter()
                .map(|&i| l[j - 1] - l[i - 1] - delta.get(j, i))
                .collect()
        })
        .collect();
    Ok(Prediction::from_table(&d, table))
}

/// Half potentials of an E-side partition at primary granularity, as used
/// by the ψ predictor.
pub fn e_side_levels(e: &MinimalEnergy, nu: &ColoredPartition) -> Vec<i64> {
    half_potentials(e, &nu.particles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> MinimalEnergy {
        MinimalEnergy::overpartition()
    }

    fn parse(e: &MinimalEnergy, text: &str, f: Flavor) -> ColoredPartition {
        ColoredPartition::parse(text, f, e.states()).unwrap()
    }

    const LAMBDA: &str = "11:bbar,5:b,5:a,5:a,4:abar,2:a,1:b,1:abar,0:a,0:bbar,-1:b,-2:b";
    const NU: &str = "11:bbar,5*b.a,3*a.abar,4:a,2:b,0*abar.a,-1:bbar,-1*b.b";

    #[test]
    fn lambda_examples() {
        let e = d();
        let s = e.states();
        let x = Particle::parse("1*a.b", s).unwrap();
        let y = Particle::parse("-10:abar", s).unwrap();
        let (a, b) = lambda_cross(&e, &x, &y).unwrap();
        assert_eq!(a.format(s), "-9:a");
        assert_eq!(b.format(s), "1*b.abar");
        assert_eq!(b.potential(&e), 2);
        let x = Particle::parse("5:b", s).unwrap();
        let y = Particle::parse("5*a.a", s).unwrap();
        let (a, b) = lambda_cross(&e, &x, &y).unwrap();
        assert_eq!((a.format(s), b.format(s)), ("5*b.a".into(), "5:a".into()));
        assert_eq!(lambda_cross(&e, &a, &b).unwrap(), (x, y));
        assert!(matches!(
            lambda_cross(&e, &x, &x),
            Err(Error::MixedDegreesRequired)
        ));
    }

    #[test]
    fn step1_example() {
        let e = d();
        let (mixed, dec) = phi_step1(&e, &parse(&e, LAMBDA, Flavor::O), PairingMode::RightToLeft).unwrap();
        let p = ColoredPartition::new(Flavor::E_STANDARD, mixed);
        assert_eq!(
            p.format(e.states()),
            "11:bbar,5:b,5*a.a,4:abar,1*a.b,0*abar.a,-1*bbar.b,-2:b"
        );
        assert_eq!(dec.i_set(), [3, 6, 8, 10]);
        assert_eq!(dec.j_set(), [1, 2, 5, 12]);
    }

    #[test]
    fn step1_run_of_three() {
        let e = MinimalEnergy::indexed(1, |_, _| false);
        let lam = parse(&e, "5:c1,5:c1,5:c1", Flavor::O);
        let (mixed, dec) = phi_step1(&e, &lam, PairingMode::RightToLeft).unwrap();
        assert_eq!(dec.i_set(), [2]);
        assert_eq!(mixed[0], Particle::primary(5, 0));
        let (_, dec) = phi_step1(&e, &lam, PairingMode::LeftToRight).unwrap();
        assert_eq!(dec.i_set(), [1]);
    }

    #[test]
    fn phi_and_psi_example() {
        let e = d();
        let lam = parse(&e, LAMBDA, Flavor::O);
        let out = phi(&e, &lam, CrossingStrategy::Leftmost).unwrap();
        assert_eq!(out.partition.format(e.states()), NU);
        assert_eq!(out.sorted_crossings(), vec![(2, 3), (2, 6), (5, 6), (12, 10)]);
        let back = psi(&e, &out.partition, CrossingStrategy::Leftmost).unwrap();
        assert_eq!(back.partition, lam);
        assert_eq!(back.sorted_crossings(), vec![(6, 2), (6, 4), (7, 4), (10, 11)]);
    }

    #[test]
    fn index_functions_example() {
        let dec = IndexDecomposition::new(12, vec![3, 6, 8, 10]).unwrap();
        let alpha: Vec<i64> = (1..12).map(|k| dec.alpha(k, k + 1).unwrap()).collect();
        let beta: Vec<i64> = (1..12).map(|k| dec.beta(k, k + 1).unwrap()).collect();
        assert_eq!(alpha, [1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(beta, [1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(dec.alpha(2, 4).unwrap(), 0);
        assert!(dec.alpha(0, 3).is_err());
        let dec = IndexDecomposition::new(12, vec![2, 4, 8, 11]).unwrap();
        assert_eq!(dec.j_set(), [1, 6, 7, 10]);
        let eta: Vec<i64> = (1..12).map(|k| dec.eta(k, k + 1).unwrap()).collect();
        assert_eq!(eta, [0, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn predictor_tables() {
        let e = d();
        let lam = parse(&e, LAMBDA, Flavor::O);
        let p = predict_phi(&e, &lam).unwrap();
        assert_eq!(
            p.table,
            vec![
                vec![0, 4, 5, 6],
                vec![-5, -1, 1, 2],
                vec![-6, -1, 0, 1],
                vec![-8, -2, -1, 0]
            ]
        );
        assert_eq!(p.crossings, vec![(2, 3), (2, 6), (5, 6), (12, 10)]);
        let out = phi(&e, &lam, CrossingStrategy::Leftmost).unwrap();
        assert_eq!(p.sigma, out.sigma);

        let nu = parse(&e, NU, Flavor::E_STANDARD);
        assert_eq!(
            e_side_levels(&e, &nu),
            [11, 5, 5, 3, 3, 4, 2, 1, 0, -1, -1, -1]
        );
        let q = predict_psi(&e, &nu).unwrap();
        assert_eq!(
            q.table,
            vec![
                vec![5, 7, 7, 7],
                vec![0, 2, 2, 2],
                vec![-1, 1, 1, 1],
                vec![-3, -1, -1, -1]
            ]
        );
        assert_eq!(q.crossings, vec![(6, 2), (6, 4), (7, 4), (10, 11)]);
        let back = psi(&e, &nu, CrossingStrategy::Rightmost).unwrap();
        assert_eq!(q.sigma, back.sigma);
    }

    #[test]
    fn trivial_inputs() {
        let e = d();
        let lam = parse(&e, "9:bbar,5:abar,2:b", Flavor::O);
        let out = phi(&e, &lam, CrossingStrategy::Leftmost).unwrap();
        assert_eq!(out.partition.particles, lam.particles);
        assert_eq!(out.crossing_count(), 0);
        assert_eq!(predict_phi(&e, &lam).unwrap().crossing_count(), 0);
        let nu = ColoredPartition::new(Flavor::E_STANDARD, lam.particles.clone());
        let back = psi(&e, &nu, CrossingStrategy::Leftmost).unwrap();
        assert_eq!(back.partition, lam);
        assert_eq!(predict_psi(&e, &nu).unwrap().crossing_count(), 0);
    }

    #[test]
    fn strategies_agree_and_trace() {
        let e = d();
        let lam = parse(&e, LAMBDA, Flavor::O);
        let base = phi(&e, &lam, CrossingStrategy::Leftmost).unwrap();
        for strat in [CrossingStrategy::Rightmost, CrossingStrategy::Random(7)] {
            let opts = TransferOptions {
                strategy: strat,
                trace: true,
                check_positions: true,
                ..Default::default()
            };
            let out = phi_with(&e, &lam, opts).unwrap();
            assert_eq!(out.partition, base.partition);
            assert_eq!(out.sigma, base.sigma);
            assert_eq!(out.trace.unwrap().events.len(), 4);
        }
        let opts = TransferOptions {
            pairing: PairingMode::LeftToRight,
            ..Default::default()
        };
        assert_eq!(phi_with(&e, &lam, opts).unwrap().partition, base.partition);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let e = d();
        let bad = parse(&e, "1:a,5:b", Flavor::O);
        assert!(matches!(
            phi(&e, &bad, CrossingStrategy::Leftmost),
            Err(Error::InvalidPartition(_))
        ));
        let bad = parse(&e, "3:bbar,2:bbar", Flavor::E_STANDARD);
        assert!(psi(&e, &bad, CrossingStrategy::Leftmost).is_err());
    }

    #[test]
    fn dual_maps_round_trip() {
        let e = d();
        let lam = parse(&e, LAMBDA, Flavor::O);
        let nu = phi_dual(&e, &lam, CrossingStrategy::Leftmost).unwrap();
        assert!(nu.is_valid(&e, BoundSpec::Unbounded));
        assert_eq!(nu.flavor, Flavor::E_DUAL);
        assert_eq!(nu.color_word(), lam.color_word());
        assert_eq!(nu.energy(&e), lam.energy(&e));
        assert_eq!(psi_dual(&e, &nu, CrossingStrategy::Leftmost).unwrap(), lam);
    }
}

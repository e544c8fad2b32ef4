//! Verification drivers: exhaustive bijection sweeps over bounded sets and
//! per-instance structural checks, shared by the CLI and the test suites.
//!
//! Every check returns `Err(String)` with a replayable description of the
//! first failing instance.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{ColorWord, MinimalEnergy, State};
use crate::error::Result;
use crate::par::{self, Execution};
use crate::particle::{self, rel_gg, rel_succ, Particle, Primary, Relation, Secondary};
use crate::partition::{self, BoundSpec, ColoredPartition, Flavor};
use crate::transfer::{self, CrossingStrategy, IndexDecomposition, TransferOptions};

pub type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn describe(e: &MinimalEnergy, p: &ColoredPartition) -> String {
    format!("energy {} partition {}", e.to_json(), p.format(e.states()))
}

/// All words of length `1..=max_len` over the states of `e`, shortest first.
pub fn all_words(states: usize, max_len: usize) -> Vec<ColorWord> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<State>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..states).map(move |c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(ColorWord));
    }
    out
}

/// `width` consecutive energies starting at the least feasible one (ρ+) or
/// ending at the greatest (ρ−).
pub fn feasible_window(
    e: &MinimalEnergy,
    word: &ColorWord,
    bound: BoundSpec,
    width: i64,
) -> Result<Option<RangeInclusive<i64>>> {
    let Some(x) = partition::extremal_energy(e, word, bound)? else {
        return Ok(None);
    };
    Ok(Some(match bound {
        BoundSpec::Plus(_) => x..=x + width - 1,
        _ => x - width + 1..=x,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionRow {
    pub n: i64,
    pub o_count: usize,
    pub e_count: usize,
    /// Both maps land in the other set and invert each other.
    pub maps_ok: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BijectionReport {
    pub rows: Vec<BijectionRow>,
    pub failures: Vec<String>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.rows.iter().all(|r| r.o_count == r.e_count && r.maps_ok)
    }

    pub fn to_tsv(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                let tag = if r.o_count == r.e_count && r.maps_ok { "equal" } else { "differ" };
                format!("{}\t{}\t{}\t{tag}\n", r.n, r.o_count, r.e_count)
            })
            .collect()
    }
}

fn sorted(ps: &[ColoredPartition]) -> Vec<Vec<Particle>> {
    let mut v: Vec<Vec<Particle>> = ps.iter().map(|p| p.particles.clone()).collect();
    v.sort();
    v
}

fn forward(e: &MinimalEnergy, relation: Relation, lam: &ColoredPartition) -> Result<ColoredPartition> {
    match relation {
        Relation::Standard => Ok(transfer::phi(e, lam, CrossingStrategy::Leftmost)?.partition),
        Relation::Dual => transfer::phi_dual(e, lam, CrossingStrategy::Leftmost),
    }
}

fn backward(e: &MinimalEnergy, relation: Relation, nu: &ColoredPartition) -> Result<ColoredPartition> {
    match relation {
        Relation::Standard => Ok(transfer::psi(e, nu, CrossingStrategy::Leftmost)?.partition),
        Relation::Dual => transfer::psi_dual(e, nu, CrossingStrategy::Leftmost),
    }
}

/// Checks that Φ and Ψ (or their dual versions) are mutually inverse
/// between the two enumerated sets at one `(word, n, bound)`.
pub fn check_maps(
    e: &MinimalEnergy,
    relation: Relation,
    os: &[ColoredPartition],
    es: &[ColoredPartition],
) -> Check {
    let mut images = Vec::with_capacity(os.len());
    for lam in os {
        let nu = forward(e, relation, lam).map_err(|err| format!("{}: {err}", describe(e, lam)))?;
        let back = backward(e, relation, &nu).map_err(|err| format!("{}: {err}", describe(e, &nu)))?;
        ensure(back == *lam, || format!("Ψ(Φ(λ)) ≠ λ for {}", describe(e, lam)))?;
        images.push(nu);
    }
    ensure(sorted(&images) == sorted(es), || {
        format!(
            "Φ does not map onto the E-side set; first O-side element {}",
            os.first().map_or(String::from("-"), |p| describe(e, p))
        )
    })?;
    for nu in es {
        let lam = backward(e, relation, nu).map_err(|err| format!("{}: {err}", describe(e, nu)))?;
        let again = forward(e, relation, &lam).map_err(|err| format!("{}: {err}", describe(e, &lam)))?;
        ensure(again == *nu, || format!("Φ(Ψ(ν)) ≠ ν for {}", describe(e, nu)))?;
    }
    Ok(())
}

/// Counts both sides for each `n` and checks the maps between them.
pub fn check_bijection(
    e: &MinimalEnergy,
    word: &ColorWord,
    ns: RangeInclusive<i64>,
    bound: BoundSpec,
    relation: Relation,
    with_maps: bool,
) -> Result<BijectionReport> {
    let mut report = BijectionReport::default();
    for n in ns {
        let os = partition::enumerate_with(e, Flavor::O, word, n, bound, Execution::Sequential)?;
        let es =
            partition::enumerate_with(e, Flavor::E(relation), word, n, bound, Execution::Sequential)?;
        let mut maps_ok = true;
        if os.len() != es.len() {
            report.failures.push(format!(
                "energy {} word {} n {n} bound {bound}: O={} E={}",
                e.to_json(),
                e.states().format_word(word),
                os.len(),
                es.len()
            ));
        } else if with_maps {
            if let Err(msg) = check_maps(e, relation, &os, &es) {
                maps_ok = false;
                report.failures.push(msg);
            }
        }
        report.rows.push(BijectionRow {
            n,
            o_count: os.len(),
            e_count: es.len(),
            maps_ok,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    /// Number of `(word, n, bound)` cells compared.
    pub cells: usize,
    /// Total partitions on the O-side across all cells.
    pub partitions: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: SweepReport) {
        self.cells += other.cells;
        self.partitions += other.partitions;
        self.failures.extend(other.failures);
    }
}

/// Runs [`check_bijection`] for every word of length `1..=max_len`, every
/// given bound and every `n` in the feasible window of the given width.
pub fn sweep(
    e: &MinimalEnergy,
    max_len: usize,
    width: i64,
    bounds: &[BoundSpec],
    relation: Relation,
    with_maps: bool,
    exec: Execution,
) -> Result<SweepReport> {
    let words = all_words(e.len(), max_len);
    let parts = par::map_ordered(exec, &words, |w| -> Result<SweepReport> {
        let mut r = SweepReport::default();
        for &b in bounds {
            let Some(ns) = feasible_window(e, w, b, width)? else {
                continue;
            };
            let rep = check_bijection(e, w, ns, b, relation, with_maps)?;
            r.cells += rep.rows.len();
            r.partitions += rep.rows.iter().map(|row| row.o_count).sum::<usize>();
            r.failures.extend(rep.failures);
        }
        Ok(r)
    });
    let mut total = SweepReport::default();
    for p in parts {
        total.merge(p?);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Per-instance structural checks

/// Λ is an involution on mixed pairs and conserves potential and word.
pub fn check_lambda(e: &MinimalEnergy, x: &Particle, y: &Particle) -> Check {
    let (a, b) = transfer::lambda_cross(e, x, y).map_err(|err| err.to_string())?;
    let (c, d) = transfer::lambda_cross(e, &a, &b).map_err(|err| err.to_string())?;
    let word = |p: &Particle, q: &Particle| {
        let mut w = Vec::new();
        p.push_states(&mut w);
        q.push_states(&mut w);
        w
    };
    ensure((c, d) == (*x, *y), || format!("Λ² ≠ id on {x:?}, {y:?}"))?;
    ensure(
        a.potential(e) + b.potential(e) == x.potential(e) + y.potential(e),
        || format!("Λ changes the energy of {x:?}, {y:?}"),
    )?;
    ensure(word(&a, &b) == word(x, y), || format!("Λ changes the word of {x:?}, {y:?}"))
}

/// The two crossing equivalences for a primary followed by a secondary.
pub fn check_crossing_equivalences(e: &MinimalEnergy, p: Primary, s: Secondary) -> Check {
    let (px, sx) = (Particle::Primary(p), Particle::Secondary(s));
    let (s2, p2) = transfer::lambda_cross(e, &px, &sx).map_err(|err| err.to_string())?;
    let (Particle::Secondary(s2v), Particle::Primary(_)) = (s2, p2) else {
        return Err("Λ did not return a secondary-primary pair".into());
    };
    ensure(!rel_gg(e, &px, &sx) == rel_gg(e, &s2, &p2), || {
        format!("¬(p ≫ s) ⇔ s' ≫ p' fails for {p:?}, {s:?}")
    })?;
    ensure(
        !rel_succ(e, &p, &s.gamma(e)) == rel_gg(e, &Particle::Primary(s2v.mu()), &p2),
        || format!("¬(p ≻ γ(s)) ⇔ μ(s') ≫ p' fails for {p:?}, {s:?}"),
    )
}

/// Chasles' relation and antisymmetry for Δ, α, β and η.
pub fn check_chasles(e: &MinimalEnergy, word: &ColorWord, d: &IndexDecomposition) -> Check {
    let s = word.len();
    let table = e.delta_table(word);
    let fns: [(&str, &dyn Fn(usize, usize) -> i64); 4] = [
        ("Δ", &|a, b| table.get(a, b)),
        ("α", &|a, b| d.alpha(a, b).unwrap()),
        ("β", &|a, b| d.beta(a, b).unwrap()),
        ("η", &|a, b| d.eta(a, b).unwrap()),
    ];
    for (name, f) in fns {
        for a in 1..=s {
            ensure(f(a, a) == 0, || format!("{name}({a},{a}) ≠ 0"))?;
            for b in 1..=s {
                ensure(f(a, b) == -f(b, a), || format!("{name} not antisymmetric at ({a},{b})"))?;
                for c in 1..=s {
                    ensure(f(a, b) + f(b, c) == f(a, c), || {
                        format!("{name} breaks Chasles at ({a},{b},{c})")
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Runs Φ with position checks under several strategies and compares with
/// the φ predictor, then runs Ψ on the image likewise.
pub fn check_transfer(e: &MinimalEnergy, lam: &ColoredPartition, seed: u64) -> Check {
    let err = |x: crate::Error| format!("{}: {x}", describe(e, lam));
    let strategies = [
        CrossingStrategy::Leftmost,
        CrossingStrategy::Rightmost,
        CrossingStrategy::Random(seed),
    ];
    let opts = |s| TransferOptions {
        strategy: s,
        trace: true,
        check_positions: true,
        ..Default::default()
    };
    let runs: Vec<_> = strategies
        .iter()
        .map(|&s| transfer::phi_with(e, lam, opts(s)))
        .collect::<Result<_>>()
        .map_err(err)?;
    let first = &runs[0];
    for r in &runs[1..] {
        ensure(
            r.partition == first.partition
                && r.sigma == first.sigma
                && r.sorted_crossings() == first.sorted_crossings(),
            || format!("Φ depends on the crossing order for {}", describe(e, lam)),
        )?;
    }
    let nu = &first.partition;
    ensure(nu.is_valid(e, BoundSpec::Unbounded), || {
        format!("Φ output is not E-side valid for {}", describe(e, lam))
    })?;
    ensure(
        nu.energy(e) == lam.energy(e) && nu.color_word() == lam.color_word(),
        || format!("Φ changes energy or word for {}", describe(e, lam)),
    )?;
    for b in BoundSpec::ALL {
        ensure(!lam.is_valid(e, b) || nu.is_valid(e, b), || {
            format!("Φ leaves the {b} space for {}", describe(e, lam))
        })?;
    }
    let pred = transfer::predict_phi(e, lam).map_err(err)?;
    ensure(pred.crossings == first.sorted_crossings(), || {
        format!("φ predicts {:?}, realized {:?} for {}", pred.crossings, first.sorted_crossings(), describe(e, lam))
    })?;
    ensure(pred.sigma == first.sigma, || {
        format!("φ predicts σ {:?}, realized {:?}", pred.sigma, first.sigma)
    })?;
    check_phi_monotone(&pred.table).map_err(|m| format!("{m} for {}", describe(e, lam)))?;
    check_levels(e, nu)?;

    let back: Vec<_> = strategies
        .iter()
        .map(|&s| transfer::psi_with(e, nu, opts(s)))
        .collect::<Result<_>>()
        .map_err(err)?;
    for r in &back {
        ensure(r.partition == *lam, || format!("Ψ(Φ(λ)) ≠ λ for {}", describe(e, lam)))?;
        ensure(r.sigma == back[0].sigma, || {
            format!("Ψ depends on the crossing order for {}", describe(e, nu))
        })?;
    }
    for b in BoundSpec::ALL {
        ensure(!nu.is_valid(e, b) || lam.is_valid(e, b), || {
            format!("Ψ leaves the {b} space for {}", describe(e, nu))
        })?;
    }
    let pred = transfer::predict_psi(e, nu).map_err(err)?;
    ensure(pred.crossings == back[0].sorted_crossings(), || {
        format!("ψ predicts {:?}, realized {:?} for {}", pred.crossings, back[0].sorted_crossings(), describe(e, nu))
    })?;
    ensure(pred.sigma == back[0].sigma, || {
        format!("ψ predicts σ {:?}, realized {:?}", pred.sigma, back[0].sigma)
    })
}

/// φ is non-increasing down each column and non-decreasing along each row.
pub fn check_phi_monotone(table: &[Vec<i64>]) -> Check {
    for (r, row) in table.iter().enumerate() {
        for c in 0..row.len() {
            if c + 1 < row.len() {
                ensure(row[c] <= row[c + 1], || format!("φ decreases along row {r}"))?;
            }
            if r + 1 < table.len() {
                ensure(table[r + 1][c] <= row[c], || format!("φ increases down column {c}"))?;
            }
        }
    }
    Ok(())
}

/// The potential inequalities linking an E-side partition's levels:
/// `l'_k - l'_k2 >= η(k, k2) + Δ(k, k2)` for `k <= k2`, where `l'` doubles
/// the halves of secondaries, and `l_i - l_i2 >= Δ(i, i2)` on halves.
pub fn check_levels(e: &MinimalEnergy, nu: &ColoredPartition) -> Check {
    let l = transfer::e_side_levels(e, nu);
    let d = IndexDecomposition::of_particles(&nu.particles);
    let delta = e.delta_table(&nu.color_word());
    let s = l.len();
    let in_j = |k: usize| d.j_set().binary_search(&k).is_ok();
    let lp = |k: usize| if in_j(k) { l[k - 1] } else { 2 * l[k - 1] };
    for k in 1..=s {
        for k2 in k..=s {
            let eta = d.eta(k, k2).unwrap();
            ensure(lp(k) - lp(k2) >= eta + delta.get(k, k2), || {
                format!("level inequality fails at ({k},{k2}) for {}", describe(e, nu))
            })?;
            if !in_j(k) && !in_j(k2) {
                ensure(l[k - 1] - l[k2 - 1] >= delta.get(k, k2), || {
                    format!("half-level inequality fails at ({k},{k2}) for {}", describe(e, nu))
                })?;
            }
        }
    }
    Ok(())
}

/// A random O-side partition whose gaps are biased towards ε, so that many
/// pairs are troublesome.
pub fn random_o_partition(e: &MinimalEnergy, len: usize, rng: &mut impl Rng) -> ColoredPartition {
    let mut k: i64 = rng.gen_range(-4..=10);
    let mut c: State = rng.gen_range(0..e.len());
    let mut ps = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 {
            let c2 = rng.gen_range(0..e.len());
            let extra = [0, 0, 0, 1, 2][rng.gen_range(0..5)];
            k -= e.get(c, c2) + extra;
            c = c2;
        }
        ps.push(Particle::primary(k, c));
    }
    ColoredPartition::new(Flavor::O, ps)
}

fn random_particle(e: &MinimalEnergy, rng: &mut impl Rng) -> Particle {
    let k = rng.gen_range(-6..=6);
    let c = rng.gen_range(0..e.len());
    if rng.gen_bool(0.5) {
        Particle::primary(k, c)
    } else {
        Particle::secondary(k, c, rng.gen_range(0..e.len()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelfcheckReport {
    /// (suite name, instances checked)
    pub suites: Vec<(&'static str, usize)>,
    pub failures: Vec<String>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Randomized structural suites driven by a single seed.
pub fn selfcheck(seed: u64, cases: usize) -> SelfcheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SelfcheckReport::default();
    let mut energies = vec![MinimalEnergy::overpartition(), MinimalEnergy::twister()];
    while energies.len() < 8 {
        let n = rng.gen_range(1..=4);
        energies.push(MinimalEnergy::random(n, &mut rng));
    }
    let mut run = |name: &'static str, report: &mut SelfcheckReport, f: &mut dyn FnMut(&mut ChaCha8Rng) -> Check| {
        for _ in 0..cases {
            if let Err(msg) = f(&mut rng) {
                report.failures.push(format!("{name}: {msg}"));
                break;
            }
        }
        report.suites.push((name, cases));
    };
    let pick = |rng: &mut ChaCha8Rng| energies[rng.gen_range(0..energies.len())].clone();

    run("lambda", &mut report, &mut |rng| {
        let e = pick(rng);
        let (x, y) = loop {
            let (x, y) = (random_particle(&e, rng), random_particle(&e, rng));
            if x.degree() != y.degree() {
                break (x, y);
            }
        };
        check_lambda(&e, &x, &y)
    });
    run("crossing-equivalences", &mut report, &mut |rng| {
        let e = pick(rng);
        let p = Primary::new(rng.gen_range(-6..=6), rng.gen_range(0..e.len()));
        let s = Secondary::new(rng.gen_range(-6..=6), rng.gen_range(0..e.len()), rng.gen_range(0..e.len()));
        check_crossing_equivalences(&e, p, s)
    });
    run("relation-duality", &mut report, &mut |rng| {
        let e = pick(rng);
        let (x, y) = (random_particle(&e, rng), random_particle(&e, rng));
        let t = e.transpose();
        let lhs = particle::rel_gg_dual(&e, &x, &y);
        let rhs = rel_gg(&t, &particle::reflect(&e, &y), &particle::reflect(&e, &x));
        ensure(lhs == rhs, || format!("duality fails for {x:?}, {y:?} under {}", e.to_json()))
    });
    run("chasles", &mut report, &mut |rng| {
        let e = pick(rng);
        let lam = random_o_partition(&e, rng.gen_range(1..=10), rng);
        let (_, d) = transfer::phi_step1(&e, &lam, Default::default()).map_err(|x| x.to_string())?;
        check_chasles(&e, &lam.color_word(), &d)
    });
    run("transfer", &mut report, &mut |rng| {
        let e = pick(rng);
        let lam = random_o_partition(&e, rng.gen_range(1..=12), rng);
        let seed = rng.gen();
        check_transfer(&e, &lam, seed)
    });
    report
}

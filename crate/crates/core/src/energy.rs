//! States, minimal-energy matrices and formal transfer energies.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense 0-based index of a state inside its [`StateSet`].
pub type State = usize;

/// Ordered, finite set of state labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    labels: Vec<String>,
    index: HashMap<String, State>,
}

impl StateSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::NoStates);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(StateSet { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: State) -> &str {
        &self.labels[state]
    }

    pub fn index_of(&self, label: &str) -> Result<State> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    /// Parses a comma-separated list of labels, e.g. `bbar,abar,b,a`.
    pub fn parse_word(&self, text: &str) -> Result<ColorWord> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(ColorWord::default());
        }
        text.split(',')
            .map(|s| self.index_of(s.trim()))
            .collect::<Result<Vec<_>>>()
            .map(ColorWord)
    }

    pub fn format_word(&self, word: &ColorWord) -> String {
        word.0
            .iter()
            .map(|&c| self.label(c))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A finite sequence of states, read left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorWord(pub Vec<State>);

impl ColorWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    /// State at the 1-based position `k`.
    pub fn at(&self, k: usize) -> State {
        self.0[k - 1]
    }
}

impl From<Vec<State>> for ColorWord {
    fn from(v: Vec<State>) -> Self {
        ColorWord(v)
    }
}

/// A {0,1}-valued function on ordered pairs of states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalEnergy {
    states: StateSet,
    entries: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct EnergyFile {
    states: Vec<String>,
    matrix: Vec<Vec<i64>>,
}

impl MinimalEnergy {
    /// Builds an energy from explicit rows. Entries outside {0,1} and
    /// non-square shapes are rejected.
    pub fn new(states: StateSet, rows: &[Vec<i64>]) -> Result<Self> {
        let n = states.len();
        if rows.len() != n {
            return Err(Error::NotSquare {
                expected: n,
                row: rows.len(),
                found: 0,
            });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    expected: n,
                    row: r,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v != 0 && v != 1 {
                    return Err(Error::InvalidEntry {
                        row: r,
                        col: c,
                        value: v,
                    });
                }
                entries.push(v as u8);
            }
        }
        Ok(MinimalEnergy { states, entries })
    }

    pub fn from_fn(states: StateSet, f: impl Fn(State, State) -> bool) -> Self {
        let n = states.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j) as u8);
            }
        }
        MinimalEnergy { states, entries }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnergyFile = serde_json::from_str(text)?;
        let states = StateSet::new(file.states)?;
        MinimalEnergy::new(states, &file.matrix)
    }

    pub fn to_json(&self) -> String {
        let file = EnergyFile {
            states: self.states.labels().to_vec(),
            matrix: self.rows(),
        };
        serde_json::to_string(&file).expect("energy matrix serializes")
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn get(&self, c: State, c2: State) -> i64 {
        self.entries[c * self.states.len() + c2] as i64
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// True iff ε(c,c″) ≤ ε(c,c′) + ε(c′,c″) for every triple.
    pub fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.get(a, c) <= self.get(a, b) + self.get(b, c)))
        })
    }

    /// ε*(c, c′) = ε(c′, c).
    pub fn transpose(&self) -> MinimalEnergy {
        MinimalEnergy::from_fn(self.states.clone(), |i, j| self.get(j, i) == 1)
    }

    /// Sum of ε over consecutive states of the word.
    pub fn transfer_energy(&self, word: &ColorWord) -> Result<i64> {
        if word.is_empty() {
            return Err(Error::EmptyTransferPath);
        }
        Ok(word.0.windows(2).map(|w| self.get(w[0], w[1])).sum())
    }

    /// Signed formal transfer energy Δ(k, k2) between 1-based positions.
    pub fn delta(&self, word: &ColorWord, k: usize, k2: usize) -> Result<i64> {
        let len = word.len();
        for idx in [k, k2] {
            if idx == 0 || idx > len {
                return Err(Error::IndexOutOfRange { index: idx, len });
            }
        }
        let span = |from: usize, to: usize| -> i64 {
            (from..to).map(|u| self.get(word.at(u), word.at(u + 1))).sum()
        };
        Ok(match k.cmp(&k2) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => span(k, k2),
            std::cmp::Ordering::Greater => -span(k2, k),
        })
    }

    /// Prefix table answering Δ queries in O(1).
    pub fn delta_table(&self, word: &ColorWord) -> DeltaTable {
        let mut prefix = Vec::with_capacity(word.len() + 1);
        prefix.push(0);
        prefix.push(0);
        for w in word.0.windows(2) {
            let last = *prefix.last().unwrap();
            prefix.push(last + self.get(w[0], w[1]));
        }
        DeltaTable { prefix }
    }

    /// The overpartition energy over `bbar, abar, a, b`.
    pub fn overpartition() -> MinimalEnergy {
        let states = StateSet::new(["bbar", "abar", "a", "b"]).unwrap();
        MinimalEnergy::new(
            states,
            &[
                vec![1, 1, 1, 1],
                vec![0, 1, 1, 1],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, 0],
            ],
        )
        .unwrap()
    }

    /// ε(a,a) = ε(b,b) = 1, ε(a,b) = ε(b,a) = 0.
    pub fn twister() -> MinimalEnergy {
        let states = StateSet::new(["a", "b"]).unwrap();
        MinimalEnergy::from_fn(states, |i, j| i == j)
    }

    /// States `c1..cn` with ε given by `f(i, j)` on 1-based indices.
    pub fn indexed(n: usize, f: impl Fn(usize, usize) -> bool) -> MinimalEnergy {
        let states = StateSet::new((1..=n).map(|i| format!("c{i}"))).unwrap();
        MinimalEnergy::from_fn(states, |i, j| f(i + 1, j + 1))
    }

    /// Overline construction over `c1 < .. < cn`: the states are
    /// `cnbar, .., c1bar, c1, .., cn` with ε(ci,cj) = χ(i<j),
    /// ε(ci,c̄j) = 0, ε(c̄i,cj) = 1 and ε(c̄i,c̄j) = χ(i≥j).
    pub fn overline(n: usize) -> MinimalEnergy {
        // (index, overlined)
        let order: Vec<(usize, bool)> = (1..=n)
            .rev()
            .map(|i| (i, true))
            .chain((1..=n).map(|i| (i, false)))
            .collect();
        let labels = order.iter().map(|&(i, bar)| {
            if bar {
                format!("c{i}bar")
            } else {
                format!("c{i}")
            }
        });
        let states = StateSet::new(labels).unwrap();
        MinimalEnergy::from_fn(states, |x, y| {
            let (i, bi) = order[x];
            let (j, bj) = order[y];
            match (bi, bj) {
                (false, false) => i < j,
                (false, true) => false,
                (true, false) => true,
                (true, true) => i >= j,
            }
        })
    }

    /// Uniformly random 0/1 matrix over states `c1..cn`.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> MinimalEnergy {
        let bits: Vec<bool> = (0..n * n).map(|_| rng.gen()).collect();
        MinimalEnergy::indexed(n, |i, j| bits[(i - 1) * n + (j - 1)])
    }
}

impl fmt::Display for MinimalEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Prefix sums of ε along a fixed word; Δ(k,k2) = prefix[k2] - prefix[k].
#[derive(Debug, Clone)]
pub struct DeltaTable {
    prefix: Vec<i64>,
}

impl DeltaTable {
    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, k: usize, k2: usize) -> i64 {
        self.prefix[k2] - self.prefix[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lambda_word(e: &MinimalEnergy) -> ColorWord {
        e.states()
            .parse_word("bbar,b,a,a,abar,a,b,abar,a,bbar,b,b")
            .unwrap()
    }

    #[test]
    fn transitivity_examples() {
        assert!(!MinimalEnergy::twister().is_transitive());
        assert!(MinimalEnergy::indexed(3, |_, _| false).is_transitive());
        assert!(MinimalEnergy::overpartition().is_transitive());
    }

    #[test]
    fn transitivity_matches_triple_scan_on_overpartition() {
        let e = MinimalEnergy::overpartition();
        let mut violations = 0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    if e.get(a, c) > e.get(a, b) + e.get(b, c) {
                        violations += 1;
                    }
                }
            }
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn transpose_examples() {
        let t = MinimalEnergy::twister();
        assert_eq!(t.transpose(), t);
        let d = MinimalEnergy::overpartition();
        let dt = d.transpose();
        let (abar, a) = (1, 2);
        assert_eq!(d.get(abar, a), 1);
        assert_eq!(dt.get(a, abar), 1);
        let one = MinimalEnergy::indexed(1, |_, _| true);
        assert_eq!(one.transpose(), one);
    }

    #[test]
    fn transfer_energy_examples() {
        let d = MinimalEnergy::overpartition();
        let w = d.states().parse_word("a").unwrap();
        assert_eq!(d.transfer_energy(&w).unwrap(), 0);
        let w = d.states().parse_word("bbar,abar,a,b").unwrap();
        assert_eq!(d.transfer_energy(&w).unwrap(), 3);
        assert_eq!(d.transfer_energy(&lambda_word(&d)).unwrap(), 5);
        assert!(matches!(
            d.transfer_energy(&ColorWord::default()),
            Err(Error::EmptyTransferPath)
        ));
    }

    #[test]
    fn delta_examples() {
        let d = MinimalEnergy::overpartition();
        let w = lambda_word(&d);
        let row: Vec<i64> = (1..12).map(|k| d.delta(&w, k, k + 1).unwrap()).collect();
        assert_eq!(row, vec![1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0]);
        assert_eq!(d.delta(&w, 5, 5).unwrap(), 0);
        assert_eq!(d.delta(&w, 1, 3).unwrap(), 1);
        assert_eq!(d.delta(&w, 4, 2).unwrap(), 0);
        assert!(matches!(
            d.delta(&w, 0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(d.delta(&w, 3, 13).is_err());
    }

    #[test]
    fn rejects_bad_matrices() {
        let s = StateSet::new(["a", "b"]).unwrap();
        assert!(matches!(
            MinimalEnergy::new(s.clone(), &[vec![0, 2], vec![0, 0]]),
            Err(Error::InvalidEntry { value: 2, .. })
        ));
        assert!(matches!(
            MinimalEnergy::new(s, &[vec![0, 1], vec![0]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(StateSet::new(["a", "a"]).is_err());
        assert!(StateSet::new([""]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"states": ["bbar","abar","a","b"], "matrix": [[1,1,1,1],[0,1,1,1],[0,0,0,1],[0,0,0,0]]}"#;
        let e = MinimalEnergy::from_json(text).unwrap();
        assert_eq!(e, MinimalEnergy::overpartition());
        assert_eq!(MinimalEnergy::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn overline_construction_for_one_color_pair() {
        let e = MinimalEnergy::overline(2);
        assert_eq!(e.states().labels(), ["c2bar", "c1bar", "c1", "c2"]);
        assert_eq!(e.rows(), MinimalEnergy::overpartition().rows());
    }

    fn energy_strategy(max: usize) -> impl Strategy<Value = MinimalEnergy> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
                MinimalEnergy::indexed(n, |i, j| bits[(i - 1) * n + (j - 1)])
            })
        })
    }

    proptest! {
        #[test]
        fn transpose_is_involution(e in energy_strategy(5)) {
            prop_assert_eq!(e.transpose().transpose(), e);
        }

        #[test]
        fn transitivity_invariant_under_transpose(e in energy_strategy(5)) {
            prop_assert_eq!(e.is_transitive(), e.transpose().is_transitive());
        }

        #[test]
        fn delta_chasles_bounds_and_table(
            e in energy_strategy(4),
            raw in proptest::collection::vec(0usize..4, 1..10),
        ) {
            let n = e.len();
            let word = ColorWord(raw.into_iter().map(|c| c % n).collect());
            let s = word.len();
            let table = e.delta_table(&word);
            for k in 1..=s {
                for k1 in 1..=s {
                    let d = e.delta(&word, k, k1).unwrap();
                    prop_assert_eq!(d, table.get(k, k1));
                    prop_assert_eq!(d, -e.delta(&word, k1, k).unwrap());
                    if k <= k1 {
                        prop_assert!(0 <= d && d <= (k1 - k) as i64);
                    }
                    for k2 in 1..=s {
                        prop_assert_eq!(d + e.delta(&word, k1, k2).unwrap(), e.delta(&word, k, k2).unwrap());
                    }
                }
            }
            prop_assert_eq!(e.transfer_energy(&word).unwrap(), e.delta(&word, 1, s).unwrap());
        }
    }
}

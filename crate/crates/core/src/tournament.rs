//! Tournaments, their text format and order-theoretic solutions.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// A subset of the alternatives `0..n`, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlternativeSet {
    members: Vec<usize>,
}

impl AlternativeSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn all(n: usize) -> Self {
        Self { members: (0..n).collect() }
    }

    pub fn singleton(x: usize) -> Self {
        Self { members: vec![x] }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn is_subset(&self, other: &AlternativeSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }
}

impl FromIterator<usize> for AlternativeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter)
    }
}

impl fmt::Display for AlternativeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Complete antisymmetric beats-relation on alternatives `0..n`.
///
/// Immutable after construction; every constructor validates
/// `beats[i][j] XOR beats[j][i]` for `i != j` and an all-false diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    beats: Vec<bool>,
}

impl Tournament {
    /// Validate a boolean matrix, row `i` listing whom `i` beats.
    pub fn from_matrix(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            if rows[i][i] {
                return Err(Error::Reflexive(i));
            }
            for j in (i + 1)..n {
                let count = usize::from(rows[i][j]) + usize::from(rows[j][i]);
                if count != 1 {
                    return Err(Error::NotAntisymmetric { i, j, count });
                }
            }
        }
        Ok(Self { n, beats: rows.iter().flatten().copied().collect() })
    }

    /// Orient each pair `i < j` by `i_beats_j(i, j)`.
    pub fn from_fn(n: usize, mut i_beats_j: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut beats = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                if i_beats_j(i, j) {
                    beats[i * n + j] = true;
                } else {
                    beats[j * n + i] = true;
                }
            }
        }
        Ok(Self { n, beats })
    }

    /// Each unordered pair `i < j`, in row-major order, is oriented by one
    /// fair coin from stream 0 of `seed`: heads means `i` beats `j`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = StreamRng::new(seed, 0);
        Self::from_fn(n, |_, _| rng.coin())
    }

    /// Regular tournament where `i` beats `i+1, ..., i+(n-1)/2 (mod n)`.
    pub fn cyclone(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::EvenCyclone(n));
        }
        let half = (n - 1) / 2;
        Self::from_fn(n, |i, j| j - i <= half)
    }

    /// `0 -> 1 -> 2 -> 0`.
    pub fn three_cycle() -> Self {
        Self::cyclone(3).expect("3 is odd")
    }

    /// Linear order: `i` beats `j` iff `i < j`. Alternative 0 is a Condorcet winner.
    pub fn transitive(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// Alternative 0 beats everyone; `1..` form the tournament `rest`.
    pub fn with_condorcet_winner(rest: &Tournament) -> Self {
        Self::from_fn(rest.n + 1, |i, j| i == 0 || rest.beats(i - 1, j - 1))
            .expect("nonempty")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.beats[i * self.n + j]
    }

    /// `T+(x)`: alternatives beaten by `x`.
    pub fn dominated_by(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&y| self.beats(x, y))
    }

    /// `T-(x)`: alternatives beating `x`.
    pub fn dominators_of(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&y| self.beats(y, x))
    }

    /// Copeland score, `|T+(x)|`.
    pub fn out_degree(&self, x: usize) -> usize {
        self.dominated_by(x).count()
    }

    /// Winner of the comparison; ties go to the common alternative.
    pub fn winner(&self, a: usize, b: usize) -> usize {
        if a == b || self.beats(a, b) {
            a
        } else {
            b
        }
    }

    pub fn condorcet_winner(&self) -> Option<usize> {
        (0..self.n).find(|&x| self.out_degree(x) == self.n - 1)
    }

    pub fn check_index(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(Error::OutOfRange { index: x, n: self.n })
        }
    }

    fn check_set(&self, set: &AlternativeSet) -> Result<()> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        set.iter().try_for_each(|x| self.check_index(x))
    }

    /// Sub-tournament on `within`; alternative `k` of the result is
    /// `within.as_slice()[k]` of `self`.
    pub fn restrict(&self, within: &AlternativeSet) -> Result<Tournament> {
        self.check_set(within)?;
        let ids = within.as_slice();
        Tournament::from_fn(ids.len(), |a, b| self.beats(ids[a], ids[b]))
    }

    /// Top-Cycle of the restriction to `within`: the source component of the
    /// condensation of the restricted beats-digraph.
    pub fn top_cycle(&self, within: &AlternativeSet) -> Result<AlternativeSet> {
        self.check_set(within)?;
        let ids = within.as_slice();
        let adj: Vec<Vec<usize>> = (0..ids.len())
            .map(|a| (0..ids.len()).filter(|&b| self.beats(ids[a], ids[b])).collect())
            .collect();
        let (comp_of, ncomp) = strongly_connected_components(&adj);
        let mut has_incoming = vec![false; ncomp];
        for (a, succ) in adj.iter().enumerate() {
            for &b in succ {
                if comp_of[a] != comp_of[b] {
                    has_incoming[comp_of[b]] = true;
                }
            }
        }
        // The condensation of a tournament is a linear order, so exactly one source.
        let source = has_incoming
            .iter()
            .position(|&inc| !inc)
            .expect("condensation of a tournament has a source");
        Ok((0..ids.len()).filter(|&a| comp_of[a] == source).map(|a| ids[a]).collect())
    }

    /// Text form: `n`, then `n` rows of space-separated 0/1.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<&str> =
                (0..self.n).map(|j| if self.beats(i, j) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the text form. Errors carry 1-based line and column.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (first_no, first) =
            lines.next().ok_or(Error::Parse { line: 1, column: 1, message: "empty input".into() })?;
        let col_of = |line: &str, tok: &str| tok.as_ptr() as usize - line.as_ptr() as usize + 1;
        let header = first.trim();
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line: first_no + 1,
            column: col_of(first, header),
            message: format!("expected alternative count, found {header:?}"),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: first_no + 1,
                column: col_of(first, header),
                message: "alternative count must be at least 1".into(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        let mut last_line = first_no + 1;
        for (no, line) in lines {
            last_line = no + 1;
            if rows.len() == n {
                return Err(Error::Parse {
                    line: no + 1,
                    column: 1,
                    message: format!("unexpected extra row; header declares {n}"),
                });
            }
            let mut row = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                let v = match tok {
                    "0" => false,
                    "1" => true,
                    _ => {
                        return Err(Error::Parse {
                            line: no + 1,
                            column: col_of(line, tok),
                            message: format!("expected 0 or 1, found {tok:?}"),
                        })
                    }
                };
                row.push(v);
            }
            if row.len() != n {
                return Err(Error::Parse {
                    line: no + 1,
                    column: line.len() + 1,
                    message: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: last_line + 1,
                column: 1,
                message: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        Tournament::from_matrix(&rows).map_err(|e| {
            let (i, j) = match e {
                Error::Reflexive(i) => (i, i),
                Error::NotAntisymmetric { i, j, .. } => (j, i),
                _ => (0, 0),
            };
            // Row i is the (i+1)-th nonblank line after the header.
            let line = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .nth(i + 1)
                .map_or(1, |(no, _)| no + 1);
            Error::Parse { line, column: 2 * j + 1, message: e.to_string() }
        })
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Iterative Tarjan. Returns the component id of every vertex and the count.
fn strongly_connected_components(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp_of = vec![usize::MAX; n];
    let mut ncomp = 0;
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp_of[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    (comp_of, ncomp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_rows() -> Vec<Vec<bool>> {
        vec![vec![false, true, false], vec![false, false, true], vec![true, false, false]]
    }

    /// Smallest dominant subset of `within` (every member beats every
    /// non-member) by brute force over all subsets.
    fn brute_top_cycle(t: &Tournament, within: &[usize]) -> Vec<usize> {
        let m = within.len();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..(1 << m) {
            let inside: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| within[k]).collect();
            let dominant = (0..m)
                .filter(|k| mask >> k & 1 == 0)
                .all(|k| inside.iter().all(|&y| t.beats(y, within[k])));
            if dominant && best.as_ref().is_none_or(|b| inside.len() < b.len()) {
                best = Some(inside);
            }
        }
        best.unwrap()
    }

    #[test]
    fn single_alternative() {
        let t = Tournament::from_matrix(&[vec![false]]).unwrap();
        assert_eq!(t.n(), 1);
        assert_eq!(t.condorcet_winner(), Some(0));
        assert_eq!(t.top_cycle(&AlternativeSet::all(1)).unwrap(), AlternativeSet::singleton(0));
        assert_eq!(Tournament::random(1, 99).unwrap(), t);
    }

    #[test]
    fn three_cycle_matrix_is_valid() {
        let t = Tournament::from_matrix(&cycle_rows()).unwrap();
        assert_eq!(t, Tournament::three_cycle());
        assert_eq!(t.condorcet_winner(), None);
        assert_eq!(t.top_cycle(&AlternativeSet::all(3)).unwrap(), AlternativeSet::all(3));
        assert_eq!(brute_top_cycle(&t, &[0, 1, 2]), vec![0, 1, 2]);
    }

    #[test]
    fn matrix_errors() {
        let both = vec![vec![false, true], vec![true, false]];
        assert_eq!(
            Tournament::from_matrix(&both),
            Err(Error::NotAntisymmetric { i: 0, j: 1, count: 2 })
        );
        let neither = vec![vec![false, false], vec![false, false]];
        assert!(matches!(Tournament::from_matrix(&neither), Err(Error::NotAntisymmetric { count: 0, .. })));
        let diag = vec![vec![true, true], vec![false, false]];
        assert_eq!(Tournament::from_matrix(&diag), Err(Error::Reflexive(0)));
        let ragged = vec![vec![false, true], vec![false]];
        assert!(matches!(Tournament::from_matrix(&ragged), Err(Error::NotSquare { row: 1, .. })));
        assert_eq!(Tournament::from_matrix(&[]), Err(Error::Empty));
    }

    #[test]
    fn condorcet_over_cycle() {
        let t = Tournament::with_condorcet_winner(&Tournament::three_cycle());
        // Degree enumeration: only row 0 has n-1 wins.
        let degrees: Vec<usize> = (0..4).map(|x| t.out_degree(x)).collect();
        assert_eq!(degrees, vec![3, 1, 1, 1]);
        assert_eq!(t.condorcet_winner(), Some(0));
        assert_eq!(t.top_cycle(&AlternativeSet::all(4)).unwrap(), AlternativeSet::singleton(0));
        let rest: AlternativeSet = [1, 2, 3].into_iter().collect();
        assert_eq!(t.top_cycle(&rest).unwrap(), rest);
    }

    #[test]
    fn top_cycle_of_singleton_and_empty() {
        let t = Tournament::cyclone(5).unwrap();
        assert_eq!(t.top_cycle(&AlternativeSet::singleton(3)).unwrap(), AlternativeSet::singleton(3));
        assert_eq!(t.top_cycle(&AlternativeSet::default()), Err(Error::EmptySet));
        assert!(matches!(
            t.top_cycle(&AlternativeSet::singleton(9)),
            Err(Error::OutOfRange { index: 9, n: 5 })
        ));
    }

    #[test]
    fn cyclone_is_regular() {
        for n in [3, 5, 7, 9] {
            let t = Tournament::cyclone(n).unwrap();
            assert!((0..n).all(|x| t.out_degree(x) == (n - 1) / 2));
        }
        assert_eq!(Tournament::cyclone(4), Err(Error::EvenCyclone(4)));
        assert_eq!(Tournament::cyclone(1), Err(Error::EvenCyclone(1)));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(Tournament::random(5, 42).unwrap(), Tournament::random(5, 42).unwrap());
        assert_ne!(Tournament::random(8, 1).unwrap(), Tournament::random(8, 2).unwrap());
        assert_eq!(Tournament::random(0, 1), Err(Error::Empty));
    }

    #[test]
    fn random_edges_are_fair() {
        let draws = 10_000;
        let mut upper_wins = 0u64;
        let mut pairs = 0u64;
        for seed in 0..draws {
            let t = Tournament::random(6, seed).unwrap();
            for i in 0..6 {
                for j in (i + 1)..6 {
                    pairs += 1;
                    upper_wins += u64::from(t.beats(i, j));
                }
            }
        }
        let freq = upper_wins as f64 / pairs as f64;
        assert!((freq - 0.5).abs() < 0.05, "{freq}");
        // Per-edge frequency, edge (0, 1) alone.
        let first: u64 = (0..draws).map(|s| u64::from(Tournament::random(6, s).unwrap().beats(0, 1))).sum();
        assert!((first as f64 / draws as f64 - 0.5).abs() < 0.05);
    }

    #[test]
    fn top_cycle_matches_brute_force() {
        for n in 1..=7 {
            for seed in 0..40 {
                let t = Tournament::random(n, seed).unwrap();
                let all: Vec<usize> = (0..n).collect();
                let tc = t.top_cycle(&AlternativeSet::all(n)).unwrap();
                assert_eq!(tc.as_slice(), brute_top_cycle(&t, &all).as_slice());
                // Every outsider is beaten by some member.
                assert!((0..n).filter(|&x| !tc.contains(x)).all(|x| tc.iter().any(|y| t.beats(y, x))));
                assert_eq!(tc.len() == 1, t.condorcet_winner().is_some());
                if tc.len() == 1 {
                    assert_eq!(t.condorcet_winner(), Some(tc.as_slice()[0]));
                }
                // Restricting first gives the same set.
                let within: AlternativeSet = (0..n).filter(|x| (seed as usize + x) % 3 != 0).collect();
                if !within.is_empty() {
                    let sub = t.restrict(&within).unwrap();
                    let tc_sub: AlternativeSet = sub
                        .top_cycle(&AlternativeSet::all(within.len()))
                        .unwrap()
                        .iter()
                        .map(|k| within.as_slice()[k])
                        .collect();
                    assert_eq!(tc_sub, t.top_cycle(&within).unwrap());
                }
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let t = Tournament::random(6, 3).unwrap();
        assert_eq!(Tournament::from_text(&t.to_text()).unwrap(), t);

        let bad_token = "3\n0 1 0\n0 0 x\n1 0 0\n";
        assert_eq!(
            Tournament::from_text(bad_token),
            Err(Error::Parse { line: 3, column: 5, message: "expected 0 or 1, found \"x\"".into() })
        );
        let short = "3\n0 1 0\n0 0 1\n";
        assert!(matches!(Tournament::from_text(short), Err(Error::Parse { line: 4, .. })));
        let header = "three\n";
        assert!(matches!(Tournament::from_text(header), Err(Error::Parse { line: 1, column: 1, .. })));
        let sym = "2\n0 1\n1 0\n";
        assert!(matches!(Tournament::from_text(sym), Err(Error::Parse { line: 3, column: 1, .. })));
    }
}

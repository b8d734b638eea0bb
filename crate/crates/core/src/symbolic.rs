//! Cyclically admissible words over the generator alphabet and their
//! rotation classes.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A periodic symbolic sequence. Symbol `k` names generator `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No symbol is followed by itself, including the wrap-around pair.
    pub fn is_admissible(&self) -> bool {
        let n = self.0.len();
        n >= 1 && (0..n).all(|k| self.0[k] != self.0[(k + 1) % n])
    }

    pub fn rotated(&self, shift: usize) -> Word {
        let mut symbols = self.0.clone();
        if !symbols.is_empty() {
            symbols.rotate_left(shift % self.0.len());
        }
        Word(symbols)
    }

    /// Smallest `p` dividing the length with `w` invariant under rotation by `p`.
    pub fn primitive_period(&self) -> usize {
        let n = self.0.len();
        (1..=n).filter(|&p| n.is_multiple_of(p)).find(|&p| (p..n).all(|k| self.0[k] == self.0[k - p])).unwrap_or(n)
    }

    pub fn is_min_rotation(&self) -> bool {
        let n = self.0.len();
        (1..n).all(|shift| {
            for k in 0..n {
                let (a, b) = (self.0[k], self.0[(k + shift) % n]);
                if a != b {
                    return a < b;
                }
            }
            true
        })
    }

    pub fn canonical(&self) -> Word {
        self.rotated(least_rotation_start(&self.0))
    }

    /// Least rotation among the images of the word under each symbol
    /// permutation in `permutations` (as lookup tables), read forwards and
    /// backwards.
    pub fn symmetry_canonical(&self, permutations: &[Vec<u8>]) -> Word {
        let n = self.0.len();
        let mut best = self.canonical();
        let mut image = vec![0u8; n];
        for perm in permutations {
            for reversed in [false, true] {
                for (k, slot) in image.iter_mut().enumerate() {
                    let s = if reversed { self.0[n - 1 - k] } else { self.0[k] };
                    *slot = perm[s as usize];
                }
                let start = least_rotation_start(&image);
                let candidate = (0..n).map(|k| image[(start + k) % n]);
                if candidate.clone().lt(best.0.iter().copied()) {
                    best = Word(candidate.collect());
                }
            }
        }
        best
    }
}

/// Start index of the lexicographically least rotation.
fn least_rotation_start(s: &[u8]) -> usize {
    let n = s.len();
    let mut best = 0;
    for candidate in 1..n {
        for k in 0..n {
            let (a, b) = (s[(candidate + k) % n], s[(best + k) % n]);
            if a != b {
                if a < b {
                    best = candidate;
                }
                break;
            }
        }
    }
    best
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphanumeric = self.0.iter().all(|&s| s < 10);
        for (k, s) in self.0.iter().enumerate() {
            if !alphanumeric && k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl From<&str> for Word {
    /// Parses digit strings such as `"0102"`. Panics on anything else; test helper.
    fn from(s: &str) -> Self {
        Word(
            s.bytes()
                .map(|b| {
                    assert!(b.is_ascii_digit(), "not a digit word: {s}");
                    b - b'0'
                })
                .collect(),
        )
    }
}

/// A necklace of admissible words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    /// Lexicographically least rotation.
    pub representative: Word,
    pub rotation_count: usize,
    pub primitive_period: usize,
}

impl OrbitClass {
    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_period == self.len()
    }
}

/// All rotation classes of cyclically admissible words of length `n` over
/// `alphabet` symbols, sorted by representative.
pub fn enumerate_orbit_classes(alphabet: usize, n: usize) -> Vec<OrbitClass> {
    assert!((2..=256).contains(&alphabet), "alphabet size must be in 2..=256");
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut buf = vec![0u8; n];
    for first in 0..alphabet as u8 {
        buf[0] = first;
        extend(&mut buf, 1, first, alphabet as u8, &mut out);
    }
    out
}

fn extend(buf: &mut [u8], pos: usize, floor: u8, alphabet: u8, out: &mut Vec<OrbitClass>) {
    let n = buf.len();
    if pos == n {
        if n == 1 || buf[n - 1] == buf[0] {
            return;
        }
        let word = Word(buf.to_vec());
        if word.is_min_rotation() {
            let p = word.primitive_period();
            out.push(OrbitClass { representative: word, rotation_count: p, primitive_period: p });
        }
        return;
    }
    // a minimal rotation starts with its least symbol
    for s in floor..alphabet {
        if s == buf[pos - 1] {
            continue;
        }
        buf[pos] = s;
        extend(buf, pos + 1, floor, alphabet, out);
    }
}

/// Number of cyclically admissible words of length `n`: the trace of the
/// `n`-th power of the "different symbol" adjacency matrix.
pub fn word_count(alphabet: usize, n: usize) -> u128 {
    let k = alphabet as i128 - 1;
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    (k.pow(n as u32) + k * sign) as u128
}

/// Splits `w` into its primitive root and the number of repetitions.
pub fn primitive_decomposition(w: &Word) -> (Word, usize) {
    let p = w.primitive_period();
    (Word(w.0[..p].to_vec()), w.len() / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over all `L^n` strings.
    fn brute_force(alphabet: usize, n: usize) -> Vec<Word> {
        let total = alphabet.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![0u8; n];
                for slot in v.iter_mut().rev() {
                    *slot = (code % alphabet) as u8;
                    code /= alphabet;
                }
                Word(v)
            })
            .filter(Word::is_admissible)
            .collect()
    }

    #[test]
    fn length_one_has_no_orbits() {
        assert!(enumerate_orbit_classes(3, 1).is_empty());
        assert_eq!(word_count(3, 1), 0);
    }

    #[test]
    fn length_two_classes() {
        let classes = enumerate_orbit_classes(3, 2);
        let reps: Vec<String> = classes.iter().map(|c| c.representative.to_string()).collect();
        assert_eq!(reps, ["01", "02", "12"]);
        assert!(classes.iter().all(|c| c.rotation_count == 2));
    }

    #[test]
    fn frozen_counts() {
        // exhaustive enumeration values
        assert_eq!(brute_force(3, 3).len(), 6);
        assert_eq!(brute_force(3, 4).len(), 18);
        assert_eq!(brute_force(3, 13).len(), 8190);
        assert_eq!(word_count(3, 3), 6);
        assert_eq!(word_count(3, 4), 18);
        assert_eq!(word_count(3, 13), 8190);
    }

    #[test]
    fn enumeration_matches_brute_force_classes() {
        for alphabet in [3, 4] {
            for n in 1..=8 {
                let mut expected: Vec<Word> = brute_force(alphabet, n).iter().map(Word::canonical).collect();
                expected.sort();
                expected.dedup();
                let got: Vec<Word> =
                    enumerate_orbit_classes(alphabet, n).into_iter().map(|c| c.representative).collect();
                assert_eq!(got, expected, "L={alphabet} n={n}");
            }
        }
    }

    #[test]
    fn totals_match_word_count() {
        for alphabet in [3usize, 4] {
            let max_n = if alphabet == 3 { 16 } else { 12 };
            for n in 1..=max_n {
                let classes = enumerate_orbit_classes(alphabet, n);
                let total: u128 = classes.iter().map(|c| c.rotation_count as u128).sum();
                assert_eq!(total, word_count(alphabet, n), "L={alphabet} n={n}");
                for c in &classes {
                    assert!(c.representative.is_admissible());
                    assert_eq!(n % c.primitive_period, 0);
                    assert_eq!(c.rotation_count, c.primitive_period);
                }
            }
        }
    }

    #[test]
    fn representatives_are_pairwise_inequivalent() {
        for n in 2..=10 {
            let classes = enumerate_orbit_classes(3, n);
            for (i, a) in classes.iter().enumerate() {
                for b in &classes[i + 1..] {
                    assert!((0..n).all(|s| a.representative.rotated(s) != b.representative));
                }
            }
        }
    }

    #[test]
    fn decompositions() {
        assert_eq!(primitive_decomposition(&Word::from("0101")), (Word::from("01"), 2));
        assert_eq!(primitive_decomposition(&Word::from("012")), (Word::from("012"), 1));
        assert_eq!(primitive_decomposition(&Word::from("010212")), (Word::from("010212"), 1));
        assert_eq!(primitive_decomposition(&Word::from("012012")), (Word::from("012"), 2));
    }

    #[test]
    fn display_formats() {
        assert_eq!(Word::from("0121").to_string(), "0121");
        assert_eq!(Word::new(vec![0, 11, 3]).to_string(), "0.11.3");
    }

    #[test]
    fn symmetry_canonical_is_invariant() {
        let dihedral: Vec<Vec<u8>> =
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1], vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]];
        for n in 2..=8 {
            for class in enumerate_orbit_classes(3, n) {
                let w = &class.representative;
                let key = w.symmetry_canonical(&dihedral);
                assert!(key.is_min_rotation() && key.is_admissible() && key <= *w);
                for perm in &dihedral {
                    let image = Word::new(w.symbols().iter().map(|&s| perm[s as usize]).collect());
                    assert_eq!(image.symmetry_canonical(&dihedral), key);
                }
                let reversed = Word::new(w.symbols().iter().rev().copied().collect());
                assert_eq!(reversed.symmetry_canonical(&[vec![0, 1, 2]]), w.symmetry_canonical(&[vec![0, 1, 2]]));
            }
        }
        // 012 and 021 are mirror images, not rotations of each other
        let id = [vec![0u8, 1, 2]];
        assert_eq!(Word::from("021").canonical(), Word::from("021"));
        assert_eq!(Word::from("021").symmetry_canonical(&id), Word::from("012"));
    }
}

//! Exact counting: Raney numbers, first-return counts, the boundary-avoiding
//! path tables, revisit-refined path counts, and the manila-folder
//! configurations together with their bijection onto lattice paths.
//!
//! Lattice paths start at `((k-1)n, n)` and take unit south (`D`) and west
//! (`L`) steps to the origin while staying weakly below the boundary line
//! `(k-1)y = x`. A *revisit* is a lattice point strictly between the two
//! endpoints that lies on the boundary line.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::binomial;

/// Largest `k * n` accepted by the brute-force enumerators.
pub const ENUMERATION_LIMIT: usize = 24;

/// Raney number `r / (lc + r) * C(lc + r, l)`.
pub fn raney(c: u64, r: u64, l: u64) -> BigInt {
    let total = l * c + r;
    assert!(total > 0, "raney: lc + r must be positive");
    let b = binomial(total, l as i64) * BigInt::from(r);
    let (quot, rem) = b.div_rem(&BigInt::from(total));
    debug_assert!(rem.is_zero());
    quot
}

/// Number of first diagonal returns of order `i`: `Raney_{k,k-1}(i-1)`.
pub fn s_count(k: usize, i: usize) -> BigInt {
    assert!(k >= 2 && i >= 1, "s_count requires k >= 2 and i >= 1");
    raney(k as u64, k as u64 - 1, i as u64 - 1)
}

/// `s_{i+1} / s_i`, as a product of `2k - 1` linear factors.
pub fn s_ratio(k: usize, i: usize) -> BigRational {
    assert!(k >= 2 && i >= 1, "s_ratio requires k >= 2 and i >= 1");
    let mut num = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(k * i + j - 1);
    }
    let mut den = BigInt::from(i + 1);
    for j in 0..k - 1 {
        den *= BigInt::from((k - 1) * i + j);
    }
    BigRational::new(num, den)
}

/// Coefficient row `t_{n,0} .. t_{n,(k-1)n-k}`, built by the partial-sum
/// recursion from `T_2 = 1 + x + ... + x^{k-2}`.
pub fn t_table(k: usize, n: usize) -> Vec<BigInt> {
    assert!(k >= 2 && n >= 2, "t_table requires k >= 2 and n >= 2");
    let mut row = vec![BigInt::one(); k - 1];
    for _ in 2..n {
        let mut next = Vec::with_capacity(row.len() + k - 1);
        let mut acc = BigInt::zero();
        for t in &row {
            acc += t;
            next.push(acc.clone());
        }
        next.extend(std::iter::repeat_n(acc, k - 1));
        row = next;
    }
    row
}

/// Number of lattice paths from `((k-1)n, n)` to `(j, 0)` whose last step is
/// south and which never touch the boundary line after leaving it.
pub fn d_count(k: usize, n: usize, j: usize) -> BigInt {
    assert!(k >= 2 && n >= 2, "d_count requires k >= 2 and n >= 2");
    if j < k || j > (k - 1) * n {
        return BigInt::zero();
    }
    let mut count = binomial((k * n - 2 - j) as u64, (n - 2) as i64);
    let last = n - j.div_ceil(k - 1);
    for l in 1..=last {
        let top = k * (n - l) - 1 - j;
        count -= s_count(k, l) * binomial(top as u64, (n - l - 1) as i64);
    }
    count
}

/// Number of paths in `Paths_k(n)` revisiting the boundary line exactly `i`
/// times: `(i+1)/n * C(kn-i-2, n-i-1)`.
pub fn paths_count(k: usize, n: usize, i: usize) -> BigInt {
    assert!(k >= 2 && n >= 1 && i < n, "paths_count requires k >= 2, 0 <= i < n");
    let b = binomial((k * n - i - 2) as u64, (n - i - 1) as i64);
    let value = BigRational::new(BigInt::from(i + 1) * b, BigInt::from(n));
    assert!(value.is_integer(), "paths_count({k}, {n}, {i}) is not integral");
    value.to_integer()
}

/// `|Paths_k(n)|`, the Fuss-Catalan number `C(kn, n) / ((k-1)n + 1)`.
pub fn total_paths(k: usize, n: usize) -> BigInt {
    binomial((k * n) as u64, n as i64) / BigInt::from((k - 1) * n + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// Unit south step.
    D,
    /// Unit west step.
    L,
}

/// A path word over `{D, L}` for parameter `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    k: usize,
    steps: Vec<Step>,
}

impl PathWord {
    /// Validates that the word is a member of `Paths_k(n)` for some `n`.
    pub fn new(k: usize, steps: Vec<Step>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        let word = PathWord { k, steps };
        let downs = word.steps.iter().filter(|s| **s == Step::D).count();
        let lefts = word.steps.len() - downs;
        if lefts != (k - 1) * downs || word.trace().is_none() {
            return Err(Error::MalformedPath(word.to_string()));
        }
        Ok(word)
    }

    pub fn parse(k: usize, text: &str) -> Result<Self> {
        let steps = text
            .chars()
            .map(|c| match c {
                'D' => Ok(Step::D),
                'L' => Ok(Step::L),
                _ => Err(Error::MalformedPath(text.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, steps)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of folders / diagonal levels, i.e. the count of `D` steps.
    pub fn n(&self) -> usize {
        self.steps.len() / self.k
    }

    /// Number of boundary contacts strictly between the endpoints.
    pub fn revisits(&self) -> usize {
        self.trace().expect("validated on construction")
    }

    // Walks the path; None if it leaves the allowed region.
    fn trace(&self) -> Option<usize> {
        let k1 = (self.k - 1) as i64;
        let n = self.n() as i64;
        let (mut x, mut y) = (k1 * n, n);
        let mut contacts = 0;
        let last = self.steps.len();
        for (idx, step) in self.steps.iter().enumerate() {
            match step {
                Step::D => y -= 1,
                Step::L => x -= 1,
            }
            if x < 0 || y < 0 || k1 * y > x {
                return None;
            }
            if idx + 1 < last && k1 * y == x {
                contacts += 1;
            }
        }
        Some(contacts)
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::D => "D",
                Step::L => "L",
            })?;
        }
        Ok(())
    }
}

fn guard(k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if k * n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: k * n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Every word of `Paths_k(n)` exactly once, with its revisit count.
pub fn enumerate_paths(k: usize, n: usize) -> Result<Vec<(PathWord, usize)>> {
    guard(k, n)?;
    let k1 = k - 1;
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(k * n);

    fn walk(
        k: usize,
        x: usize,
        y: usize,
        contacts: usize,
        word: &mut Vec<Step>,
        out: &mut Vec<(PathWord, usize)>,
    ) {
        let k1 = k - 1;
        if x == 0 && y == 0 {
            out.push((
                PathWord {
                    k,
                    steps: word.clone(),
                },
                contacts,
            ));
            return;
        }
        let on_line = |x: usize, y: usize| k1 * y == x && (x, y) != (0, 0);
        if y > 0 {
            word.push(Step::D);
            let c = contacts + on_line(x, y - 1) as usize;
            walk(k, x, y - 1, c, word, out);
            word.pop();
        }
        if x > 0 && k1 * y < x {
            word.push(Step::L);
            let c = contacts + on_line(x - 1, y) as usize;
            walk(k, x - 1, y, c, word, out);
            word.pop();
        }
    }

    if n == 0 {
        return Ok(vec![(PathWord { k, steps: vec![] }, 0)]);
    }
    walk(k, k1 * n, n, 0, &mut word, &mut out);
    Ok(out)
}

/// Arrangement of manila folders, each with `k - 1` compartments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ManilaConfig {
    /// No folder at all.
    Empty,
    /// A single folder whose compartments hold the given arrangements.
    Folder(Vec<ManilaConfig>),
    /// Two or more folders side by side, each a [`ManilaConfig::Folder`].
    Row(Vec<ManilaConfig>),
}

impl ManilaConfig {
    /// Number of folders.
    pub fn folders(&self) -> usize {
        match self {
            ManilaConfig::Empty => 0,
            ManilaConfig::Folder(children) => 1 + children.iter().map(Self::folders).sum::<usize>(),
            ManilaConfig::Row(items) => items.iter().map(Self::folders).sum(),
        }
    }

    /// Spines visible from below.
    pub fn visible_spines(&self) -> usize {
        match self {
            ManilaConfig::Empty => 0,
            ManilaConfig::Folder(_) => 1,
            ManilaConfig::Row(items) => items.len(),
        }
    }

    /// The index `i` of `Manila_k(n, i)`: visible spines minus one, -1 for empty.
    pub fn index(&self) -> isize {
        self.visible_spines() as isize - 1
    }

    /// Checks the structural rules for compartment count `k - 1`.
    pub fn validate(&self, k: usize) -> Result<()> {
        let bad = || Error::MalformedManila(self.to_string());
        match self {
            ManilaConfig::Empty => Ok(()),
            ManilaConfig::Folder(children) => {
                if children.len() != k - 1 {
                    return Err(bad());
                }
                children.iter().try_for_each(|c| c.validate(k))
            }
            ManilaConfig::Row(items) => {
                if items.len() < 2 || !items.iter().all(|m| matches!(m, ManilaConfig::Folder(_))) {
                    return Err(bad());
                }
                items.iter().try_for_each(|c| c.validate(k))
            }
        }
    }

    /// Parses the bracketed-ε notation, e.g. `(ε,(ε,ε))` or `(e,e)(e,e)`.
    pub fn parse(k: usize, text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let config = parse_config(&chars, &mut pos).ok_or_else(|| Error::MalformedManila(text.into()))?;
        if pos != chars.len() {
            return Err(Error::MalformedManila(text.into()));
        }
        config.validate(k)?;
        Ok(config)
    }
}

fn parse_config(chars: &[char], pos: &mut usize) -> Option<ManilaConfig> {
    let mut folders = Vec::new();
    while chars.get(*pos) == Some(&'(') {
        *pos += 1;
        let mut children = vec![parse_config(chars, pos)?];
        while chars.get(*pos) == Some(&',') {
            *pos += 1;
            children.push(parse_config(chars, pos)?);
        }
        if chars.get(*pos) != Some(&')') {
            return None;
        }
        *pos += 1;
        folders.push(ManilaConfig::Folder(children));
    }
    match folders.len() {
        0 => match chars.get(*pos) {
            Some('ε') | Some('e') => {
                *pos += 1;
                Some(ManilaConfig::Empty)
            }
            _ => None,
        },
        1 => folders.pop(),
        _ => Some(ManilaConfig::Row(folders)),
    }
}

impl fmt::Display for ManilaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManilaConfig::Empty => f.write_str("ε"),
            ManilaConfig::Folder(children) => {
                f.write_str("(")?;
                for (idx, c) in children.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(",")?;
                    }
                    c.fmt(f)?;
                }
                f.write_str(")")
            }
            ManilaConfig::Row(items) => items.iter().try_for_each(|m| m.fmt(f)),
        }
    }
}

impl FromStr for ManilaConfig {
    type Err = Error;

    /// Parses without a compartment check; use [`ManilaConfig::parse`] to
    /// validate against a specific `k`.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        match parse_config(&chars, &mut pos) {
            Some(c) if pos == chars.len() => Ok(c),
            _ => Err(Error::MalformedManila(s.into())),
        }
    }
}

struct ManilaGenerator {
    k: usize,
    all: HashMap<usize, Vec<ManilaConfig>>,
    folders: HashMap<usize, Vec<ManilaConfig>>,
    sequences: HashMap<usize, Vec<Vec<ManilaConfig>>>,
}

impl ManilaGenerator {
    fn new(k: usize) -> Self {
        ManilaGenerator {
            k,
            all: HashMap::new(),
            folders: HashMap::new(),
            sequences: HashMap::new(),
        }
    }

    // M1 + M2 + M3
    fn all(&mut self, n: usize) -> Vec<ManilaConfig> {
        if let Some(v) = self.all.get(&n) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(ManilaConfig::Empty);
        } else {
            out.extend(self.folders(n));
            for seq in self.sequences(n) {
                if seq.len() >= 2 {
                    out.push(ManilaConfig::Row(seq));
                }
            }
        }
        self.all.insert(n, out.clone());
        out
    }

    // M2: one folder holding n - 1 further folders across k - 1 compartments.
    fn folders(&mut self, n: usize) -> Vec<ManilaConfig> {
        if let Some(v) = self.folders.get(&n) {
            return v.clone();
        }
        let mut out = Vec::new();
        let mut partial: Vec<Vec<ManilaConfig>> = vec![Vec::new()];
        self.fill_compartments(self.k - 1, n - 1, &mut partial, &mut out);
        self.folders.insert(n, out.clone());
        out
    }

    fn fill_compartments(
        &mut self,
        slots: usize,
        remaining: usize,
        partial: &mut [Vec<ManilaConfig>],
        out: &mut Vec<ManilaConfig>,
    ) {
        if slots == 1 {
            for last in self.all(remaining) {
                for prefix in partial.iter() {
                    let mut children = prefix.clone();
                    children.push(last.clone());
                    out.push(ManilaConfig::Folder(children));
                }
            }
            return;
        }
        for size in 0..=remaining {
            let options = self.all(size);
            let mut extended = Vec::with_capacity(partial.len() * options.len());
            for prefix in partial.iter() {
                for o in &options {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    extended.push(p);
                }
            }
            self.fill_compartments(slots - 1, remaining - size, &mut extended, out);
        }
    }

    // Non-empty sequences of folders with n folders in total.
    fn sequences(&mut self, n: usize) -> Vec<Vec<ManilaConfig>> {
        if let Some(v) = self.sequences.get(&n) {
            return v.clone();
        }
        let mut out = Vec::new();
        for first in 1..=n {
            let heads = self.folders(first);
            if first == n {
                out.extend(heads.into_iter().map(|h| vec![h]));
                continue;
            }
            let tails = self.sequences(n - first);
            for h in &heads {
                for t in &tails {
                    let mut seq = Vec::with_capacity(t.len() + 1);
                    seq.push(h.clone());
                    seq.extend(t.iter().cloned());
                    out.push(seq);
                }
            }
        }
        self.sequences.insert(n, out.clone());
        out
    }
}

/// Every manila configuration of `n` folders with `k - 1` compartments.
pub fn enumerate_manila(k: usize, n: usize) -> Result<Vec<ManilaConfig>> {
    guard(k, n)?;
    Ok(ManilaGenerator::new(k).all(n))
}

/// Reads the bracketed-ε form right to left: `)` gives `D`, `(` and `,`
/// give `L`.
pub fn mu_bijection(k: usize, config: &ManilaConfig) -> Result<PathWord> {
    config.validate(k)?;
    let text = config.to_string();
    let steps = text
        .chars()
        .rev()
        .filter_map(|c| match c {
            ')' => Some(Step::D),
            '(' | ',' => Some(Step::L),
            _ => None,
        })
        .collect();
    PathWord::new(k, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn big(n: u64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn raney_examples() {
        assert_eq!(raney(3, 2, 2), big(7));
        assert_eq!(raney(4, 3, 1), big(3));
        for c in 1..6 {
            for r in 1..6 {
                assert_eq!(raney(c, r, 0), big(1));
            }
        }
    }

    #[test]
    fn s_count_examples() {
        assert_eq!(s_count(2, 5), big(14));
        assert_eq!(s_count(3, 4), big(30));
        assert_eq!(s_count(4, 6), big(4389));
    }

    #[test]
    fn s_ratio_matches_counts() {
        for k in 2..=6 {
            for i in 1..30 {
                let want = BigRational::new(s_count(k, i + 1), s_count(k, i));
                assert_eq!(s_ratio(k, i), want, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn t_table_examples() {
        let row = |v: &[u64]| v.iter().map(|&x| big(x)).collect::<Vec<_>>();
        assert_eq!(t_table(3, 2), row(&[1, 1]));
        assert_eq!(t_table(3, 3), row(&[1, 2, 2, 2]));
        assert_eq!(t_table(3, 4), row(&[1, 3, 5, 7, 7, 7]));
        assert_eq!(t_table(3, 5), row(&[1, 4, 9, 16, 23, 30, 30, 30]));
        assert_eq!(t_table(4, 2), row(&[1, 1, 1]));
    }

    #[test]
    fn t_table_tail_is_s_count() {
        for k in 2..=6 {
            for n in 2..=12 {
                let row = t_table(k, n);
                assert_eq!(row.len(), (k - 1) * n - k + 1);
                for t in &row[row.len() - (k - 1)..] {
                    assert_eq!(t, &s_count(k, n - 1));
                }
            }
        }
    }

    #[test]
    fn d_count_examples() {
        assert_eq!(d_count(3, 3, 6), big(1));
        assert_eq!(d_count(3, 3, 3), big(2));
        assert_eq!(d_count(3, 2, 2), big(0));
        assert_eq!(d_count(3, 3, 7), big(0));
    }

    #[test]
    fn d_count_is_reversed_t_table() {
        for k in 2..=6 {
            for n in 2..=12 {
                let row = t_table(k, n);
                for j in k..=(k - 1) * n {
                    assert_eq!(d_count(k, n, j), row[(k - 1) * n - j], "k={k} n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn paths_count_examples() {
        assert_eq!(paths_count(3, 2, 0), big(2));
        assert_eq!(paths_count(3, 2, 1), big(1));
        let row: Vec<_> = (0..3).map(|i| paths_count(2, 3, i)).collect();
        assert_eq!(row, vec![big(2), big(2), big(1)]);
    }

    #[test]
    fn small_enumerations() {
        let p = enumerate_paths(2, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].0.to_string(), p[0].1), ("DL".to_string(), 0));
        let p = enumerate_paths(3, 1).unwrap();
        assert_eq!((p[0].0.to_string(), p[0].1), ("DLL".to_string(), 0));
        let p = enumerate_paths(3, 2).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.iter().filter(|(_, i)| *i == 0).count(), 2);
        assert_eq!(p.iter().filter(|(_, i)| *i == 1).count(), 1);
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            enumerate_paths(5, 5),
            Err(Error::EnumerationTooLarge { size: 25, limit: 24 })
        ));
        assert!(enumerate_manila(13, 2).is_err());
    }

    #[test]
    fn manila_small_cases() {
        assert_eq!(enumerate_manila(3, 0).unwrap(), vec![ManilaConfig::Empty]);
        assert_eq!(enumerate_manila(5, 0).unwrap(), vec![ManilaConfig::Empty]);
        let m = enumerate_manila(3, 2).unwrap();
        assert_eq!(m.len(), 3);
        let texts: HashSet<String> = m.iter().map(|c| c.to_string()).collect();
        for t in ["((ε,ε),ε)", "(ε,(ε,ε))", "(ε,ε)(ε,ε)"] {
            assert!(texts.contains(t), "{t}");
        }
        assert_eq!(enumerate_manila(2, 3).unwrap().len(), 5);
    }

    #[test]
    fn mu_examples() {
        let cases = [("(ε,(ε,ε))", "DDLLLL", 0), ("((ε,ε),ε)", "DLDLLL", 0), ("(ε,ε)(ε,ε)", "DLLDLL", 1)];
        for (config, word, revisits) in cases {
            let c = ManilaConfig::parse(3, config).unwrap();
            let w = mu_bijection(3, &c).unwrap();
            assert_eq!(w.to_string(), word);
            assert_eq!(w.revisits(), revisits);
            assert_eq!(c.index(), revisits as isize);
        }
    }

    #[test]
    fn manila_parse_round_trip_and_errors() {
        let c = ManilaConfig::parse(3, "(e,(e,e))").unwrap();
        assert_eq!(c.to_string(), "(ε,(ε,ε))");
        assert_eq!(c.folders(), 2);
        assert!(ManilaConfig::parse(3, "(ε)").is_err());
        assert!(ManilaConfig::parse(3, "(ε,ε").is_err());
        assert!(ManilaConfig::parse(3, "(ε,ε)x").is_err());
        assert!("((ε),ε)".parse::<ManilaConfig>().is_ok());
    }

    #[test]
    fn path_word_validation() {
        assert!(PathWord::parse(3, "DLLDLL").is_ok());
        assert!(PathWord::parse(3, "LDL").is_err());
        assert!(PathWord::parse(3, "DLDL").is_err());
        assert!(PathWord::parse(2, "DX").is_err());
        assert_eq!(PathWord::parse(2, "DLDLDL").unwrap().revisits(), 2);
    }

    #[test]
    fn first_return_words_are_s_count() {
        for k in 2..=4 {
            for n in 1..=ENUMERATION_LIMIT / k {
                let first: usize = enumerate_paths(k, n).unwrap().iter().filter(|(_, i)| *i == 0).count();
                assert_eq!(BigInt::from(first), s_count(k, n));
            }
        }
    }

    #[test]
    fn total_paths_matches_row_sum() {
        for k in 2..=6 {
            for n in 1..=15 {
                let sum: BigInt = (0..n).map(|i| paths_count(k, n, i)).sum();
                assert_eq!(sum, total_paths(k, n));
            }
        }
    }
}

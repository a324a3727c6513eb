//! Minimum-weight logical searches: exact meet-in-the-middle enumeration,
//! randomized information-set rounds and a brute-force oracle for tiny codes.
//!
//! Every search here answers the same question. Given a check matrix `h`
//! and a set of "logical" rows `l`, find a lowest-weight `e` with
//! `h * e^T = 0` and `l * e^T != 0`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, RowEchelon};

/// Column cap for [`oracle_distance`].
pub const ORACLE_MAX_COLS: usize = 24;

/// Knobs for [`min_weight`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Weights up to this value are enumerated exhaustively.
    pub exact_limit: usize,
    /// Randomized information-set rounds run when the exact pass comes up empty.
    pub budget: usize,
    pub seed: u64,
    /// Largest half-table the exhaustive pass may build before giving up.
    pub table_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exact_limit: 5,
            budget: 10_000,
            seed: 0,
            table_cap: 4_000_000,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// A low-weight vector found by a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    pub vector: BitVector,
    pub weight: usize,
    /// `true` when every smaller weight was ruled out exhaustively.
    pub exact: bool,
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorSide {
    X,
    Z,
    Min,
}

/// Result of a distance computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: usize,
    pub exact: bool,
    pub side: ErrorSide,
    /// Per-side values: X errors, then Z errors.
    pub x: Option<SideReport>,
    pub z: Option<SideReport>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideReport {
    pub value: usize,
    pub exact: bool,
    pub witness: BitVector,
}

impl From<Codeword> for SideReport {
    fn from(c: Codeword) -> Self {
        SideReport {
            value: c.weight,
            exact: c.exact,
            witness: c.vector,
        }
    }
}

/// Column view of `(h; l)`: the syndrome words of each column and its
/// logical part packed into one word.
struct Columns {
    syndrome: Vec<Vec<u64>>,
    logical: Vec<u64>,
}

impl Columns {
    fn new(h: &BitMatrix, l: &BitMatrix) -> Result<Self> {
        if l.rows() > 64 {
            return Err(Error::TooLarge {
                cols: l.rows(),
                cap: 64,
            });
        }
        let ht = h.transpose();
        let lt = l.transpose();
        let syndrome = (0..h.cols())
            .map(|c| {
                if h.rows() == 0 {
                    Vec::new()
                } else {
                    ht.row(c).words().to_vec()
                }
            })
            .collect();
        let logical = (0..h.cols())
            .map(|c| {
                if l.rows() == 0 {
                    0
                } else {
                    lt.row(c).words()[0]
                }
            })
            .collect();
        Ok(Columns { syndrome, logical })
    }

    fn len(&self) -> usize {
        self.logical.len()
    }
}

/// Up to two subsets per syndrome with distinct logical parts, which is
/// all a query needs to find a partner with a different logical part.
type Slot = Vec<(u64, Vec<u32>)>;

/// Calls `f(subset, syndrome, logical)` for every `size`-subset in
/// lexicographic order. Stops early when `f` returns `false`.
fn for_each_subset<F>(cols: &Columns, size: usize, f: &mut F) -> bool
where
    F: FnMut(&[u32], &[u64], u64) -> bool,
{
    let words = cols.syndrome.first().map_or(0, Vec::len);
    let mut stack: Vec<u32> = Vec::with_capacity(size);
    let mut syn = vec![vec![0u64; words]; size + 1];
    let mut log = vec![0u64; size + 1];
    fn rec<F>(
        cols: &Columns,
        size: usize,
        start: usize,
        stack: &mut Vec<u32>,
        syn: &mut Vec<Vec<u64>>,
        log: &mut Vec<u64>,
        f: &mut F,
    ) -> bool
    where
        F: FnMut(&[u32], &[u64], u64) -> bool,
    {
        let depth = stack.len();
        if depth == size {
            return f(stack, &syn[depth], log[depth]);
        }
        for c in start..=cols.len() - (size - depth) {
            let (lo, hi) = syn.split_at_mut(depth + 1);
            for ((d, s), x) in hi[0].iter_mut().zip(&lo[depth]).zip(&cols.syndrome[c]) {
                *d = s ^ x;
            }
            log[depth + 1] = log[depth] ^ cols.logical[c];
            stack.push(c as u32);
            let go_on = rec(cols, size, c + 1, stack, syn, log, f);
            stack.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    if size > cols.len() {
        return true;
    }
    rec(cols, size, 0, &mut stack, &mut syn, &mut log, f)
}

fn subset_vector(n: usize, a: &[u32], b: &[u32]) -> BitVector {
    let mut v = BitVector::zeros(n);
    for &i in a.iter().chain(b) {
        v.flip(i as usize);
    }
    v
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}

/// Exhaustive search for the lowest-weight solution of weight at most
/// `limit`. Returns `Ok(None)` when none exists up to `limit`, and also
/// reports the largest weight that was fully ruled out.
fn exhaustive(
    h: &BitMatrix,
    l: &BitMatrix,
    limit: usize,
    table_cap: usize,
) -> Result<(Option<BitVector>, usize)> {
    let cols = Columns::new(h, l)?;
    let n = cols.len();
    let mut cleared = 0;
    let mut table: HashMap<Vec<u64>, Slot> = HashMap::new();
    let mut table_size = 0;
    for w in 1..=limit.min(n) {
        let a = w.div_ceil(2);
        let b = w - a;
        if a != table_size {
            if binomial(n, a) > table_cap {
                break;
            }
            table.clear();
            for_each_subset(&cols, a, &mut |s, syn, log| {
                let slot = table.entry(syn.to_vec()).or_default();
                if slot.len() < 2 && slot.iter().all(|(l0, _)| *l0 != log) {
                    slot.push((log, s.to_vec()));
                }
                true
            });
            table_size = a;
        }
        let mut hit = None;
        if b == 0 {
            let zero = vec![0u64; cols.syndrome.first().map_or(0, Vec::len)];
            if let Some(slot) = table.get(&zero) {
                if let Some((_, s)) = slot.iter().find(|(log, _)| *log != 0) {
                    hit = Some(subset_vector(n, s, &[]));
                }
            }
        } else {
            for_each_subset(&cols, b, &mut |s, syn, log| {
                if let Some(slot) = table.get(syn) {
                    if let Some((_, t)) = slot.iter().find(|(l0, _)| *l0 != log) {
                        hit = Some(subset_vector(n, t, s));
                        return false;
                    }
                }
                true
            });
        }
        if let Some(v) = hit {
            return Ok((Some(v), cleared));
        }
        cleared = w;
    }
    Ok((None, cleared))
}

/// Best vector of one information-set round: shuffle the columns, bring
/// the kernel generator to systematic form and inspect rows and row pairs.
fn isd_round(kernel: &BitMatrix, l: &BitMatrix, seed: u64, round: u64) -> Option<BitVector> {
    let n = kernel.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let reduced = kernel.select_columns(&perm).rref().reduced;
    let rows: Vec<BitVector> = reduced.iter_rows().filter(|r| !r.is_zero()).cloned().collect();
    let lp = l.select_columns(&perm);
    let logical: Vec<BitVector> = rows.iter().map(|r| lp.mul_vec(r)).collect();
    let mut best: Option<(usize, usize, usize)> = None;
    let mut consider = |w: usize, i: usize, j: usize| {
        if best.is_none_or(|(bw, _, _)| w < bw) {
            best = Some((w, i, j));
        }
    };
    for (i, r) in rows.iter().enumerate() {
        if !logical[i].is_zero() {
            consider(r.weight(), i, i);
        }
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if logical[i] != logical[j] {
                let w = rows[i]
                    .words()
                    .iter()
                    .zip(rows[j].words())
                    .map(|(a, b)| (a ^ b).count_ones() as usize)
                    .sum();
                consider(w, i, j);
            }
        }
    }
    let (_, i, j) = best?;
    let v = if i == j {
        rows[i].clone()
    } else {
        rows[i].xor(&rows[j])
    };
    let mut out = BitVector::zeros(n);
    for p in v.iter_ones() {
        out.set(perm[p], true);
    }
    Some(out)
}

fn better(a: &BitVector, b: &BitVector) -> bool {
    (a.weight(), a.support()) < (b.weight(), b.support())
}

const CHUNK: usize = 64;

/// Runs `budget` randomized rounds and keeps the lightest vector, ties
/// broken by support order. Stops after a chunk once `floor` is reached.
fn randomized(
    h: &BitMatrix,
    l: &BitMatrix,
    budget: usize,
    seed: u64,
    floor: usize,
) -> (Option<BitVector>, usize) {
    let kernel = h.kernel_basis();
    let mut best: Option<BitVector> = None;
    let mut trials = 0;
    while trials < budget {
        let end = (trials + CHUNK).min(budget);
        let found = run_rounds(&kernel, l, seed, trials..end);
        trials = end;
        for v in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| better(&v, b)) {
                best = Some(v);
            }
        }
        if best.as_ref().is_some_and(|b| b.weight() <= floor) {
            break;
        }
    }
    (best, trials)
}

#[cfg(feature = "parallel")]
fn run_rounds(
    kernel: &BitMatrix,
    l: &BitMatrix,
    seed: u64,
    rounds: std::ops::Range<usize>,
) -> Vec<Option<BitVector>> {
    use rayon::prelude::*;
    rounds
        .into_par_iter()
        .map(|r| isd_round(kernel, l, seed, r as u64))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_rounds(
    kernel: &BitMatrix,
    l: &BitMatrix,
    seed: u64,
    rounds: std::ops::Range<usize>,
) -> Vec<Option<BitVector>> {
    rounds
        .map(|r| isd_round(kernel, l, seed, r as u64))
        .collect()
}

/// `true` iff some `e` with `h e = 0` has `l e != 0`, i.e. some row of `l`
/// lies outside the row space of `h`.
pub fn has_solution(h: &BitMatrix, l: &BitMatrix) -> bool {
    let span = RowEchelon::from_matrix(h);
    l.iter_rows().any(|r| !span.contains(r))
}

/// Lowest-weight `e` with `h e^T = 0` and `l e^T != 0`.
///
/// Weights up to `cfg.exact_limit` are enumerated exactly; past that the
/// randomized rounds give an upper bound. `Ok(None)` means no such vector
/// exists at all.
pub fn min_weight(h: &BitMatrix, l: &BitMatrix, cfg: &SearchConfig) -> Result<Option<Codeword>> {
    if h.cols() != l.cols() {
        return Err(Error::Dimension {
            expected: h.cols(),
            found: l.cols(),
        });
    }
    if !has_solution(h, l) {
        return Ok(None);
    }
    let (hit, cleared) = exhaustive(h, l, cfg.exact_limit, cfg.table_cap)?;
    if let Some(v) = hit {
        return Ok(Some(Codeword {
            weight: v.weight(),
            vector: v,
            exact: true,
            trials: 0,
        }));
    }
    let (best, trials) = randomized(h, l, cfg.budget.max(1), cfg.seed, cleared + 1);
    let v = match best {
        Some(v) => v,
        // A solution exists, so fall back to an explicit one.
        None => fallback_solution(h, l),
    };
    Ok(Some(Codeword {
        weight: v.weight(),
        exact: v.weight() <= cleared + 1,
        vector: v,
        trials,
    }))
}

/// Lowest-weight solution below `below`, found exhaustively. `Ok(None)`
/// certifies that every solution has weight at least `below`, provided
/// the table cap was not hit (checked through the second value).
pub fn exact_below(
    h: &BitMatrix,
    l: &BitMatrix,
    below: usize,
    table_cap: usize,
) -> Result<(Option<BitVector>, bool)> {
    if below == 0 {
        return Ok((None, true));
    }
    let (hit, cleared) = exhaustive(h, l, below - 1, table_cap)?;
    let complete = hit.is_some() || cleared + 1 >= below;
    Ok((hit, complete))
}

fn fallback_solution(h: &BitMatrix, l: &BitMatrix) -> BitVector {
    let kernel = h.kernel_basis();
    kernel
        .iter_rows()
        .find(|k| !l.mul_vec(k).is_zero())
        .cloned()
        .expect("a solution exists")
}

/// A lowest-weight member of the coset `v + rowspace(stabilizers)` found
/// by the same search, or `v` itself when nothing lighter turns up.
pub fn shortest_in_coset(v: &BitVector, stabilizers: &BitMatrix, cfg: &SearchConfig) -> Result<BitVector> {
    let mut span = stabilizers.clone();
    span.push_row(v.clone());
    let h = span.kernel_basis();
    let Some(l) = stabilizers.kernel_basis().iter_rows().find(|k| k.dot(v)).cloned() else {
        return Ok(v.clone());
    };
    let l = BitMatrix::from_rows(v.len(), vec![l]);
    Ok(match min_weight(&h, &l, cfg)? {
        Some(c) if c.weight < v.weight() => c.vector,
        _ => v.clone(),
    })
}

/// Distance of a CSS code, minimized over X-type and Z-type logicals.
pub fn css_distance(code: &CssCode, cfg: &SearchConfig) -> Result<DistanceReport> {
    let basis = code.canonical_logicals()?;
    let x = min_weight(&code.h_z, &basis.j_z, cfg)?.ok_or(Error::NoLogicals)?;
    let z = min_weight(&code.h_x, &basis.j_x, cfg)?.ok_or(Error::NoLogicals)?;
    Ok(combine(x, z, cfg.seed))
}

fn combine(x: Codeword, z: Codeword, seed: u64) -> DistanceReport {
    let trials = x.trials + z.trials;
    let (value, side) = match x.weight.cmp(&z.weight) {
        std::cmp::Ordering::Less => (x.weight, ErrorSide::X),
        std::cmp::Ordering::Greater => (z.weight, ErrorSide::Z),
        std::cmp::Ordering::Equal => (x.weight, ErrorSide::Min),
    };
    // The minimum is certified once the side attaining it is exact and
    // the other side is exact or already larger.
    let exact = match side {
        ErrorSide::X => x.exact,
        ErrorSide::Z => z.exact,
        ErrorSide::Min => x.exact || z.exact,
    };
    DistanceReport {
        value,
        exact,
        side,
        x: Some(x.into()),
        z: Some(z.into()),
        trials,
        seed,
    }
}

/// Dressed distance of a deformed code used as a subsystem code.
///
/// X side: errors undetected by `h_z` that flip one of the stored Z
/// logicals `storages`. Z side: errors undetected by `h_x` that flip one
/// of the preserved X logicals `preserved`.
pub fn dressed_distance(
    h_x: &BitMatrix,
    h_z: &BitMatrix,
    storages: &BitMatrix,
    preserved: &BitMatrix,
    cfg: &SearchConfig,
) -> Result<DistanceReport> {
    let x = min_weight(h_z, storages, cfg)?;
    let z = min_weight(h_x, preserved, cfg)?;
    match (x, z) {
        (Some(x), Some(z)) => Ok(combine(x, z, cfg.seed)),
        (Some(x), None) => Ok(one_side(x, ErrorSide::X, cfg.seed)),
        (None, Some(z)) => Ok(one_side(z, ErrorSide::Z, cfg.seed)),
        (None, None) => Err(Error::InvalidStorage(
            "no preserved logical is protected by the deformed code".into(),
        )),
    }
}

fn one_side(c: Codeword, side: ErrorSide, seed: u64) -> DistanceReport {
    let trials = c.trials;
    let report: SideReport = c.into();
    DistanceReport {
        value: report.value,
        exact: report.exact,
        side,
        x: (side == ErrorSide::X).then(|| report.clone()),
        z: (side == ErrorSide::Z).then_some(report),
        trials,
        seed,
    }
}

/// Brute-force minimum over all `2^n` vectors, for at most
/// [`ORACLE_MAX_COLS`] columns. `Ok(None)` when no solution exists.
pub fn oracle_min_weight(h: &BitMatrix, l: &BitMatrix) -> Result<Option<usize>> {
    let n = h.cols();
    if n > ORACLE_MAX_COLS {
        return Err(Error::TooLarge {
            cols: n,
            cap: ORACLE_MAX_COLS,
        });
    }
    if h.rows() > 128 || l.rows() > 128 {
        return Err(Error::TooLarge {
            cols: h.rows().max(l.rows()),
            cap: 128,
        });
    }
    let pack = |m: &BitMatrix, c: usize| -> u128 {
        (0..m.rows()).fold(0u128, |acc, r| acc | ((m.get(r, c) as u128) << r))
    };
    let hc: Vec<u128> = (0..n).map(|c| pack(h, c)).collect();
    let lc: Vec<u128> = (0..n).map(|c| pack(l, c)).collect();
    let mut best: Option<usize> = None;
    // Gray-code walk so each step toggles a single column.
    let (mut s, mut t) = (0u128, 0u128);
    for i in 1u64..(1u64 << n) {
        let c = i.trailing_zeros() as usize;
        s ^= hc[c];
        t ^= lc[c];
        if s == 0 && t != 0 {
            let gray = i ^ (i >> 1);
            let w = gray.count_ones() as usize;
            if best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}

/// Exhaustive distance of a small CSS code on one side, or both.
pub fn oracle_distance(code: &CssCode, side: ErrorSide) -> Result<usize> {
    let basis = code.canonical_logicals()?;
    let x = || oracle_min_weight(&code.h_z, &basis.j_z);
    let z = || oracle_min_weight(&code.h_x, &basis.j_x);
    let value = match side {
        ErrorSide::X => x()?,
        ErrorSide::Z => z()?,
        ErrorSide::Min => match (x()?, z()?) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
    };
    value.ok_or(Error::NoLogicals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::fixtures::*;

    fn cfg(seed: u64) -> SearchConfig {
        SearchConfig {
            exact_limit: 0,
            budget: 200,
            seed,
            table_cap: 1 << 20,
        }
    }

    #[test]
    fn oracle_on_fixtures() {
        assert_eq!(oracle_distance(&steane(), ErrorSide::Min).unwrap(), 3);
        assert_eq!(oracle_distance(&surface_d2(), ErrorSide::Min).unwrap(), 2);
        assert_eq!(oracle_distance(&surface_d3(), ErrorSide::Min).unwrap(), 3);
        assert_eq!(oracle_distance(&repetition(5), ErrorSide::Z).unwrap(), 5);
        assert_eq!(oracle_distance(&repetition(5), ErrorSide::X).unwrap(), 1);
    }

    #[test]
    fn oracle_rejects_large_and_trivial() {
        let big = repetition(30);
        assert!(matches!(
            oracle_distance(&big, ErrorSide::Z),
            Err(Error::TooLarge { .. })
        ));
        let full = CssCode::new(BitMatrix::parse(&["10"]), BitMatrix::parse(&["01"])).unwrap();
        assert!(matches!(
            oracle_distance(&full, ErrorSide::Min),
            Err(Error::NoLogicals)
        ));
    }

    #[test]
    fn exact_search_matches_oracle() {
        for code in [steane(), surface_d2(), surface_d3(), repetition(6)] {
            let exact = SearchConfig {
                exact_limit: 8,
                ..cfg(0)
            };
            let r = css_distance(&code, &exact).unwrap();
            assert!(r.exact);
            assert_eq!(r.value, oracle_distance(&code, ErrorSide::Min).unwrap());
            for side in [r.x.as_ref().unwrap(), r.z.as_ref().unwrap()] {
                assert_eq!(side.witness.weight(), side.value);
            }
        }
    }

    #[test]
    fn randomized_search_matches_oracle() {
        for seed in 0..5 {
            for code in [steane(), surface_d2(), surface_d3()] {
                let r = css_distance(&code, &cfg(seed)).unwrap();
                assert_eq!(r.value, oracle_distance(&code, ErrorSide::Min).unwrap());
            }
        }
    }

    #[test]
    fn repetition_z_side_is_n() {
        let code = repetition(7);
        let basis = code.canonical_logicals().unwrap();
        let z = min_weight(&code.h_x, &basis.j_x, &cfg(3)).unwrap().unwrap();
        assert_eq!(z.weight, 7);
        let exact = min_weight(&code.h_x, &basis.j_x, &SearchConfig::default()).unwrap().unwrap();
        assert_eq!(exact.weight, 7);
    }

    #[test]
    fn constrained_on_steane() {
        // Oracle: all 2^7 vectors in ker(h_z) anticommuting with the Z logical.
        let code = steane();
        let basis = code.canonical_logicals().unwrap();
        let u = basis.j_z.row(0).clone();
        let oracle = (1u32..128)
            .map(|m| BitVector::from_bits((0..7).map(|i| (m >> i) & 1 == 1)))
            .filter(|e| code.h_z.mul_vec(e).is_zero() && e.dot(&u))
            .map(|e| e.weight())
            .min()
            .unwrap();
        let l = BitMatrix::from_rows(7, vec![u]);
        let e = min_weight(&code.h_z, &l, &SearchConfig::default()).unwrap().unwrap();
        assert_eq!(e.weight, oracle);
        assert!(e.exact);
        // u inside the row space of the checks: nothing anticommutes.
        let l = BitMatrix::from_rows(7, vec![code.h_x.row(0).clone()]);
        assert!(min_weight(&code.h_z, &l, &SearchConfig::default()).unwrap().is_none());
    }

    #[test]
    fn exact_below_certifies() {
        let code = surface_d3();
        let basis = code.canonical_logicals().unwrap();
        let (hit, complete) = exact_below(&code.h_z, &basis.j_z, 3, 1 << 20).unwrap();
        assert!(hit.is_none() && complete);
        let (hit, _) = exact_below(&code.h_z, &basis.j_z, 4, 1 << 20).unwrap();
        assert_eq!(hit.unwrap().weight(), 3);
    }

    #[test]
    fn budget_is_monotone() {
        let code = surface_d3();
        let basis = code.canonical_logicals().unwrap();
        let mut last = usize::MAX;
        for budget in [1, 4, 16, 64] {
            let c = SearchConfig { budget, ..cfg(11) };
            let w = min_weight(&code.h_z, &basis.j_z, &c).unwrap().unwrap().weight;
            assert!(w <= last);
            last = w;
        }
    }
}

//! Boolean OuMv instances: an n x n matrix and a stream of n vector pairs,
//! with ground-truth bits computed eagerly by the brute-force oracle.
//!
//! Vectors and matrices are stored as packed 64-bit words. The public API is
//! 1-based throughout, matching the usual `u_i`, `M_ij`, `v_j` indexing.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Packed boolean vector of fixed length `n`, indexed 1..=n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    n: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(n: usize) -> Self {
        BitVector { n, words: vec![0; words_for(n)] }
    }

    /// Single 1 at position `i` (1-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.set(i, true);
        v
    }

    pub fn ones(n: usize) -> Self {
        let mut v = Self::zeros(n);
        for i in 1..=n {
            v.set(i, true);
        }
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            v.set(k + 1, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "index {i} out of range 1..={}", self.n);
        let k = i - 1;
        self.words[k / WORD] >> (k % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i >= 1 && i <= self.n, "index {i} out of range 1..={}", self.n);
        let k = i - 1;
        if value {
            self.words[k / WORD] |= 1 << (k % WORD);
        } else {
            self.words[k / WORD] &= !(1 << (k % WORD));
        }
    }

    pub fn support(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(move |&i| self.get(i))
    }

    /// `(v 0)`: the same bits padded with `extra` trailing zeros.
    pub fn zero_padded(&self, extra: usize) -> BitVector {
        let mut out = BitVector::zeros(self.n + extra);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        out
    }

    fn to_01_string(&self) -> String {
        (1..=self.n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    fn parse_01(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Parse(format!("invalid bit character `{c}`"))),
            }
        }
        Ok(Self::from_bits(&bits))
    }
}

/// Packed boolean n x n matrix, row-major, indexed `get(i, j)` with 1-based i, j.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        BitMatrix { n, rows: vec![BitVector::zeros(n); n] }
    }

    pub fn ones(n: usize) -> Self {
        BitMatrix { n, rows: vec![BitVector::ones(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 1..=n {
            m.set(i, i, true);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "row {i} out of range 1..={}", self.n);
        self.rows[i - 1].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i >= 1 && i <= self.n, "row {i} out of range 1..={}", self.n);
        self.rows[i - 1].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i - 1]
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = Self::zeros(self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n).flat_map(move |i| self.rows[i - 1].iter_ones().map(move |j| (i, j)))
    }
}

/// `u M v` over booleans: 1 iff some aligned triple `u_i = M_ij = v_j = 1`.
pub fn vmv(u: &BitVector, m: &BitMatrix, v: &BitVector) -> Result<bool> {
    if u.len() != m.n() || v.len() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "vmv: |u|={} |v|={} but matrix is {0}x{0}",
            u.len(),
            v.len(),
        )));
    }
    for i in u.iter_ones() {
        for (rw, vw) in m.rows[i - 1].words.iter().zip(v.words.iter()) {
            if rw & vw != 0 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The block augmentation `u_hat = (u 0)`, `v_hat = (v 0)`,
/// `M_hat = [[M, 1], [1, 1]]` of dimension 2n. Preserves the vmv bit while
/// guaranteeing that at least `3n^2` matrix entries are set.
pub fn augment_instance(
    u: &BitVector,
    m: &BitMatrix,
    v: &BitVector,
) -> Result<(BitVector, BitMatrix, BitVector)> {
    let n = m.n();
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "augment: |u|={} |v|={} but matrix is {n}x{n}",
            u.len(),
            v.len()
        )));
    }
    let mut mh = BitMatrix::ones(2 * n);
    for i in 1..=n {
        for j in 1..=n {
            mh.set(i, j, m.get(i, j));
        }
    }
    Ok((u.zero_padded(n), mh, v.zero_padded(n)))
}

/// How [`generate_instance`] fills matrix and vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Independent fair coin for every bit.
    Uniform,
    /// Every pair is repaired so that its ground-truth bit is 1.
    PlantedOne,
    /// Every pair is repaired so that its ground-truth bit is 0.
    PlantedZero,
    /// Supports of u, v and each matrix row capped at ceil(sqrt(n)).
    Sparse,
}

impl std::str::FromStr for GenMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GenMode::Uniform),
            "planted_one" | "planted-one" => Ok(GenMode::PlantedOne),
            "planted_zero" | "planted-zero" => Ok(GenMode::PlantedZero),
            "sparse" => Ok(GenMode::Sparse),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

/// One OuMv instance: the matrix, the stream of n vector pairs, and the
/// eagerly computed ground-truth bits. The harness never trusts a decoded bit
/// without comparing against `truth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuMvInstance {
    pub matrix: BitMatrix,
    pub pairs: Vec<(BitVector, BitVector)>,
    pub truth: Vec<bool>,
}

impl OuMvInstance {
    pub fn new(matrix: BitMatrix, pairs: Vec<(BitVector, BitVector)>) -> Result<Self> {
        let n = matrix.n();
        for (u, v) in &pairs {
            if u.len() != n || v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "instance pair has |u|={} |v|={}, matrix is {n}x{n}",
                    u.len(),
                    v.len()
                )));
            }
        }
        let truth = pairs
            .iter()
            .map(|(u, v)| vmv(u, &matrix, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(OuMvInstance { matrix, pairs, truth })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Pads matrix and vectors with zero rows/columns up to `target >= n`.
    /// Zero padding never changes any ground-truth bit.
    pub fn zero_padded_to(&self, target: usize) -> Result<OuMvInstance> {
        let n = self.n();
        assert!(target >= n);
        if target == n {
            return Ok(self.clone());
        }
        let mut m = BitMatrix::zeros(target);
        for (i, j) in self.matrix.iter_ones() {
            m.set(i, j, true);
        }
        let pairs = self
            .pairs
            .iter()
            .map(|(u, v)| (u.zero_padded(target - n), v.zero_padded(target - n)))
            .collect();
        OuMvInstance::new(m, pairs)
    }

    /// Text format: line 1 is `n`, then n matrix rows as 0/1 strings, then n
    /// lines `u-bits v-bits`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n());
        for i in 1..=self.n() {
            let _ = writeln!(out, "{}", self.matrix.row(i).to_01_string());
        }
        for (u, v) in &self.pairs {
            let _ = writeln!(out, "{} {}", u.to_01_string(), v.to_01_string());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty instance".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad n: {e}")))?;
        let mut matrix = BitMatrix::zeros(n);
        for i in 1..=n {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing matrix row {i}")))?;
            let row = BitVector::parse_01(row.trim())?;
            if row.len() != n {
                return Err(Error::Parse(format!("matrix row {i} has length {}", row.len())));
            }
            for j in row.iter_ones() {
                matrix.set(i, j, true);
            }
        }
        let mut pairs = Vec::with_capacity(n);
        for k in 1..=n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing vector pair {k}")))?;
            let mut parts = line.split_whitespace();
            let u = BitVector::parse_01(
                parts.next().ok_or_else(|| Error::Parse(format!("pair {k}: missing u")))?,
            )?;
            let v = BitVector::parse_01(
                parts.next().ok_or_else(|| Error::Parse(format!("pair {k}: missing v")))?,
            )?;
            if u.len() != n || v.len() != n {
                return Err(Error::Parse(format!("pair {k}: wrong vector length")));
            }
            pairs.push((u, v));
        }
        OuMvInstance::new(matrix, pairs)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for i in 1..=n {
        v.set(i, rng.gen::<bool>());
    }
    v
}

fn sparse_vector(rng: &mut ChaCha8Rng, n: usize, cap: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    let k = rng.gen_range(0..=cap);
    for _ in 0..k {
        v.set(rng.gen_range(1..=n), true);
    }
    v
}

/// Deterministic instance generator. `planted_one` guarantees every pair has
/// vmv = 1; `planted_zero` guarantees vmv = 0 for every pair; `sparse` caps
/// support sizes at ceil(sqrt(n)).
pub fn generate_instance(n: usize, mode: GenMode, seed: u64) -> Result<OuMvInstance> {
    if n < 1 {
        return Err(Error::InvalidParam("instance dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = (n as f64).sqrt().ceil() as usize;
    let mut matrix = match mode {
        GenMode::Sparse => {
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for _ in 0..cap {
                    m.set(i, rng.gen_range(1..=n), true);
                }
            }
            m
        }
        _ => {
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, rng.gen::<bool>());
                }
            }
            m
        }
    };
    if mode == GenMode::PlantedZero {
        // A planted-zero stream must hold for one shared matrix, so thin the
        // matrix first and then restrict v to columns that are zero on supp(u).
        for i in 1..=n {
            for j in 1..=n {
                if matrix.get(i, j) && rng.gen_range(0..4) != 0 {
                    matrix.set(i, j, false);
                }
            }
        }
    }
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let (u, v) = match mode {
            GenMode::Uniform => (random_vector(&mut rng, n), random_vector(&mut rng, n)),
            GenMode::Sparse => (sparse_vector(&mut rng, n, cap), sparse_vector(&mut rng, n, cap)),
            GenMode::PlantedOne => {
                let mut u = random_vector(&mut rng, n);
                let mut v = random_vector(&mut rng, n);
                let i = rng.gen_range(1..=n);
                let j = rng.gen_range(1..=n);
                u.set(i, true);
                v.set(j, true);
                matrix.set(i, j, true);
                (u, v)
            }
            GenMode::PlantedZero => {
                let u = random_vector(&mut rng, n);
                let mut v = random_vector(&mut rng, n);
                for j in 1..=n {
                    if v.get(j) && u.iter_ones().any(|i| matrix.get(i, j)) {
                        v.set(j, false);
                    }
                }
                (u, v)
            }
        };
        pairs.push((u, v));
    }
    OuMvInstance::new(matrix, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle with reversed loop nesting: iterates (j, i) and
    /// reads the transposed matrix.
    fn vmv_oracle_transposed(u: &BitVector, m: &BitMatrix, v: &BitVector) -> bool {
        let n = m.n();
        for j in 1..=n {
            for i in 1..=n {
                if v.get(j) && m.get(i, j) && u.get(i) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn vmv_zero_vector_annihilates() {
        let m = BitMatrix::ones(2);
        let u = BitVector::zeros(2);
        let v = BitVector::ones(2);
        assert!(!vmv(&u, &m, &v).unwrap());
    }

    #[test]
    fn vmv_single_aligned_triple() {
        let m = BitMatrix::identity(2);
        let e1 = BitVector::unit(2, 1);
        assert!(vmv(&e1, &m, &e1).unwrap());
    }

    #[test]
    fn vmv_dimension_mismatch() {
        let m = BitMatrix::ones(3);
        let u = BitVector::ones(2);
        assert!(vmv(&u, &m, &u).is_err());
    }

    #[test]
    fn vmv_matches_reversed_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = 6;
            let u = random_vector(&mut rng, n);
            let v = random_vector(&mut rng, n);
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, rng.gen::<bool>());
                }
            }
            assert_eq!(vmv(&u, &m, &v).unwrap(), vmv_oracle_transposed(&u, &m, &v));
        }
    }

    #[test]
    fn vmv_monotone_under_bit_raises() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = 5;
            let mut u = random_vector(&mut rng, n);
            let v = random_vector(&mut rng, n);
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, rng.gen_ratio(1, 3));
                }
            }
            let before = vmv(&u, &m, &v).unwrap();
            u.set(rng.gen_range(1..=n), true);
            m.set(rng.gen_range(1..=n), rng.gen_range(1..=n), true);
            let after = vmv(&u, &m, &v).unwrap();
            assert!(!before || after, "raising bits must not clear the product");
        }
    }

    #[test]
    fn vmv_transpose_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let n = 6;
            let u = random_vector(&mut rng, n);
            let v = random_vector(&mut rng, n);
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, rng.gen::<bool>());
                }
            }
            assert_eq!(
                vmv(&u, &m, &v).unwrap(),
                vmv(&v, &m.transpose(), &u).unwrap()
            );
        }
    }

    #[test]
    fn augment_n1_blocks() {
        let u = BitVector::from_bits(&[true]);
        let v = BitVector::from_bits(&[true]);
        let mut m = BitMatrix::zeros(1);
        m.set(1, 1, false);
        let (uh, mh, vh) = augment_instance(&u, &m, &v).unwrap();
        assert_eq!(uh, BitVector::from_bits(&[true, false]));
        assert_eq!(vh, BitVector::from_bits(&[true, false]));
        assert!(!mh.get(1, 1));
        assert!(mh.get(1, 2) && mh.get(2, 1) && mh.get(2, 2));
    }

    #[test]
    fn augment_preserves_vmv_exhaustively_n2() {
        // All 2^4 matrices x 2^2 u x 2^2 v.
        for mbits in 0..16u32 {
            let mut m = BitMatrix::zeros(2);
            for k in 0..4 {
                if mbits >> k & 1 == 1 {
                    m.set(k / 2 + 1, k % 2 + 1, true);
                }
            }
            for ub in 0..4u32 {
                for vb in 0..4u32 {
                    let u = BitVector::from_bits(&[ub & 1 == 1, ub >> 1 & 1 == 1]);
                    let v = BitVector::from_bits(&[vb & 1 == 1, vb >> 1 & 1 == 1]);
                    let (uh, mh, vh) = augment_instance(&u, &m, &v).unwrap();
                    assert_eq!(vmv(&u, &m, &v).unwrap(), vmv(&uh, &mh, &vh).unwrap());
                }
            }
        }
    }

    #[test]
    fn augment_preserves_vmv_randomly_n16() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = 16;
            let u = random_vector(&mut rng, n);
            let v = random_vector(&mut rng, n);
            let mut m = BitMatrix::zeros(n);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, rng.gen_ratio(1, 4));
                }
            }
            let (uh, mh, vh) = augment_instance(&u, &m, &v).unwrap();
            assert_eq!(vmv(&u, &m, &v).unwrap(), vmv(&uh, &mh, &vh).unwrap());
        }
    }

    #[test]
    fn generator_planted_modes() {
        let zero = generate_instance(4, GenMode::PlantedZero, 7).unwrap();
        assert!(zero.truth.iter().all(|&b| !b));
        let one = generate_instance(4, GenMode::PlantedOne, 7).unwrap();
        assert!(one.truth.iter().all(|&b| b));
    }

    #[test]
    fn generator_deterministic() {
        let a = generate_instance(8, GenMode::Uniform, 1).unwrap();
        let b = generate_instance(8, GenMode::Uniform, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_sparse_caps_support() {
        let inst = generate_instance(9, GenMode::Sparse, 3).unwrap();
        for (u, v) in &inst.pairs {
            assert!(u.support() <= 3);
            assert!(v.support() <= 3);
        }
    }

    #[test]
    fn text_roundtrip() {
        let inst = generate_instance(5, GenMode::Uniform, 42).unwrap();
        let text = inst.to_text();
        let back = OuMvInstance::from_text(&text).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn padding_preserves_truth() {
        let inst = generate_instance(3, GenMode::Uniform, 9).unwrap();
        let padded = inst.zero_padded_to(4).unwrap();
        assert_eq!(inst.truth, padded.truth);
    }
}

//! Permutations of treatment labels and the induced permutations of the
//! `(u, v)` carry-over index set.

use nalgebra::DMatrix;

/// A permutation of `{1, …, t}` stored zero-based: `images[i] = σ(i+1) - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(t: usize) -> Self {
        Self { images: (0..t).collect() }
    }

    /// Builds a permutation from one-based images; returns `None` unless
    /// `images` is a bijection onto `1..=len`.
    pub fn from_images(images: &[usize]) -> Option<Self> {
        let t = images.len();
        let mut seen = vec![false; t];
        let mut zero_based = Vec::with_capacity(t);
        for &im in images {
            if im == 0 || im > t || seen[im - 1] {
                return None;
            }
            seen[im - 1] = true;
            zero_based.push(im - 1);
        }
        Some(Self { images: zero_based })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the one-based label `u`. Label 0 (the fictitious pre-period
    /// treatment) is fixed.
    #[inline]
    pub fn apply(&self, u: usize) -> usize {
        if u == 0 {
            0
        } else {
            self.images[u - 1] + 1
        }
    }

    /// One-based images `σ(1), …, σ(t)`.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    /// All `t!` permutations in lexicographic order of their image vectors.
    pub fn all(t: usize) -> AllPermutations {
        AllPermutations { next: Some((0..t).collect()) }
    }

    /// `P_σ` with `P_σ(u, v) = 1` iff `σ(u) = v`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let t = self.images.len();
        let mut p = DMatrix::zeros(t, t);
        for (u, &v) in self.images.iter().enumerate() {
            p[(u, v)] = 1.0;
        }
        p
    }

    /// `P_σ̃ = P_σ ⊗ P_σ*` on the `t(t+1)` pairs `(u, v)`, `v ∈ 0..=t`,
    /// in the lexicographic index order used throughout the crate.
    pub fn pair_matrix(&self) -> DMatrix<f64> {
        let t = self.images.len();
        let dim = t * (t + 1);
        let mut p = DMatrix::zeros(dim, dim);
        for u in 1..=t {
            for v in 0..=t {
                p[(pair_index(t, u, v), pair_index(t, self.apply(u), self.apply(v)))] = 1.0;
            }
        }
        p
    }
}

/// Lexicographic position of the pair `(u, v)` with `u ∈ 1..=t`, `v ∈ 0..=t`.
#[inline]
pub fn pair_index(t: usize, u: usize, v: usize) -> usize {
    (u - 1) * (t + 1) + v
}

/// Iterator over all permutations of a fixed degree.
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // standard next-permutation step
        let n = succ.len();
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && succ[i - 1] >= succ[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while succ[j] <= succ[i - 1] {
                    j -= 1;
                }
                succ.swap(i - 1, j);
                succ[i..].reverse();
                self.next = Some(succ);
            }
        }
        Some(Permutation { images: current })
    }
}

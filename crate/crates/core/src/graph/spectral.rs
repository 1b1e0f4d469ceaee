//! Normalized Laplacian and its dense eigendecomposition.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use faer::{Mat, Side};
use sha2::{Digest, Sha256};

use super::Graph;
use crate::{Error, Result};

/// `I - D^{-1/2} A D^{-1/2}`. Isolated nodes get a unit diagonal entry and
/// zero off-diagonals (their `D^{-1/2}` entry is taken as 0).
pub fn normalized_laplacian(g: &Graph) -> Mat<f64> {
    let n = g.num_nodes();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut l = Mat::<f64>::identity(n, n);
    for u in 0..n {
        for &v in g.neighbors(u) {
            l[(u, v)] = -inv_sqrt[u] * inv_sqrt[v];
        }
    }
    l
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending. Column `p` of
/// `eigenvectors` is the unit eigenvector for `eigenvalues[p]`, with its
/// first non-negligible entry made positive.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl SpectralBasis {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, p: usize) -> Vec<f64> {
        (0..self.dimension()).map(|i| self.eigenvectors[(i, p)]).collect()
    }

    /// Graph Fourier coefficients `U^T f`.
    pub fn transform(&self, signal: &[f64]) -> Result<Vec<f64>> {
        let n = self.dimension();
        if signal.len() != n {
            return Err(Error::SizeMismatch(signal.len(), n));
        }
        Ok((0..n)
            .map(|p| (0..n).map(|i| self.eigenvectors[(i, p)] * signal[i]).sum())
            .collect())
    }

    fn to_bytes(&self) -> Vec<u8> {
        let n = self.dimension();
        let mut out = Vec::with_capacity(16 + 8 * n * (n + 1));
        out.extend_from_slice(b"GCSB0001");
        out.extend_from_slice(&(n as u64).to_le_bytes());
        for &x in &self.eigenvalues {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for p in 0..n {
            for i in 0..n {
                out.extend_from_slice(&self.eigenvectors[(i, p)].to_le_bytes());
            }
        }
        out
    }

    fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.len() < 16 || &bytes[..8] != b"GCSB0001" {
            return None;
        }
        let n = u64::from_le_bytes(bytes[8..16].try_into().ok()?) as usize;
        if bytes.len() != 16 + 8 * n * (n + 1) {
            return None;
        }
        let word = |k: usize| f64::from_le_bytes(bytes[16 + 8 * k..24 + 8 * k].try_into().unwrap());
        let eigenvalues = (0..n).map(word).collect();
        let eigenvectors = Mat::from_fn(n, n, |i, p| word(n + p * n + i));
        Some(Self {
            eigenvalues,
            eigenvectors,
        })
    }
}

pub fn eigendecompose(l: &Mat<f64>) -> Result<SpectralBasis> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::InvalidParameters(format!("matrix is {}x{}", n, l.ncols())));
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((l[(i, j)] - l[(j, i)]).abs());
        }
    }
    if asym > 1e-10 {
        return Err(Error::NonSymmetric(asym));
    }
    if n == 0 {
        return Ok(SpectralBasis {
            eigenvalues: Vec::new(),
            eigenvectors: Mat::zeros(0, 0),
        });
    }
    let evd = l
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Convergence {
            algorithm: "symmetric eigensolver",
            iterations: 0,
        })?;
    let eigenvalues: Vec<f64> = (0..n).map(|p| evd.S().column_vector()[p]).collect();
    let mut eigenvectors = evd.U().to_owned();
    for p in 0..n {
        let lead = (0..n).map(|i| eigenvectors[(i, p)]).find(|x| x.abs() > 1e-10);
        if matches!(lead, Some(x) if x < 0.0) {
            for i in 0..n {
                eigenvectors[(i, p)] = -eigenvectors[(i, p)];
            }
        }
    }
    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
    })
}

/// Directory of spectral bases keyed by a content hash of the edge set.
#[derive(Clone, Debug)]
pub struct BasisCache {
    dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn key(g: &Graph) -> String {
        let mut hasher = Sha256::new();
        hasher.update((g.num_nodes() as u64).to_le_bytes());
        for (u, v) in g.edges() {
            hasher.update((u as u64).to_le_bytes());
            hasher.update((v as u64).to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.basis"))
    }

    pub fn load(&self, g: &Graph) -> Option<SpectralBasis> {
        let mut bytes = Vec::new();
        fs::File::open(self.path(&Self::key(g)))
            .ok()?
            .read_to_end(&mut bytes)
            .ok()?;
        SpectralBasis::from_bytes(&bytes).filter(|b| b.dimension() == g.num_nodes())
    }

    pub fn store(&self, g: &Graph, basis: &SpectralBasis) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path(&Self::key(g));
        let tmp = target.with_extension("basis.tmp");
        fs::File::create(&tmp)?.write_all(&basis.to_bytes())?;
        fs::rename(tmp, target)?;
        Ok(())
    }

    pub fn get_or_compute(&self, g: &Graph) -> Result<SpectralBasis> {
        if let Some(b) = self.load(g) {
            return Ok(b);
        }
        let basis = eigendecompose(&normalized_laplacian(g))?;
        self.store(g, &basis)?;
        Ok(basis)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn max_reconstruction_error(l: &Mat<f64>, b: &SpectralBasis) -> f64 {
        let n = b.dimension();
        let u = b.eigenvectors();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|p| u[(i, p)] * b.eigenvalues()[p] * u[(j, p)]).sum();
                worst = worst.max((r - l[(i, j)]).abs());
            }
        }
        worst
    }

    #[test]
    fn k2_laplacian() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let l = normalized_laplacian(&g);
        assert_eq!(l[(0, 0)], 1.0);
        assert_eq!(l[(0, 1)], -1.0);
        let b = eigendecompose(&l).unwrap();
        assert!(b.eigenvalues()[0].abs() < 1e-12);
        assert!((b.eigenvalues()[1] - 2.0).abs() < 1e-12);
        let u1 = b.eigenvector(0);
        assert!((u1[0] - u1[1]).abs() < 1e-12 && u1[0] > 0.0);
    }

    #[test]
    fn isolated_node_is_identity_row() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let l = normalized_laplacian(&g);
        assert_eq!(l[(2, 2)], 1.0);
        assert_eq!(l[(2, 0)], 0.0);
        assert_eq!(l[(1, 2)], 0.0);
    }

    #[test]
    fn c4_spectrum() {
        let l = normalized_laplacian(&cycle(4));
        let b = eigendecompose(&l).unwrap();
        for (got, want) in b.eigenvalues().iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert!(max_reconstruction_error(&l, &b) < 1e-10);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let b = eigendecompose(&Mat::<f64>::identity(5, 5)).unwrap();
        assert!(b.eigenvalues().iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_nonsymmetric() {
        let mut m = Mat::<f64>::identity(3, 3);
        m[(0, 1)] = 0.5;
        assert!(matches!(eigendecompose(&m), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn orthonormal_and_reconstructs() {
        let g = crate::graph::generate_ba(60, 2, 4).unwrap();
        let l = normalized_laplacian(&g);
        let b = eigendecompose(&l).unwrap();
        let u = b.eigenvectors();
        for p in 0..60 {
            for q in 0..60 {
                let dot: f64 = (0..60).map(|i| u[(i, p)] * u[(i, q)]).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-6);
            }
        }
        assert!(max_reconstruction_error(&l, &b) < 1e-6);
        assert!(b.eigenvalues()[0].abs() < 1e-8);
        assert!(b.eigenvalues().iter().all(|&x| (-1e-8..=2.0 + 1e-8).contains(&x)));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BasisCache::new(dir.path());
        let g = cycle(7);
        assert!(cache.load(&g).is_none());
        let fresh = cache.get_or_compute(&g).unwrap();
        let again = cache.load(&g).unwrap();
        assert_eq!(fresh.eigenvalues(), again.eigenvalues());
        assert_eq!(BasisCache::key(&g), BasisCache::key(&cycle(7)));
        assert_ne!(BasisCache::key(&g), BasisCache::key(&cycle(8)));
    }
}

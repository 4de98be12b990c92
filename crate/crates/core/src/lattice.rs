//! Strictly local (banded block-Laurent) operators on `l^2(Z, C^n)`.
//!
//! An operator is stored as `sum_y a_ij(y, .) L^y` per block entry, where
//! `(L psi)(x) = psi(x + 1)` and `a_ij(y, .)` acts by multiplication, so that
//! `(A psi)_i(x) = sum_{j,y} a_ij(y, x) psi_j(x + y)`.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profile::{Endpoint, ParameterProfile};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default absolute tolerance for coefficient-level comparisons.
pub const COEFFICIENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    block_size: usize,
    /// Row-major `n x n` table; each entry maps a shift power to its coefficient.
    entries: Vec<BTreeMap<i64, ParameterProfile>>,
}

/// `L^power` on `l^2(Z)`.
pub fn shift(power: i64) -> BandedOperator {
    let mut op = BandedOperator::zero(1);
    op.entries[0].insert(power, ParameterProfile::real(1.0));
    op
}

pub fn compose(a: &BandedOperator, b: &BandedOperator) -> Result<BandedOperator> {
    a.compose(b)
}

pub fn adjoint(a: &BandedOperator) -> BandedOperator {
    a.adjoint()
}

pub fn finite_section(a: &BandedOperator, half_width: i64) -> Result<FiniteSection> {
    a.finite_section(half_width)
}

impl BandedOperator {
    pub fn zero(block_size: usize) -> Self {
        assert!(block_size > 0, "block size must be positive");
        BandedOperator {
            block_size,
            entries: vec![BTreeMap::new(); block_size * block_size],
        }
    }

    pub fn identity(block_size: usize) -> Self {
        let mut op = Self::zero(block_size);
        for i in 0..block_size {
            op.entries[i * block_size + i].insert(0, ParameterProfile::real(1.0));
        }
        op
    }

    /// Multiplication by a scalar profile on `l^2(Z)`.
    pub fn multiplication(profile: ParameterProfile) -> Self {
        let mut op = Self::zero(1);
        op.insert(0, 0, 0, profile);
        op
    }

    /// Block-diagonal multiplication operator `diag(profiles)`.
    pub fn diagonal(profiles: Vec<ParameterProfile>) -> Self {
        let n = profiles.len();
        let mut op = Self::zero(n);
        for (i, profile) in profiles.into_iter().enumerate() {
            op.insert(i, i, 0, profile);
        }
        op
    }

    /// Constant pointwise matrix, the same at every site.
    pub fn constant_matrix(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let mut op = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "constant matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                op.insert(i, j, 0, ParameterProfile::constant(v));
            }
        }
        op
    }

    /// Assembles an `n x n` block operator from scalar (block size 1) entries.
    pub fn from_blocks(blocks: Vec<Vec<BandedOperator>>) -> Result<Self> {
        let n = blocks.len();
        let mut op = Self::zero(n);
        for (i, row) in blocks.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::BlockSizeMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (j, block) in row.into_iter().enumerate() {
                if block.block_size != 1 {
                    return Err(Error::BlockSizeMismatch {
                        left: 1,
                        right: block.block_size,
                    });
                }
                let entry = block.entries.into_iter().next().unwrap_or_default();
                op.entries[i * n + j] = entry;
            }
        }
        Ok(op)
    }

    /// The scalar operator sitting in block entry `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> BandedOperator {
        BandedOperator {
            block_size: 1,
            entries: vec![self.entries[i * self.block_size + j].clone()],
        }
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Largest `|y|` carrying a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| e.keys())
            .map(|y| y.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, i: usize, j: usize, y: i64) -> Option<&ParameterProfile> {
        self.entries[i * self.block_size + j].get(&y)
    }

    pub fn coefficient_at(&self, i: usize, j: usize, y: i64, x: i64) -> Complex64 {
        self.coefficient(i, j, y).map_or(ZERO, |p| p.value(x))
    }

    pub fn coefficients(
        &self,
        i: usize,
        j: usize,
    ) -> impl Iterator<Item = (i64, &ParameterProfile)> {
        self.entries[i * self.block_size + j]
            .iter()
            .map(|(&y, p)| (y, p))
    }

    fn insert(&mut self, i: usize, j: usize, y: i64, profile: ParameterProfile) {
        if profile.is_zero() {
            self.entries[i * self.block_size + j].remove(&y);
        } else {
            self.entries[i * self.block_size + j].insert(y, profile);
        }
    }

    fn accumulate(&mut self, i: usize, j: usize, y: i64, profile: ParameterProfile) {
        let slot = &mut self.entries[i * self.block_size + j];
        let summed = match slot.remove(&y) {
            Some(existing) => &existing + &profile,
            None => profile,
        };
        if !summed.is_zero() {
            slot.insert(y, summed);
        }
    }

    fn check_same_size(&self, other: &BandedOperator) -> Result<()> {
        if self.block_size != other.block_size {
            return Err(Error::BlockSizeMismatch {
                left: self.block_size,
                right: other.block_size,
            });
        }
        Ok(())
    }

    /// Exact product `self * other`: `a(y,.) L^y b(y',.) L^y' = a(y,.) b(y',. + y) L^(y+y')`.
    pub fn compose(&self, other: &BandedOperator) -> Result<BandedOperator> {
        self.check_same_size(other)?;
        let n = self.block_size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                for (&y1, a) in &self.entries[i * n + j] {
                    for k in 0..n {
                        for (&y2, b) in &other.entries[j * n + k] {
                            out.accumulate(i, k, y1 + y2, a * &b.shifted(y1));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Left-to-right product of a chain of operators.
    pub fn product(factors: &[&BandedOperator]) -> Result<BandedOperator> {
        let (first, rest) = factors.split_first().expect("product of an empty chain");
        rest.iter()
            .try_fold((*first).clone(), |acc, f| acc.compose(f))
    }

    /// Coefficient of the adjoint at entry `(i, j)`, offset `y`:
    /// `conj(a_ji(-y, x + y))`.
    pub fn adjoint(&self) -> BandedOperator {
        let n = self.block_size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                for (&y, a) in &self.entries[i * n + j] {
                    out.insert(j, i, -y, a.shifted(-y).conj());
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BandedOperator) -> Result<BandedOperator> {
        self.check_same_size(other)?;
        let mut out = self.clone();
        let n = self.block_size;
        for i in 0..n {
            for j in 0..n {
                for (&y, b) in &other.entries[i * n + j] {
                    out.accumulate(i, j, y, b.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BandedOperator) -> Result<BandedOperator> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> BandedOperator {
        let n = self.block_size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                for (&y, a) in &self.entries[i * n + j] {
                    out.insert(i, j, y, a.scale(c));
                }
            }
        }
        out
    }

    /// `(A + A^*) / 2`.
    pub fn real_part(&self) -> BandedOperator {
        self.add(&self.adjoint())
            .expect("adjoint has the same block size")
            .scale(Complex64::new(0.5, 0.0))
    }

    /// `(A - A^*) / (2i)`.
    pub fn imag_part(&self) -> BandedOperator {
        self.sub(&self.adjoint())
            .expect("adjoint has the same block size")
            .scale(Complex64::new(0.0, -0.5))
    }

    /// Supremum over all entries, offsets and sites of the coefficient
    /// difference. Exact for eventually constant coefficients.
    pub fn max_coefficient_diff(&self, other: &BandedOperator) -> Result<f64> {
        self.check_same_size(other)?;
        let n = self.block_size;
        let zero = ParameterProfile::zero();
        let mut worst = 0.0_f64;
        for idx in 0..n * n {
            let (a, b) = (&self.entries[idx], &other.entries[idx]);
            for y in a.keys().chain(b.keys()) {
                let pa = a.get(y).unwrap_or(&zero);
                let pb = b.get(y).unwrap_or(&zero);
                worst = worst.max(pa.max_abs_diff(pb));
            }
        }
        Ok(worst)
    }

    pub fn approx_eq(&self, other: &BandedOperator, tol: f64) -> bool {
        self.max_coefficient_diff(other).is_ok_and(|d| d <= tol)
    }

    /// The translation-invariant operator obtained by freezing every
    /// coefficient at one endpoint.
    pub fn limit_operator(&self, star: Endpoint) -> BandedOperator {
        let n = self.block_size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                for (&y, a) in &self.entries[i * n + j] {
                    out.insert(i, j, y, ParameterProfile::constant(a.limit(star)));
                }
            }
        }
        out
    }

    /// Symbol `A^(z, star)`: each `L^y` replaced by `z^y`, coefficients frozen at `star`.
    pub fn symbol(&self, star: Endpoint, z: Complex64) -> Array2<Complex64> {
        let n = self.block_size;
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.entries[i * n + j]
                .iter()
                .map(|(&y, a)| a.limit(star) * z.powi(y as i32))
                .sum()
        })
    }

    /// Dense compression to the sites `[-N, N]`, zero padded outside.
    pub fn finite_section(&self, half_width: i64) -> Result<FiniteSection> {
        let k = self.bandwidth() as i64;
        if half_width < k {
            return Err(Error::WindowTooSmall {
                window: half_width,
                required: k,
            });
        }
        let n = self.block_size;
        let sites = (2 * half_width + 1) as usize;
        let mut matrix = Array2::<Complex64>::zeros((n * sites, n * sites));
        for i in 0..n {
            for j in 0..n {
                for (&y, a) in &self.entries[i * n + j] {
                    for x in -half_width..=half_width {
                        let col_site = x + y;
                        if col_site.abs() > half_width {
                            continue;
                        }
                        let r = ((x + half_width) as usize) * n + i;
                        let c = ((col_site + half_width) as usize) * n + j;
                        matrix[[r, c]] += a.value(x);
                    }
                }
            }
        }
        Ok(FiniteSection {
            half_width,
            block_size: n,
            source_bandwidth: k as usize,
            matrix,
        })
    }
}

/// Dense compression of a banded operator to a finite window.
///
/// Rows and columns are ordered site-major: index `(x + N) * n + i`.
#[derive(Clone, Debug)]
pub struct FiniteSection {
    pub half_width: i64,
    pub block_size: usize,
    pub source_bandwidth: usize,
    pub matrix: Array2<Complex64>,
}

impl FiniteSection {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, site: i64, component: usize) -> usize {
        ((site + self.half_width) as usize) * self.block_size + component
    }

    pub fn site_of(&self, index: usize) -> i64 {
        (index / self.block_size) as i64 - self.half_width
    }

    /// Number of sites between a row's site and the nearest window edge.
    pub fn edge_distance(&self, index: usize) -> i64 {
        self.half_width - self.site_of(index).abs()
    }

    /// Rows whose site lies within the source bandwidth of the window edge;
    /// their entries differ from the infinite operator's.
    pub fn is_boundary_affected(&self, index: usize) -> bool {
        self.edge_distance(index) < self.source_bandwidth as i64
    }

    /// Row indices at distance at least `margin` sites from both window edges.
    pub fn interior_rows(&self, margin: i64) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&r| self.edge_distance(r) >= margin)
    }

    /// Max entrywise difference over rows at distance `>= margin` from the
    /// edge (all columns).
    pub fn interior_max_diff(
        a: &Array2<Complex64>,
        b: &Array2<Complex64>,
        section: &FiniteSection,
        margin: i64,
    ) -> f64 {
        section
            .interior_rows(margin)
            .flat_map(|r| (0..a.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| (a[[r, c]] - b[[r, c]]).norm())
            .fold(0.0, f64::max)
    }
}

/// Conjugate transpose of a dense matrix.
pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|v| v.conj())
}

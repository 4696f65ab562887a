use crate::error::{Error, Result};
use crate::problems::{FiniteSum, Problem, ProblemConstants, Region};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Seeded least-squares finite sum
///
/// ```text
/// f(x) = (1/n) sum_i f_i(x),   f_i(x) = 0.5 * ||A_i x - b_i||^2
/// ```
///
/// with `A_i` (`rows x d`) and `b_i` drawn uniformly from `[-1, 1]`. The
/// stochastic gradient averages `batch` distinct components sampled
/// uniformly without replacement, so it is unbiased and `batch = n`
/// reproduces the full gradient exactly.
///
/// The declared region is the box `x* +- 1`; `H` bounds every component
/// gradient there, `L` is the Frobenius norm of the averaged Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFiniteSum<T> {
    n: usize,
    dim: usize,
    rows: usize,
    batch: usize,
    /// Row-major `A_i`, concatenated.
    a: Vec<T>,
    b: Vec<T>,
    minimizer: Vector<T>,
    f_star: T,
    h: T,
    l: T,
}

impl<T: Scalar> SyntheticFiniteSum<T> {
    /// Single-sample oracle with two rows per component.
    pub fn new(n: usize, dim: usize, seed: u64) -> Result<Self> {
        Self::with_shape(n, dim, 2, 1, seed)
    }

    pub fn with_shape(n: usize, dim: usize, rows: usize, batch: usize, seed: u64) -> Result<Self> {
        if n == 0 || dim == 0 || rows == 0 {
            return Err(Error::config(
                "synthetic finite sum requires n, d, rows >= 1",
            ));
        }
        if batch == 0 || batch > n {
            return Err(Error::config(format!("batch size must lie in 1..={n}")));
        }
        let mut rng = SplitMix64::derive(seed, 0x0005_EED0_FA11);
        let a: Vec<T> = (0..n * rows * dim)
            .map(|_| T::lit(rng.uniform(-1.0, 1.0)))
            .collect();
        let b: Vec<T> = (0..n * rows)
            .map(|_| T::lit(rng.uniform(-1.0, 1.0)))
            .collect();

        let mut problem = Self {
            n,
            dim,
            rows,
            batch,
            a,
            b,
            minimizer: Vector::zeros(dim),
            f_star: T::zero(),
            h: T::zero(),
            l: T::zero(),
        };
        let (gram, rhs) = problem.normal_equations();
        problem.minimizer = cholesky_solve(&gram, &rhs, dim)?;
        problem.f_star = problem.value(&problem.minimizer);
        problem.l = gram.iter().map(|&v| v * v).sum::<T>().sqrt();

        let radius = problem.minimizer.norm() + T::from_usize_lossy(dim).sqrt();
        problem.h = (0..n)
            .map(|i| {
                let a_norm = problem.block(i).iter().map(|&v| v * v).sum::<T>().sqrt();
                let b_norm = problem.rhs(i).iter().map(|&v| v * v).sum::<T>().sqrt();
                a_norm * (a_norm * radius + b_norm)
            })
            .fold(T::zero(), T::max);
        Ok(problem)
    }

    pub fn minimizer(&self) -> &Vector<T> {
        &self.minimizer
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    fn block(&self, i: usize) -> &[T] {
        let len = self.rows * self.dim;
        &self.a[i * len..(i + 1) * len]
    }

    fn rhs(&self, i: usize) -> &[T] {
        &self.b[i * self.rows..(i + 1) * self.rows]
    }

    fn residual(&self, i: usize, x: &Vector<T>) -> Vec<T> {
        let a = self.block(i);
        let b = self.rhs(i);
        (0..self.rows)
            .map(|r| {
                let row = &a[r * self.dim..(r + 1) * self.dim];
                row.iter()
                    .zip(x.iter())
                    .fold(T::zero(), |acc, (&aij, &xj)| acc + aij * xj)
                    - b[r]
            })
            .collect()
    }

    /// `(1/n) sum A_i^T A_i` (row-major) and `(1/n) sum A_i^T b_i`.
    fn normal_equations(&self) -> (Vec<T>, Vec<T>) {
        let d = self.dim;
        let mut gram = vec![T::zero(); d * d];
        let mut rhs = vec![T::zero(); d];
        for i in 0..self.n {
            let a = self.block(i);
            let b = self.rhs(i);
            for r in 0..self.rows {
                let row = &a[r * d..(r + 1) * d];
                for j in 0..d {
                    rhs[j] = rhs[j] + row[j] * b[r];
                    for k in 0..d {
                        gram[j * d + k] = gram[j * d + k] + row[j] * row[k];
                    }
                }
            }
        }
        let inv_n = T::one() / T::from_usize_lossy(self.n);
        gram.iter_mut().for_each(|v| *v = *v * inv_n);
        rhs.iter_mut().for_each(|v| *v = *v * inv_n);
        (gram, rhs)
    }

    /// `(1/|I|) sum_{i in I} grad f_i(x)`, summed in the order of `indices`.
    fn mean_gradient(
        &self,
        indices: impl ExactSizeIterator<Item = usize>,
        x: &Vector<T>,
    ) -> Vector<T> {
        let count = T::from_usize_lossy(indices.len());
        let mut acc = vec![T::zero(); self.dim];
        for i in indices {
            self.accumulate_component_gradient(i, x, &mut acc);
        }
        Vector::from_vec_unchecked(acc.into_iter().map(|v| v / count).collect())
    }

    fn accumulate_component_gradient(&self, i: usize, x: &Vector<T>, acc: &mut [T]) {
        let a = self.block(i);
        for (r, res) in self.residual(i, x).into_iter().enumerate() {
            let row = &a[r * self.dim..(r + 1) * self.dim];
            for (slot, &aij) in acc.iter_mut().zip(row) {
                *slot = *slot + aij * res;
            }
        }
    }
}

impl<T: Scalar> Problem<T> for SyntheticFiniteSum<T> {
    fn name(&self) -> &str {
        "synthetic_finite_sum"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector<T>) -> T {
        let total = (0..self.n).fold(T::zero(), |acc, i| acc + self.component_value(i, x));
        total / T::from_usize_lossy(self.n)
    }

    fn full_gradient(&self, x: &Vector<T>) -> Vector<T> {
        self.mean_gradient(0..self.n, x)
    }

    fn stochastic_gradient(&self, x: &Vector<T>, rng: &mut SplitMix64) -> Vector<T> {
        if self.batch == 1 {
            let i = rng.below(self.n as u64) as usize;
            return self.component_gradient(i, x);
        }
        let indices = rng.sample_indices(self.n, self.batch);
        self.mean_gradient(indices.into_iter(), x)
    }

    fn constants(&self) -> ProblemConstants<T> {
        ProblemConstants {
            h: Some(self.h),
            l: Some(self.l),
            f_star: Some(self.f_star),
        }
    }

    fn region(&self) -> Region<T> {
        Region {
            lower: self.minimizer.map(|v| v - T::one()),
            upper: self.minimizer.map(|v| v + T::one()),
        }
    }

    fn default_start(&self) -> Vector<T> {
        Vector::zeros(self.dim)
    }

    fn is_deterministic(&self) -> bool {
        self.batch == self.n
    }
}

impl<T: Scalar> FiniteSum<T> for SyntheticFiniteSum<T> {
    fn num_components(&self) -> usize {
        self.n
    }

    fn component_value(&self, i: usize, x: &Vector<T>) -> T {
        let sq = self
            .residual(i, x)
            .into_iter()
            .fold(T::zero(), |acc, r| acc + r * r);
        T::lit(0.5) * sq
    }

    fn component_gradient(&self, i: usize, x: &Vector<T>) -> Vector<T> {
        let mut acc = vec![T::zero(); self.dim];
        self.accumulate_component_gradient(i, x, &mut acc);
        Vector::from_vec_unchecked(acc)
    }
}

/// Solves `M y = rhs` for symmetric positive-definite row-major `M`.
fn cholesky_solve<T: Scalar>(m: &[T], rhs: &[T], d: usize) -> Result<Vector<T>> {
    let mut l = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = m[i * d + j];
            for k in 0..j {
                s = s - l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(s > T::epsilon() * T::lit(1e4) * m[i * d + i].abs()) {
                    return Err(Error::Degenerate(
                        "least-squares Gram matrix is not positive definite".into(),
                    ));
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    let mut y = vec![T::zero(); d];
    for i in 0..d {
        let s = (0..i).fold(rhs[i], |acc, k| acc - l[i * d + k] * y[k]);
        y[i] = s / l[i * d + i];
    }
    let mut x = vec![T::zero(); d];
    for i in (0..d).rev() {
        let s = (i + 1..d).fold(y[i], |acc, k| acc - l[k * d + i] * x[k]);
        x[i] = s / l[i * d + i];
    }
    Ok(Vector::from_vec_unchecked(x))
}

use crate::Scalar;

/// Predictor and corrector weight tables for one `(α, n)` pair.
///
/// Both families depend on `j` only through the lag `n − j`, so the tables are built once
/// from cached powers `kᵅ` and `kᵅ⁺¹`, `k = 0..=n+1`.
#[derive(Debug, Clone)]
pub struct AbmWeights<T> {
    alpha: T,
    pow_a: Vec<T>,
    pow_a1: Vec<T>,
    /// `(k+1)ᵅ − kᵅ`, predictor weight at lag `k`.
    predictor: Vec<T>,
    /// `(k+2)ᵅ⁺¹ + kᵅ⁺¹ − 2(k+1)ᵅ⁺¹`, corrector weight at lag `k` for `j ≥ 1`.
    corrector: Vec<T>,
}

impl<T: Scalar> AbmWeights<T> {
    /// Tables covering every step up to and including step index `max_steps`.
    pub fn new(alpha: T, max_steps: usize) -> Self {
        let len = max_steps + 2;
        let alpha1 = alpha + T::one();
        let pow_a: Vec<T> = (0..len).map(|k| T::from_index(k).powf(alpha)).collect();
        let pow_a1: Vec<T> = (0..len).map(|k| T::from_index(k).powf(alpha1)).collect();
        let predictor = (0..len - 1).map(|k| pow_a[k + 1] - pow_a[k]).collect();
        let corrector = (0..len - 2)
            .map(|k| pow_a1[k + 2] + pow_a1[k] - (pow_a1[k + 1] + pow_a1[k + 1]))
            .collect();
        Self {
            alpha,
            pow_a,
            pow_a1,
            predictor,
            corrector,
        }
    }

    /// Unscaled predictor weight `b_{j,n+1}/(hᵅ/α)` at lag `n − j`.
    #[inline]
    pub fn predictor(&self, lag: usize) -> T {
        self.predictor[lag]
    }

    /// Unscaled corrector weight `a_{j,n+1}` for `1 ≤ j ≤ n`, at lag `n − j`.
    #[inline]
    pub fn corrector(&self, lag: usize) -> T {
        self.corrector[lag]
    }

    /// Unscaled corrector weight of the initial node, `a_{0,n+1} = nᵅ⁺¹ − (n − α)(n + 1)ᵅ`.
    #[inline]
    pub fn corrector_first(&self, n: usize) -> T {
        self.pow_a1[n] - (T::from_index(n) - self.alpha) * self.pow_a[n + 1]
    }

    pub(crate) fn predictor_table(&self) -> &[T] {
        &self.predictor
    }

    pub(crate) fn corrector_table(&self) -> &[T] {
        &self.corrector
    }
}

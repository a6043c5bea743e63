//! Gaussian-blob generators for the balanced and imbalanced benchmark
//! datasets.
//!
//! The benchmark geometry is pinned here rather than left to callers: the
//! balanced problem surrounds one wide, hard class with four tighter
//! neighbors so that average-error minimizers sacrifice it, and the
//! imbalanced problem overlaps a small minority class with three larger
//! ones. Sampling uses ChaCha8 so the same seed reproduces the same data on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

/// One class's sampling parameters: a 2D Gaussian and how many train/test
/// points to draw from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBlob {
    pub mean: [f64; 2],
    /// Symmetric positive-definite covariance, row major.
    pub covariance: [[f64; 2]; 2],
    pub train_count: usize,
    pub test_count: usize,
}

impl ClassBlob {
    /// Isotropic blob with standard deviation `sigma`.
    pub fn isotropic(mean: [f64; 2], sigma: f64, train_count: usize, test_count: usize) -> Self {
        Self {
            mean,
            covariance: [[sigma * sigma, 0.0], [0.0, sigma * sigma]],
            train_count,
            test_count,
        }
    }

    fn cholesky(&self) -> Result<[f64; 3]> {
        let [[a, b], [b2, c]] = self.covariance;
        if (b - b2).abs() > 1e-12 {
            return Err(Error::Config("covariance must be symmetric".into()));
        }
        let det = a * c - b * b;
        if !(a > 0.0 && det > 0.0) {
            return Err(Error::Config(format!(
                "covariance [[{a}, {b}], [{b2}, {c}]] is not positive-definite"
            )));
        }
        let l11 = a.sqrt();
        let l21 = b / l11;
        let l22 = (c - l21 * l21).sqrt();
        Ok([l11, l21, l22])
    }

    fn validate(&self) -> Result<()> {
        self.cholesky()?;
        if self.train_count == 0 || self.test_count == 0 {
            return Err(Error::Config("blob counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// A full dataset specification: one blob per class, in class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub classes: Vec<ClassBlob>,
}

impl BlobSpec {
    /// The five-class balanced benchmark: class 2 is a wide blob at the
    /// origin whose mean lies between the four tighter classes around it,
    /// 100 train / 100000 test points per class.
    pub fn balanced_default() -> Self {
        let arm = 2.3;
        Self {
            classes: vec![
                ClassBlob::isotropic([-arm, 0.0], 0.6, 100, 100_000),
                ClassBlob::isotropic([0.0, 0.0], 1.0, 100, 100_000),
                ClassBlob::isotropic([arm, 0.0], 0.6, 100, 100_000),
                ClassBlob::isotropic([0.0, arm], 0.6, 100, 100_000),
                ClassBlob::isotropic([0.0, -arm], 0.6, 100, 100_000),
            ],
        }
    }

    /// The four-class imbalanced benchmark: a minority class 2 at the
    /// origin, overlapped by three classes of ten times its size, with
    /// `min_nk` train / 10000 test minority points and `10 min_nk` train /
    /// 100000 test points per majority class.
    pub fn imbalanced_default(min_nk: usize) -> Result<Self> {
        if min_nk < 1 {
            return Err(Error::Config(format!(
                "minority train count must be at least 1, got {min_nk}"
            )));
        }
        let radius = 2.1;
        let angles = [90.0f64, 210.0, 330.0];
        let mut classes = vec![ClassBlob::isotropic(
            [radius * angles[0].to_radians().cos(), radius * angles[0].to_radians().sin()],
            0.9,
            10 * min_nk,
            100_000,
        )];
        classes.push(ClassBlob::isotropic([0.0, 0.0], 0.9, min_nk, 10_000));
        for &angle in &angles[1..] {
            classes.push(ClassBlob::isotropic(
                [radius * angle.to_radians().cos(), radius * angle.to_radians().sin()],
                0.9,
                10 * min_nk,
                100_000,
            ));
        }
        Ok(Self { classes })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Draws (train, test) datasets. The stream order is fixed: for each
    /// class, train points first, then test points, so a seed pins every
    /// coordinate.
    pub fn sample(&self, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
        if self.classes.len() < 2 {
            return Err(Error::Config("need at least 2 classes".into()));
        }
        for blob in &self.classes {
            blob.validate()?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train_features = Vec::new();
        let mut train_labels = Vec::new();
        let mut test_features = Vec::new();
        let mut test_labels = Vec::new();
        for (class, blob) in self.classes.iter().enumerate() {
            let l = blob.cholesky()?;
            for _ in 0..blob.train_count {
                train_features.push(draw(&mut rng, blob.mean, l));
                train_labels.push(class);
            }
            for _ in 0..blob.test_count {
                test_features.push(draw(&mut rng, blob.mean, l));
                test_labels.push(class);
            }
        }
        let k = self.classes.len();
        Ok((
            LabeledDataset::new(train_features, train_labels, k)?,
            LabeledDataset::new(test_features, test_labels, k)?,
        ))
    }

    /// Log-density of class `k`'s Gaussian at `x`, up to the shared
    /// constant. Useful for evaluating the generating model itself as a
    /// classifier.
    pub fn log_density(&self, class: usize, x: &[f64]) -> f64 {
        let blob = &self.classes[class];
        let [[a, b], [_, c]] = blob.covariance;
        let det = a * c - b * b;
        let dx = x[0] - blob.mean[0];
        let dy = x[1] - blob.mean[1];
        // inverse of [[a, b], [b, c]] is [[c, -b], [-b, a]] / det
        let quad = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
        -0.5 * quad - 0.5 * det.ln()
    }

    /// The generating model's own prediction (equal class priors).
    pub fn bayes_predict(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for class in 0..self.classes.len() {
            let score = self.log_density(class, x);
            if score > best_score {
                best_score = score;
                best = class;
            }
        }
        best
    }
}

fn draw(rng: &mut ChaCha8Rng, mean: [f64; 2], l: [f64; 3]) -> Vec<f64> {
    let z0: f64 = StandardNormal.sample(rng);
    let z1: f64 = StandardNormal.sample(rng);
    vec![mean[0] + l[0] * z0, mean[1] + l[1] * z0 + l[2] * z1]
}

/// The balanced five-class benchmark: 100 train / 100000 test per class.
pub fn gen_balanced_toy(seed: u64) -> (LabeledDataset, LabeledDataset) {
    BlobSpec::balanced_default()
        .sample(seed)
        .expect("default balanced spec is valid")
}

/// The imbalanced four-class benchmark with minority train size `min_nk`.
pub fn gen_imbalanced_toy(min_nk: usize, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    BlobSpec::imbalanced_default(min_nk)?.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Hypothesis;
    use crate::metrics::worst_class_error;

    struct BayesHypothesis<'a>(&'a BlobSpec);

    impl Hypothesis for BayesHypothesis<'_> {
        fn predict(&self, features: &[f64]) -> usize {
            self.0.bayes_predict(features)
        }
    }

    #[test]
    fn balanced_counts() {
        let (train, test) = gen_balanced_toy(0);
        assert_eq!(train.len(), 500);
        assert_eq!(train.class_counts(), &[100; 5]);
        assert_eq!(test.class_counts(), &[100_000; 5]);
        assert_eq!(train.dim(), 2);
    }

    #[test]
    fn same_seed_same_data() {
        let (a_train, a_test) = gen_balanced_toy(9);
        let (b_train, b_test) = gen_balanced_toy(9);
        assert_eq!(a_train, b_train);
        assert_eq!(a_test, b_test);
        let (c_train, _) = gen_balanced_toy(10);
        assert_ne!(a_train, c_train);
    }

    #[test]
    fn imbalanced_counts_and_ratio() {
        let (train, test) = gen_imbalanced_toy(100, 0).unwrap();
        assert_eq!(train.class_counts(), &[1000, 100, 1000, 1000]);
        assert_eq!(test.class_counts(), &[100_000, 10_000, 100_000, 100_000]);
        let max = *train.class_counts().iter().max().unwrap();
        let min = *train.class_counts().iter().min().unwrap();
        assert_eq!(max / min, 10);

        let (train, _) = gen_imbalanced_toy(10, 0).unwrap();
        assert_eq!(train.class_counts(), &[100, 10, 100, 100]);
        assert!(gen_imbalanced_toy(0, 0).is_err());
    }

    #[test]
    fn class_two_is_hardest_for_the_generating_model() {
        // the generating Gaussians, used as a classifier on their own test
        // sample, err more on class 2 than on class 1
        let spec = BlobSpec::balanced_default();
        let (_, test) = spec.sample(3).unwrap();
        let report = worst_class_error(&BayesHypothesis(&spec), &test);
        assert!(
            report.per_class_error[1] > report.per_class_error[0],
            "{:?}",
            report.per_class_error
        );
        assert_eq!(report.worst_class(), 1);
    }

    #[test]
    fn invalid_covariance_is_rejected() {
        let blob = ClassBlob {
            mean: [0.0, 0.0],
            covariance: [[1.0, 2.0], [2.0, 1.0]], // det < 0
            train_count: 1,
            test_count: 1,
        };
        assert!(blob.validate().is_err());
    }
}

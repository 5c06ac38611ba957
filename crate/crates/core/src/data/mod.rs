//! Multi-view datasets: the in-memory container, deterministic stratified
//! splits, additive-noise corruption for out-of-distribution tests, the
//! synthetic semantic-vagueness generator, and CSV bundle I/O.

mod io;
mod toy;

pub use io::{load_bundle, load_csv, save_bundle, BundleMeta};
pub use toy::{generate_toy, ToySpec};

use crate::error::{Error, Result};
use crate::losses::one_hot_class;
use crate::numerics::Rng;

/// `V` aligned feature matrices (one per view) plus one-hot labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<Vec<Vec<f64>>>,
    labels: Vec<Vec<f64>>,
    num_classes: usize,
}

impl MultiViewDataset {
    pub fn new(
        views: Vec<Vec<Vec<f64>>>,
        labels: Vec<Vec<f64>>,
        num_classes: usize,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidArgument("dataset needs at least one view".into()));
        }
        if num_classes < 2 {
            return Err(Error::InvalidArgument(format!(
                "dataset needs at least 2 classes, got {num_classes}"
            )));
        }
        let n = labels.len();
        for (v, rows) in views.iter().enumerate() {
            if rows.len() != n {
                return Err(Error::Shape(format!(
                    "view {v} has {} rows but there are {n} labels",
                    rows.len()
                )));
            }
            if let Some(first) = rows.first() {
                let width = first.len();
                if width == 0 {
                    return Err(Error::Shape(format!("view {v} has zero-width rows")));
                }
                if let Some(bad) = rows.iter().position(|r| r.len() != width) {
                    return Err(Error::Shape(format!(
                        "view {v} row {bad} has width {}, expected {width}",
                        rows[bad].len()
                    )));
                }
            }
        }
        for (i, y) in labels.iter().enumerate() {
            if y.len() != num_classes {
                return Err(Error::Shape(format!(
                    "label {i} has length {}, expected {num_classes}",
                    y.len()
                )));
            }
            one_hot_class(y)
                .map_err(|e| Error::Data(format!("label {i} is not one-hot: {e}")))?;
        }
        Ok(MultiViewDataset { views, labels, num_classes })
    }

    /// Build from integer class ids, converting to one-hot.
    pub fn from_class_ids(
        views: Vec<Vec<Vec<f64>>>,
        class_ids: &[usize],
        num_classes: usize,
    ) -> Result<Self> {
        let labels = class_ids
            .iter()
            .map(|&c| {
                if c >= num_classes {
                    return Err(Error::Data(format!(
                        "label {c} out of range for {num_classes} classes"
                    )));
                }
                let mut y = vec![0.0; num_classes];
                y[c] = 1.0;
                Ok(y)
            })
            .collect::<Result<Vec<_>>>()?;
        MultiViewDataset::new(views, labels, num_classes)
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    pub fn num_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn view_dims(&self) -> Vec<usize> {
        self.views
            .iter()
            .map(|rows| rows.first().map_or(0, |r| r.len()))
            .collect()
    }

    pub fn view(&self, v: usize) -> &[Vec<f64>] {
        &self.views[v]
    }

    /// Per-view feature slices of instance `n`.
    pub fn instance(&self, n: usize) -> Vec<&[f64]> {
        self.views.iter().map(|rows| rows[n].as_slice()).collect()
    }

    pub fn label(&self, n: usize) -> &[f64] {
        &self.labels[n]
    }

    pub fn class_of(&self, n: usize) -> usize {
        one_hot_class(&self.labels[n]).expect("labels validated at construction")
    }

    pub fn labels(&self) -> &[Vec<f64>] {
        &self.labels
    }

    /// New dataset holding the given rows (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.num_instances() {
                return Err(Error::InvalidArgument(format!(
                    "subset index {i} out of range ({} instances)",
                    self.num_instances()
                )));
            }
        }
        let views = self
            .views
            .iter()
            .map(|rows| indices.iter().map(|&i| rows[i].clone()).collect())
            .collect();
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        MultiViewDataset::new(views, labels, self.num_classes)
    }
}

/// Seeded stratified shuffle split. Per class, `round(n_c * test_fraction)`
/// instances (clamped so both sides keep at least one) go to the test set,
/// so class proportions are preserved within one instance. Row order within
/// each side follows the original dataset.
pub fn split(
    dataset: &MultiViewDataset,
    test_fraction: f64,
    rng: &mut Rng,
) -> Result<(MultiViewDataset, MultiViewDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes()];
    for n in 0..dataset.num_instances() {
        per_class[dataset.class_of(n)].push(n);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, mut indices) in per_class.into_iter().enumerate() {
        if indices.is_empty() {
            continue;
        }
        if indices.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "class {c} has fewer than 2 instances, cannot split"
            )));
        }
        rng.shuffle(&mut indices);
        let n_test = ((indices.len() as f64 * test_fraction).round() as usize)
            .clamp(1, indices.len() - 1);
        test.extend_from_slice(&indices[..n_test]);
        train.extend_from_slice(&indices[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.subset(&train)?, dataset.subset(&test)?))
}

/// Copy of the dataset with `x + eta * eps` on one view, `eps ~ N(0, I)`
/// drawn per element (instance-major). Labels and other views untouched.
pub fn inject_ood_noise(
    dataset: &MultiViewDataset,
    view_index: usize,
    eta: f64,
    rng: &mut Rng,
) -> Result<MultiViewDataset> {
    if view_index >= dataset.num_views() {
        return Err(Error::InvalidArgument(format!(
            "view index {view_index} out of range ({} views)",
            dataset.num_views()
        )));
    }
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise intensity must be >= 0, got {eta}"
        )));
    }
    let mut noisy = dataset.clone();
    for row in &mut noisy.views[view_index] {
        for x in row.iter_mut() {
            *x += eta * rng.sample_normal(0.0, 1.0)?;
        }
    }
    Ok(noisy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_small() -> MultiViewDataset {
        let views = vec![
            vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0], vec![6.0, 7.0]],
            vec![vec![10.0], vec![11.0], vec![12.0], vec![13.0]],
        ];
        MultiViewDataset::from_class_ids(views, &[0, 0, 1, 1], 2).unwrap()
    }

    #[test]
    fn construction_validates_alignment() {
        let views = vec![vec![vec![1.0]], vec![vec![1.0], vec![2.0]]];
        assert!(MultiViewDataset::from_class_ids(views, &[0], 2).is_err());

        let ragged = vec![vec![vec![1.0], vec![1.0, 2.0]]];
        assert!(MultiViewDataset::from_class_ids(ragged, &[0, 1], 2).is_err());

        let views = vec![vec![vec![1.0], vec![2.0]]];
        assert!(MultiViewDataset::from_class_ids(views, &[0, 5], 2).is_err());
    }

    #[test]
    fn accessors() {
        let d = toy_small();
        assert_eq!(d.num_views(), 2);
        assert_eq!(d.num_instances(), 4);
        assert_eq!(d.num_classes(), 2);
        assert_eq!(d.view_dims(), vec![2, 1]);
        assert_eq!(d.instance(2), vec![&[4.0, 5.0][..], &[12.0][..]]);
        assert_eq!(d.class_of(3), 1);
        assert_eq!(d.label(0), &[1.0, 0.0]);
    }

    #[test]
    fn split_is_a_stratified_partition() {
        let d = toy_small();
        let mut rng = Rng::new(5);
        let (train, test) = split(&d, 0.5, &mut rng).unwrap();
        assert_eq!(train.num_instances(), 2);
        assert_eq!(test.num_instances(), 2);
        // one instance of each class on each side
        let count = |s: &MultiViewDataset, c: usize| {
            (0..s.num_instances()).filter(|&n| s.class_of(n) == c).count()
        };
        assert_eq!(count(&train, 0), 1);
        assert_eq!(count(&train, 1), 1);
        assert_eq!(count(&test, 0), 1);
        assert_eq!(count(&test, 1), 1);
    }

    #[test]
    fn split_same_seed_is_identical() {
        let d = toy_small();
        let a = split(&d, 0.5, &mut Rng::new(9)).unwrap();
        let b = split(&d, 0.5, &mut Rng::new(9)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn split_two_instance_class_goes_one_and_one() {
        let views = vec![vec![vec![0.0], vec![1.0]]];
        let d = MultiViewDataset::from_class_ids(views, &[0, 0], 2).unwrap();
        let (train, test) = split(&d, 0.5, &mut Rng::new(1)).unwrap();
        assert_eq!(train.num_instances(), 1);
        assert_eq!(test.num_instances(), 1);
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let d = toy_small();
        assert!(split(&d, 0.0, &mut Rng::new(1)).is_err());
        assert!(split(&d, 1.0, &mut Rng::new(1)).is_err());
        let views = vec![vec![vec![0.0], vec![1.0], vec![2.0]]];
        let single = MultiViewDataset::from_class_ids(views, &[0, 0, 1], 2).unwrap();
        assert!(split(&single, 0.5, &mut Rng::new(1)).is_err());
    }

    #[test]
    fn ood_noise_zero_intensity_is_identity() {
        let d = toy_small();
        let noisy = inject_ood_noise(&d, 0, 0.0, &mut Rng::new(3)).unwrap();
        assert_eq!(d, noisy);
    }

    #[test]
    fn ood_noise_touches_only_the_chosen_view() {
        let d = toy_small();
        let noisy = inject_ood_noise(&d, 0, 2.0, &mut Rng::new(3)).unwrap();
        assert_ne!(d.view(0), noisy.view(0));
        assert_eq!(d.view(1), noisy.view(1));
        assert_eq!(d.labels(), noisy.labels());
    }

    #[test]
    fn ood_noise_variance_scales_with_intensity() {
        // single wide view of zeros: sample variance after noise ~ eta^2
        let n = 4000;
        let views = vec![(0..n).map(|_| vec![0.0; 5]).collect::<Vec<_>>()];
        let ids: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let d = MultiViewDataset::from_class_ids(views, &ids, 2).unwrap();
        let eta = 5.0;
        let noisy = inject_ood_noise(&d, 0, eta, &mut Rng::new(77)).unwrap();
        let values: Vec<f64> = noisy.view(0).iter().flatten().copied().collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        assert!((var - eta * eta).abs() < 1.5, "variance {var}, expected ~{}", eta * eta);
    }

    #[test]
    fn ood_noise_rejects_bad_arguments() {
        let d = toy_small();
        assert!(inject_ood_noise(&d, 9, 1.0, &mut Rng::new(1)).is_err());
        assert!(inject_ood_noise(&d, 0, -1.0, &mut Rng::new(1)).is_err());
    }
}

//! Training loop and evaluation.
//!
//! One evidence network per view, trained jointly on the per-instance
//! objective: forward every view, decouple, compute the loss and its
//! evidence gradients, push them back through each network, and take one
//! Adam step per network per minibatch. Everything is seeded and
//! single-threaded, so a `(seed, config, dataset)` triple pins the whole
//! trajectory.
//!
//! Substream layout for a config seed `s`: `with_stream(s, 1)` initializes
//! weights, `with_stream(s, 2)` drives epoch shuffles. (Stream 0 is used
//! by the experiment runners for the train/test split, stream 3 for noise
//! injection.)

use serde::{Deserialize, Serialize};

use crate::data::MultiViewDataset;
use crate::error::{Error, Result};
use crate::fusion::{decouple, fuse_final, AggregateStrategy};
use crate::losses::{instance_loss, AnnealingSchedule, LossWeights, Objective};
use crate::numerics::Rng;
use crate::opinion::{separation_degree, EvidenceVector, SubjectiveOpinion};

use super::network::{EvidenceNetwork, NetworkGradients};
use super::optim::Adam;

pub const STREAM_SPLIT: u64 = 0;
pub const STREAM_INIT: u64 = 1;
pub const STREAM_SHUFFLE: u64 = 2;
pub const STREAM_NOISE: u64 = 3;

/// Hyperparameters for a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden_dims: Vec<usize>,
    /// KL annealing horizon in epochs.
    pub anneal_horizon: usize,
    pub weights: LossWeights,
    pub weight_decay: f64,
    /// Candidate learning rates for cross-validated selection.
    pub lr_grid: Vec<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 3e-3,
            epochs: 100,
            batch_size: 64,
            seed: 42,
            hidden_dims: vec![64],
            anneal_horizon: 50,
            weights: LossWeights::default(),
            weight_decay: 1e-5,
            lr_grid: vec![3e-3, 1e-3, 3e-4, 1e-4],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if self.anneal_horizon == 0 {
            return Err(Error::InvalidArgument("annealing horizon must be positive".into()));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("weight decay must be >= 0".into()));
        }
        self.weights.validate()
    }
}

/// How test-time evidence is produced from the per-view outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FusionRule {
    /// Decouple, then average the consistent and complementary parts.
    Decoupled,
    Baseline(AggregateStrategy),
}

impl FusionRule {
    pub fn fuse(&self, views: &[EvidenceVector]) -> Result<EvidenceVector> {
        match self {
            FusionRule::Decoupled => Ok(fuse_final(&decouple(views)?)),
            FusionRule::Baseline(strategy) => {
                crate::fusion::aggregate_baseline(views, *strategy)
            }
        }
    }
}

/// Per-epoch log record. Loss components are per-instance means of the
/// unweighted term values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lambda: f64,
    pub mean_loss: f64,
    pub mean_view_specific: f64,
    pub mean_consistent: f64,
    pub mean_complementary: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
}

/// Trained per-view networks plus the provenance needed to reuse them.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub networks: Vec<EvidenceNetwork>,
    pub config: TrainConfig,
    pub log: TrainLog,
}

/// Train with the full decoupled objective and its fusion rule.
pub fn train(dataset: &MultiViewDataset, config: &TrainConfig) -> Result<TrainedModel> {
    train_with_objective(dataset, config, Objective::Decoupled, FusionRule::Decoupled)
}

/// Train under an explicit objective/fusion pair (ablation variants).
pub fn train_with_objective(
    dataset: &MultiViewDataset,
    config: &TrainConfig,
    objective: Objective,
    fusion: FusionRule,
) -> Result<TrainedModel> {
    config.validate()?;
    if dataset.num_instances() == 0 {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    if dataset.num_views() < 2 {
        return Err(Error::InvalidArgument("training needs at least 2 views".into()));
    }

    let mut init_rng = Rng::with_stream(config.seed, STREAM_INIT);
    let mut networks: Vec<EvidenceNetwork> = dataset
        .view_dims()
        .iter()
        .map(|&d| {
            EvidenceNetwork::new(d, &config.hidden_dims, dataset.num_classes(), &mut init_rng)
        })
        .collect::<Result<_>>()?;

    let mut optimizers: Vec<Adam> = networks
        .iter()
        .map(|n| Adam::for_network(n, config.learning_rate, config.weight_decay))
        .collect();

    let mut shuffle_rng = Rng::with_stream(config.seed, STREAM_SHUFFLE);
    let schedule = AnnealingSchedule::new(config.anneal_horizon)?;
    let mut log = TrainLog::default();
    let n = dataset.num_instances();
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        let sched = schedule.at_epoch(epoch);
        shuffle_rng.shuffle(&mut order);

        let mut loss_sum = 0.0;
        let mut vs_sum = 0.0;
        let mut con_sum = 0.0;
        let mut cmp_sum = 0.0;
        let mut correct = 0usize;

        for batch in order.chunks(config.batch_size) {
            let mut batch_grads: Vec<NetworkGradients> =
                networks.iter().map(NetworkGradients::zeros_like).collect();

            for &idx in batch {
                let features = dataset.instance(idx);
                let mut caches = Vec::with_capacity(networks.len());
                let mut evidences = Vec::with_capacity(networks.len());
                for (net, x) in networks.iter().zip(&features) {
                    let cache = net.forward_cached(x)?;
                    evidences.push(cache.evidence()?);
                    caches.push(cache);
                }

                let loss =
                    instance_loss(objective, &evidences, dataset.label(idx), &sched, &config.weights)?;
                if !loss.value.is_finite() {
                    return Err(Error::NonFiniteLoss(format!(
                        "loss became {} at epoch {epoch}, instance {idx}",
                        loss.value
                    )));
                }
                loss_sum += loss.value;
                vs_sum += loss.view_specific.iter().sum::<f64>();
                con_sum += loss.consistent;
                cmp_sum += loss.complementary;

                if predict(&fusion, &evidences)? == dataset.class_of(idx) {
                    correct += 1;
                }

                for v in 0..networks.len() {
                    let g = networks[v].backward(&caches[v], &loss.evidence_grads[v])?;
                    batch_grads[v].accumulate(&g);
                }
            }

            let scale = 1.0 / batch.len() as f64;
            for (net, (opt, mut grads)) in networks
                .iter_mut()
                .zip(optimizers.iter_mut().zip(batch_grads.into_iter()))
            {
                grads.scale(scale);
                opt.step(net, &grads)?;
            }
        }

        let inv_n = 1.0 / n as f64;
        log.epochs.push(EpochRecord {
            epoch,
            lambda: sched.lambda(),
            mean_loss: loss_sum * inv_n,
            mean_view_specific: vs_sum * inv_n,
            mean_consistent: con_sum * inv_n,
            mean_complementary: cmp_sum * inv_n,
            train_accuracy: correct as f64 * inv_n,
        });
    }

    Ok(TrainedModel { networks, config: config.clone(), log })
}

/// Argmax over fused evidence, ties broken by the lowest class index.
fn predict(fusion: &FusionRule, evidences: &[EvidenceVector]) -> Result<usize> {
    let fused = fusion.fuse(evidences)?;
    let mut best = 0;
    for (i, v) in fused.as_slice().iter().enumerate() {
        if *v > fused.as_slice()[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Per-instance evaluation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub true_class: usize,
    pub predicted: usize,
    /// Uncertainty mass of the fused opinion, `C / S`.
    pub uncertainty: f64,
    /// Separation degree of the consistent opinion's belief masses.
    pub consistent_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub mean_uncertainty: f64,
    pub records: Vec<InstanceRecord>,
}

/// Evaluate with the decoupled fusion rule.
pub fn evaluate(networks: &[EvidenceNetwork], dataset: &MultiViewDataset) -> Result<Metrics> {
    evaluate_with(networks, dataset, FusionRule::Decoupled)
}

/// Forward every view, fuse, and score. The reported uncertainty is the
/// fused opinion's uncertainty mass; `consistent_sd` always refers to the
/// decoupled consistent opinion regardless of the fusion rule.
pub fn evaluate_with(
    networks: &[EvidenceNetwork],
    dataset: &MultiViewDataset,
    fusion: FusionRule,
) -> Result<Metrics> {
    if networks.len() != dataset.num_views() {
        return Err(Error::Shape(format!(
            "{} networks for {} views",
            networks.len(),
            dataset.num_views()
        )));
    }
    if dataset.num_instances() == 0 {
        return Err(Error::InvalidArgument("cannot evaluate an empty dataset".into()));
    }
    let mut records = Vec::with_capacity(dataset.num_instances());
    let mut correct = 0usize;
    let mut uncertainty_sum = 0.0;
    for idx in 0..dataset.num_instances() {
        let features = dataset.instance(idx);
        let evidences: Vec<EvidenceVector> = networks
            .iter()
            .zip(&features)
            .map(|(net, x)| net.forward(x))
            .collect::<Result<_>>()?;
        let fused = fusion.fuse(&evidences)?;
        let predicted = predict(&fusion, &evidences)?;
        let uncertainty = SubjectiveOpinion::from_evidence(&fused).uncertainty();
        let consistent = decouple(&evidences)?.consistent;
        let consistent_sd =
            separation_degree(SubjectiveOpinion::from_evidence(&consistent).beliefs());
        let true_class = dataset.class_of(idx);
        if predicted == true_class {
            correct += 1;
        }
        uncertainty_sum += uncertainty;
        records.push(InstanceRecord { true_class, predicted, uncertainty, consistent_sd });
    }
    let n = dataset.num_instances() as f64;
    Ok(Metrics {
        accuracy: correct as f64 / n,
        mean_uncertainty: uncertainty_sum / n,
        records,
    })
}

//! In-process spout/bolt topology with configurable parallelism.
//!
//! One spout feeds three bolt stages (preprocess, feature, classify) over
//! bounded queues. Preprocess bolts are stateless. Feature bolts hold
//! correlation-accumulator replicas, classify bolts hold model replicas;
//! replicas periodically push their count deltas into a shared table and
//! pull the merged view back, so parallel training stays consistent without
//! a lock on the per-tweet hot path. Items are never dropped: bounded
//! queues give backpressure, and shutdown drains everything in flight.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, unbounded, Receiver, RecvTimeoutError, Sender};
use serde::Serialize;
use thiserror::Error;

use crate::classifier::{InstanceRecord, NaiveBayes};
use crate::corpus::{Corpus, Tweet};
use crate::features::{feature_vector, CorrelationAccumulator, FeatureMode, FeatureStage, HybridHashtagState};
use crate::num::Real;
use crate::preprocess::{preprocess, StopwordList, TokenizedTweet};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("invalid topology config: {0}")]
    InvalidConfig(String),
    #[error("pipeline stalled: no completions for {0:?} while stages were still open")]
    Stalled(Duration),
    #[error("conservation violated: emitted {emitted}, processed {processed}")]
    Conservation { emitted: u64, processed: u64 },
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
}

/// When the spout stops emitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SessionLimit {
    /// Emit for a wall-clock window; totals vary with machine speed.
    Duration(Duration),
    /// Emit exactly this many tweets; totals and records are deterministic.
    Count(u64),
}

/// Parallelism and session settings.
///
/// `workers` models the paper-style processor count: every stage runs
/// `workers * <stage>_executors` threads.
#[derive(Debug, Clone, Serialize)]
pub struct TopologyConfig {
    pub workers: usize,
    pub preprocess_executors: usize,
    pub feature_executors: usize,
    pub classify_executors: usize,
    pub queue_capacity: usize,
    pub session: SessionLimit,
    pub mode: FeatureMode,
    pub update_every: u64,
    /// Tweets between replica count merges.
    pub merge_interval: u64,
    pub seed: u64,
    /// Keep per-instance records in the report (memory-heavy for long runs).
    pub collect_records: bool,
    #[serde(skip)]
    pub watchdog: Duration,
}

impl TopologyConfig {
    pub fn new(workers: usize, session: SessionLimit, mode: FeatureMode) -> Self {
        TopologyConfig {
            workers,
            preprocess_executors: 1,
            feature_executors: 1,
            classify_executors: 1,
            queue_capacity: 256,
            session,
            mode,
            update_every: 1,
            merge_interval: 1000,
            seed: 0,
            collect_records: false,
            watchdog: Duration::from_secs(60),
        }
    }

    fn validate(&self) -> Result<(), TopologyError> {
        let bad = |msg: String| Err(TopologyError::InvalidConfig(msg));
        if self.workers == 0 {
            return bad("workers must be >= 1".into());
        }
        if self.preprocess_executors == 0
            || self.feature_executors == 0
            || self.classify_executors == 0
        {
            return bad("per-stage executor counts must be >= 1".into());
        }
        if self.queue_capacity == 0 {
            return bad("queue capacity must be >= 1".into());
        }
        if self.merge_interval == 0 || self.update_every == 0 {
            return bad("merge_interval and update_every must be >= 1".into());
        }
        if let SessionLimit::Duration(d) = self.session {
            if d.is_zero() {
                return bad("session duration must be > 0".into());
            }
        }
        Ok(())
    }
}

/// Occupancy statistics for one inter-stage queue.
#[derive(Debug, Clone, Serialize)]
pub struct QueueStats {
    pub stage: String,
    pub capacity: usize,
    pub mean_occupancy: f64,
    pub max_occupancy: usize,
}

/// Session outcome.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub workers: usize,
    pub duration_s: f64,
    pub total_emitted: u64,
    pub total_processed: u64,
    pub dropped: u64,
    /// total_processed / duration_s.
    pub throughput_tps: f64,
    /// Mean spout-emit to classify-complete latency.
    pub mean_latency_ms: f64,
    pub accuracy: f64,
    pub queue_stats: Vec<QueueStats>,
    #[serde(skip)]
    pub records: Option<Vec<InstanceRecord>>,
}

struct RawTweet {
    tweet: Tweet,
    emitted: Instant,
}

struct TokenizedMsg {
    tok: TokenizedTweet,
    emitted: Instant,
}

struct FeaturedMsg {
    tok: TokenizedTweet,
    features: std::collections::BTreeSet<String>,
    emitted: Instant,
}

struct RecordMsg {
    tweet_id: u64,
    predicted: String,
    actual: String,
    latency: Duration,
}

/// Runnable pipeline; consumed by [`Topology::run_session`].
pub struct Topology<F: Real> {
    config: TopologyConfig,
    corpus: Arc<Corpus>,
    stopwords: Arc<StopwordList>,
    template_stage: FeatureStage,
    template_model: NaiveBayes<F>,
    /// Merged accumulator across feature replicas, final after drain.
    pub merged_accumulator: Arc<Mutex<CorrelationAccumulator>>,
    /// Merged model across classify replicas, final after drain.
    pub merged_model: Arc<Mutex<NaiveBayes<F>>>,
}

/// Assembles a topology: spout -> preprocess -> feature -> classify with the
/// configured executor counts and a shuffle partition between stages.
pub fn build_topology<F: Real>(
    config: TopologyConfig,
    corpus: Arc<Corpus>,
    state: HybridHashtagState,
    model: NaiveBayes<F>,
    stopwords: Arc<StopwordList>,
) -> Result<Topology<F>, TopologyError> {
    config.validate()?;
    let merged_model = Arc::new(Mutex::new(model.fresh()));
    Ok(Topology {
        template_stage: FeatureStage::new(state, config.mode, config.update_every),
        template_model: model,
        config,
        corpus,
        stopwords,
        merged_accumulator: Arc::new(Mutex::new(CorrelationAccumulator::new())),
        merged_model,
    })
}

impl<F: Real> Topology<F> {
    /// Runs the session to completion: the spout stops at the session
    /// limit, queues drain, replicas flush their final deltas, and the
    /// metrics are finalized. A tweet counts as processed only once
    /// classification and training have completed.
    pub fn run_session(self) -> Result<MetricsReport, TopologyError> {
        let cfg = self.config.clone();
        let threads_per_stage = |per: usize| cfg.workers * per;

        let (spout_tx, pre_rx) = bounded::<RawTweet>(cfg.queue_capacity);
        let (pre_tx, feat_rx) = bounded::<TokenizedMsg>(cfg.queue_capacity);
        let (feat_tx, cls_rx) = bounded::<FeaturedMsg>(cfg.queue_capacity);
        let (rec_tx, rec_rx) = unbounded::<RecordMsg>();

        let emitted = Arc::new(AtomicU64::new(0));
        let done = Arc::new(AtomicBool::new(false));

        // Queue occupancy sampler.
        let sampler = {
            let (r0, r1, r2) = (pre_rx.clone(), feat_rx.clone(), cls_rx.clone());
            let done = done.clone();
            thread::spawn(move || {
                let mut stats = [(0u64, 0usize, 0u64); 3];
                while !done.load(Ordering::Relaxed) {
                    for (i, len) in [r0.len(), r1.len(), r2.len()].into_iter().enumerate() {
                        stats[i].0 += len as u64;
                        stats[i].1 = stats[i].1.max(len);
                        stats[i].2 += 1;
                    }
                    thread::sleep(Duration::from_millis(10));
                }
                stats
            })
        };

        // Spout: single ordered source.
        let spout = {
            let corpus = self.corpus.clone();
            let emitted = emitted.clone();
            let session = cfg.session;
            let seed = cfg.seed;
            thread::spawn(move || {
                let mut stream = corpus.stream(seed);
                let deadline = match session {
                    SessionLimit::Duration(d) => Some(Instant::now() + d),
                    SessionLimit::Count(_) => None,
                };
                let limit = match session {
                    SessionLimit::Count(n) => n,
                    SessionLimit::Duration(_) => u64::MAX,
                };
                let mut sent = 0u64;
                while sent < limit {
                    if let Some(deadline) = deadline {
                        if Instant::now() >= deadline {
                            break;
                        }
                    }
                    let tweet = stream.next().expect("stream is unbounded");
                    let msg = RawTweet {
                        tweet,
                        emitted: Instant::now(),
                    };
                    if spout_tx.send(msg).is_err() {
                        break;
                    }
                    sent += 1;
                    emitted.store(sent, Ordering::Relaxed);
                }
            })
        };

        // Preprocess bolts: stateless.
        let mut pre_handles = Vec::new();
        for _ in 0..threads_per_stage(cfg.preprocess_executors) {
            let rx = pre_rx.clone();
            let tx = pre_tx.clone();
            let stopwords = self.stopwords.clone();
            pre_handles.push(thread::spawn(move || {
                for msg in rx {
                    let tok = preprocess(&msg.tweet, &stopwords);
                    if tx
                        .send(TokenizedMsg {
                            tok,
                            emitted: msg.emitted,
                        })
                        .is_err()
                    {
                        break;
                    }
                }
            }));
        }
        drop(pre_tx);
        drop(pre_rx);

        // Feature bolts: accumulator + hybrid-state replicas. Each replica
        // pushes its count delta into the shared table every merge interval
        // but keeps extracting from its own state, so a single-replica run
        // is bit-identical to the sequential loop. The shared table tracks
        // the order-independent counts; anchor pair counts stay local
        // because anchor adoption is order-dependent.
        let mut feat_handles = Vec::new();
        for _ in 0..threads_per_stage(cfg.feature_executors) {
            let rx = feat_rx.clone();
            let tx = feat_tx.clone();
            let global = self.merged_accumulator.clone();
            let mut stage = self.template_stage.clone();
            let merge_interval = cfg.merge_interval;
            feat_handles.push(thread::spawn(move || {
                let mut pending = CorrelationAccumulator::new();
                let mut since_merge = 0u64;
                for msg in rx {
                    let features = stage.extract(&msg.tok);
                    pending.observe(&msg.tok);
                    since_merge += 1;
                    if since_merge >= merge_interval {
                        let mut g = global.lock().unwrap();
                        g.merge(&pending);
                        pending = CorrelationAccumulator::new();
                        since_merge = 0;
                    }
                    let out = FeaturedMsg {
                        features,
                        tok: msg.tok,
                        emitted: msg.emitted,
                    };
                    if tx.send(out).is_err() {
                        break;
                    }
                }
                let mut g = global.lock().unwrap();
                g.merge(&pending);
            }));
        }
        drop(feat_tx);
        drop(feat_rx);

        // Classify bolts: model replicas, predict then train.
        let mut cls_handles = Vec::new();
        for _ in 0..threads_per_stage(cfg.classify_executors) {
            let rx = cls_rx.clone();
            let tx = rec_tx.clone();
            let global = self.merged_model.clone();
            let mut local = self.template_model.clone();
            let mut pending = self.template_model.fresh();
            let merge_interval = cfg.merge_interval;
            cls_handles.push(thread::spawn(move || {
                let mut since_merge = 0u64;
                for msg in rx {
                    let prediction = local.predict(&msg.features);
                    local
                        .train(&msg.features, &msg.tok.label)
                        .expect("labels validated at corpus load");
                    pending
                        .train(&msg.features, &msg.tok.label)
                        .expect("labels validated at corpus load");
                    since_merge += 1;
                    if since_merge >= merge_interval {
                        let mut g = global.lock().unwrap();
                        g.merge(&pending).expect("replica models share config");
                        pending = g.fresh();
                        local = g.clone();
                        since_merge = 0;
                    }
                    let rec = RecordMsg {
                        tweet_id: msg.tok.tweet_id,
                        predicted: prediction.class,
                        actual: msg.tok.label.clone(),
                        latency: msg.emitted.elapsed(),
                    };
                    if tx.send(rec).is_err() {
                        break;
                    }
                }
                let mut g = global.lock().unwrap();
                g.merge(&pending).expect("replica models share config");
            }));
        }
        drop(rec_tx);
        drop(cls_rx);

        // Collector: aggregates completions in arrival order.
        let start = Instant::now();
        let mut total_processed = 0u64;
        let mut correct = 0u64;
        let mut latency_sum = Duration::ZERO;
        let mut records = cfg.collect_records.then(Vec::new);
        loop {
            match rec_rx.recv_timeout(cfg.watchdog) {
                Ok(msg) => {
                    total_processed += 1;
                    let is_correct = msg.predicted == msg.actual;
                    if is_correct {
                        correct += 1;
                    }
                    latency_sum += msg.latency;
                    if let Some(records) = records.as_mut() {
                        records.push(InstanceRecord {
                            instance: total_processed,
                            tweet_id: msg.tweet_id,
                            predicted: msg.predicted,
                            actual: msg.actual,
                            correct: is_correct,
                        });
                    }
                }
                Err(RecvTimeoutError::Disconnected) => break,
                Err(RecvTimeoutError::Timeout) => {
                    done.store(true, Ordering::Relaxed);
                    return Err(TopologyError::Stalled(cfg.watchdog));
                }
            }
        }
        let drained_at = start.elapsed();

        let join = |h: thread::JoinHandle<()>| -> Result<(), TopologyError> {
            h.join()
                .map_err(|e| TopologyError::WorkerPanic(format!("{e:?}")))
        };
        join(spout)?;
        for h in pre_handles {
            join(h)?;
        }
        for h in feat_handles {
            join(h)?;
        }
        for h in cls_handles {
            join(h)?;
        }
        done.store(true, Ordering::Relaxed);
        let queue_samples = sampler
            .join()
            .map_err(|e| TopologyError::WorkerPanic(format!("{e:?}")))?;

        let total_emitted = emitted.load(Ordering::Relaxed);
        if total_emitted != total_processed {
            return Err(TopologyError::Conservation {
                emitted: total_emitted,
                processed: total_processed,
            });
        }

        let duration_s = match cfg.session {
            SessionLimit::Duration(d) => d.as_secs_f64(),
            SessionLimit::Count(_) => drained_at.as_secs_f64(),
        };
        let stage_names = ["preprocess", "feature", "classify"];
        let queue_stats = queue_samples
            .iter()
            .zip(stage_names)
            .map(|((sum, max, samples), stage)| QueueStats {
                stage: stage.to_string(),
                capacity: cfg.queue_capacity,
                mean_occupancy: if *samples == 0 {
                    0.0
                } else {
                    *sum as f64 / *samples as f64
                },
                max_occupancy: *max,
            })
            .collect();

        Ok(MetricsReport {
            workers: cfg.workers,
            duration_s,
            total_emitted,
            total_processed,
            dropped: 0,
            throughput_tps: if duration_s > 0.0 {
                total_processed as f64 / duration_s
            } else {
                0.0
            },
            mean_latency_ms: if total_processed > 0 {
                latency_sum.as_secs_f64() * 1000.0 / total_processed as f64
            } else {
                0.0
            },
            accuracy: if total_processed > 0 {
                correct as f64 / total_processed as f64
            } else {
                0.0
            },
            queue_stats,
            records,
        })
    }
}

/// Per-row scaling result; a failed session keeps its error message without
/// aborting the remaining rows.
#[derive(Debug, Serialize)]
pub struct ScalingRow {
    pub workers: usize,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
    pub pct_throughput_gain: Option<f64>,
    pub pct_latency_reduction: Option<f64>,
}

/// Scaling-sweep output: one session per worker count on the same corpus
/// and seed, with deltas relative to the single-worker row.
#[derive(Debug, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

/// Runs one session per worker count (ascending, starting at 1) and
/// derives throughput-gain and latency-reduction percentages.
pub fn scaling_benchmark<F: Real>(
    base: &TopologyConfig,
    worker_counts: &[usize],
    corpus: &Arc<Corpus>,
    state: &HybridHashtagState,
    model: &NaiveBayes<F>,
    stopwords: &Arc<StopwordList>,
) -> Result<ScalingReport, TopologyError> {
    if worker_counts.is_empty() || worker_counts[0] != 1 {
        return Err(TopologyError::InvalidConfig(
            "worker counts must start at 1".into(),
        ));
    }
    if worker_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TopologyError::InvalidConfig(
            "worker counts must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::new();
    for &workers in worker_counts {
        let mut config = base.clone();
        config.workers = workers;
        let outcome = build_topology(
            config,
            corpus.clone(),
            state.clone(),
            model.clone(),
            stopwords.clone(),
        )
        .and_then(Topology::run_session);
        let (metrics, error) = match outcome {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e.to_string())),
        };
        rows.push(ScalingRow {
            workers,
            metrics,
            error,
            pct_throughput_gain: None,
            pct_latency_reduction: None,
        });
    }
    let baseline = rows[0]
        .metrics
        .as_ref()
        .map(|m| (m.throughput_tps, m.mean_latency_ms));
    if let Some((base_tp, base_lat)) = baseline {
        for row in rows.iter_mut() {
            if let Some(m) = row.metrics.as_ref() {
                row.pct_throughput_gain = Some((m.throughput_tps - base_tp) / base_tp * 100.0);
                row.pct_latency_reduction =
                    Some((base_lat - m.mean_latency_ms) / base_lat * 100.0);
            }
        }
    }
    Ok(ScalingReport { rows })
}

impl ScalingReport {
    /// `workers,duration_s,total,throughput_tps,mean_latency_ms,accuracy,pct_throughput_gain,pct_latency_reduction`
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "workers",
            "duration_s",
            "total",
            "throughput_tps",
            "mean_latency_ms",
            "accuracy",
            "pct_throughput_gain",
            "pct_latency_reduction",
        ])
        .map_err(csv_io)?;
        for row in &self.rows {
            match (&row.metrics, &row.error) {
                (Some(m), _) => {
                    w.write_record([
                        row.workers.to_string(),
                        format!("{:.3}", m.duration_s),
                        m.total_processed.to_string(),
                        format!("{:.1}", m.throughput_tps),
                        format!("{:.4}", m.mean_latency_ms),
                        format!("{:.4}", m.accuracy),
                        row.pct_throughput_gain
                            .map(|v| format!("{v:.1}"))
                            .unwrap_or_default(),
                        row.pct_latency_reduction
                            .map(|v| format!("{v:.1}"))
                            .unwrap_or_default(),
                    ])
                    .map_err(csv_io)?;
                }
                (None, Some(err)) => {
                    w.write_record([
                        row.workers.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        format!("error: {err}"),
                        String::new(),
                        String::new(),
                    ])
                    .map_err(csv_io)?;
                }
                (None, None) => unreachable!("row without metrics or error"),
            }
        }
        w.flush()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::Other, e)
}

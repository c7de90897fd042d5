use std::cell::UnsafeCell;
use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use super::sgns::MAX_LOGIT;
use super::vocab::{build_vocab, Vocab};
use crate::error::{Error, Result};
use crate::sampling::{derive_seed, rng_from_seed, SeededRng};
use crate::walk::WalkCorpus;

/// Learning rate never decays below `lr_initial * MIN_LR_FRACTION`.
pub const MIN_LR_FRACTION: f32 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum distance between a center and its context.
    pub window: usize,
    pub negatives: usize,
    pub lr_initial: f32,
    pub epochs: usize,
    pub seed: u64,
    pub min_count: u64,
    /// Draw each center's window uniformly from `1..=window`.
    pub shrink_window: bool,
    /// Frequent-token downsampling threshold; `None` keeps every token.
    pub subsample: Option<f64>,
    /// Worker threads. With more than one, updates race (Hogwild) and results
    /// are no longer reproducible.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            window: 10,
            negatives: 5,
            lr_initial: 0.025,
            epochs: 1,
            seed: 0,
            min_count: 1,
            shrink_window: true,
            subsample: None,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim < 1 {
            return bad("dim must be at least 1");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.negatives < 1 {
            return bad("negatives must be at least 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if !(self.lr_initial > 0.0 && self.lr_initial.is_finite()) {
            return bad("lr must be positive");
        }
        if let Some(t) = self.subsample {
            if t.is_nan() || t <= 0.0 {
                return bad("subsample threshold must be positive");
            }
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        Ok(())
    }
}

/// Node embeddings: one row of `input` per vocabulary entry.
///
/// `output` holds the context-side parameters after training and is empty for
/// matrices read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    names: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    input: Vec<f32>,
    output: Vec<f32>,
}

impl EmbeddingMatrix {
    /// Builds a matrix from names and row-major vectors.
    pub fn from_rows(names: Vec<String>, dim: usize, input: Vec<f32>) -> Result<Self> {
        if input.len() != names.len() * dim {
            return Err(Error::Embedding(format!(
                "{} values do not fill {} rows of dimension {dim}",
                input.len(),
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Embedding(format!("duplicate row for `{n}`")));
            }
        }
        Ok(EmbeddingMatrix {
            names,
            index,
            dim,
            input,
            output: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vector(&self, name: &str) -> Option<&[f32]> {
        self.row_of(name).map(|i| self.row(i))
    }

    /// Row-major input vectors.
    pub fn data(&self) -> &[f32] {
        &self.input
    }

    pub fn output_vectors(&self) -> &[f32] {
        &self.output
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub pairs: u64,
    pub mean_loss: f64,
}

impl fmt::Display for EpochStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "epoch {} pairs {} mean_loss {:.6}", self.epoch, self.pairs, self.mean_loss)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub embeddings: EmbeddingMatrix,
    pub epochs: Vec<EpochStats>,
}

/// Shared parameter buffer for lock-free asynchronous updates.
struct Hogwild(UnsafeCell<Vec<f32>>);

// SAFETY: workers write overlapping rows without synchronisation. Torn or lost
// f32 updates are the accepted cost of asynchronous SGD; the buffer is never
// resized while shared.
unsafe impl Sync for Hogwild {}

impl Hogwild {
    #[allow(clippy::mut_from_ref)]
    unsafe fn get(&self) -> &mut [f32] {
        (*self.0.get()).as_mut_slice()
    }

    fn into_inner(self) -> Vec<f32> {
        self.0.into_inner()
    }
}

/// Words per sequence-slice progress update of the shared lr schedule.
const PROGRESS_STRIDE: u64 = 10_000;

struct Shared<'a> {
    cfg: &'a TrainConfig,
    vocab: &'a Vocab,
    input: Hogwild,
    output: Hogwild,
    keep_prob: Option<Vec<f64>>,
    total_tokens: u64,
    processed: std::sync::atomic::AtomicU64,
}

struct WorkerStats {
    pairs: u64,
    loss: f64,
}

impl Shared<'_> {
    fn learning_rate(&self, processed: u64) -> f32 {
        let lr0 = self.cfg.lr_initial;
        let frac = processed as f32 / (self.total_tokens.max(1)) as f32;
        (lr0 * (1.0 - frac)).max(lr0 * MIN_LR_FRACTION)
    }

    /// Trains on `seqs`, returning pair count and summed loss.
    fn run(&self, seqs: &[Vec<u32>], rng: &mut SeededRng) -> WorkerStats {
        use std::sync::atomic::Ordering;

        let d = self.cfg.dim;
        // SAFETY: see `Hogwild`.
        let (input, output) = unsafe { (self.input.get(), self.output.get()) };
        let mut grad = vec![0.0f32; d];
        let mut kept = Vec::new();
        let mut stats = WorkerStats { pairs: 0, loss: 0.0 };
        let mut local = 0u64;
        let mut base = self.processed.load(Ordering::Relaxed);
        let mut lr = self.learning_rate(base);

        for seq in seqs {
            kept.clear();
            match &self.keep_prob {
                Some(keep) => kept.extend(seq.iter().copied().filter(|&t| rng.gen::<f64>() < keep[t as usize])),
                None => kept.extend_from_slice(seq),
            }
            for pos in 0..kept.len() {
                let span = if self.cfg.shrink_window {
                    rng.gen_range(1..=self.cfg.window)
                } else {
                    self.cfg.window
                };
                let center = kept[pos] as usize;
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(kept.len() - 1);
                for (ctx_pos, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = context as usize;
                    stats.loss += self.update_pair(input, output, center, context, lr, &mut grad, rng);
                    stats.pairs += 1;
                }
            }
            local += seq.len() as u64;
            if local >= PROGRESS_STRIDE {
                base = self.processed.fetch_add(local, Ordering::Relaxed) + local;
                local = 0;
                lr = self.learning_rate(base);
            }
        }
        self.processed.fetch_add(local, Ordering::Relaxed);
        stats
    }

    /// One SGD step on a positive pair and its sampled negatives; returns the
    /// pair loss.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn update_pair(
        &self,
        input: &mut [f32],
        output: &mut [f32],
        center: usize,
        context: usize,
        lr: f32,
        grad: &mut [f32],
        rng: &mut SeededRng,
    ) -> f64 {
        let d = self.cfg.dim;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0f64;
        let z = &mut input[center * d..(center + 1) * d];
        for k in 0..=self.cfg.negatives {
            let (target, label) = if k == 0 {
                (context, 1.0f32)
            } else {
                let t = self.vocab.noise_table().sample(rng);
                if t == context {
                    continue;
                }
                (t, 0.0f32)
            };
            let out = &mut output[target * d..(target + 1) * d];
            let s: f32 = z.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
            let s = s.clamp(-MAX_LOGIT as f32, MAX_LOGIT as f32);
            let sig = 1.0 / (1.0 + (-s).exp());
            let signed = if label > 0.5 { s as f64 } else { -(s as f64) };
            loss += super::sgns::neg_log_sigmoid(signed);
            let g = (label - sig) * lr;
            for ((gr, o), zi) in grad.iter_mut().zip(out.iter_mut()).zip(z.iter()) {
                *gr += g * *o;
                *o += g * zi;
            }
        }
        for (zi, gr) in z.iter_mut().zip(grad.iter()) {
            *zi += gr;
        }
        loss
    }
}

/// Input vectors start uniform in `[-0.5/d, 0.5/d]`; output vectors start at zero.
pub fn initial_parameters(vocab_len: usize, dim: usize, seed: u64) -> (Vec<f32>, Vec<f32>) {
    let mut rng = rng_from_seed(derive_seed(seed, &[u64::MAX]));
    let input = (0..vocab_len * dim)
        .map(|_| (rng.gen::<f32>() - 0.5) / dim as f32)
        .collect();
    (input, vec![0.0; vocab_len * dim])
}

/// Skip-gram with negative sampling over a walk corpus whose tokens are named
/// by `names`.
///
/// The learning rate decays linearly with tokens processed, from `lr_initial`
/// to `lr_initial * 1e-4`. With `workers == 1` the result is a pure function of
/// the corpus content and the config.
pub fn train(corpus: &WalkCorpus, names: &[String], cfg: &TrainConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    let vocab = build_vocab(corpus, names, cfg.min_count)?;
    let seqs = vocab.encode(corpus, names);
    train_encoded(&vocab, &seqs, cfg)
}

/// Trains on sequences already encoded as rows of `vocab`.
pub fn train_encoded(vocab: &Vocab, seqs: &[Vec<u32>], cfg: &TrainConfig) -> Result<TrainOutput> {
    use std::sync::atomic::AtomicU64;

    cfg.validate()?;
    let (input, output) = initial_parameters(vocab.len(), cfg.dim, cfg.seed);
    let tokens: u64 = seqs.iter().map(|s| s.len() as u64).sum();
    let keep_prob = cfg.subsample.map(|t| {
        let total: u64 = vocab.counts().iter().sum();
        vocab
            .counts()
            .iter()
            .map(|&c| {
                let f = c as f64 / total as f64;
                ((t / f).sqrt() + t / f).min(1.0)
            })
            .collect()
    });
    let shared = Shared {
        cfg,
        vocab,
        input: Hogwild(UnsafeCell::new(input)),
        output: Hogwild(UnsafeCell::new(output)),
        keep_prob,
        total_tokens: tokens * cfg.epochs as u64,
        processed: AtomicU64::new(0),
    };

    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let stats: Vec<WorkerStats> = if cfg.workers == 1 || seqs.len() < cfg.workers {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[epoch as u64, 0]));
            vec![shared.run(seqs, &mut rng)]
        } else {
            let chunk = seqs.len().div_ceil(cfg.workers);
            std::thread::scope(|scope| {
                let handles: Vec<_> = seqs
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, part)| {
                        let shared = &shared;
                        scope.spawn(move || {
                            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[epoch as u64, w as u64]));
                            shared.run(part, &mut rng)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
            })
        };
        let pairs: u64 = stats.iter().map(|s| s.pairs).sum();
        let loss: f64 = stats.iter().map(|s| s.loss).sum();
        let e = EpochStats {
            epoch: epoch + 1,
            pairs,
            mean_loss: if pairs > 0 { loss / pairs as f64 } else { 0.0 },
        };
        log::info!("{e}");
        epochs.push(e);
    }

    let Shared { input, output, .. } = shared;
    let mut embeddings = EmbeddingMatrix::from_rows(vocab.names().to_vec(), cfg.dim, input.into_inner())?;
    embeddings.output = output.into_inner();
    if embeddings.input.iter().any(|x| !x.is_finite()) {
        return Err(Error::Embedding("training diverged to non-finite values".into()));
    }
    Ok(TrainOutput { embeddings, epochs })
}

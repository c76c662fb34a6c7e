//! Distribution-wise evaluation of dialogue and text-generation systems.
//!
//! A system is scored by how far the distribution of its generated
//! query-response embeddings lies from the distribution of real
//! conversation embeddings:
//!
//! * [`frechet`]: the Fréchet distance between Gaussian fits (FBD).
//! * [`prd`]: precision and recall of distributions over a k-means
//!   histogram (PRD), summarized by the maximum F1 along the curve.
//!
//! Turn-level baselines (BLEU, ROUGE-L, word-vector similarities and a
//! greedy-matching BERTScore) live in [`baselines`]. The [`harness`] module
//! correlates system-level scores with human ratings and holds the
//! normality profile; [`study`] runs a whole evaluation from a JSON manifest. Embeddings, token archives, word vectors and ratings are
//! read and written by [`io`].
//!
//! Runnable examples, one per capability:
//!
//! | example | shows |
//! |---|---|
//! | `fbd_basics` | fitting Gaussians and computing FBD |
//! | `prd_curve` | a PRD curve and its max F1 |
//! | `baselines` | word-overlap and embedding baselines |
//! | `correlation_study` | a synthetic study end to end |
//! | `normality` | the Shapiro-Wilk profile of an embedding set |
//! | `embedding_files` | reading and writing every file format |
//!
//! ```no_run
//! use distmetric::{frechet, io};
//!
//! let real = io::read_embedding_set("real.npy")?;
//! let gen = io::read_embedding_set("gen.npy")?;
//! let fbd = frechet::fbd_from_sets(&real, &gen, &Default::default())?;
//! println!("{fbd:.6}");
//! # Ok::<(), distmetric::Error>(())
//! ```

pub mod baselines;
pub mod cli;
pub mod error;
pub mod frechet;
pub mod harness;
pub mod io;
pub mod metric;
pub mod prd;
pub mod seed;
pub mod study;

pub use error::{Error, Result};
pub use io::EmbeddingSet;
pub use metric::{Metric, Orientation};
pub use seed::Seed;

//! Every file format the library reads, written and read back.
//!
//! ```bash
//! cargo run --example embedding_files
//! ```

use std::fs;

use distmetric::io::{
    read_embedding_set, read_ratings, read_text_corpus, read_token_archive, read_word_vectors,
    write_embedding_set, write_embedding_set_with, write_token_archive, Precision,
    TokenEmbeddingArchive, TokenMatrix,
};
use distmetric::EmbeddingSet;

fn main() -> distmetric::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let path = |name: &str| dir.path().join(name);

    // npy: f32-exact values are stored as <f4, anything else as <f8.
    let set = EmbeddingSet::from_rows(&[[0.5, -1.0, 2.0], [0.25, 4.0, -8.0]])?;
    write_embedding_set(&set, path("pairs.npy"))?;
    let back = read_embedding_set(path("pairs.npy"))?;
    println!(
        "npy: {}x{}, bitwise equal: {}",
        back.len(),
        back.dim(),
        back.bitwise_eq(&set)
    );
    let precise = EmbeddingSet::from_rows(&[[0.1, 0.2]])?;
    write_embedding_set_with(&precise, path("precise.npy"), Precision::F64)?;
    println!(
        "npy size as <f8: {} bytes",
        fs::metadata(path("precise.npy")).unwrap().len()
    );

    // Token archive: a directory with index.json and a packed float32 blob.
    let archive = TokenEmbeddingArchive::new(
        2,
        vec![
            TokenMatrix::new(1, vec![1.0, 0.0, 0.0, 1.0], 2)?,
            TokenMatrix::new(2, vec![0.5, 0.5], 2)?,
        ],
    )?;
    write_token_archive(&archive, path("tokens"))?;
    let tokens = read_token_archive(path("tokens"))?;
    println!(
        "archive: {} sentences, line 1 has {} tokens",
        tokens.len(),
        tokens.line(1).unwrap().len()
    );

    // Word vectors: "token v1 ... vD" lines with an optional "count dim" header.
    fs::write(
        path("vectors.txt"),
        "2 3\nhello 0.1 0.2 0.3\nworld 0.4 0.5 0.6\n",
    )
    .unwrap();
    let vectors = read_word_vectors(path("vectors.txt"))?;
    println!(
        "word vectors: {} words of dim {}",
        vectors.len(),
        vectors.dim()
    );

    // Ratings: system_id,sample_id,aspect,score.
    fs::write(
        path("ratings.csv"),
        "system_id,sample_id,aspect,score\nA,1,overall,4\nA,2,overall,5\nB,1,overall,2\n",
    )
    .unwrap();
    let ratings = read_ratings(path("ratings.csv"))?;
    println!("ratings: {:?}", ratings.system_means("overall"));

    // Line-aligned hypothesis/reference text.
    fs::write(path("hyp.txt"), "hi there\nhow are you\n").unwrap();
    fs::write(path("ref.txt"), "hello there\nhow are you doing\n").unwrap();
    let (hyp, refs) = read_text_corpus(path("hyp.txt"), path("ref.txt"))?;
    println!("corpus: {} turns, first reference {:?}", hyp.len(), refs[0]);

    // Readers reject malformed input with a typed error.
    fs::write(path("broken.npy"), b"\x93NUMPY\x01\x00garbage").unwrap();
    if let Err(e) = read_embedding_set(path("broken.npy")) {
        println!("broken.npy: {e} (exit code {})", e.exit_code());
    }
    Ok(())
}

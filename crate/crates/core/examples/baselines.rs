//! Turn-level baselines: word overlap, static word vectors and BERTScore.
//!
//! ```bash
//! cargo run --example baselines
//! ```

use distmetric::baselines::{
    bertscore, bleu, embedding_average, greedy_matching, rouge_l, tokenize, turn_pairs,
    vector_extrema, TurnPair,
};
use distmetric::io::{TokenMatrix, WordVectorTable};

fn main() -> distmetric::Result<()> {
    println!("tokens: {:?}", tokenize("Hello, World!  (it's fine)"));

    let hypotheses = vec![
        "i am fine thanks".to_string(),
        "see you tomorrow".to_string(),
    ];
    let references = vec![
        "i am fine thank you".to_string(),
        "see you later".to_string(),
    ];
    let pairs = turn_pairs(&hypotheses, &references)?;
    println!("corpus BLEU-4: {:.4}", bleu(&pairs, 4)?);
    println!("corpus BLEU-2: {:.4}", bleu(&pairs, 2)?);
    for p in &pairs {
        println!(
            "ROUGE-L {:?} vs {:?}: {:.4}",
            p.hypothesis(),
            p.reference(),
            rouge_l(p)
        );
    }

    let mut vectors = WordVectorTable::new(3);
    for (word, v) in [
        ("i", [0.1, 0.0, 0.2]),
        ("am", [0.0, 0.3, 0.1]),
        ("fine", [0.9, 0.1, 0.0]),
        ("thanks", [0.2, 0.8, 0.1]),
        ("thank", [0.3, 0.7, 0.0]),
        ("you", [0.0, 0.2, 0.9]),
    ] {
        vectors.insert(word, v.to_vec())?;
    }
    let first = &pairs[0];
    println!("average {:.4}", embedding_average(first, &vectors)?);
    println!("extrema {:.4}", vector_extrema(first, &vectors)?);
    println!("greedy  {:.4}", greedy_matching(first, &vectors)?);
    // No token of either side is in the vocabulary.
    let unknown = TurnPair::from_text("good morning", "hello there")?;
    if let Err(e) = embedding_average(&unknown, &vectors) {
        println!("out of vocabulary: {e} (exit code {})", e.exit_code());
    }

    let hyp = TokenMatrix::new(1, vec![1.0, 0.0, 0.0, 1.0], 2)?;
    let refs = TokenMatrix::new(1, vec![1.0, 0.0, 1.0, 1.0, 0.0, -1.0], 2)?;
    let s = bertscore(&hyp, &refs)?;
    println!(
        "bertscore P {:.4} R {:.4} F1 {:.4}",
        s.precision, s.recall, s.f1
    );
    Ok(())
}

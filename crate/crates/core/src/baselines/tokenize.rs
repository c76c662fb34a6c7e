/// Lowercases, splits on Unicode whitespace and strips leading/trailing
/// non-alphanumeric characters from each token. Tokens that are pure
/// punctuation disappear.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

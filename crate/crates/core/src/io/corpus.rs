use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Reads a UTF-8 text file as one entry per line, keeping empty lines so
/// line-aligned files stay aligned.
pub fn read_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Reads line-aligned hypothesis and reference files.
pub fn read_text_corpus(
    hypotheses: impl AsRef<Path>,
    references: impl AsRef<Path>,
) -> Result<(Vec<String>, Vec<String>)> {
    let hyp = read_lines(hypotheses)?;
    let refs = read_lines(references)?;
    if hyp.len() != refs.len() {
        return Err(Error::data(format!(
            "hypothesis file has {} lines, reference file has {}",
            hyp.len(),
            refs.len()
        )));
    }
    if hyp.is_empty() {
        return Err(Error::data("text corpus is empty"));
    }
    Ok((hyp, refs))
}

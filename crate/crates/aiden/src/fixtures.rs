//! Canned answers standing in for the vision-language model.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;

pub const VQA_PROMPT: &str = "What is this? Provide the answer as summarized as possible.";
pub const OCR_PROMPT: &str = "Transcribe the text present in this image.";

/// Fixture key to answer text. Unknown keys are errors, never invented answers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixtureStore {
    texts: BTreeMap<String, String>,
}

impl FixtureStore {
    pub fn new(texts: BTreeMap<String, String>) -> Self {
        Self { texts }
    }

    /// OCR transcriptions and a scene answer of the kind the app returned in the field.
    pub fn builtin() -> Self {
        let pairs = [
            ("street_sign", "CARRER DE L'ARTISTA FOGUERER."),
            ("beans", "Legumbres PEDRO ALUBIAS beans."),
            ("medicine", "...Nolotil 575 mg capsulas duras Metamizol..."),
            ("softener", "A se vi Suavizante Azul pres ccr intense."),
            ("office", "An office with a desk, a chair and a computer."),
            ("blank", ""),
        ];
        Self::new(pairs.into_iter().map(|(k, v)| (k.to_owned(), v.to_owned())).collect())
    }

    /// Reads a JSON object mapping keys to texts.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading fixtures {}", path.display()))?;
        Self::from_json(&raw).with_context(|| format!("parsing fixtures {}", path.display()))
    }

    pub fn from_json(raw: &str) -> anyhow::Result<Self> {
        Ok(Self::new(serde_json::from_str(raw)?))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.texts.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.texts.keys().map(String::as_str)
    }
}

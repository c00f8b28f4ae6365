use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "been", "but", "by", "for", "from", "had", "has",
    "have", "he", "her", "his", "i", "if", "in", "into", "is", "it", "its", "of", "on", "or",
    "our", "she", "so", "that", "the", "their", "them", "there", "they", "this", "to", "was",
    "we", "were", "which", "will", "with", "you", "your",
];

/// Text normalization switches, applied in field order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreprocessConfig {
    pub remove_urls: bool,
    pub strip_punctuation: bool,
    pub lowercase: bool,
    /// Empty disables stop-word removal.
    pub stopwords: BTreeSet<String>,
    pub stem: bool,
    /// Tokens in fewer TRAIN documents than this are dropped when a
    /// feature space is fitted.
    pub min_df: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            remove_urls: true,
            strip_punctuation: true,
            lowercase: true,
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
            stem: true,
            min_df: 2,
        }
    }
}

impl PreprocessConfig {
    /// Every per-document step off; `min_df` 1.
    pub fn raw() -> Self {
        PreprocessConfig {
            remove_urls: false,
            strip_punctuation: false,
            lowercase: false,
            stopwords: BTreeSet::new(),
            stem: false,
            min_df: 1,
        }
    }
}

/// Tokenizes one document. Document-frequency filtering happens later, when
/// the vocabulary is fitted on TRAIN.
pub fn preprocess(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let mut tokens: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        if config.remove_urls && (is_url(raw) || is_ip(raw)) {
            continue;
        }
        if config.strip_punctuation {
            tokens.extend(
                raw.split(|c: char| !c.is_alphanumeric())
                    .filter(|t| !t.is_empty())
                    .map(str::to_string),
            );
        } else {
            tokens.push(raw.to_string());
        }
    }
    if config.lowercase {
        for t in tokens.iter_mut() {
            *t = t.to_lowercase();
        }
    }
    if !config.stopwords.is_empty() {
        tokens.retain(|t| !config.stopwords.contains(t));
    }
    if config.stem {
        for t in tokens.iter_mut() {
            *t = stem(t);
        }
    }
    tokens
}

fn is_url(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.starts_with("http://")
        || lower.starts_with("https://")
        || lower.starts_with("www.")
        || lower.contains("://")
}

fn is_ip(token: &str) -> bool {
    let t = token.trim_matches(|c: char| !c.is_ascii_digit());
    let t = t.split_once(':').map_or(t, |(host, _)| host);
    let parts: Vec<&str> = t.split('.').collect();
    parts.len() == 4
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.len() <= 3 && p.parse::<u16>().is_ok_and(|v| v <= 255))
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

/// Light suffix stripping: plural forms, then `-ed` / `-ing` when the
/// remaining stem still has a vowel.
pub fn stem(word: &str) -> String {
    if word.chars().count() <= 3 || !word.is_ascii() {
        return word.to_string();
    }
    let mut w = word.to_string();
    if let Some(s) = w.strip_suffix("sses") {
        w = alloc::format!("{s}ss");
    } else if let Some(s) = w.strip_suffix("ies") {
        w = alloc::format!("{s}i");
    } else if !w.ends_with("ss") && !w.ends_with("us") && w.ends_with('s') {
        w.pop();
    }
    for suffix in ["ing", "ed"] {
        if let Some(s) = w.strip_suffix(suffix) {
            if s.len() >= 2 && has_vowel(s) {
                w = s.to_string();
                if w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz") {
                    w.push('e');
                } else {
                    let b = w.as_bytes();
                    let n = b.len();
                    if n >= 2
                        && b[n - 1] == b[n - 2]
                        && !matches!(b[n - 1], b'a' | b'e' | b'i' | b'o' | b'u' | b'l' | b's' | b'z')
                    {
                        w.pop();
                    }
                }
            }
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn url_punctuation_and_case() {
        let mut cfg = PreprocessConfig {
            stem: false,
            ..Default::default()
        };
        assert_eq!(preprocess("Visit http://x.co NOW!!", &cfg), vec!["visit", "now"]);
        cfg.stem = true;
        assert_eq!(preprocess("Visit http://x.co NOW!!", &cfg), vec!["visit", "now"]);
    }

    #[test]
    fn empty_input() {
        assert!(preprocess("", &PreprocessConfig::default()).is_empty());
    }

    #[test]
    fn stopwords_after_case_folding() {
        let mut cfg = PreprocessConfig::raw();
        cfg.lowercase = true;
        cfg.stopwords = ["the".to_string()].into_iter().collect();
        assert!(preprocess("The the THE", &cfg).is_empty());
    }

    #[test]
    fn ip_addresses_are_removed() {
        let cfg = PreprocessConfig::default();
        assert_eq!(preprocess("server 10.0.0.1 down, 192.168.1.254:80", &cfg), vec!["server", "down"]);
        assert_eq!(preprocess("version 1.2.3", &cfg), vec!["version", "1", "2", "3"]);
    }

    #[test]
    fn raw_config_keeps_everything() {
        assert_eq!(preprocess("The cat, sat.", &PreprocessConfig::raw()), vec!["The", "cat,", "sat."]);
    }

    #[test]
    fn stemming_examples() {
        assert_eq!(stem("caresses"), "caress");
        assert_eq!(stem("ponies"), "poni");
        assert_eq!(stem("cats"), "cat");
        assert_eq!(stem("virus"), "virus");
        assert_eq!(stem("hoping"), "hop");
        assert_eq!(stem("hopping"), "hop");
        assert_eq!(stem("conflated"), "conflate");
        assert_eq!(stem("sing"), "sing");
        assert_eq!(stem("news"), "new");
    }
}

use std::collections::HashSet;

/// Rule-based sentence splitter.
///
/// Splits after `.`, `!` or `?` runs (plus any closing quotes) when followed
/// by whitespace and an uppercase opener. A bundled abbreviation list
/// ("Dr.", "e.g.", ...) and single-letter initials suppress false splits.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl SentenceSplitter {
    /// Builds a splitter from abbreviation-list file content, one
    /// abbreviation per line (trailing period included).
    pub fn from_content(content: &str) -> Self {
        let abbreviations = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        SentenceSplitter { abbreviations }
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut sentences = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if !matches!(c, '.' | '!' | '?') {
                i += 1;
                continue;
            }
            let terminator_start = i;
            while i < chars.len() && matches!(chars[i].1, '.' | '!' | '?') {
                i += 1;
            }
            // closing quotes and brackets belong to the current sentence
            while i < chars.len() && matches!(chars[i].1, '\'' | '"' | ')' | ']') {
                i += 1;
            }
            let single_period = i - terminator_start == 1 && c == '.';
            if single_period && self.is_abbreviation(text, pos) {
                continue;
            }
            let mut j = i;
            let mut saw_ws = false;
            while j < chars.len() && chars[j].1.is_whitespace() {
                saw_ws = true;
                j += 1;
            }
            if !saw_ws && j < chars.len() {
                continue;
            }
            // skip opening quotes before checking the opener
            let mut k = j;
            while k < chars.len() && matches!(chars[k].1, '\'' | '"' | '(' | '[') {
                k += 1;
            }
            let opener_ok = k >= chars.len()
                || chars[k].1.is_uppercase()
                || chars[k].1.is_ascii_digit();
            if !opener_ok {
                continue;
            }
            let end = if i < chars.len() { chars[i].0 } else { text.len() };
            let sentence = text[start..end].trim();
            if !sentence.is_empty() {
                sentences.push(sentence.to_string());
            }
            start = end;
        }
        let tail = text[start..].trim();
        if !tail.is_empty() {
            sentences.push(tail.to_string());
        }
        sentences
    }

    fn is_abbreviation(&self, text: &str, period_pos: usize) -> bool {
        let before = &text[..period_pos];
        let word_start = before
            .rfind(|c: char| !(c.is_alphabetic() || c == '.'))
            .map(|p| p + before[p..].chars().next().unwrap().len_utf8())
            .unwrap_or(0);
        let word = &before[word_start..];
        if word.is_empty() {
            return false;
        }
        if word.chars().count() == 1 && word.chars().all(|c| c.is_alphabetic()) {
            return true; // initials like "J. Smith"
        }
        let candidate = format!("{}.", word.to_lowercase());
        self.abbreviations.contains(&candidate)
    }
}

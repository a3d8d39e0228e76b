//! Porter stemming algorithm (1980), as published.

/// Stems a lowercase alphabetic word.
pub fn porter_stem(word: &str) -> String {
    let w: Vec<u8> = word.to_lowercase().bytes().collect();
    if w.len() <= 2 {
        return String::from_utf8(w).unwrap();
    }
    let w = step1a(w);
    let w = step1b(w);
    let w = step1c(w);
    let w = step2(w);
    let w = step3(w);
    let w = step4(w);
    let w = step5a(w);
    let w = step5b(w);
    String::from_utf8(w).unwrap()
}

fn is_consonant(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_consonant(w, i - 1),
        _ => true,
    }
}

/// Number of VC sequences in the [C](VC){m}[V] decomposition.
fn measure(w: &[u8]) -> usize {
    let mut m = 0;
    let mut i = 0;
    while i < w.len() && is_consonant(w, i) {
        i += 1;
    }
    while i < w.len() {
        while i < w.len() && !is_consonant(w, i) {
            i += 1;
        }
        if i < w.len() {
            m += 1;
            while i < w.len() && is_consonant(w, i) {
                i += 1;
            }
        }
    }
    m
}

fn contains_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[u8]) -> bool {
    w.len() >= 2 && w[w.len() - 1] == w[w.len() - 2] && is_consonant(w, w.len() - 1)
}

/// *o condition: stem ends cvc and the final consonant is not w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

fn strip(w: &[u8], suffix: &str) -> Option<Vec<u8>> {
    w.strip_suffix(suffix.as_bytes()).map(<[u8]>::to_vec)
}

fn step1a(w: Vec<u8>) -> Vec<u8> {
    if let Some(s) = strip(&w, "sses") {
        return [s, b"ss".to_vec()].concat();
    }
    if let Some(s) = strip(&w, "ies") {
        return [s, b"i".to_vec()].concat();
    }
    if w.ends_with(b"ss") {
        return w;
    }
    if let Some(s) = strip(&w, "s") {
        return s;
    }
    w
}

fn step1b(w: Vec<u8>) -> Vec<u8> {
    if let Some(s) = strip(&w, "eed") {
        if measure(&s) > 0 {
            return [s, b"ee".to_vec()].concat();
        }
        return w;
    }
    let stripped = match (strip(&w, "ed"), strip(&w, "ing")) {
        (Some(s), _) if contains_vowel(&s) => Some(s),
        (_, Some(s)) if contains_vowel(&s) => Some(s),
        _ => None,
    };
    let Some(mut s) = stripped else { return w };
    if s.ends_with(b"at") || s.ends_with(b"bl") || s.ends_with(b"iz") {
        s.push(b'e');
    } else if ends_double_consonant(&s) && !matches!(s[s.len() - 1], b'l' | b's' | b'z') {
        s.pop();
    } else if measure(&s) == 1 && ends_cvc(&s) {
        s.push(b'e');
    }
    s
}

fn step1c(mut w: Vec<u8>) -> Vec<u8> {
    if w.ends_with(b"y") && contains_vowel(&w[..w.len() - 1]) {
        let n = w.len();
        w[n - 1] = b'i';
    }
    w
}

const STEP2: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("tional", "tion"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("izer", "ize"),
    ("abli", "able"),
    ("alli", "al"),
    ("entli", "ent"),
    ("eli", "e"),
    ("ousli", "ous"),
    ("ization", "ize"),
    ("ation", "ate"),
    ("ator", "ate"),
    ("alism", "al"),
    ("iveness", "ive"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("aliti", "al"),
    ("iviti", "ive"),
    ("biliti", "ble"),
];

const STEP3: &[(&str, &str)] = &[
    ("icate", "ic"),
    ("ative", ""),
    ("alize", "al"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
];

fn rewrite(w: Vec<u8>, rules: &[(&str, &str)]) -> Vec<u8> {
    for (suffix, replacement) in rules {
        if let Some(s) = strip(&w, suffix) {
            if measure(&s) > 0 {
                return [s, replacement.as_bytes().to_vec()].concat();
            }
            return w;
        }
    }
    w
}

fn step2(w: Vec<u8>) -> Vec<u8> {
    rewrite(w, STEP2)
}

fn step3(w: Vec<u8>) -> Vec<u8> {
    rewrite(w, STEP3)
}

const STEP4: &[&str] = &[
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ion", "ou",
    "ism", "ate", "iti", "ous", "ive", "ize",
];

fn step4(w: Vec<u8>) -> Vec<u8> {
    for suffix in STEP4 {
        if let Some(s) = strip(&w, suffix) {
            if *suffix == "ion" && !(s.ends_with(b"s") || s.ends_with(b"t")) {
                return w;
            }
            if measure(&s) > 1 {
                return s;
            }
            return w;
        }
    }
    w
}

fn step5a(w: Vec<u8>) -> Vec<u8> {
    if let Some(s) = strip(&w, "e") {
        let m = measure(&s);
        if m > 1 || (m == 1 && !ends_cvc(&s)) {
            return s;
        }
    }
    w
}

fn step5b(mut w: Vec<u8>) -> Vec<u8> {
    if measure(&w) > 1 && ends_double_consonant(&w) && w.ends_with(b"l") {
        w.pop();
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(porter_stem("running"), "run");
        assert_eq!(porter_stem("caresses"), "caress");
        assert_eq!(porter_stem("sky"), "sky");
    }

    #[test]
    fn frozen_reference_pairs() {
        let fixture = include_str!("../../tests/fixtures/porter_pairs.tsv");
        for line in fixture.lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (word, stem) = line.split_once('\t').unwrap();
            assert_eq!(porter_stem(word), stem, "word {word:?}");
        }
    }

    #[test]
    fn idempotent_over_reference_vocabulary() {
        let vocabulary = include_str!("../../tests/fixtures/porter_vocab.txt");
        for word in vocabulary.lines() {
            if word.starts_with('#') || word.trim().is_empty() {
                continue;
            }
            let once = porter_stem(word);
            assert_eq!(porter_stem(&once), once, "word {word:?} stem {once:?}");
        }
    }

    #[test]
    fn known_non_fixed_points() {
        // the algorithm is a single-pass normalizer, not idempotent in
        // general; pin the canonical counterexample
        assert_eq!(porter_stem("horse"), "hors");
        assert_eq!(porter_stem("hors"), "hor");
    }

    #[test]
    fn short_words_untouched() {
        assert_eq!(porter_stem("at"), "at");
        assert_eq!(porter_stem("be"), "be");
    }
}

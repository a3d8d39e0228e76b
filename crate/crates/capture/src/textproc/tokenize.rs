use super::Token;

/// Splits a sentence into word and punctuation tokens.
///
/// Hyphenated compounds ("well-lit") stay whole, decimal points stay inside
/// numbers, and clitics ("'s") come off as their own token. Tokens are
/// ordered by span and spans never overlap.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let bytes = sentence.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = sentence[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_alphanumeric() {
            let end = scan_word(sentence, i);
            tokens.push(Token::new(&sentence[i..end], i, end));
            i = end;
        } else if c == '\'' {
            // clitic: apostrophe plus trailing letters ("'s", "'ve")
            let mut end = i + 1;
            while end < bytes.len() {
                let n = sentence[end..].chars().next().unwrap();
                if n.is_alphabetic() {
                    end += n.len_utf8();
                } else {
                    break;
                }
            }
            tokens.push(Token::new(&sentence[i..end], i, end));
            i = end;
        } else {
            let end = i + c.len_utf8();
            tokens.push(Token::new(&sentence[i..end], i, end));
            i = end;
        }
    }
    tokens
}

fn scan_word(text: &str, start: usize) -> usize {
    let mut end = start;
    let mut chars = text[start..].char_indices().peekable();
    while let Some((off, c)) = chars.next() {
        let at = start + off;
        if c.is_alphanumeric() {
            end = at + c.len_utf8();
            continue;
        }
        let prev_digit = text[..at].chars().next_back().is_some_and(|p| p.is_ascii_digit());
        let next = chars.peek().map(|&(_, n)| n);
        match c {
            // keep hyphen when both neighbours are word characters
            '-' if end == at && next.is_some_and(|n| n.is_alphanumeric()) => {}
            // keep decimal point inside digit runs
            '.' if prev_digit && next.is_some_and(|n| n.is_ascii_digit()) => {}
            _ => break,
        }
    }
    end
}

/// Reassembles tokens into a single space-separated string.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

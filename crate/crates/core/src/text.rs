//! Tweet text normalization.

use alloc::string::String;
use alloc::vec::Vec;

/// Placeholder that replaces every account mention.
pub const MENTION_PLACEHOLDER: &str = "@user";

/// Which normalization steps to run. Steps always run in field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct NormalizeOptions {
    pub strip_urls: bool,
    pub replace_mentions: bool,
    pub strip_hashtag_marks: bool,
    pub lowercase: bool,
    pub strip_punct_nonascii: bool,
}

impl NormalizeOptions {
    pub const ALL: Self = Self {
        strip_urls: true,
        replace_mentions: true,
        strip_hashtag_marks: true,
        lowercase: true,
        strip_punct_nonascii: true,
    };

    pub const NONE: Self = Self {
        strip_urls: false,
        replace_mentions: false,
        strip_hashtag_marks: false,
        lowercase: false,
        strip_punct_nonascii: false,
    };

    pub const fn lowercase_only() -> Self {
        Self {
            lowercase: true,
            ..Self::NONE
        }
    }
}

/// Normalizes tweet text.
///
/// Whitespace runs are always collapsed to one space and the result is
/// trimmed. The function is idempotent for every option set.
pub fn normalize_text(text: &str, options: NormalizeOptions) -> String {
    let mut out: String = text.into();
    if options.strip_urls {
        out = strip_urls(&out);
    }
    if options.replace_mentions {
        out = replace_mentions(&out);
    }
    if options.strip_hashtag_marks {
        out = strip_hashtag_marks(&out);
    }
    if options.lowercase {
        out = out.to_lowercase();
    }
    if options.strip_punct_nonascii {
        out = strip_punct_nonascii(&out);
    }
    collapse_whitespace(&out)
}

fn is_ascii_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_url_token(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    if lower.contains("http://") || lower.contains("https://") {
        return true;
    }
    lower
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .starts_with("www.")
}

fn strip_urls(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        let ws_end = rest
            .find(|c: char| !c.is_whitespace())
            .unwrap_or(rest.len());
        out.push_str(&rest[..ws_end]);
        rest = &rest[ws_end..];
        let tok_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let token = &rest[..tok_end];
        if !is_url_token(token) {
            out.push_str(token);
        }
        rest = &rest[tok_end..];
    }
    out
}

fn replace_mentions(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let starts_mention = c == '@'
            && (i == 0 || !is_ascii_word(chars[i - 1]))
            && chars.get(i + 1).is_some_and(|&n| is_word(n));
        if starts_mention {
            let mut j = i + 1;
            while j < chars.len() && is_word(chars[j]) {
                j += 1;
            }
            out.push_str(MENTION_PLACEHOLDER);
            i = j;
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

fn strip_hashtag_marks(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '#' {
            let mut j = i;
            while j < chars.len() && chars[j] == '#' {
                j += 1;
            }
            // only a tag mark at a word start: not after '@' or inside a word
            let at_word_start = i == 0 || !(chars[i - 1] == '@' || is_word(chars[i - 1]) || !chars[i - 1].is_ascii());
            let before_word = chars.get(j).is_some_and(|&n| is_word(n));
            if before_word && at_word_start {
                i = j;
                continue;
            }
            for _ in i..j {
                out.push('#');
            }
            i = j;
            continue;
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

// '@' survives only as the start of the mention placeholder. Dropping an
// '@' can glue a word onto a preceding placeholder, so repeat until stable.
fn strip_punct_nonascii(text: &str) -> String {
    let mut kept: Vec<char> = text
        .chars()
        .filter(|&c| c.is_ascii() && (c == '@' || !c.is_ascii_punctuation()))
        .collect();
    loop {
        let before = kept.len();
        let mut next = Vec::with_capacity(kept.len());
        for (i, &c) in kept.iter().enumerate() {
            if c == '@' {
                let tail = &kept[i + 1..];
                let is_placeholder = tail.len() >= 4
                    && tail[..4] == ['u', 's', 'e', 'r']
                    && tail.get(4).is_none_or(|&n| !is_ascii_word(n));
                if !is_placeholder {
                    continue;
                }
            }
            next.push(c);
        }
        kept = next;
        if kept.len() == before {
            return kept.into_iter().collect();
        }
    }
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Splits normalized text into word tokens (runs of alphanumerics, `_`, `@`).
pub fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '@'))
        .filter(|t| !t.is_empty())
}

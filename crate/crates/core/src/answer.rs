//! Answer formats, extraction prompts, parsing, and normalization.
//!
//! Free-form model output is reduced to a small canonical answer value in two
//! steps. First an *extraction* request re-asks the model for just the answer
//! ("Q: …\nA: …\nTherefore, the answer (arabic numerals) is"); then the reply
//! is parsed with a per-format scanner. When the extraction reply does not
//! parse, the scanner falls back to the original raw answer; only if both
//! fail is the question counted as a parse failure. All comparisons happen on
//! canonical strings — numeric answers are never compared as floats.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// The shape of answer a dataset expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnswerFormat {
    /// A plain number, e.g. arithmetic word problems.
    #[serde(rename = "arabic_number")]
    ArabicNumber,
    /// A multiple-choice letter in `A..=E`.
    #[serde(rename = "option_ae")]
    OptionAE,
    /// A multiple-choice letter in `A..=C`.
    #[serde(rename = "option_ac")]
    OptionAC,
    /// A multiple-choice letter in `A..=F`.
    #[serde(rename = "option_af")]
    OptionAF,
    /// A yes/no judgement.
    #[serde(rename = "yes_no")]
    YesNo,
    /// A short free-text token, e.g. a concatenation of letters.
    #[serde(rename = "free_string")]
    FreeString,
}

/// Extraction trigger for [`AnswerFormat::ArabicNumber`].
pub const ARABIC_NUMBER_TRIGGER: &str = "Therefore, the answer (arabic numerals) is";
/// Extraction trigger for [`AnswerFormat::OptionAE`].
pub const OPTION_AE_TRIGGER: &str = "Therefore, among A through E, the answer is";
/// Extraction trigger for [`AnswerFormat::OptionAC`].
pub const OPTION_AC_TRIGGER: &str = "Therefore, among A through C, the answer is";
/// Extraction trigger for [`AnswerFormat::OptionAF`].
pub const OPTION_AF_TRIGGER: &str = "Therefore, among A through F, the answer is";
/// Extraction trigger for [`AnswerFormat::YesNo`].
pub const YES_NO_TRIGGER: &str = "Therefore, the answer (Yes or No) is";
/// Extraction trigger for [`AnswerFormat::FreeString`].
pub const FREE_STRING_TRIGGER: &str = "Therefore, the final answer is";

impl AnswerFormat {
    /// All formats, in a stable order (useful for CLI listings).
    pub const ALL: [AnswerFormat; 6] = [
        AnswerFormat::ArabicNumber,
        AnswerFormat::OptionAE,
        AnswerFormat::OptionAC,
        AnswerFormat::OptionAF,
        AnswerFormat::YesNo,
        AnswerFormat::FreeString,
    ];

    /// Stable identifier, matching the serde names used in data files.
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerFormat::ArabicNumber => "arabic_number",
            AnswerFormat::OptionAE => "option_ae",
            AnswerFormat::OptionAC => "option_ac",
            AnswerFormat::OptionAF => "option_af",
            AnswerFormat::YesNo => "yes_no",
            AnswerFormat::FreeString => "free_string",
        }
    }

    /// The default trigger sentence appended to extraction prompts.
    pub fn default_trigger(self) -> &'static str {
        match self {
            AnswerFormat::ArabicNumber => ARABIC_NUMBER_TRIGGER,
            AnswerFormat::OptionAE => OPTION_AE_TRIGGER,
            AnswerFormat::OptionAC => OPTION_AC_TRIGGER,
            AnswerFormat::OptionAF => OPTION_AF_TRIGGER,
            AnswerFormat::YesNo => YES_NO_TRIGGER,
            AnswerFormat::FreeString => FREE_STRING_TRIGGER,
        }
    }

    /// Highest admissible letter for option formats, `None` otherwise.
    pub fn option_max(self) -> Option<char> {
        match self {
            AnswerFormat::OptionAE => Some('E'),
            AnswerFormat::OptionAC => Some('C'),
            AnswerFormat::OptionAF => Some('F'),
            _ => None,
        }
    }
}

impl fmt::Display for AnswerFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for an unrecognized format name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFormat {
    pub name: String,
}

impl fmt::Display for UnknownFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown answer format {:?} (expected one of arabic_number, option_ae, option_ac, option_af, yes_no, free_string)",
            self.name
        )
    }
}

impl core::error::Error for UnknownFormat {}

impl FromStr for AnswerFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnswerFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownFormat { name: s.to_owned() })
    }
}

/// A parsed answer in canonical form.
///
/// Two answers are equal iff their formats and canonical values are equal;
/// `405`, `405.00`, and ` 405 ` in model output all normalize to the value
/// `"405"`, so equality on this type is the whole scoring rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizedAnswer {
    pub format: AnswerFormat,
    pub value: String,
}

impl NormalizedAnswer {
    /// Whether `value` is in the canonical grammar for `format`.
    pub fn is_canonical(&self) -> bool {
        match self.format {
            AnswerFormat::ArabicNumber => is_canonical_number(&self.value),
            AnswerFormat::OptionAE | AnswerFormat::OptionAC | AnswerFormat::OptionAF => {
                let max = self.format.option_max().expect("option format");
                let mut chars = self.value.chars();
                matches!((chars.next(), chars.next()), (Some(c), None) if ('A'..=max).contains(&c))
            }
            AnswerFormat::YesNo => self.value == "yes" || self.value == "no",
            AnswerFormat::FreeString => {
                !self.value.is_empty()
                    && !self.value.chars().any(|c| c.is_ascii_uppercase())
                    && trim_clutter(&self.value) == self.value
            }
        }
    }

    /// Whether parsing the canonical value reproduces this answer exactly.
    /// Gold labels are required to satisfy this "closed under parsing" check.
    pub fn round_trips(&self) -> bool {
        parse_answer(&self.value, self.format).as_ref() == Some(self)
    }
}

impl fmt::Display for NormalizedAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

/// Build the message body of an extraction request.
///
/// The raw answer is quoted back to the model together with the original
/// question and the format's trigger sentence; the model's (short) reply is
/// then parsed by [`parse_answer`].
pub fn build_extraction_message(question_text: &str, raw_answer: &str, trigger: &str) -> String {
    let mut out = String::with_capacity(question_text.len() + raw_answer.len() + trigger.len() + 7);
    out.push_str("Q: ");
    out.push_str(question_text);
    out.push_str("\nA: ");
    out.push_str(raw_answer);
    out.push('\n');
    out.push_str(trigger);
    out
}

/// Scan `text` for the first answer admissible under `format`.
///
/// Returns the canonical form, or `None` when nothing admissible occurs.
pub fn parse_answer(text: &str, format: AnswerFormat) -> Option<NormalizedAnswer> {
    let value = match format {
        AnswerFormat::ArabicNumber => scan_first_number(text)?,
        AnswerFormat::OptionAE | AnswerFormat::OptionAC | AnswerFormat::OptionAF => {
            let max = format.option_max().expect("option format");
            scan_first_option(text, max)?.to_string()
        }
        AnswerFormat::YesNo => scan_first_yes_no(text)?.to_owned(),
        AnswerFormat::FreeString => parse_free_string(text, FREE_STRING_TRIGGER)?,
    };
    Some(NormalizedAnswer { format, value })
}

/// Why a gold label could not be normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldError {
    pub format: AnswerFormat,
    pub raw: String,
}

impl fmt::Display for GoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gold label {:?} is not a valid {} answer",
            self.raw, self.format
        )
    }
}

impl core::error::Error for GoldError {}

/// Normalize a gold label into canonical form.
///
/// This is stricter than [`parse_answer`] in intent — a gold label that does
/// not normalize is a dataset error, not a model failure — but a little more
/// lenient in vocabulary: yes/no golds may be spelled `true`/`false`, as some
/// source datasets do.
pub fn normalize_gold(raw: &str, format: AnswerFormat) -> Result<NormalizedAnswer, GoldError> {
    let trimmed = raw.trim();
    if format == AnswerFormat::YesNo {
        if trimmed.eq_ignore_ascii_case("true") {
            return Ok(NormalizedAnswer {
                format,
                value: "yes".to_owned(),
            });
        }
        if trimmed.eq_ignore_ascii_case("false") {
            return Ok(NormalizedAnswer {
                format,
                value: "no".to_owned(),
            });
        }
    }
    parse_answer(trimmed, format).ok_or_else(|| GoldError {
        format,
        raw: raw.to_owned(),
    })
}

/// How a final parsed answer was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsePath {
    /// Parsed from the extraction reply.
    FromExtraction,
    /// Extraction reply did not parse; parsed from the raw answer instead.
    FallbackFromRaw,
    /// Neither text contained an admissible answer.
    Failed,
}

/// The result of running extraction + parsing for one answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionOutcome {
    /// The model's full answer to the reasoning request.
    pub raw_answer: String,
    /// The model's reply to the extraction request.
    pub extraction_text: String,
    /// Canonical answer, absent iff `parse_path` is `Failed`.
    pub parsed: Option<NormalizedAnswer>,
    pub parse_path: ParsePath,
}

impl ExtractionOutcome {
    /// Parse the extraction reply, falling back to the raw answer.
    pub fn resolve(raw_answer: String, extraction_text: String, format: AnswerFormat) -> Self {
        let (parsed, parse_path) = match parse_answer(&extraction_text, format) {
            Some(answer) => (Some(answer), ParsePath::FromExtraction),
            None => match parse_answer(&raw_answer, format) {
                Some(answer) => (Some(answer), ParsePath::FallbackFromRaw),
                None => (None, ParsePath::Failed),
            },
        };
        ExtractionOutcome {
            raw_answer,
            extraction_text,
            parsed,
            parse_path,
        }
    }
}

// --- scanners -------------------------------------------------------------

/// Whether `s` is a canonical number: optional `-`, integer digits without a
/// leading zero (unless the integer part is exactly `0`), optional fraction
/// without trailing zeros, and no `-0`.
fn is_canonical_number(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    if int_part.len() > 1 && int_part.starts_with('0') {
        return false;
    }
    if let Some(frac) = frac_part {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
        if frac.ends_with('0') {
            return false;
        }
    }
    if s.starts_with('-') && int_part == "0" && frac_part.is_none() {
        return false; // "-0"
    }
    true
}

/// Assemble the canonical string for a scanned number.
fn canonicalize_number(negative: bool, int_digits: &str, frac_digits: &str) -> String {
    let int_trimmed = int_digits.trim_start_matches('0');
    let int_part = if int_trimmed.is_empty() { "0" } else { int_trimmed };
    let frac_part = frac_digits.trim_end_matches('0');
    let is_zero = int_part == "0" && frac_part.is_empty();
    let mut out = String::new();
    if negative && !is_zero {
        out.push('-');
    }
    out.push_str(int_part);
    if !frac_part.is_empty() {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

/// Find the first numeric token and return its canonical form.
///
/// A numeric token is an optional sign, an integer part which may use
/// `1,234,567`-style thousands grouping, and an optional `.frac` part. A bare
/// leading decimal point is accepted (`.5` reads as `0.5`). Thousands groups
/// are consumed only when well-formed (exactly three digits, not followed by
/// a fourth), so `1,2345` yields `1`.
fn scan_first_number(text: &str) -> Option<String> {
    let bytes = text.as_bytes();
    let first_digit = bytes.iter().position(|b| b.is_ascii_digit())?;

    // Fraction-only token such as ".5" / "-.5".
    if first_digit > 0 && bytes[first_digit - 1] == b'.' {
        let mut end = first_digit;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        let point = first_digit - 1;
        let negative = point > 0 && bytes[point - 1] == b'-';
        return Some(canonicalize_number(negative, "", &text[first_digit..end]));
    }

    // Integer part: leading digit run plus well-formed thousands groups.
    let mut end = first_digit;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    let mut int_digits = String::from(&text[first_digit..end]);
    loop {
        let group_ok = bytes.get(end) == Some(&b',')
            && end + 3 < bytes.len()
            && bytes[end + 1..end + 4].iter().all(|b| b.is_ascii_digit())
            && bytes.get(end + 4).is_none_or(|b| !b.is_ascii_digit());
        if !group_ok {
            break;
        }
        int_digits.push_str(&text[end + 1..end + 4]);
        end += 4;
    }

    // Optional fraction.
    let mut frac_digits = "";
    if bytes.get(end) == Some(&b'.') && bytes.get(end + 1).is_some_and(|b| b.is_ascii_digit()) {
        let frac_start = end + 1;
        let mut frac_end = frac_start;
        while frac_end < bytes.len() && bytes[frac_end].is_ascii_digit() {
            frac_end += 1;
        }
        frac_digits = &text[frac_start..frac_end];
    }

    let negative = first_digit > 0 && bytes[first_digit - 1] == b'-';
    Some(canonicalize_number(negative, &int_digits, frac_digits))
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric()
}

/// Find the first standalone option letter in `'A'..=max`.
///
/// "Standalone" means not flanked by other alphanumerics, so `(B)`, `B.`,
/// `B)` and bare `B` all match while the `B` of `Both` does not. Only
/// uppercase letters count — lowercase `a` is almost always the article.
fn scan_first_option(text: &str, max: char) -> Option<char> {
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        let c = b as char;
        if !('A'..=max).contains(&c) {
            continue;
        }
        let prev_ok = i == 0 || !is_word_byte(bytes[i - 1]);
        let next_ok = i + 1 >= bytes.len() || !is_word_byte(bytes[i + 1]);
        if prev_ok && next_ok {
            return Some(c);
        }
    }
    None
}

/// Find the first whole-word `yes` or `no`, case-insensitively.
fn scan_first_yes_no(text: &str) -> Option<&'static str> {
    let bytes = text.as_bytes();
    for i in 0..bytes.len() {
        for word in ["yes", "no"] {
            let end = i + word.len();
            // `get` also rejects windows that split a multi-byte character.
            let Some(window) = text.get(i..end) else {
                continue;
            };
            if !window.eq_ignore_ascii_case(word) {
                continue;
            }
            let prev_ok = i == 0 || !is_word_byte(bytes[i - 1]);
            let next_ok = end >= bytes.len() || !is_word_byte(bytes[end]);
            if prev_ok && next_ok {
                return Some(word);
            }
        }
    }
    None
}

/// Characters stripped from the ends of free-string candidates: whitespace,
/// straight and curly quotes, and sentence punctuation.
fn is_clutter(c: char) -> bool {
    c.is_whitespace()
        || matches!(
            c,
            '"' | '\'' | '`' | '\u{2018}' | '\u{2019}' | '\u{201c}' | '\u{201d}'
                | '.' | ',' | '!' | '?' | ';' | ':'
        )
}

fn trim_clutter(s: &str) -> &str {
    s.trim_matches(is_clutter)
}

/// Reduce a free-form reply to its final answer token.
///
/// Takes the text after the last occurrence of the trigger sentence (the
/// whole text when absent), strips quoting and punctuation from both ends,
/// keeps the last whitespace-separated token — answers like `The new word is
/// "sann."` reduce to `sann` — strips again, and lowercases.
fn parse_free_string(text: &str, trigger: &str) -> Option<String> {
    let tail = match text.rfind(trigger) {
        Some(at) => &text[at + trigger.len()..],
        None => text,
    };
    let tail = trim_clutter(tail);
    let token = tail.split_whitespace().last()?;
    let token = trim_clutter(token);
    if token.is_empty() {
        return None;
    }
    Some(token.to_lowercase())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn num(text: &str) -> Option<String> {
        parse_answer(text, AnswerFormat::ArabicNumber).map(|a| a.value)
    }

    #[test]
    fn numbers_first_token_wins() {
        assert_eq!(num("The answer is 594 apples."), Some("594".into()));
        assert_eq!(num("3 - 5 = -2"), Some("3".into()));
        assert_eq!(num("It costs -5 dollars"), Some("-5".into()));
        assert_eq!(num("+7 points"), Some("7".into()));
        assert_eq!(num("no digits here"), None);
    }

    #[test]
    fn numbers_normalize_equivalent_spellings() {
        assert_eq!(num("405.00"), Some("405".into()));
        assert_eq!(num("405"), Some("405".into()));
        assert_eq!(num("0042"), Some("42".into()));
        assert_eq!(num("3.50"), Some("3.5".into()));
        assert_eq!(num("0.500"), Some("0.5".into()));
        assert_eq!(num(".5"), Some("0.5".into()));
        assert_eq!(num("-.5"), Some("-0.5".into()));
        assert_eq!(num("-0"), Some("0".into()));
        assert_eq!(num("-0.0"), Some("0".into()));
        assert_eq!(num("007.10"), Some("7.1".into()));
    }

    #[test]
    fn numbers_strip_thousands_grouping() {
        assert_eq!(num("1,234"), Some("1234".into()));
        assert_eq!(num("$1,234,567.89 total"), Some("1234567.89".into()));
        assert_eq!(num("1,2345"), Some("1".into()), "malformed group is not grouped");
        assert_eq!(num("1,23"), Some("1".into()));
        assert_eq!(num("12,345.67"), Some("12345.67".into()));
    }

    #[test]
    fn numbers_ignore_trailing_period() {
        assert_eq!(num("The answer is 18."), Some("18".into()));
        assert_eq!(num("roughly 2.5."), Some("2.5".into()));
    }

    #[test]
    fn canonical_numbers_round_trip() {
        for value in ["0", "7", "-7", "123456", "0.5", "-0.5", "3.14", "1000"] {
            let answer = NormalizedAnswer {
                format: AnswerFormat::ArabicNumber,
                value: value.into(),
            };
            assert!(answer.is_canonical(), "{value} should be canonical");
            assert!(answer.round_trips(), "{value} should round-trip");
        }
        for value in ["", "-0", "05", "1.50", "1.", ".5", "+5", "1,000"] {
            let answer = NormalizedAnswer {
                format: AnswerFormat::ArabicNumber,
                value: value.into(),
            };
            assert!(!answer.is_canonical(), "{value} should not be canonical");
        }
    }

    fn opt(text: &str, format: AnswerFormat) -> Option<String> {
        parse_answer(text, format).map(|a| a.value)
    }

    #[test]
    fn options_accept_common_decorations() {
        use AnswerFormat::OptionAE;
        assert_eq!(opt("(B)", OptionAE), Some("B".into()));
        assert_eq!(opt("A.", OptionAE), Some("A".into()));
        assert_eq!(opt("C)", OptionAE), Some("C".into()));
        assert_eq!(opt("The answer is D", OptionAE), Some("D".into()));
        assert_eq!(opt("E", OptionAE), Some("E".into()));
    }

    #[test]
    fn options_require_standalone_uppercase_letters() {
        use AnswerFormat::OptionAE;
        assert_eq!(opt("Both options seem wrong", OptionAE), None);
        assert_eq!(opt("abcde", OptionAE), None);
        assert_eq!(opt("BCD", OptionAE), None);
        assert_eq!(opt("b", OptionAE), None);
        assert_eq!(opt("F", OptionAE), None, "F is out of range for A-E");
        assert_eq!(opt("F", AnswerFormat::OptionAF), Some("F".into()));
        assert_eq!(opt("D", AnswerFormat::OptionAC), None);
    }

    #[test]
    fn options_first_admissible_letter_wins() {
        assert_eq!(
            opt("I think (B), not (C).", AnswerFormat::OptionAE),
            Some("B".into())
        );
    }

    #[test]
    fn yes_no_is_word_bounded_and_case_insensitive() {
        use AnswerFormat::YesNo;
        assert_eq!(opt("Yes", YesNo), Some("yes".into()));
        assert_eq!(opt("yes, it is", YesNo), Some("yes".into()));
        assert_eq!(opt("No.", YesNo), Some("no".into()));
        assert_eq!(opt("The answer is NO", YesNo), Some("no".into()));
        assert_eq!(opt("Unknown", YesNo), None);
        assert_eq!(opt("Nope, nothing", YesNo), None);
        assert_eq!(opt("Yesterday was fine", YesNo), None);
    }

    #[test]
    fn free_string_reduces_quoted_sentence_answers() {
        use AnswerFormat::FreeString;
        assert_eq!(opt("The new word is \"sann.\"", FreeString), Some("sann".into()));
        assert_eq!(opt("sann", FreeString), Some("sann".into()));
        assert_eq!(opt("SANN", FreeString), Some("sann".into()));
        assert_eq!(opt("  'ylc'.  ", FreeString), Some("ylc".into()));
        assert_eq!(opt("\u{201c}oese\u{201d}", FreeString), Some("oese".into()));
        assert_eq!(opt("...", FreeString), None);
        assert_eq!(opt("", FreeString), None);
    }

    #[test]
    fn free_string_prefers_text_after_last_trigger() {
        let text = "Therefore, the final answer is draft. Therefore, the final answer is ylc.";
        assert_eq!(opt(text, AnswerFormat::FreeString), Some("ylc".into()));
    }

    #[test]
    fn extraction_message_layout_is_fixed() {
        let msg = build_extraction_message(
            "What is 2 + 2?",
            "2 + 2 = 4. The answer is 4.",
            ARABIC_NUMBER_TRIGGER,
        );
        assert_eq!(
            msg,
            "Q: What is 2 + 2?\nA: 2 + 2 = 4. The answer is 4.\nTherefore, the answer (arabic numerals) is"
        );
    }

    #[test]
    fn default_triggers_are_per_format() {
        assert_eq!(
            AnswerFormat::ArabicNumber.default_trigger(),
            "Therefore, the answer (arabic numerals) is"
        );
        assert_eq!(
            AnswerFormat::OptionAE.default_trigger(),
            "Therefore, among A through E, the answer is"
        );
        assert_eq!(
            AnswerFormat::OptionAC.default_trigger(),
            "Therefore, among A through C, the answer is"
        );
        assert_eq!(
            AnswerFormat::OptionAF.default_trigger(),
            "Therefore, among A through F, the answer is"
        );
        assert_eq!(
            AnswerFormat::YesNo.default_trigger(),
            "Therefore, the answer (Yes or No) is"
        );
        assert_eq!(
            AnswerFormat::FreeString.default_trigger(),
            "Therefore, the final answer is"
        );
    }

    #[test]
    fn gold_normalization_accepts_boolean_aliases() {
        let yes = normalize_gold("true", AnswerFormat::YesNo).unwrap();
        assert_eq!(yes.value, "yes");
        let no = normalize_gold("False", AnswerFormat::YesNo).unwrap();
        assert_eq!(no.value, "no");
        let direct = normalize_gold("no", AnswerFormat::YesNo).unwrap();
        assert_eq!(direct.value, "no");
    }

    #[test]
    fn gold_normalization_rejects_garbage() {
        let err = normalize_gold("maybe", AnswerFormat::YesNo).unwrap_err();
        assert_eq!(err.format, AnswerFormat::YesNo);
        assert!(normalize_gold("", AnswerFormat::ArabicNumber).is_err());
        assert!(normalize_gold("G", AnswerFormat::OptionAE).is_err());
    }

    #[test]
    fn gold_labels_round_trip_after_normalization() {
        let cases = [
            ("18", AnswerFormat::ArabicNumber),
            ("31.5", AnswerFormat::ArabicNumber),
            ("A", AnswerFormat::OptionAE),
            ("true", AnswerFormat::YesNo),
            ("sann", AnswerFormat::FreeString),
        ];
        for (raw, format) in cases {
            let gold = normalize_gold(raw, format).unwrap();
            assert!(gold.round_trips(), "{raw} as {format}");
        }
    }

    #[test]
    fn resolve_prefers_extraction_reply() {
        let outcome = ExtractionOutcome::resolve(
            "Let's work it out... the total is 17 pencils.".into(),
            " 17".into(),
            AnswerFormat::ArabicNumber,
        );
        assert_eq!(outcome.parse_path, ParsePath::FromExtraction);
        assert_eq!(outcome.parsed.unwrap().value, "17");
    }

    #[test]
    fn resolve_falls_back_to_raw_answer() {
        let outcome = ExtractionOutcome::resolve(
            "The total is 17 pencils.".into(),
            "I cannot tell.".into(),
            AnswerFormat::ArabicNumber,
        );
        assert_eq!(outcome.parse_path, ParsePath::FallbackFromRaw);
        assert_eq!(outcome.parsed.unwrap().value, "17");
    }

    #[test]
    fn resolve_marks_double_failure() {
        let outcome = ExtractionOutcome::resolve(
            "I am not sure.".into(),
            "Neither am I.".into(),
            AnswerFormat::ArabicNumber,
        );
        assert_eq!(outcome.parse_path, ParsePath::Failed);
        assert!(outcome.parsed.is_none());
    }

    #[test]
    fn format_names_round_trip() {
        for format in AnswerFormat::ALL {
            let name = format.as_str();
            assert_eq!(name.parse::<AnswerFormat>().unwrap(), format);
            let json = serde_json::to_string(&format).unwrap();
            assert_eq!(json, alloc::format!("\"{name}\""));
        }
        assert!("percentage".parse::<AnswerFormat>().is_err());
    }

    #[test]
    fn equivalent_numbers_compare_equal_as_canonical_strings() {
        let spellings = ["405", "405.00", " 405 ", "405.0", "0405"];
        let parsed: Vec<_> = spellings
            .iter()
            .map(|s| parse_answer(s, AnswerFormat::ArabicNumber).unwrap())
            .collect();
        for answer in &parsed {
            assert_eq!(answer, &parsed[0]);
        }
    }
}

//! Property-based checks for the parsing, voting, and digest invariants that
//! the rest of the harness leans on.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use roleplay_core::{
    conversation_digest, majority_vote, normalize_gold, parse_answer, AnswerFormat, ChatMessage,
    CompletionParams, Conversation, ExtractionOutcome, NormalizedAnswer, ParsePath,
};

/// Generate a number already in canonical form.
fn canonical_number() -> impl Strategy<Value = String> {
    (
        any::<bool>(),
        0u64..1_000_000_000_000,
        proptest::collection::vec(0u8..10, 0..6),
    )
        .prop_map(|(negative, int, mut frac)| {
            while frac.last() == Some(&0) {
                frac.pop();
            }
            let mut s = String::new();
            if negative && !(int == 0 && frac.is_empty()) {
                s.push('-');
            }
            s.push_str(&int.to_string());
            if !frac.is_empty() {
                s.push('.');
                for digit in frac {
                    s.push(char::from(b'0' + digit));
                }
            }
            s
        })
}

proptest! {
    /// A canonical number parses back to itself exactly.
    #[test]
    fn canonical_numbers_are_parse_fixed_points(canon in canonical_number()) {
        let answer = parse_answer(&canon, AnswerFormat::ArabicNumber).unwrap();
        prop_assert_eq!(&answer.value, &canon);
        prop_assert!(answer.is_canonical());
        prop_assert!(answer.round_trips());
    }

    /// Cosmetic respellings — leading zeros, trailing fraction zeros, a plus
    /// sign, surrounding prose — all normalize to the same canonical value.
    #[test]
    fn respellings_normalize_identically(
        canon in canonical_number(),
        lead_zeros in 0usize..3,
        trail_zeros in 0usize..3,
        plus in any::<bool>(),
    ) {
        let (sign, digits) = match canon.strip_prefix('-') {
            Some(rest) => ("-", rest),
            None => (if plus { "+" } else { "" }, canon.as_str()),
        };
        let mut spelled = String::new();
        spelled.push_str(sign);
        spelled.push_str(&"0".repeat(lead_zeros));
        spelled.push_str(digits);
        if trail_zeros > 0 {
            if !digits.contains('.') {
                spelled.push('.');
            }
            spelled.push_str(&"0".repeat(trail_zeros));
        }
        let text = format!("The answer is {spelled} apples.");
        let parsed = parse_answer(&text, AnswerFormat::ArabicNumber).unwrap();
        prop_assert_eq!(parsed.value, canon);
    }

    /// Parsing arbitrary junk never panics, for any format.
    #[test]
    fn parsing_never_panics(text in "\\PC{0,120}") {
        for format in AnswerFormat::ALL {
            let _ = parse_answer(&text, format);
            let _ = normalize_gold(&text, format);
        }
    }

    /// Extraction resolution upholds "parsed absent iff failed".
    #[test]
    fn extraction_outcome_invariant(raw in "\\PC{0,60}", ext in "\\PC{0,60}") {
        for format in AnswerFormat::ALL {
            let outcome = ExtractionOutcome::resolve(raw.clone(), ext.clone(), format);
            prop_assert_eq!(outcome.parsed.is_none(), outcome.parse_path == ParsePath::Failed);
        }
    }

    /// Majority voting is invariant under sample order.
    #[test]
    fn vote_is_order_independent(
        values in proptest::collection::vec(proptest::option::of(0u8..5), 0..12),
        seed in any::<u64>(),
    ) {
        let samples: Vec<Option<NormalizedAnswer>> = values
            .iter()
            .map(|v| v.map(|d| parse_answer(&d.to_string(), AnswerFormat::ArabicNumber).unwrap()))
            .collect();
        let mut shuffled = samples.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(majority_vote(&samples), majority_vote(&shuffled));
    }

    /// The winner always holds a maximal vote count.
    #[test]
    fn vote_winner_has_maximal_count(
        values in proptest::collection::vec(proptest::option::of(0u8..5), 0..12),
    ) {
        let samples: Vec<Option<NormalizedAnswer>> = values
            .iter()
            .map(|v| v.map(|d| parse_answer(&d.to_string(), AnswerFormat::ArabicNumber).unwrap()))
            .collect();
        let count_of = |answer: &NormalizedAnswer| {
            samples.iter().flatten().filter(|a| *a == answer).count()
        };
        match majority_vote(&samples) {
            None => prop_assert!(samples.iter().all(Option::is_none)),
            Some(winner) => {
                let winner_count = count_of(&winner);
                for candidate in samples.iter().flatten() {
                    prop_assert!(count_of(candidate) <= winner_count);
                    // On equal counts the winner is lexicographically minimal.
                    if count_of(candidate) == winner_count {
                        prop_assert!(winner.value <= candidate.value);
                    }
                }
            }
        }
    }

    /// Digests are deterministic and sensitive to content changes.
    #[test]
    fn digests_are_stable_and_content_sensitive(text in "\\PC{1,80}", temp in 0.0f64..2.0) {
        let params = CompletionParams {
            model: "m".into(),
            temperature: temp,
            max_tokens: 512,
            n: 1,
        };
        let conv = Conversation::new(vec![ChatMessage::user(text.clone())]);
        let digest = conversation_digest(&conv, &params);
        prop_assert_eq!(&digest, &conversation_digest(&conv, &params));

        let changed = Conversation::new(vec![ChatMessage::user(format!("{text}x"))]);
        prop_assert_ne!(&digest, &conversation_digest(&changed, &params));
    }
}

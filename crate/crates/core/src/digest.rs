//! Content digests for completion requests.
//!
//! A request digest is the SHA-256 of a canonical, unambiguous rendering of
//! everything that determines a backend's reply: every message (role and
//! content), the model id, temperature, token budget, and choice count. The
//! digest keys the response cache and the scripted mock backend, so the
//! canonical form is versioned and must never change silently — bump the
//! version tag instead.

use alloc::string::String;
use core::fmt::Write as _;

use sha2::{Digest as _, Sha256};

use crate::chat::{CompletionParams, Conversation};

/// Version tag baked into every canonical rendering.
const CANONICAL_VERSION: &str = "roleplay-digest-v1";

/// Render a request in the canonical form that gets hashed.
///
/// Variable-length fields are length-prefixed (in bytes), so contents
/// containing newlines or the framing characters cannot collide with the
/// framing itself. Temperature is fixed to six decimal places so `0.7` and
/// `0.70` hash identically while `0.7` and `0.700001` do not.
pub fn canonical_request(conversation: &Conversation, params: &CompletionParams) -> String {
    let mut out = String::new();
    out.push_str(CANONICAL_VERSION);
    out.push('\n');
    let _ = writeln!(out, "model:{}:{}", params.model.len(), params.model);
    let _ = writeln!(out, "temperature:{:.6}", params.temperature);
    let _ = writeln!(out, "max_tokens:{}", params.max_tokens);
    let _ = writeln!(out, "n:{}", params.n);
    for message in conversation.messages() {
        let _ = writeln!(
            out,
            "msg:{}:{}:{}",
            message.role.as_str(),
            message.content.len(),
            message.content
        );
    }
    out
}

/// SHA-256 of [`canonical_request`], as 64 lowercase hex characters.
pub fn conversation_digest(conversation: &Conversation, params: &CompletionParams) -> String {
    let canonical = canonical_request(conversation, params);
    let hash = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in hash {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

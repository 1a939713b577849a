//! The chat client: validation, bounded concurrency, retries, accounting.
//!
//! Every completion in the harness flows through [`ChatClient::complete`],
//! which validates the request, takes a semaphore permit so no more than the
//! configured number of requests is ever in flight, retries transient
//! failures with exponential backoff, splits multi-choice requests for
//! backends that cannot batch them, and tallies calls and token usage.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use rand::Rng as _;
use tokio::sync::Semaphore;

use roleplay_core::{CompletionParams, CompletionResult, Conversation, Usage};

use crate::backend::{BackendError, ChatBackend};

/// Retry schedule for transient backend failures.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    /// Total attempts per request, including the first (so 5 means up to 4
    /// retries).
    pub max_attempts: u32,
    /// Delay before the first retry; doubles on each subsequent one.
    pub base_delay: Duration,
    /// Upper bound on any single delay.
    pub max_delay: Duration,
    /// Scale each delay by a random factor in `[0.5, 1.5)` to avoid retry
    /// stampedes. Disable for deterministic tests.
    pub jitter: bool,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(30),
            jitter: true,
        }
    }
}

impl RetryPolicy {
    /// Delay before the retry following attempt number `attempt` (1-based).
    fn delay_after(&self, attempt: u32) -> Duration {
        let exp = attempt.saturating_sub(1).min(16);
        let raw = self
            .base_delay
            .saturating_mul(2u32.saturating_pow(exp))
            .min(self.max_delay);
        if !self.jitter {
            return raw;
        }
        let factor: f64 = rand::rng().random_range(0.5..1.5);
        Duration::from_secs_f64(raw.as_secs_f64() * factor)
    }
}

/// Call and usage totals for one client.
#[derive(Debug, Default)]
struct ClientMetrics {
    backend_calls: AtomicU64,
    retries: AtomicU64,
    prompt_tokens: AtomicU64,
    completion_tokens: AtomicU64,
}

pub struct ChatClient {
    backend: Arc<dyn ChatBackend>,
    limiter: Semaphore,
    retry: RetryPolicy,
    metrics: ClientMetrics,
}

impl ChatClient {
    /// Wrap a backend with an in-flight bound and the default retry policy.
    pub fn new(backend: Arc<dyn ChatBackend>, max_in_flight: usize) -> Self {
        ChatClient {
            backend,
            limiter: Semaphore::new(max_in_flight.max(1)),
            retry: RetryPolicy::default(),
            metrics: ClientMetrics::default(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn backend(&self) -> &dyn ChatBackend {
        self.backend.as_ref()
    }

    /// Total calls issued to the backend (including retries and splits).
    pub fn backend_calls(&self) -> u64 {
        self.metrics.backend_calls.load(Ordering::SeqCst)
    }

    /// How many of those calls were retries of a failed attempt.
    pub fn retries(&self) -> u64 {
        self.metrics.retries.load(Ordering::SeqCst)
    }

    /// Token usage accumulated over all successful calls that reported it.
    pub fn usage(&self) -> Usage {
        Usage {
            prompt_tokens: self.metrics.prompt_tokens.load(Ordering::SeqCst),
            completion_tokens: self.metrics.completion_tokens.load(Ordering::SeqCst),
        }
    }

    /// Issue one validated completion request.
    pub async fn complete(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError> {
        conversation.validate()?;
        params.validate()?;

        // Hold the permit across retries (and splits) so the in-flight bound
        // counts requests, not questions.
        let _permit = self
            .limiter
            .acquire()
            .await
            .expect("client semaphore never closes");

        if params.n > 1 && !self.backend.supports_multi_choice() {
            return self.complete_split(conversation, params).await;
        }

        let result = self.complete_with_retry(conversation, params).await?;
        result.validate_against(params)?;
        Ok(result)
    }

    /// Emulate `n > 1` for backends that take one choice per request.
    async fn complete_split(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError> {
        let single = CompletionParams {
            n: 1,
            ..params.clone()
        };
        let mut choices = Vec::with_capacity(params.n as usize);
        let mut model = None;
        for _ in 0..params.n {
            let mut result = self.complete_with_retry(conversation, &single).await?;
            result.validate_against(&single)?;
            choices.push(result.choices.pop().expect("validated n = 1"));
            model.get_or_insert(result.model);
        }
        Ok(CompletionResult {
            choices,
            model: model.unwrap_or_else(|| params.model.clone()),
            usage: None, // already tallied per call in the metrics
            backend_id: self.backend.id().to_owned(),
        })
    }

    async fn complete_with_retry(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError> {
        let mut attempt = 1u32;
        loop {
            self.metrics.backend_calls.fetch_add(1, Ordering::SeqCst);
            match self.backend.complete(conversation, params).await {
                Ok(result) => {
                    if let Some(usage) = result.usage {
                        self.metrics
                            .prompt_tokens
                            .fetch_add(usage.prompt_tokens, Ordering::SeqCst);
                        self.metrics
                            .completion_tokens
                            .fetch_add(usage.completion_tokens, Ordering::SeqCst);
                    }
                    return Ok(result);
                }
                Err(error) if error.is_retryable() && attempt < self.retry.max_attempts => {
                    self.metrics.retries.fetch_add(1, Ordering::SeqCst);
                    tokio::time::sleep(self.retry.delay_after(attempt)).await;
                    attempt += 1;
                }
                Err(error) => return Err(error),
            }
        }
    }
}

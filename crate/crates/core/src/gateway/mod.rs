//! Prompt assembly, provider abstraction and the translate/repair loop.

mod extract;
mod prompt;
mod provider;
mod translate;

pub use extract::{extract_queries, extract_query, NoQueryFound};
pub use prompt::{assemble_prompt, prompt_hash, EmptyQuestion, PromptBundle, PromptOptions, RepairNote, TEMPLATE_VERSION};
pub use provider::{CassetteEntry, CompletionRequest, ConflictingEntry, FnProvider, MockProvider, MockResponse, PrivacyGuard, Provider, ProviderError, ReplayProvider};
pub use translate::{translate, Attempt, TranslateError, TranslateRequest, TranslationResult, DEFAULT_MAX_ATTEMPTS};

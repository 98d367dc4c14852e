//! Block context keys, the chained hash index and the corpus store.

mod hash;
mod key;
mod store;

pub use hash::{CountConstraint, Descriptor, HashIndex, IndexStats, Posting, DEFAULT_BINS};
pub use key::{context_key, context_key_for, hash_key, ContextKey, COUNT_CLAMP, KEY_SPACE};
pub use store::{CorpusStore, StoreStats, StoredDocument};

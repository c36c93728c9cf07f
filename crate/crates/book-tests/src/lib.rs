//! Runs every Rust snippet in the guide (`book/`) as a doc-test.
//!
//! Each module below embeds one chapter verbatim as its documentation, so
//! `cargo test` compiles and executes the chapter's code blocks. When the
//! library's API or behaviour changes, the guide fails to build or its
//! assertions fail — the book cannot silently drift out of sync.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/nd-map.md")]
pub mod nd_map {}

#[doc = include_str!("../../../book/src/forward.md")]
pub mod forward {}

#[doc = include_str!("../../../book/src/recovery.md")]
pub mod recovery {}

#[doc = include_str!("../../../book/src/nonuniqueness.md")]
pub mod nonuniqueness {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

//! Compiles the guide's snippets as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/local-symbols.md")]
mod local_symbols {}

#[doc = include_str!("../../../book/src/quadrics.md")]
mod quadrics {}

#[doc = include_str!("../../../book/src/lines.md")]
mod lines {}

#[doc = include_str!("../../../book/src/hensel.md")]
mod hensel {}

#[doc = include_str!("../../../book/src/brauer-class.md")]
mod brauer_class {}

#[doc = include_str!("../../../book/src/search.md")]
mod search {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}

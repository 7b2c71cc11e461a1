// Each chapter of the guide becomes the doc comment of an empty module, so
// `cargo test --doc` runs every listing in the book.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/formulas.md")]
mod formulas {}
#[doc = include_str!("../../../book/src/theories.md")]
mod theories {}
#[doc = include_str!("../../../book/src/processes.md")]
mod processes {}
#[doc = include_str!("../../../book/src/failsafety.md")]
mod failsafety {}
#[doc = include_str!("../../../book/src/translations.md")]
mod translations {}
#[doc = include_str!("../../../book/src/verification.md")]
mod verification {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}

// The guide under `book/` is plain mdbook, which cannot run its own Rust
// listings against this crate. Each chapter is pulled in here as the doc
// comment of an empty module so `cargo test --doc` compiles and runs every
// snippet, one module per chapter to keep failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}
#[doc = include_str!("../../../book/src/lie-data.md")]
pub mod lie_data {}
#[doc = include_str!("../../../book/src/dimensions.md")]
pub mod dimensions {}
#[doc = include_str!("../../../book/src/curves-and-sheaves.md")]
pub mod curves_and_sheaves {}
#[doc = include_str!("../../../book/src/deformations.md")]
pub mod deformations {}
#[doc = include_str!("../../../book/src/gaudin.md")]
pub mod gaudin {}
#[doc = include_str!("../../../book/src/spectral.md")]
pub mod spectral {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/report-schema.md")]
pub mod report_schema {}

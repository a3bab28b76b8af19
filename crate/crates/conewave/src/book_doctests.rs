//! Compiles the guide's code snippets (book/src/*.md) as doc-tests, so
//! `cargo test --doc` keeps the book honest.

macro_rules! book_chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        #[allow(dead_code)]
        pub struct $name;
    };
}

book_chapter!(Introduction, "../../../book/src/introduction.md");
book_chapter!(GettingStarted, "../../../book/src/getting-started.md");
book_chapter!(SpecialFunctions, "../../../book/src/special-functions.md");
book_chapter!(CrossSection, "../../../book/src/cross-section.md");
book_chapter!(Geometry, "../../../book/src/geometry.md");
book_chapter!(Propagators, "../../../book/src/propagators.md");
book_chapter!(SpectralMeasure, "../../../book/src/spectral-measure.md");
book_chapter!(Experiments, "../../../book/src/experiments.md");
book_chapter!(CliReference, "../../../book/src/cli-reference.md");

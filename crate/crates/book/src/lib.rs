//! Compiles the guide under `book/src` so that its code blocks run as
//! doctests. Nothing here is meant to be used.

#![doc = include_str!("../../../book/src/introduction.md")]

macro_rules! chapters {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub mod $name {}
        )*
    };
}

chapters! {
    functions => "functions.md",
    measures => "measures.md",
    solver => "solver.md",
    blaschke => "blaschke.md",
    projection => "projection.md",
    functionals => "functionals.md",
    iteration => "iteration.md",
    verification => "verification.md",
    cli => "cli.md",
}

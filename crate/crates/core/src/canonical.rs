//! The shipped model documents under `models/`, embedded at compile time.

use crate::model::{load_model, ModelSpec};

macro_rules! canonical {
    ($(#[$doc:meta] $name:ident => $file:literal),* $(,)?) => {
        $(
            #[$doc]
            pub fn $name() -> ModelSpec {
                load_model(include_str!(concat!("../models/", $file)))
                    .expect(concat!("shipped model ", $file, " is valid"))
            }
        )*

        /// `(file name, source)` of every shipped model.
        pub const ALL: &[(&str, &str)] = &[$(($file, include_str!(concat!("../models/", $file)))),*];
    };
}

canonical! {
    /// Generic kernel with |X| = 2, |Y| = 6 (p = 0.75, K = 4, ε = 1/8) whose Viterbi path never settles.
    example_1_1 => "example_1_1.json",
    /// The same kernel written as an HMM.
    example_1_1_hmm => "example_1_1_hmm.json",
    /// Two-state HMM with identity transitions and emission parameter 0.7: no nodes ever occur.
    example_1_2 => "example_1_2.json",
    /// Four-state HMM where same-state tie breaking at adjacent nodes gives a zero-likelihood path.
    tiebreak_4state => "tiebreak_4state.json",
    /// Two-state PMM with p = q = 0.5, λ₁ = 0.8, λ₂ = 0.3, μ₁ = 0.6, μ₂ = 0.4.
    two_state_pmm => "two_state_pmm.json",
    /// Scalar Gaussian linear switching model with F = (0.3, 0.4), μ = (0, 2), σ² = (1, 1).
    glm_scalar => "glm_scalar.json",
}

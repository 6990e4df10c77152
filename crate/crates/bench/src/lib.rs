//! Shared fixtures for the benchmark targets.

use std::sync::Arc;

use twistaff_core::scalar::{rat, rint};
use twistaff_core::{
    Automorphism, GeneratorSpace, LieAlgebra, Mode, Module, Scalar, TwistedAffine, WeightSpec,
};

/// The order-two inner twist of sl(2).
pub fn order2_context() -> Arc<TwistedAffine> {
    let alg = Arc::new(LieAlgebra::sl(2));
    let x = vec![
        Scalar::zero(),
        Scalar::from_rat(rat(1, 4)),
        Scalar::zero(),
    ];
    let g = Automorphism::inner_exponential(&alg, &x).expect("rational spectrum");
    let aut = Automorphism::from_matrix(alg.clone(), g).expect("automorphism");
    Arc::new(TwistedAffine::new(alg, Arc::new(aut)))
}

pub fn order2_tilde(cutoff: i64) -> Module {
    let ta = order2_context();
    let space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
    Module::build(ta, Mode::Tilde, space, rint(1), rint(cutoff), 0).expect("builds")
}

pub fn untwisted_tilde(cutoff: i64) -> Module {
    let alg = Arc::new(LieAlgebra::sl(2));
    let aut = Automorphism::identity(alg.clone());
    let ta = Arc::new(TwistedAffine::new(alg, Arc::new(aut)));
    let space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
    Module::build(ta, Mode::Tilde, space, rint(1), rint(cutoff), 0).expect("builds")
}

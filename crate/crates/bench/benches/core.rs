use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use twistaff_bench::{order2_tilde, untwisted_tilde};
use twistaff_core::scalar::{rat, rint};
use twistaff_core::{ModuleElement, Monomial, Scalar, WordOp};

fn scalar_arith(c: &mut Criterion) {
    let a = Scalar::root_of_unity(1, 12)
        .unwrap()
        .scale(&rat(3, 7))
        .add_ref(&Scalar::from_rat(rat(5, 2)));
    let b = Scalar::root_of_unity(5, 12)
        .unwrap()
        .add_ref(&Scalar::from_rat(rat(-1, 3)));
    c.bench_function("scalar_mul_cyclotomic", |bench| {
        bench.iter(|| black_box(a.mul_ref(black_box(&b))))
    });
    c.bench_function("scalar_inv_cyclotomic", |bench| {
        bench.iter(|| black_box(a.inv().unwrap()))
    });
}

fn normal_form(c: &mut Criterion) {
    let m = order2_tilde(4);
    let aut = m.context().automorphism().clone();
    let e = aut.jindex_of_label("e").unwrap();
    let f = aut.jindex_of_label("f").unwrap();
    let h = aut.jindex_of_label("h").unwrap();
    let word = vec![
        WordOp::Mode(e, rat(1, 2)),
        WordOp::Mode(h, rint(-1)),
        WordOp::Mode(f, rat(-3, 2)),
        WordOp::Mode(e, rat(-1, 2)),
        WordOp::Mode(f, rat(-1, 2)),
    ];
    c.bench_function("normal_form_word5", |bench| {
        bench.iter(|| black_box(m.normal_form(black_box(&word), 0).unwrap()))
    });
}

fn sugawara(c: &mut Criterion) {
    let m = order2_tilde(3);
    let aut = m.context().automorphism().clone();
    let f = aut.jindex_of_label("f").unwrap();
    let v = m.apply_mode(
        f,
        &rat(-3, 2),
        &ModuleElement::from_monomial(Monomial::generator(0)),
    );
    c.bench_function("sugawara_l0", |bench| {
        bench.iter(|| black_box(m.sugawara(0, black_box(&v)).unwrap()))
    });
}

fn build_and_quotient(c: &mut Criterion) {
    c.bench_function("tilde_build_cutoff4", |bench| {
        bench.iter(|| black_box(untwisted_tilde(4)))
    });
    let m = untwisted_tilde(4);
    let (spec, _) =
        twistaff_core::quotient::check_null_field(&m, &[Scalar::one(), Scalar::zero(), Scalar::zero()], 2);
    let spec = spec.unwrap();
    c.bench_function("relation_closure_cutoff4", |bench| {
        bench.iter(|| black_box(twistaff_core::quotient::relation_space(&m, &spec).unwrap()))
    });
}

criterion_group!(benches, scalar_arith, normal_form, sugawara, build_and_quotient);
criterion_main!(benches);

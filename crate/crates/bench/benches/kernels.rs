use criterion::{black_box, criterion_group, criterion_main, Criterion};

use fluxform_core::chains::{Block, Chain, SingularBlock, SmoothMap};
use fluxform_core::deriv::{exterior_derivative_at, DerivConfig};
use fluxform_core::integrate::{integrate_over_chain, integrate_over_singular_block, QuadratureSpec};
use fluxform_core::verify::mvt_locate;
use fluxform_core::{FormExpression, FormField};

fn field(text: &str, n: usize, degree: usize) -> FormField {
    FormExpression::parse(text, n, degree).unwrap().to_field()
}

fn parse_expression(c: &mut Criterion) {
    let text = "sin(x1)*x3*dx2+exp(x2/3)*dx3-(x1^2+x2)*x3*dx1";
    c.bench_function("parse 1-form expression", |b| {
        b.iter(|| FormExpression::parse(black_box(text), 3, 1).unwrap())
    });
}

fn stencil_derivative(c: &mut Criterion) {
    let f = field("sin(x1)*x3*dx2+exp(x2/3)*dx3", 3, 1);
    let cfg = DerivConfig::default();
    let x = [0.4, 0.7, 0.2];
    c.bench_function("stencil derivative, 1-form in R3", |b| {
        b.iter(|| exterior_derivative_at(black_box(&f), black_box(&x), &cfg).unwrap())
    });
}

fn flux_derivative_grid(c: &mut Criterion) {
    let f = field("sin(x1)*x3*dx2+exp(x2/3)*dx3", 3, 1);
    let cfg = DerivConfig {
        face_subdivisions: 4,
        ..DerivConfig::default()
    };
    let x = [0.4, 0.7, 0.2];
    c.bench_function("flux derivative, 4x4 face grid", |b| {
        b.iter(|| exterior_derivative_at(black_box(&f), black_box(&x), &cfg).unwrap())
    });
}

fn boundary_integration(c: &mut Criterion) {
    let f = field("sin(x1)*dx2-x2^2*dx1", 2, 1);
    let chain = Chain::from_block(SingularBlock::inclusion(Block::unit(2))).boundary();
    let q = QuadratureSpec::new(64).unwrap();
    c.bench_function("integrate 1-form over square boundary, m=64", |b| {
        b.iter(|| integrate_over_chain(black_box(&f), &chain, &q).unwrap())
    });
}

fn curved_integration(c: &mut Criterion) {
    let f = field("exp(x3)*dx1^dx2", 3, 2);
    let map = SmoothMap::new(2, 3, |t| vec![t[0], t[1], t[0] * t[0] - t[0] * t[1]]);
    let sb = SingularBlock::new(Block::unit(2), map).unwrap();
    let q = QuadratureSpec::new(32).unwrap();
    c.bench_function("integrate 2-form over curved graph, m=32", |b| {
        b.iter(|| integrate_over_singular_block(black_box(&f), &sb, &q).unwrap())
    });
}

fn mean_value_search(c: &mut Criterion) {
    let f = field("x1^2*dx2", 2, 1);
    let cfg = DerivConfig::default();
    let q = QuadratureSpec::default();
    c.bench_function("mean-value search, depth 6", |b| {
        b.iter(|| mvt_locate(black_box(&f), &Block::unit(2), &cfg, &q, 6, 0.0).unwrap())
    });
}

criterion_group!(
    benches,
    parse_expression,
    stencil_derivative,
    flux_derivative_grid,
    boundary_integration,
    curved_integration,
    mean_value_search
);
criterion_main!(benches);

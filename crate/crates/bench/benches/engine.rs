use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use germlab_core::germs::{FormalMap, Generators};
use germlab_core::multiplicity::{codim_of, mu_sequence, IdealPresentation};
use germlab_core::quasipoly::{generic_multiplicity, orbit_matrix, Generator};
use germlab_core::ring::parse_polynomial;
use germlab_core::Jet;

fn names() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn poly(text: &str, m: u32) -> Jet {
    parse_polynomial(text, &names(), m).unwrap()
}

fn map(parts: &[&str], m: u32) -> FormalMap {
    FormalMap::new(parts.iter().map(|p| poly(p, m)).collect()).unwrap()
}

fn ideal(name: &str, gens: &[&str]) -> IdealPresentation {
    IdealPresentation::new(name, gens.iter().map(|g| poly(g, 8)).collect()).unwrap()
}

fn codim(c: &mut Criterion) {
    let gens = vec![poly("x^3 + y^4", 12), poly("x*y^2 - y^5", 12)];
    c.bench_function("codim two generators cap 24", |b| b.iter(|| codim_of(2, black_box(&gens), 24)));
}

fn mu_seq(c: &mut Criterion) {
    let mut gens = Generators::new();
    gens.add_map("F", map(&["x", "y^2"], 8)).unwrap();
    let y = ideal("Y", &["y"]);
    let x = ideal("X", &["y - x"]);
    c.bench_function("mu-seq F^n n=0..4", |b| b.iter(|| mu_sequence("F^n", 0..=4, &gens, &y, &[&x], 40)));
}

fn orbit(c: &mut Criterion) {
    let gen = Generator::Map(map(&["2x", "1/2 y + x^2"], 4));
    c.bench_function("orbit matrix order 4", |b| b.iter(|| orbit_matrix(black_box(&gen), 4).unwrap()));
}

fn generic(c: &mut Criterion) {
    let mut gens = Generators::new();
    gens.add_map("S", map(&["x + y^2", "y"], 8)).unwrap();
    let a = ideal("A", &["x"]);
    c.bench_function("generic multiplicity shear", |b| {
        b.iter(|| generic_multiplicity(&gens, &a, &[&a], 32).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = codim, mu_seq, orbit, generic
}
criterion_main!(benches);

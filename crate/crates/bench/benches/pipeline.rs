use criterion::{criterion_group, criterion_main, Criterion};

use ruleform::decompose::Decomposer;
use ruleform::observe::Formula;
use ruleform::semantics::{build_lts, ground_program, ws_provable, GroundOptions};
use ruleform::transform::{plus_pipeline, PipelineOptions};
use ruleform::{parse_term, Action};
use ruleform_bench::fixture;

fn pipeline(c: &mut Criterion) {
    for name in ["closure", "priority", "bpa0-seq"] {
        let tss = fixture(name);
        c.bench_function(&format!("plus/{name}"), |b| b.iter(|| plus_pipeline(&tss, &PipelineOptions::default()).unwrap()));
    }
}

fn well_supported(c: &mut Criterion) {
    let tss = fixture("priority");
    let roots = vec![parse_term("th(a.b+c)", &tss.signature).unwrap()];
    let g = ground_program(&tss, &roots, &GroundOptions::depth(4)).unwrap();
    c.bench_function("ws/priority", |b| b.iter(|| ws_provable(&g)));
    c.bench_function("lts/priority", |b| b.iter(|| build_lts(&tss, &roots, 4).unwrap()));
}

fn decompose(c: &mut Criterion) {
    let tss = fixture("inverse");
    let t = parse_term("f(f(x))", &tss.signature).unwrap();
    let f: Formula = "<b><a>tt".parse().unwrap();
    c.bench_function("inverse/f(f(x))", |b| {
        b.iter(|| Decomposer::new(&tss).unwrap().inverse(&t, &f).unwrap())
    });
    let tss = fixture("priority");
    let t = parse_term("th(x+y)", &tss.signature).unwrap();
    let a = Action::new("a");
    c.bench_function("ruloids/priority", |b| {
        b.iter(|| Decomposer::new(&tss).unwrap().ruloids_unmemoized(&t, &a, ruleform::decompose::Polarity::Positive).unwrap())
    });
}

criterion_group!(benches, pipeline, well_supported, decompose);
criterion_main!(benches);

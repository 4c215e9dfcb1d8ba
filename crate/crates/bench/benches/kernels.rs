use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qidlab_core::family::{build_family_greedy, CandidateOrder};
use qidlab_core::idcode::{build_simultaneous_id_code, verify_id_code, VerifyOptions};
use qidlab_core::linalg::hermitian_eigenvalues;
use qidlab_core::random::random_density;
use qidlab_core::rng::StreamRng;
use qidlab_core::transmission::{build_code_exhaustive, CodeSearch};
use qidlab_core::{CqChannel, FamilyParams};

fn eigen(c: &mut Criterion) {
    let mut rng = StreamRng::new(7, 0);
    for dim in [4usize, 16, 64] {
        let rho = random_density(&mut rng, dim, dim);
        c.bench_function(&format!("eigenvalues/dim{dim}"), |b| {
            b.iter(|| hermitian_eigenvalues(black_box(rho.matrix())))
        });
    }
}

fn greedy_family(c: &mut Criterion) {
    let params = FamilyParams::with_set_size(20, 4, 0.75).unwrap();
    c.bench_function("greedy_family/20_4", |b| {
        b.iter(|| build_family_greedy(black_box(&params), None, CandidateOrder::Lexicographic))
    });
}

fn id_verification(c: &mut Criterion) {
    let ch = CqChannel::noiseless(2);
    let code = match build_code_exhaustive(&ch, 6, 64, 0.25).unwrap() {
        CodeSearch::Found { code, .. } => code,
        CodeSearch::NotFound { .. } => unreachable!("the noiseless channel has a perfect code"),
    };
    let params = FamilyParams::with_set_size(64, 5, 0.25).unwrap();
    let family = build_family_greedy(&params, None, CandidateOrder::Lexicographic).family;
    let id = build_simultaneous_id_code(&code, &family).unwrap();
    let mut group = c.benchmark_group("id_verification");
    group.sample_size(10);
    group.bench_function("noiseless_n6", |b| {
        b.iter(|| verify_id_code(&ch, black_box(&id), &VerifyOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigen, greedy_family, id_verification);
criterion_main!(benches);

use bernays_core::calculus::{ipc, ipc_imp_bot, k_calculus};
use bernays_core::kripke::KripkeModel;
use bernays_core::lang::Formula;
use bernays_core::matrix::{godel, ipc_signature, k_signature, t3};
use bernays_core::normality::is_cover;
use bernays_core::search::{compare_with_hints, enumerate_covers, mc_member, Budget};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn f_n(n: usize) -> Formula {
    let mut parts = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            parts.push(Formula::app(
                "imp",
                vec![Formula::var(format!("X{i}")), Formula::var(format!("X{j}"))],
            ));
        }
    }
    let last = parts.pop().unwrap();
    parts.into_iter().rev().fold(last, |acc, p| Formula::app("or", vec![p, acc]))
}

fn tautology(c: &mut Criterion) {
    let g5 = godel(5).unwrap();
    let f6 = f_n(6);
    c.bench_function("tautology F6 in G5", |b| b.iter(|| g5.is_tautology(black_box(&f6)).unwrap()));
    let t = t3();
    let lin = ipc_signature().parse("or(imp(X,Y),imp(Y,X))").unwrap();
    c.bench_function("countermodel of linearity in T3", |b| b.iter(|| t.tautology(black_box(&lin)).unwrap()));
}

fn covers(c: &mut Criterion) {
    let calc = ipc();
    let g5 = godel(5).unwrap();
    c.bench_function("cover IPC G5", |b| b.iter(|| is_cover(&calc, black_box(&g5)).unwrap()));
    let frag = ipc_imp_bot();
    let budget = Budget::default();
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    group.bench_function("3-valued imp/bot covers", |b| {
        b.iter(|| enumerate_covers(&frag, 3, false, &budget).unwrap())
    });
    group.finish();
}

fn searches(c: &mut Criterion) {
    let budget = Budget::default();
    let (g4, g3) = (godel(4).unwrap(), godel(3).unwrap());
    let hint = [f_n(4)];
    c.bench_function("compare G4 G3 with hint", |b| {
        b.iter(|| compare_with_hints(&g4, &g3, &hint, &budget).unwrap())
    });
    let k = k_calculus(false);
    let f = k_signature().parse("eq(circ(X),circ(circ(X)))").unwrap();
    c.bench_function("mc in", |b| b.iter(|| mc_member(&k, black_box(&f), &budget).unwrap()));
}

fn kripke(c: &mut Criterion) {
    let chain = KripkeModel::chain(8).unwrap();
    c.bench_function("matrix of 8-world chain", |b| b.iter(|| black_box(&chain).matrix_of().unwrap()));
}

criterion_group!(benches, tautology, covers, searches, kripke);
criterion_main!(benches);

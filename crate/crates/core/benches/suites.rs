use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use elgot_iter::algebra::{check_elgot_laws, LawSizes, PartialAlgebra};
use elgot_iter::delay::{check_delay_laws, DelayLawConfig};
use elgot_iter::elgot::check_elgot_monad_axioms;
use elgot_iter::partial::{check_collapse_coherence, check_kleene_suite, check_restriction_axioms};
use elgot_iter::{Exec, LawReport, SuiteConfig};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_suite(c: &mut Criterion, name: &str, run: impl Fn(Exec) -> LawReport) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for (label, exec) in EXECS {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                let r = run(exec);
                assert!(r.passed());
                r.instances
            })
        });
    }
    group.finish();
}

fn cfg(exec: Exec) -> SuiteConfig {
    SuiteConfig { exec, ..Default::default() }
}

fn suites(c: &mut Criterion) {
    bench_suite(c, "elgot-algebra", |exec| {
        check_elgot_laws(&PartialAlgebra::range(1), LawSizes { max_states: 3, max_carrier: 2 }, exec)
    });
    bench_suite(c, "restriction", |exec| check_restriction_axioms(&cfg(exec)));
    bench_suite(c, "elgot-monad", |exec| check_elgot_monad_axioms(&cfg(exec)));
    bench_suite(c, "kleene", |exec| check_kleene_suite(&cfg(exec)));
    bench_suite(c, "collapse", |exec| check_collapse_coherence(&cfg(exec)));
    bench_suite(c, "delay", |exec| check_delay_laws(&DelayLawConfig { exec, ..Default::default() }));
}

criterion_group!(benches, suites);
criterion_main!(benches);

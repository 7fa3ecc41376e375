use pcompact::catalog::{build, GroupSpec};
use pcompact::counting::{count_burnside_classes, count_burnside_full};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let spec = GroupSpec::G29;
    let outputs: Vec<(String, String)> = [1, 2, 7]
        .into_iter()
        .map(|threads| {
            in_pool(threads, || {
                let g = build(&spec, spec.working_modulus(2).unwrap()).unwrap();
                let table = g.conjugacy_classes().unwrap();
                (
                    count_burnside_full(&g, 2).unwrap().without_timing().to_json(),
                    count_burnside_classes(&g, &table, 2).unwrap().without_timing().to_json(),
                )
            })
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

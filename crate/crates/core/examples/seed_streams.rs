//! Splittable seeding: every unit of work derives its own generator, so
//! results are identical whatever the thread count.
//!
//! Run with `cargo run --example seed_streams`.

use qrs::noise::NoiseSchedule;
use qrs::protocol::run_protocol;
use qrs::qcore::SensingField;
use qrs::rng::SeedStream;
use qrs::verify::TestParams;
use rand::Rng;

fn main() -> qrs::Result<()> {
    let root = SeedStream::new(42);
    for i in 0..3 {
        let first: u64 = root.child(i).rng().random();
        println!("trial {i}: key {:016x}, first draw {first:016x}", root.child(i).key());
    }
    println!("named stream 'soundness': {:016x}", root.named("soundness").key());

    let params = TestParams::from_resources(7, 1.0, 0.0)?;
    let field = SensingField::new(0.05, 1.0)?;
    let run = |threads: usize| -> qrs::Result<f64> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| {
            Ok(run_protocol(1_000, &params, &NoiseSchedule::Identity, &field, &mut root.child(9).rng())?.s_m)
        })
    };
    let (a, b) = (run(1)?, run(4)?);
    println!("S_M with 1 thread: {a}, with 4 threads: {b}, identical: {}", a == b);
    Ok(())
}

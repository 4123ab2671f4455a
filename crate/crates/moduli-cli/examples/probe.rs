use std::time::Instant;

use moduli_core::degrees::{
    generated_field_at, index_report_at, pair_field_at, ClassPolyStore, PairOp,
};
use moduli_core::forms::Discriminant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dx: i64 = args[1].parse().unwrap();
    let dy: i64 = args[2].parse().unwrap();
    let mut store = ClassPolyStore::new();
    let dxd = Discriminant::new(dx).unwrap();
    let dyd = Discriminant::new(dy).unwrap();

    let t0 = Instant::now();
    store.get(&dxd).unwrap();
    store.get(&dyd).unwrap();
    println!("class polys: {:.2}s", t0.elapsed().as_secs_f64());

    let t1 = Instant::now();
    let pair = pair_field_at(&mut store, &dxd, &dyd, 0).unwrap();
    println!("pair_field: {:.2}s", t1.elapsed().as_secs_f64());
    drop(pair);

    let t2 = Instant::now();
    let generated = generated_field_at(&mut store, &dxd, &dyd, PairOp::Sum, 0).unwrap();
    println!("generated_field: {:.2}s", t2.elapsed().as_secs_f64());
    drop(generated);

    let t3 = Instant::now();
    let reports = index_report_at(&mut store, &dxd, &dyd, PairOp::Sum, 0).unwrap();
    println!(
        "index_report total: {:.2}s ({} reports, {} uncertified)",
        t3.elapsed().as_secs_f64(),
        reports.len(),
        reports.iter().filter(|r| !r.certified).count()
    );
}

//! Closed-form uncertainty bounds for the client and the server, and the
//! resulting information asymmetry, over a small grid.
//!
//! Run with `cargo run --example bounds_table`.

use qrs::bounds::{
    asymmetry_ratio, client_floor, client_upper, confidence_level, epsilon_from_resources, hoeffding_client_upper,
    hoeffding_server_lower, server_lower, BoundInputs,
};

fn main() -> qrs::Result<()> {
    println!("{:>8} {:>7} {:>10} {:>10} {:>10} {:>10} {:>10}", "eps", "M", "client", "server", "ratio", "hoef_c", "hoef_s");
    for eps in [0.0, 0.001, 0.01, 0.1] {
        for m in [100u64, 10_000] {
            let i = BoundInputs::new(eps, m, 1.0);
            let h = i.with_s_tilde(2.0);
            println!(
                "{eps:>8} {m:>7} {:>10.4} {:>10} {:>10} {:>10.4} {:>10}",
                client_upper(&i)?,
                short(server_lower(&i)?.to_string()),
                short(asymmetry_ratio(&i)?.to_string()),
                hoeffding_client_upper(&h)?,
                short(hoeffding_server_lower(&h)?.to_string()),
            );
        }
    }
    println!("client floor at eps = 0.1: {:.4}", client_floor(0.1, 1.0)?);

    let eps = epsilon_from_resources(100_000_000, 0.0, 1e-6)?;
    let i = BoundInputs::new(eps, 1_000, 1.0);
    println!(
        "8k = 8e8 qubits, delta = 1e-6 -> eps = {eps:.4e}; at M = 1000 ratio = {}, holding with probability {:.4}",
        asymmetry_ratio(&i)?,
        confidence_level(1e-6, 1_000, None)?
    );
    Ok(())
}

fn short(s: String) -> String {
    s.parse::<f64>().map_or(s, |v| format!("{v:.4}"))
}

//! Closed discrete definable sets of every finite size, so no bound on the
//! number of components holds uniformly in the parameter.

use opencore::interior::nonelementarity_report;

fn main() {
    for n in [0, 1, 2, 5, 12, 40] {
        let r = nonelementarity_report(n);
        println!(
            "N={n:>2}: {} points, complement in {} components",
            r.fiber_size, r.complement_components
        );
    }
    println!("fiber for N=3: {}", nonelementarity_report(3).fiber);
}

use std::time::Instant;
use toric_spectral::metric::RadialProfile;
use toric_spectral::reconstruct::{round_trip, ReconstructOptions};

fn main() {
    let profiles: Vec<(&str, Vec<f64>)> = vec![
        ("0.25(1-t)", vec![0.25, -0.25]),
        ("0.2 t(1-t)", vec![0.0, 0.2, -0.2]),
    ];
    for n in [2usize, 3] {
        for (name, coeffs) in &profiles {
            let prof = RadialProfile::polynomial(coeffs.clone(), n).unwrap();
            let mut errs = Vec::new();
            for abel_n in [512usize, 1024, 2048, 4096] {
                let t0 = Instant::now();
                let rep = round_trip(&prof, 4096.0, abel_n, ReconstructOptions::default()).unwrap();
                errs.push(rep.sup_error.unwrap());
                println!(
                    "n={n} h''={name} N={abel_n}: sup={:.4e} l2={:.4e} ({} ms)",
                    rep.sup_error.unwrap(),
                    rep.l2_error.unwrap(),
                    t0.elapsed().as_millis()
                );
            }
            for w in errs.windows(2) {
                println!("   ratio {:.2}", w[0] / w[1]);
            }
        }
    }
}

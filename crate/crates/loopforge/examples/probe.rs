use loopforge::*;
fn main() {
    use rand::SeedableRng;
    use rand::Rng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
    let m = 4usize;
    let mut coeffs = su2::BasisCoeffs::zeros(m);
    for (r, k) in su2::lex_slots(m) {
        coeffs.set(r, k, rng.gen_range(-1.0..1.0)).unwrap();
    }
    let scheme = splitting::scheme_for_basis(1, m);
    let p = splitting::apply_scheme_loops(&scheme, &coeffs, 1.0).unwrap();
    println!("degree after trim: {}", p.degree());
    let report = p.classify(loops::LoopClass::UnitaryGroup);
    println!("unitarity defect: {:.3e}  det defect: {:.3e}", report.max_unitarity_defect, report.max_det_defect);
    for k in [0i64, 10, 20, 40, 47, 48, 49, 50, 60, 80, 100, 116] {
        println!("|C_{:4}| = {:.3e}   |C_{:4}| = {:.3e}", k, linalg::spectral_norm(&p.coeff(k)), -k, linalg::spectral_norm(&p.coeff(-k)));
    }
}

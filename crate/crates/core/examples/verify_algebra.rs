//! Planar gamma matrices, the σF contraction and the γ5 dual identity.

use tdab::algebra::{
    clifford_check, contract_dual_sigma_f, contract_sigma_f, gamma_rep, sigma_f_tensor_sum, verify_dual_identity,
    verify_dual_identity_in, DiracBasis, FieldTensor, SpinLabel,
};

fn main() {
    let f = FieldTensor::new([0.3, -1.2, 0.5], [0.7, 0.1, -2.0]);

    for s in [SpinLabel::Up, SpinLabel::Down] {
        let rep = gamma_rep(s);
        let closed = contract_sigma_f(&rep, &f);
        let brute = sigma_f_tensor_sum(&rep, &f);
        println!("s = {:+}", s.as_i8());
        println!("  clifford residual   {:.1e}", clifford_check(&rep));
        let e = closed.entries;
        println!("  sigma.F closed form [{:.2}, {:.2}; {:.2}, {:.2}]", e[0][0], e[0][1], e[1][0], e[1][1]);
        println!("  vs tensor sum       {:.1e}", closed.max_abs_diff(&brute));
    }

    // Only B_x, B_y and E_z survive the dual contraction.
    let dual = contract_dual_sigma_f(&f);
    let diag: Vec<String> = (0..4).map(|k| format!("{:.2}", dual.entries[k][k])).collect();
    println!("dual sigma.F diagonal [{}]", diag.join(", "));
    println!("dual identity, Dirac basis  {:.1e}", verify_dual_identity(&f));
    println!("dual identity, chiral basis {:.1e}", verify_dual_identity_in(DiracBasis::Chiral, &f));
}

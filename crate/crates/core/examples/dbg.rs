use cesaro_ri::expr::FunctionExpr;
use cesaro_ri::phi::QuasiConcave;
use cesaro_ri::spaces::RiSpace;
use cesaro_ri::cesaro::cesaro_space_norm;

fn main() {
    // witness f(t) = a(1-t)^{-1-a/2}; exact ‖Cf‖_Λ(t^a) = 2a(ψ(a) - ψ(a/2))
    for (a, exact) in [(0.5, 2.2639373056766717), (0.75, 2.5021856094404325), (1.0, 4.0 * std::f64::consts::LN_2)] {
        let f = FunctionExpr::mirrored_power(a, -1.0 - a / 2.0).unwrap();
        let x = RiSpace::lorentz(QuasiConcave::power(a).unwrap()).unwrap();
        let r = cesaro_space_norm(&x, &f, 1e-8);
        println!("a={a}: {r:?}   exact={exact}");
    }
    // divergence side: rearrange(f) = Power(a, -1-a/2), C of it divergent
    let f = FunctionExpr::mirrored_power(0.5, -1.25).unwrap();
    let fs = f.rearrange();
    println!("f* = {:?}", fs);
    println!("C(f*) divergent: {}", cesaro_ri::cesaro::cesaro(&fs).is_divergent_marker());
}

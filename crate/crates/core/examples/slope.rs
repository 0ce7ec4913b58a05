//! Computes the anomaly-cancellation slope for one family point, starting
//! from nothing but the structure equations: torsion 3-form, curvature of
//! the skew-torsion connection, traces, and the solve.
//!
//! Run with `cargo run -p strominger-core --example slope`.

use strominger_core::anomaly::{
    four_form_coefficient, gravitational_data, instanton_trace, solve_alpha, AlphaResult,
    InstantonModel,
};
use strominger_core::dsl::parse_structure;
use strominger_core::family::{build_family_point, FamilyId, FamilyParams};
use strominger_core::hermitian::{is_balanced, HermitianMetric};
use strominger_core::Scalar;

fn main() {
    // the same structure can come from the catalog or from the input language
    let text = "
        basis w1 w2 w3;
        param s = 1/4;
        d w1 = 0; d w2 = 0;
        d w3 = w1^w2 + w1^~w1 - s^2*w2^~w2;
    ";
    let spec = parse_structure(text).unwrap().bind(&[]).unwrap();
    let diag = spec.check_structure();
    println!("jacobi_ok = {}, integrable = {}", diag.jacobi_ok, diag.integrable);

    let s = Scalar::ratio(1, 4);
    let metric = HermitianMetric::diagonal(Scalar::one(), &s * &s, Scalar::one()).unwrap();
    println!("balanced = {}", is_balanced(&spec, &metric.fundamental_form()).unwrap());

    let data = gravitational_data(&spec, &metric).unwrap();
    println!("T  = {}", data.torsion);
    println!("dT = {}", data.d_torsion);
    println!("tr = {}", data.trace);

    let point = build_family_point(
        FamilyId::Xs,
        FamilyParams { s: Some(s), ..Default::default() },
    )
    .unwrap();
    for model in [InstantonModel::Flat, InstantonModel::AbelianCcdlmz] {
        let inst = instanton_trace(&model, &point).unwrap();
        match solve_alpha(&data.d_torsion, &data.trace, &inst).unwrap() {
            AlphaResult::Proportional(alpha) => {
                println!("alpha({}) = {}", model.name(), alpha)
            }
            other => println!("alpha({}) has no constant solution: {other:?}", model.name()),
        }
    }
    println!(
        "dT as a multiple of w1^~w1^w2^~w2: {}",
        four_form_coefficient(&data.d_torsion).unwrap()
    );
}

use posiqubo_web::{compile_anf_json, factor_json, posiform_chain_json, sample_anf, sample_polynomial};

#[test]
fn factors_small_numbers() {
    let v = factor_json(143, 0).unwrap();
    assert_eq!(v["summary"], "143 = 11 x 13");
    assert_eq!(v["report"]["energy"], 0);
    assert!(factor_json(16, 0).is_err());
    assert!(factor_json(u32::MAX, 0).is_err());
}

#[test]
fn chain_on_the_sample() {
    let v = posiform_chain_json(&sample_polynomial()).unwrap();
    let steps = v["steps"].as_array().unwrap();
    let terms: Vec<u64> = steps.iter().map(|s| s["terms"].as_u64().unwrap()).collect();
    assert_eq!(terms, [10, 6, 4, 4, 4]);
    assert_eq!(steps[3]["live_vars"], 3);
    assert_eq!(steps[4]["live_vars"], 2);
    assert_eq!(v["graph"]["weight"], 55);
    assert_eq!(v["minimum"], 55);
    assert!(posiform_chain_json("{").is_err());
}

#[test]
fn compiles_the_sample_system() {
    let v = compile_anf_json(&sample_anf(), "").unwrap();
    assert_eq!(
        (v["report"]["coeff_min"].as_i64(), v["report"]["coeff_max"].as_i64()),
        (Some(-32), Some(256))
    );
    assert!(!v["qubo_preview"].as_array().unwrap().is_empty());
    let v = compile_anf_json(&sample_anf(), "y0=1, y1=0").unwrap();
    assert_eq!(v["report"]["n_fixed"], 2);
    assert!(compile_anf_json("x1 + * x2", "").is_err());
    assert!(compile_anf_json(&sample_anf(), "zz=1").is_err());
}

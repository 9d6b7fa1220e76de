use apnforge::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("apnforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = invoke(&full);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn apn_cube_over_gf1024() {
    let v = json(&["apn", "--n", "10", "--poly", "x^3"]);
    assert_eq!(v["apn"], true);
    assert_eq!(v["uniformity"], 2);
    assert_eq!(v["modulus"], "0x409");
}

#[test]
fn coprime_gold_pair() {
    let v = json(&["coprime", "--k", "4", "--d", "5"]);
    assert_eq!(v["formula"], false);
    assert_eq!(v["bruteforce"], false);
    assert_eq!(v["agree"], true);
    let v = json(&["coprime", "--k", "2", "--d", "10"]);
    assert_eq!(v["formula"], Value::Null);
    assert_eq!(v["bruteforce"], false);
}

#[test]
fn phi_rendering() {
    let (code, out, _) = invoke(&["phi", "--j", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "x^2+x*y+x*z+y^2+y*z+z^2\n");
    let (_, out, _) = invoke(&["phi", "--n", "3", "--poly", "x^3+x^2"]);
    assert_eq!(out, "1\n");
}

#[test]
fn spectrum_json_shape_and_csv() {
    let (code, out, _) = invoke(&["ddt", "--n", "4", "--poly", "x^3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "{\"n\":4,\"modulus\":\"0x13\",\"poly\":\"x^3\",\"uniformity\":2,\
         \"histogram\":[{\"count\":0,\"frequency\":120},{\"count\":2,\"frequency\":120}],\"apn\":true}\n"
    );
    let (_, out, _) = invoke(&["ddt", "--n", "4", "--poly", "x^3", "--format", "csv"]);
    assert_eq!(out, "count,frequency\n0,120\n2,120\n");
    let v = json(&["ddt", "--n", "3", "--poly", "x^3", "--full"]);
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 8);
    assert_eq!(table[0][0], 8);
}

#[test]
fn screen_verdicts() {
    let v = json(&["screen", "--n", "5", "--poly", "x^9+x^7"]);
    assert_eq!(v["status"], "NotExceptional");
    assert_eq!(v["theorem"], "Thm 11");
    let v = json(&["screen", "--n", "5", "--poly", "x^3"]);
    assert_eq!(v["status"], "ConjecturedExceptional");
    let (_, out, _) = invoke(&["screen", "--n", "5", "--poly", "x^7+x^5", "--format", "csv"]);
    assert!(out.starts_with("test,inputs,outcome\n"));
    assert!(out.contains("gold_number,d=7,no\n"));
}

#[test]
fn gold_audit_points_families() {
    let v = json(&["gold", "--k", "3"]);
    assert_eq!(v["matches"], true);
    assert_eq!(v["factors"].as_array().unwrap().len(), 6);
    let v = json(&["audit", "--k", "2", "--i", "1", "--l", "3"]);
    assert_eq!(v["kind"], "checked");
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    let v = json(&["audit", "--k", "3", "--i", "2", "--l", "1"]);
    assert_eq!(v["kind"], "gold_case");
    let v = json(&["points", "--n", "3", "--poly", "x^5"]);
    assert_eq!(v["total"], v["affine"].as_u64().unwrap() + v["at_infinity"].as_u64().unwrap());
    let v = json(&["families", "--family", "gold", "--r", "3", "--n", "10"]);
    assert_eq!(v[0]["exponent"], 9);
    assert_eq!(v[0]["apn"], true);
}

#[test]
fn usage_errors_exit_2_with_example() {
    let (code, _, err) = invoke(&["apn", "--n", "10", "--poly", "x^3 y"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--poly"), "{err}");
    assert!(err.contains("example: apnforge apn"), "{err}");

    let (code, _, err) = invoke(&["apn", "--poly", "x^3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--n"), "{err}");

    let (code, _, err) = invoke(&["apn", "--n", "4", "--modulus", "0x15", "--poly", "x^3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--modulus"), "{err}");

    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, err) = invoke(&["verify", "nonsense"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown suite"), "{err}");
}

#[test]
fn domain_errors_exit_3() {
    let (code, out, err) = invoke(&["families", "--family", "kasami-welch", "--r", "1", "--n", "4"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(out.is_empty());
    assert!(err.contains("n odd"), "{err}");
    let (code, _, _) = invoke(&["ddt", "--n", "21", "--poly", "x^3"]);
    assert_eq!(code, EXIT_DOMAIN);
    let (code, _, _) = invoke(&["audit", "--k", "2", "--i", "1", "--l", "4"]);
    assert_eq!(code, EXIT_DOMAIN);
}

#[test]
fn jobs_do_not_change_output() {
    let args = ["ddt", "--n", "7", "--poly", "x^9+x^7+0x3*x^5", "--format", "json"];
    let (_, base, _) = invoke(&args);
    for jobs in ["1", "3"] {
        let mut a = args.to_vec();
        a.extend(["--jobs", jobs]);
        assert_eq!(invoke(&a).1, base);
    }
    let (_, again, _) = invoke(&args);
    assert_eq!(again, base);
}

#[test]
fn rendered_polynomials_reparse() {
    let v = json(&["apn", "--n", "6", "--poly", "0x1*x^9 + 0x3*x^5 + 0x2d*x + 0x7"]);
    let rendered = v["poly"].as_str().unwrap().to_string();
    let again = json(&["apn", "--n", "6", "--poly", &rendered]);
    assert_eq!(again["poly"], rendered.as_str());
    assert_eq!(again["uniformity"], v["uniformity"]);
}

#[test]
fn verify_suites() {
    let (code, out, err) = invoke(&["verify", "gold-factorization", "--format", "json"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let checks = v.as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(err.contains("[gold-factorization] k=5: pass"), "{err}");
    for suite in ["lucas", "even-identity", "prop1"] {
        let (code, out, err) = invoke(&["verify", suite]);
        assert_eq!(code, EXIT_OK, "{suite}: {out}{err}");
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("coprime"));
}

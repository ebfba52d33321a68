//! End-to-end HTTP tests against an ephemeral in-process server.

use nr_service::{bind_ephemeral, ErrorBody, ErrorKind};
use serde_json::{json, Value};

async fn start() -> String {
    let (addr, _handle) = bind_ephemeral().await.unwrap();
    format!("http://{addr}")
}

#[tokio::test]
async fn health_and_formats() {
    let base = start().await;
    let client = reqwest::Client::new();

    let health: Value = client
        .get(format!("{base}/health"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(health["status"], "ok");

    let formats: Vec<Value> = client
        .get(format!("{base}/dci/formats"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(formats.len(), 15);
    let f2_0 = formats.iter().find(|f| f["name"] == "2_0").unwrap();
    assert_eq!(f2_0["usage"], "Notify a group of UEs of the slot format");
    assert_eq!(f2_0["field_modeled"], false);
}

#[tokio::test]
async fn riv_and_sliv_round_trip() {
    let base = start().await;
    let client = reqwest::Client::new();

    let encoded: Value = client
        .post(format!("{base}/codec/riv/encode"))
        .json(&json!({ "rb_start": 4, "l_rbs": 15, "n_size": 31 }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(encoded["riv"], 438);
    assert_eq!(encoded["field_bits"], 9);

    let decoded: Value = client
        .post(format!("{base}/codec/riv/decode"))
        .json(&json!({ "riv": 438, "n_size": 31 }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(decoded["rb_start"], 4);
    assert_eq!(decoded["l_rbs"], 15);

    let sliv: Value = client
        .post(format!("{base}/codec/sliv/encode"))
        .json(&json!({ "start_symbol": 7, "length": 6 }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(sliv["sliv"], 77);

    let invalid = client
        .post(format!("{base}/codec/sliv/encode"))
        .json(&json!({ "start_symbol": 7, "length": 10 }))
        .send()
        .await
        .unwrap();
    assert_eq!(invalid.status(), 422);
    let body: ErrorBody = invalid.json().await.unwrap();
    assert_eq!(body.kind, ErrorKind::Codec);
}

#[tokio::test]
async fn dci_build_parse_round_trip() {
    let base = start().await;
    let client = reqwest::Client::new();

    let built: Value = client
        .post(format!("{base}/codec/dci/build"))
        .json(&json!({
            "format": "1_0",
            "freq": { "type": "type1", "rb_start": 4, "l_rbs": 15 },
            "tdra_index": 2,
            "rnti": 4097,
            "bwp": { "crb_start": 10, "size_rb": 31 }
        }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let bits = built["bits"].as_str().unwrap();
    assert!(bits.starts_with("110110110"), "type 1 field leads: {bits}");
    assert_eq!(built["total_bits"], 9 + 4 + 24);

    let parsed: Value = client
        .post(format!("{base}/codec/dci/parse"))
        .json(&json!({
            "bits": bits,
            "format": "1_0",
            "rnti": 4097,
            "bwp": { "crb_start": 10, "size_rb": 31 }
        }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(parsed["freq"]["rb_start"], 4);
    assert_eq!(parsed["freq"]["l_rbs"], 15);
    assert_eq!(parsed["tdra_index"], 2);

    // Wrong RNTI: the message is not addressed to us.
    let wrong = client
        .post(format!("{base}/codec/dci/parse"))
        .json(&json!({
            "bits": bits,
            "format": "1_0",
            "rnti": 4098,
            "bwp": { "crb_start": 10, "size_rb": 31 }
        }))
        .send()
        .await
        .unwrap();
    assert_eq!(wrong.status(), 404);
    let body: ErrorBody = wrong.json().await.unwrap();
    assert_eq!(body.kind, ErrorKind::NotAddressed);
}

fn golden_scenario() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/golden.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[tokio::test]
async fn scenario_run_and_render() {
    let base = start().await;
    let client = reqwest::Client::new();

    let report: Value = client
        .post(format!("{base}/scenario/run"))
        .json(&golden_scenario())
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(report["violation_count"], 0);
    assert_eq!(report["horizon_slots"], 10);

    let rendered: Value = client
        .post(format!("{base}/scenario/render"))
        .json(&json!({ "scenario": golden_scenario(), "format": "csv" }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let artifact = rendered["artifact"].as_str().unwrap();
    assert!(artifact.starts_with("slot,crb,occupant\n"));

    // Infeasible scenario: single BWP fully protected, zero budgets.
    let mut infeasible = golden_scenario();
    infeasible["bwps"] = json!([{ "id": 0, "crb_start": 0, "size_rb": 50 }]);
    infeasible["protections"] = json!([{ "slots": [0, 9], "crbs": [0, 99], "label": "radar" }]);
    let resp = client
        .post(format!("{base}/scenario/run"))
        .json(&infeasible)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 409);
    let body: ErrorBody = resp.json().await.unwrap();
    assert_eq!(body.kind, ErrorKind::Reschedule);

    // Invalid config: unknown schema version.
    let mut bad = golden_scenario();
    bad["schema_version"] = json!(2);
    let resp = client
        .post(format!("{base}/scenario/run"))
        .json(&bad)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 422);
    let body: ErrorBody = resp.json().await.unwrap();
    assert_eq!(body.kind, ErrorKind::Config);
}

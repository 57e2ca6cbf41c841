mod common;

use acr_core::agent::{FieldKind, FieldSpec, ToolOutput, ToolRegistry, ToolSpec};
use acr_core::mcp::McpServer;
use acr_core::tools::build_registry;
use serde_json::{json, Value};

fn run_session(server: &mut McpServer, input: &str) -> String {
    let mut out = Vec::new();
    server.serve(input.as_bytes(), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn initialized() -> McpServer {
    let mut s = McpServer::new(common::local_registry());
    s.handle_line(r#"{"jsonrpc":"2.0","id":0,"method":"initialize","params":{}}"#).unwrap();
    s
}

fn call(server: &mut McpServer, line: Value) -> Value {
    serde_json::from_str(&server.handle_line(&line.to_string()).expect("response")).unwrap()
}

#[test]
fn golden_transcript_matches_byte_for_byte() {
    let mut server = McpServer::new(common::local_registry());
    let got = run_session(&mut server, &common::fixture("mcp_session.in.jsonl"));
    assert_eq!(got, common::fixture("mcp_session.out.jsonl"));
}

#[test]
fn every_output_line_is_a_response_with_one_of_result_or_error() {
    let mut server = McpServer::new(common::local_registry());
    let out = run_session(&mut server, &common::fixture("mcp_session.in.jsonl"));
    let mut ids = Vec::new();
    for line in out.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["jsonrpc"], "2.0");
        assert!(v.get("result").is_some() ^ v.get("error").is_some());
        ids.push(v["id"].clone());
    }
    assert_eq!(ids, [json!(1), json!(2), json!(3), Value::Null, json!("x-5")]);
}

#[test]
fn second_initialize_is_rejected() {
    let mut s = initialized();
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":9,"method":"initialize"}));
    assert_eq!(r["error"]["code"], -32600);
}

#[test]
fn initialize_defaults_protocol_and_advertises_tools_only() {
    let mut s = McpServer::new(ToolRegistry::new());
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    assert_eq!(r["result"]["protocolVersion"], "2024-11-05");
    assert_eq!(r["result"]["serverInfo"]["name"], "acr-mcp");
    assert!(r["result"]["capabilities"].get("tools").is_some());
    assert!(r["result"]["capabilities"].get("resources").is_none());
    assert!(r["result"]["capabilities"].get("prompts").is_none());
}

#[test]
fn calls_before_initialize_are_rejected() {
    let mut s = McpServer::new(common::local_registry());
    for method in ["tools/list", "tools/call"] {
        let r = call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":method,"params":{"name":"x"}}));
        assert_eq!(r["error"]["code"], -32600);
        assert_eq!(r["error"]["data"], "not initialized");
    }
    // ping is allowed at any time
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"ping"}));
    assert_eq!(r["result"], json!({}));
}

#[test]
fn empty_registry_lists_nothing() {
    let mut s = McpServer::new(ToolRegistry::new());
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"tools/list"}));
    assert_eq!(r["result"]["tools"], json!([]));
}

#[test]
fn tools_list_is_sorted_and_matches_registry() {
    let model = acr_core::gbxml::parse_gbxml(&common::fixture("small_office.xml")).unwrap().model;
    let registry = build_registry(&common::local_env().with_model(model));
    let mut s = McpServer::new(registry.clone());
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"tools/list"}));
    let names: Vec<&str> = r["result"]["tools"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), registry.len());
    assert!(names.contains(&"get_surface_area"));
    let lwa = r["result"]["tools"].as_array().unwrap().iter().find(|t| t["name"] == "LightingAllowedWattage").unwrap();
    assert_eq!(lwa["inputSchema"]["required"], json!(["area", "area_unit", "use_type", "code_version"]));
}

#[test]
fn missing_required_field_is_invalid_params() {
    let mut s = initialized();
    let r = call(
        &mut s,
        json!({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"LightingAllowedWattage",
            "arguments":{"area_unit":"m2","use_type":"bank_financial_institution","code_version":"ashrae_90_1_2022"}}}),
    );
    assert_eq!(r["error"]["code"], -32602);
}

#[test]
fn unknown_tool_is_invalid_params() {
    let mut s = initialized();
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"nope"}}));
    assert_eq!(r["error"]["code"], -32602);
    assert_eq!(r["error"]["data"], "unknown tool");
}

#[test]
fn unknown_surface_is_tool_content_error() {
    let model = acr_core::gbxml::parse_gbxml(&common::fixture("small_office.xml")).unwrap().model;
    let mut s = McpServer::new(build_registry(&common::local_env().with_model(model)));
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    let r = call(
        &mut s,
        json!({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"get_surface_area","arguments":{"surface_id":"ghost"}}}),
    );
    assert_eq!(r["result"]["isError"], true);
    assert!(r["result"]["content"][0]["text"].as_str().unwrap().starts_with("UnknownSurface"));
}

#[test]
fn tool_faults_are_content_not_protocol_errors() {
    let mut s = initialized();
    let r = call(
        &mut s,
        json!({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"LightingAllowedWattage",
            "arguments":{"area":500,"area_unit":"m2","use_type":"spaceport","code_version":"ashrae_90_1_2022"}}}),
    );
    assert!(r.get("error").is_none());
    assert_eq!(r["result"]["isError"], true);
    assert!(r["result"]["content"][0]["text"].as_str().unwrap().starts_with("UnknownUseType"));
}

#[test]
fn malformed_frames() {
    let mut s = initialized();
    let cases = [
        (r#"[{"jsonrpc":"2.0","id":1,"method":"ping"}]"#, -32600, Value::Null),
        (r#"{"jsonrpc":"1.0","id":4,"method":"ping"}"#, -32600, json!(4)),
        (r#"{"jsonrpc":"2.0","id":{"a":1},"method":"ping"}"#, -32600, Value::Null),
        (r#"{"jsonrpc":"2.0","id":1.5,"method":"ping"}"#, -32600, Value::Null),
        (r#"{"jsonrpc":"2.0","id":5}"#, -32600, json!(5)),
        (r#"42"#, -32600, Value::Null),
        (r#"{"jsonrpc":"2.0","id":6,"method":"tools/call","params":{"name":7}}"#, -32602, json!(6)),
        (r#"{"jsonrpc":"2.0","id":7,"method":"tools/call","params":{"name":"LightingAllowedWattage","arguments":[1]}}"#, -32602, json!(7)),
    ];
    for (line, code, id) in cases {
        let r: Value = serde_json::from_str(&s.handle_line(line).unwrap()).unwrap();
        assert_eq!(r["error"]["code"], code, "{line}");
        assert_eq!(r["id"], id, "{line}");
    }
}

#[test]
fn notifications_get_no_response_even_when_unknown() {
    let mut s = initialized();
    assert!(s.handle_line(r#"{"jsonrpc":"2.0","method":"notifications/initialized"}"#).is_none());
    assert!(s.handle_line(r#"{"jsonrpc":"2.0","method":"whatever"}"#).is_none());
    assert!(s.handle_line("   ").is_none());
}

#[test]
fn panicking_handler_is_internal_error_and_server_survives() {
    let mut reg = ToolRegistry::new();
    reg.register(ToolSpec::new("boom", "panics", vec![], |_| panic!("kaboom"))).unwrap();
    reg.register(ToolSpec::new("ok", "fine", vec![], |_| Ok(ToolOutput::text("fine")))).unwrap();
    let mut s = McpServer::new(reg);
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    let prev = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"boom"}}));
    std::panic::set_hook(prev);
    assert_eq!(r["error"]["code"], -32603);
    let r = call(&mut s, json!({"jsonrpc":"2.0","id":3,"method":"tools/call","params":{"name":"ok"}}));
    assert_eq!(r["result"]["content"][0]["text"], "fine");
}

#[test]
fn tools_call_matches_direct_invocation() {
    let registry = common::local_registry();
    let mut s = McpServer::new(registry.clone());
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    for area in [0.0, 1.0, 123.4, 500.0, 9999.9] {
        for unit in ["m2", "ft2"] {
            let args = json!({"area":area,"area_unit":unit,"use_type":"bank_financial_institution","code_version":"ashrae_90_1_2022"});
            let direct = registry
                .invoke("LightingAllowedWattage", args.as_object().unwrap())
                .unwrap()
                .unwrap()
                .text;
            let r = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"LightingAllowedWattage","arguments":args}}));
            assert_eq!(r["result"]["content"][0]["text"].as_str().unwrap(), direct);
        }
    }
}

#[test]
fn custom_tool_schema_validation() {
    let mut reg = ToolRegistry::new();
    reg.register(ToolSpec::new(
        "flag",
        "takes a boolean",
        vec![FieldSpec::required("on", FieldKind::Boolean, "switch")],
        |a| Ok(ToolOutput::text(a["on"].to_string())),
    ))
    .unwrap();
    let mut s = McpServer::new(reg);
    call(&mut s, json!({"jsonrpc":"2.0","id":1,"method":"initialize"}));
    let bad = call(&mut s, json!({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"flag","arguments":{"on":"yes"}}}));
    assert_eq!(bad["error"]["code"], -32602);
    let good = call(&mut s, json!({"jsonrpc":"2.0","id":3,"method":"tools/call","params":{"name":"flag","arguments":{"on":true}}}));
    assert_eq!(good["result"]["content"][0]["text"], "true");
}

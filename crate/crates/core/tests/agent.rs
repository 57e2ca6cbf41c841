mod common;

use std::sync::{Arc, Mutex};

use acr_core::agent::{
    run_agent, run_agent_with_history, AgentConfig, AgentError, FieldKind, FieldSpec, StepRole, TokenSource, ToolOutput,
    ToolRegistry, ToolSpec, AGENT_SYSTEM_PROMPT,
};
use acr_core::llm::{Generation, GenerationParams, LlmClient, LlmError, Message, ScriptedLlm, UnavailableLlm};
use proptest::prelude::*;

fn config() -> AgentConfig {
    AgentConfig::default()
}

#[test]
fn bank_episode_returns_3019() {
    let llm = ScriptedLlm::new([common::BANK_ACTION, common::BANK_FINAL]);
    let run = run_agent(&common::local_registry(), &llm, common::BANK_QUERY, &config()).unwrap();
    assert_eq!(run.input, common::BANK_QUERY);
    assert_eq!(run.output, "3019 W");
    assert_eq!(run.tools_used, ["LightingAllowedWattage"]);
    assert!(run.transcript.is_well_formed());
    let obs: Vec<_> = run.transcript.steps.iter().filter(|s| s.role == StepRole::Observation).collect();
    assert_eq!(obs.len(), 1);
    assert_eq!(obs[0].text, "3019");
    assert_eq!(run.transcript.metrics.llm_turns, 2);
    assert_eq!(run.transcript.metrics.token_source, TokenSource::WhitespaceProxy);
    assert!(run.transcript.metrics.prompt_tokens > 0 && run.transcript.metrics.completion_tokens > 0);
}

#[test]
fn system_prompt_is_sent_verbatim_first() {
    assert!(AGENT_SYSTEM_PROMPT.starts_with("You are an agent tool caller. Follow this rule strictly:"));
    let llm = ScriptedLlm::new(["Final Answer: done"]);
    let run = run_agent(&common::local_registry(), &llm, "hi", &config()).unwrap();
    assert_eq!(run.transcript.steps[0].role, StepRole::System);
    assert_eq!(run.transcript.steps[0].text, AGENT_SYSTEM_PROMPT.trim_end());
}

#[test]
fn immediate_answer_uses_no_tools() {
    let llm = ScriptedLlm::new(["Final Answer: done"]);
    let run = run_agent(&common::local_registry(), &llm, "anything", &config()).unwrap();
    assert_eq!(run.output, "done");
    assert!(run.tools_used.is_empty());
}

#[test]
fn unknown_tool_is_observed_then_recovers() {
    let llm = ScriptedLlm::new(["Action: Teleport\nAction Input: now", common::BANK_ACTION, common::BANK_FINAL]);
    let run = run_agent(&common::local_registry(), &llm, common::BANK_QUERY, &config()).unwrap();
    let obs: Vec<_> = run.transcript.steps.iter().filter(|s| s.role == StepRole::Observation).collect();
    assert!(obs[0].text.starts_with("unknown tool 'Teleport'"));
    assert!(obs[0].text.contains("LightingAllowedWattage"));
    assert_eq!(run.tools_used, ["LightingAllowedWattage"]);
}

#[test]
fn unknown_tool_forever_exceeds_max_steps() {
    let llm = ScriptedLlm::cycling(["Action: Teleport\nAction Input: now"]);
    let cfg = AgentConfig { max_steps: 5, ..config() };
    let err = run_agent(&common::local_registry(), &llm, "q", &cfg).unwrap_err();
    assert!(matches!(err, AgentError::MaxStepsExceeded { max_steps: 5, .. }));
    assert_eq!(llm.calls(), 5);
    let t = err.transcript().unwrap();
    assert!(t.is_well_formed());
    assert!(t.tools_used.is_empty());
}

#[test]
fn two_invalid_turns_abort() {
    let llm = ScriptedLlm::new(["I think the answer is 42.", "Action: x\nFinal Answer: y"]);
    let err = run_agent(&common::local_registry(), &llm, "q", &config()).unwrap_err();
    assert_eq!(err.kind(), "RepeatedInvalidDirective");
    assert!(err.to_string().contains("both action and final answer"));
}

#[test]
fn one_invalid_turn_gets_a_correction() {
    let llm = ScriptedLlm::new(["hmm", "Final Answer: ok"]);
    let run = run_agent(&common::local_registry(), &llm, "q", &config()).unwrap();
    assert_eq!(run.output, "ok");
    let users: Vec<_> = run.transcript.steps.iter().filter(|s| s.role == StepRole::User).collect();
    assert_eq!(users.len(), 2);
    assert!(users[1].text.contains("not a valid directive"));
}

#[test]
fn tool_faults_become_observations() {
    let llm = ScriptedLlm::new([
        "Action: LightingAllowedWattage\nAction Input: area=500, area_unit=acres, use_type=bank_financial_institution, code_version=ashrae_90_1_2022",
        "Final Answer: could not compute",
    ]);
    let run = run_agent(&common::local_registry(), &llm, "q", &config()).unwrap();
    let obs = run.transcript.steps.iter().find(|s| s.role == StepRole::Observation).unwrap();
    assert!(obs.text.starts_with("Error: UnknownAreaUnit"), "{}", obs.text);
    assert_eq!(run.tools_used, ["LightingAllowedWattage"]);
}

#[test]
fn bad_arguments_are_observed_without_invoking() {
    let llm = ScriptedLlm::new(["Action: LightingAllowedWattage\nAction Input: area=big", "Final Answer: x"]);
    let run = run_agent(&common::local_registry(), &llm, "q", &config()).unwrap();
    let obs = run.transcript.steps.iter().find(|s| s.role == StepRole::Observation).unwrap();
    assert!(obs.text.starts_with("Error: invalid arguments"), "{}", obs.text);
    assert!(run.tools_used.is_empty());
}

#[test]
fn json_action_input_is_accepted() {
    let llm = ScriptedLlm::new([
        r#"Action: LightingAllowedWattage
Action Input: {"area": 5381.955, "area_unit": "ft2", "use_type": "bank_financial_institution", "code_version": "ashrae_90_1_2022"}"#,
        "Final Answer: 3019 W",
    ]);
    let run = run_agent(&common::local_registry(), &llm, common::BANK_QUERY, &config()).unwrap();
    let obs = run.transcript.steps.iter().find(|s| s.role == StepRole::Observation).unwrap();
    assert_eq!(obs.text, "3019");
}

#[test]
fn surface_tool_with_bare_input() {
    let model = acr_core::gbxml::parse_gbxml(&common::fixture("small_office.xml")).unwrap().model;
    let registry = acr_core::tools::build_registry(&common::local_env().with_model(model));
    let llm = ScriptedLlm::new([
        "Action: get_surface_area\nAction Input: ceiling_unit1_Reversed",
        "Final Answer: The ceiling is 110.41 m2.",
    ]);
    let run = run_agent(&registry, &llm, "How large is the ceiling?", &config()).unwrap();
    let obs = run.transcript.steps.iter().find(|s| s.role == StepRole::Observation).unwrap();
    assert_eq!(obs.text, "110.410 m2");
    assert_eq!(run.tools_used, ["get_surface_area"]);
}

#[test]
fn generator_failure_is_reported() {
    let err = run_agent(&common::local_registry(), &UnavailableLlm, "q", &config()).unwrap_err();
    assert_eq!(err.kind(), "GeneratorUnavailable");
    let err = run_agent(&common::local_registry(), &ScriptedLlm::new(Vec::<String>::new()), "q", &config()).unwrap_err();
    assert_eq!(err.kind(), "GeneratorError");
}

#[test]
fn zero_max_steps_is_rejected() {
    let cfg = AgentConfig { max_steps: 0, ..config() };
    let err = run_agent(&ToolRegistry::new(), &ScriptedLlm::new(["Final Answer: x"]), "q", &cfg).unwrap_err();
    assert_eq!(err.kind(), "InvalidConfig");
}

/// Records every message list it is sent.
struct Recording {
    inner: ScriptedLlm,
    seen: Mutex<Vec<Vec<Message>>>,
}

impl LlmClient for Recording {
    fn generate(&self, messages: &[Message], params: &GenerationParams) -> Result<Generation, LlmError> {
        self.seen.lock().unwrap().push(messages.to_vec());
        self.inner.generate(messages, params)
    }

    fn label(&self) -> String {
        "recording".into()
    }
}

#[test]
fn history_is_replayed_before_new_query() {
    let registry = common::local_registry();
    let first = run_agent(&registry, &ScriptedLlm::new([common::BANK_ACTION, common::BANK_FINAL]), common::BANK_QUERY, &config())
        .unwrap();
    let history: Vec<_> = first.transcript.steps.iter().filter(|s| s.role != StepRole::System).cloned().collect();
    let llm = Recording { inner: ScriptedLlm::new(["Final Answer: still 3019 W"]), seen: Mutex::default() };
    let second = run_agent_with_history(&registry, &llm, &history, "And again?", &config()).unwrap();
    let sent = &llm.seen.lock().unwrap()[0];
    assert!(sent.iter().any(|m| m.content == "Observation: 3019"));
    assert_eq!(sent.last().unwrap().content, "And again?");
    // The returned transcript holds only this episode after the system prefix.
    assert!(second.transcript.steps.iter().all(|s| s.text != common::BANK_QUERY));
    assert!(second.tools_used.is_empty());
}

fn instrumented_registry(log: Arc<Mutex<Vec<String>>>) -> ToolRegistry {
    let mut r = ToolRegistry::new();
    for name in ["alpha", "beta", "gamma"] {
        let log = log.clone();
        r.register(ToolSpec::new(
            name,
            "returns a fresh token",
            vec![FieldSpec::required("x", FieldKind::String, "anything")],
            move |args| {
                let mut log = log.lock().unwrap();
                let out = format!("{name}#{}:{}", log.len(), args["x"].as_str().unwrap());
                log.push(out.clone());
                Ok(ToolOutput::text(out))
            },
        ))
        .unwrap();
    }
    r
}

fn arb_turn() -> impl Strategy<Value = String> {
    prop_oneof![
        ("(alpha|beta|gamma|delta)", "[a-z]{1,5}").prop_map(|(t, x)| format!("Thought: go\nAction: {t}\nAction Input: {x}")),
        Just("no directive here".to_string()),
        Just("Final Answer: stop".to_string()),
    ]
}

proptest! {
    #[test]
    fn observations_are_exactly_handler_outputs(script in prop::collection::vec(arb_turn(), 1..12), max_steps in 1usize..10) {
        let log = Arc::new(Mutex::new(Vec::new()));
        let registry = instrumented_registry(log.clone());
        let llm = ScriptedLlm::cycling(script);
        let cfg = AgentConfig { max_steps, ..config() };
        let result = run_agent(&registry, &llm, "q", &cfg);
        prop_assert!(llm.calls() <= max_steps);
        let transcript = match &result {
            Ok(run) => run.transcript.clone(),
            Err(e) => e.transcript().unwrap().clone(),
        };
        prop_assert!(transcript.is_well_formed());
        let handler_outputs = log.lock().unwrap().clone();
        let observed: Vec<String> = transcript
            .steps
            .iter()
            .filter(|s| s.role == StepRole::Observation && !s.text.starts_with("unknown tool"))
            .map(|s| s.text.clone())
            .collect();
        prop_assert_eq!(&observed, &handler_outputs);
        prop_assert_eq!(transcript.tools_used.len(), handler_outputs.len());
    }

    #[test]
    fn identical_scripts_give_identical_transcripts(script in prop::collection::vec(arb_turn(), 1..8)) {
        let run = |script: Vec<String>| {
            let registry = instrumented_registry(Arc::default());
            let r = run_agent(&registry, &ScriptedLlm::cycling(script), "q", &config());
            let t = match r { Ok(run) => run.transcript, Err(e) => e.transcript().unwrap().clone() };
            (t.steps, t.tools_used, t.metrics.prompt_tokens, t.metrics.completion_tokens)
        };
        prop_assert_eq!(run(script.clone()), run(script));
    }
}

use std::path::Path;
use std::time::Instant;

use fleetassign_core::{
    epsilon_schedule, solve_apraq, solve_auction_with, solve_bottleneck, solve_fair_matching, solve_hungarian,
    solve_k_sum, solve_min_deviation, solve_semi_assignment, solve_with_side_constraints, AuctionConfig,
};
use fleetassign_distsim::{
    emit_topology_json, logs_to_jsonl, loss_sweep, run_cbaa, run_distributed_auction, run_lossy, Protocol, SweepConfig,
    TopologyKind,
};
use fleetassign_dynamic::{
    compare_modes, emit_scenario_json, per_period_variant_policy, random_scenario, run_scenario, summarize,
    validate_trajectory, MyopicPolicy, NullPolicy, PerPeriodPolicy, Scenario, ScenarioParams, VariantSpec,
};
use fleetassign_model::format::{emit_instance_json, emit_instance_text, emit_resources_text};
use fleetassign_model::generate::{random_instance, InstanceParams, MAX_DIMENSION};
use fleetassign_model::rational::format_rational;
use fleetassign_model::{
    AssignmentInstance, Matching, ObjectiveKind, Rational, RationalValue, SemiAssignmentDemand, SideConstraintSet,
};
use fleetassign_oracle::{brute_force_with, Extras};
use serde_json::{json, Value};

use crate::args::{
    GenerateArgs, GenerateKind, Method, OracleArgs, PolicyArgs, ProblemArgs, ProtocolArg, RunScenarioArgs,
    SimulateArgs, SolveArgs, SweepArgs, TopologyArg, ValidateArgs,
};
use crate::error::{CliError, ErrorClass};
use crate::io::{digest, load_demand, load_instance, load_resources, load_scenario, load_topology, write};
use crate::report::RunReport;

/// Largest horizon the scenario generator accepts.
pub const MAX_HORIZON: usize = 10_000;

pub struct Context {
    pub argv: Vec<String>,
    started: Instant,
}

impl Context {
    pub fn new(argv: Vec<String>) -> Self {
        Self {
            argv,
            started: Instant::now(),
        }
    }

    fn report(&self, input_digest: String, solver: String, seed: Option<u64>, result: Value) -> RunReport {
        RunReport {
            command: self.argv.clone(),
            input_digest,
            solver,
            seed,
            result,
            certificate: None,
            wall_time_ms: self.started.elapsed().as_millis(),
        }
    }
}

/// Writes `text` to `out`, or hands it back for stdout.
fn deliver(text: String, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => write(path, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn r(value: Rational) -> Value {
    serde_json::to_value(RationalValue(value)).expect("rational serializes")
}

fn pairs(matching: &Matching) -> Value {
    json!(matching.pairs())
}

/// A static problem: an objective, or one of the constrained variants.
enum Problem {
    Objective(ObjectiveKind),
    Semi(SemiAssignmentDemand),
    Apraq,
    Side(SideConstraintSet),
}

struct LoadedProblem {
    instance: AssignmentInstance,
    problem: Problem,
    digest: String,
}

fn load_problem(args: &ProblemArgs) -> Result<LoadedProblem, CliError> {
    let instance = load_instance(&args.instance)?;
    let mut parts = vec![emit_instance_text(&instance)];
    let problem = match args.objective.as_str() {
        "semi" => {
            let path = args
                .demand
                .as_deref()
                .ok_or_else(|| CliError::usage("objective semi needs --demand"))?;
            let demand = load_demand(path)?;
            parts.push(format!("{demand:?}"));
            let demand = SemiAssignmentDemand::new(demand).map_err(|e| CliError::from(e).context(path.display()))?;
            demand
                .check_against(&instance)
                .map_err(|e| CliError::from(e).context(path.display()))?;
            Problem::Semi(demand)
        }
        "apraq" => Problem::Apraq,
        "sideconstrained" => {
            let path = args
                .resources
                .as_deref()
                .ok_or_else(|| CliError::usage("objective sideconstrained needs --resources"))?;
            let set = load_resources(path, instance.n_agents(), instance.n_tasks())?;
            parts.push(emit_resources_text(&set));
            Problem::Side(set)
        }
        other => Problem::Objective(other.parse().map_err(CliError::usage)?),
    };
    Ok(LoadedProblem {
        digest: digest(parts.iter().map(String::as_str)),
        instance,
        problem,
    })
}

pub fn solve(ctx: &Context, args: &SolveArgs) -> Result<String, CliError> {
    let LoadedProblem {
        instance,
        problem,
        digest,
    } = load_problem(&args.problem)?;
    if args.method == Method::Auction && !matches!(problem, Problem::Objective(ObjectiveKind::Sum)) {
        return Err(CliError::usage("--method auction solves the sum objective only"));
    }
    let mut certificate = None;
    let (solver, result) = match problem {
        Problem::Objective(ObjectiveKind::Sum) if args.method == Method::Auction => {
            let schedule = match args.epsilon {
                Some(eps) => vec![eps],
                None => epsilon_schedule(instance.n_agents(), instance.to_min_cost().instance.max_abs_weight()),
            };
            let config = AuctionConfig {
                schedule,
                record_prices: args.trace.is_some(),
            };
            let sol = solve_auction_with(&instance, &config)?;
            let primal = instance.to_min_cost().instance;
            let primal = fleetassign_model::objective_value(&primal, &sol.matching, ObjectiveKind::Sum)?;
            let n = Rational::from_integer(instance.n_agents() as i64);
            certificate = Some(json!({
                "epsilon": r(sol.trace.final_epsilon),
                "suboptimality_bound": r(n * sol.trace.final_epsilon),
                "dual_gap": r(primal - sol.duals.dual_objective()),
            }));
            if let (Some(path), Some(history)) = (&args.trace, &sol.trace.price_history) {
                let mut csv = String::from("round");
                for j in 0..instance.n_tasks() {
                    csv.push_str(&format!(",p_{j}"));
                }
                csv.push('\n');
                for (round, prices) in history.iter().enumerate() {
                    let row: Vec<String> = prices.iter().map(format_rational).collect();
                    csv.push_str(&format!("{},{}\n", round + 1, row.join(",")));
                }
                write(path, &csv)?;
            }
            let name = if args.epsilon.is_some() {
                "auction"
            } else {
                "auction-scaled"
            };
            (
                name,
                json!({"value": r(sol.value), "matching": pairs(&sol.matching), "rounds": sol.trace.rounds}),
            )
        }
        Problem::Objective(ObjectiveKind::Sum) => {
            let sol = solve_hungarian(&instance)?;
            certificate = Some(json!({
                "dual_gap": r(sol.duality_gap(&instance)),
                "dual_objective": r(sol.duals.dual_objective()),
            }));
            if let Some(path) = &args.trace {
                let mut csv = String::from("index,u,v\n");
                for (k, (u, v)) in sol.duals.u.iter().zip(&sol.duals.v).enumerate() {
                    csv.push_str(&format!("{k},{},{}\n", format_rational(u), format_rational(v)));
                }
                write(path, &csv)?;
            }
            (
                "hungarian",
                json!({"value": r(sol.value), "matching": pairs(&sol.matching)}),
            )
        }
        Problem::Objective(ObjectiveKind::Bottleneck) => {
            let sol = solve_bottleneck(&instance)?;
            (
                "bottleneck",
                json!({"value": r(sol.threshold), "matching": pairs(&sol.matching), "feasibility_probes": sol.feasibility_probes}),
            )
        }
        Problem::Objective(ObjectiveKind::Spread) => {
            let sol = solve_fair_matching(&instance)?;
            (
                "fair",
                json!({
                    "value": r(sol.spread),
                    "lower": r(sol.lower),
                    "upper": r(sol.upper),
                    "matching": pairs(&sol.matching),
                    "feasibility_probes": sol.feasibility_probes,
                }),
            )
        }
        Problem::Objective(ObjectiveKind::MinDeviation) => {
            let sol = solve_min_deviation(&instance)?;
            (
                "mindev",
                json!({"value": r(sol.deviation), "matching": pairs(&sol.matching), "candidates_solved": sol.candidates_solved}),
            )
        }
        Problem::Objective(ObjectiveKind::KSum(k)) => {
            let sol = solve_k_sum(&instance, k)?;
            let sweep: Vec<Value> = sol.sweep.iter().map(|&(t, b)| json!([r(t), r(b)])).collect();
            (
                "ksum",
                json!({"k": k, "value": r(sol.value), "matching": pairs(&sol.matching), "sweep": sweep}),
            )
        }
        Problem::Semi(demand) => {
            let sol = solve_semi_assignment(&instance, &demand)?;
            (
                "semi",
                json!({"value": r(sol.value), "category_of_agent": sol.category_of_agent}),
            )
        }
        Problem::Apraq => {
            let sol = solve_apraq(&instance)?;
            (
                "apraq",
                json!({"value": r(sol.value), "matching": pairs(&sol.matching)}),
            )
        }
        Problem::Side(set) => {
            let sol = solve_with_side_constraints(&instance, &set)?;
            (
                "sideconstrained",
                json!({"value": r(sol.value), "matching": pairs(&sol.matching), "nodes": sol.nodes}),
            )
        }
    };
    let mut report = ctx.report(digest, solver.to_string(), None, result);
    report.certificate = certificate;
    deliver(report.to_json(), args.problem.out.as_deref())
}

pub fn oracle(ctx: &Context, args: &OracleArgs) -> Result<String, CliError> {
    let LoadedProblem {
        instance,
        problem,
        digest,
    } = load_problem(&args.problem)?;
    let (kind, extras) = match problem {
        Problem::Objective(kind) => (kind, None),
        Problem::Semi(demand) => (ObjectiveKind::Sum, Some(Extras::Demand(demand.as_slice().to_vec()))),
        Problem::Apraq => (ObjectiveKind::Sum, Some(Extras::Qualification)),
        Problem::Side(set) => (ObjectiveKind::Sum, Some(Extras::Constraints(set))),
    };
    let res = brute_force_with(&instance, kind, extras.as_ref(), args.all_optima)?;
    let result = json!({
        "objective": args.problem.objective,
        "value": r(res.best_value),
        "optima": res.best_matchings,
        "enumerated": res.enumerated,
    });
    let report = ctx.report(digest, "oracle".into(), None, result);
    deliver(report.to_json(), args.problem.out.as_deref())
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<String, CliError> {
    let instance = load_instance(&args.instance)?;
    let topology = load_topology(&args.topology)?;
    let digest = digest([
        emit_instance_text(&instance).as_str(),
        emit_topology_json(&topology).as_str(),
    ]);
    let n = instance.n_agents() as i64;
    let epsilon = args.epsilon.unwrap_or_else(|| Rational::new(1, n + 1));
    let protocol = match args.protocol {
        ProtocolArg::Dauction => Protocol::DistributedAuction { epsilon },
        ProtocolArg::Cbaa => Protocol::Cbaa,
    };
    let lossless = topology.loss() == Rational::from_integer(0);
    let (result, logs) = if lossless {
        let (matching, value, rounds, logs) = match protocol {
            Protocol::DistributedAuction { epsilon } => {
                let run = run_distributed_auction(&instance, &topology, epsilon)?;
                (run.matching, run.value, run.rounds, run.logs)
            }
            Protocol::Cbaa => {
                let run = run_cbaa(&instance, &topology, true)?;
                (run.matching, run.value, run.rounds, run.logs)
            }
        };
        let result = json!({
            "value": r(value),
            "matching": pairs(&matching),
            "rounds": rounds,
            "conflicts_open": 0,
            "converged": true,
            "loss": r(topology.loss()),
            "diameter": topology.diameter(),
        });
        (result, logs)
    } else {
        let outcome = run_lossy(protocol, &instance, &topology, args.max_rounds)?;
        let mut result = serde_json::to_value(&outcome).expect("outcome serializes");
        result["diameter"] = json!(topology.diameter());
        (result, outcome.logs)
    };
    if let Some(path) = &args.log {
        write(path, &logs_to_jsonl(&logs))?;
    }
    let mut report = ctx.report(digest, protocol.to_string(), Some(topology.seed()), result);
    if let Protocol::DistributedAuction { epsilon } = protocol {
        report.certificate = Some(json!({
            "epsilon": r(epsilon),
            "suboptimality_bound": r(Rational::from_integer(n) * epsilon),
        }));
    }
    deliver(report.to_json(), args.out.as_deref())
}

fn topology_kind(arg: TopologyArg, p: f64) -> TopologyKind {
    match arg {
        TopologyArg::Complete => TopologyKind::Complete,
        TopologyArg::Ring => TopologyKind::Ring,
        TopologyArg::Line => TopologyKind::Line,
        TopologyArg::Er => TopologyKind::ErdosRenyi(p),
    }
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> Result<String, CliError> {
    if args.n == 0 || args.n > MAX_DIMENSION {
        return Err(CliError::usage(format!("--n must lie in 1..={MAX_DIMENSION}")));
    }
    let protocol = match args.protocol {
        ProtocolArg::Dauction => Protocol::DistributedAuction {
            epsilon: args.epsilon.unwrap_or_else(|| Rational::new(1, args.n as i64 + 1)),
        },
        ProtocolArg::Cbaa => Protocol::Cbaa,
    };
    let mut config = SweepConfig::new(
        protocol,
        args.n,
        topology_kind(args.topology, args.p),
        args.instances,
        args.seed,
    );
    if let Some(levels) = &args.levels {
        config.levels = levels.clone();
    }
    config.max_rounds = args.max_rounds;
    let report = loss_sweep(&config)?;
    let csv = report.to_csv();
    if let Some(out) = &args.out {
        let body = ctx.report(
            digest([csv.as_str()]),
            format!("sweep:{protocol}"),
            Some(args.seed),
            serde_json::to_value(&report).expect("sweep serializes"),
        );
        write(out, &body.to_json())?;
    }
    deliver(csv, args.csv.as_deref())
}

/// A per-period policy, rebuilt for each run it drives.
enum PolicyChoice {
    Myopic,
    Null,
    Variant(VariantSpec),
}

impl PolicyChoice {
    fn parse(args: &PolicyArgs, scenario: &Scenario) -> Result<(Self, Option<String>), CliError> {
        Ok(match args.policy.as_str() {
            "myopic" => (PolicyChoice::Myopic, None),
            "null" => (PolicyChoice::Null, None),
            "semi" => (PolicyChoice::Variant(VariantSpec::Demand), None),
            "sideconstrained" => {
                let path = args
                    .resources
                    .as_deref()
                    .ok_or_else(|| CliError::usage("policy sideconstrained needs --resources"))?;
                let set = load_resources(path, scenario.n_agents(), scenario.n_tasks())?;
                let text = emit_resources_text(&set);
                (PolicyChoice::Variant(VariantSpec::SideConstraints(set)), Some(text))
            }
            other => {
                let kind: ObjectiveKind = other.parse().map_err(CliError::usage)?;
                (PolicyChoice::Variant(VariantSpec::Objective(kind)), None)
            }
        })
    }

    fn make(&self, scenario: &Scenario) -> Result<Box<dyn PerPeriodPolicy>, CliError> {
        Ok(match self {
            PolicyChoice::Myopic => Box::new(MyopicPolicy),
            PolicyChoice::Null => Box::new(NullPolicy),
            PolicyChoice::Variant(spec) => Box::new(per_period_variant_policy(spec.clone(), scenario)?),
        })
    }
}

fn prepared_scenario(path: &Path, args: &PolicyArgs) -> Result<(Scenario, PolicyChoice, String), CliError> {
    let mut scenario = load_scenario(path)?;
    if let Some(mode) = args.mode {
        scenario = scenario.with_mode(mode);
    }
    let (choice, resources) = PolicyChoice::parse(args, &scenario)?;
    let scenario_text = emit_scenario_json(&scenario);
    let digest = digest([scenario_text.as_str(), resources.as_deref().unwrap_or("")]);
    Ok((scenario, choice, digest))
}

pub fn run_scenario_cmd(ctx: &Context, args: &RunScenarioArgs) -> Result<String, CliError> {
    let (scenario, choice, digest) = prepared_scenario(&args.scenario, &args.policy)?;
    let trajectory = run_scenario(&scenario, choice.make(&scenario)?.as_mut())?;
    let summary = summarize(&scenario, &trajectory, args.clairvoyant);
    let mut result = serde_json::to_value(&summary).expect("summary serializes");
    result["per_period_values"] = json!(trajectory.per_period_values.iter().map(|v| r(*v)).collect::<Vec<_>>());
    result["decisions"] = json!(trajectory.decisions);
    if args.compare_modes {
        let make = || choice.make(&scenario).expect("policy already built once");
        result["modes"] = serde_json::to_value(compare_modes(&scenario, make)?).expect("comparison serializes");
    }
    if let Some(path) = &args.metrics {
        write(path, &trajectory.metrics_csv())?;
    }
    let report = ctx.report(digest, trajectory.policy.clone(), Some(scenario.seed()), result);
    deliver(report.to_json(), args.out.as_deref())
}

pub fn validate(ctx: &Context, args: &ValidateArgs) -> Result<String, CliError> {
    if let Some(path) = &args.instance {
        let instance = load_instance(path)?;
        let result = json!({
            "agents": instance.n_agents(),
            "tasks": instance.n_tasks(),
            "sense": instance.sense().to_string(),
            "forbidden_pairs": instance.forbidden_pairs().count(),
            "qualification": instance.qualification().is_some(),
        });
        let report = ctx.report(
            digest([emit_instance_text(&instance).as_str()]),
            "validate".into(),
            None,
            result,
        );
        return deliver(report.to_json(), args.out.as_deref());
    }
    let path = args
        .scenario
        .as_deref()
        .ok_or_else(|| CliError::usage("validate needs --instance or --scenario"))?;
    let (scenario, choice, digest) = prepared_scenario(path, &args.policy)?;
    let trajectory = run_scenario(&scenario, choice.make(&scenario)?.as_mut())?;
    let validation = validate_trajectory(&scenario, &trajectory);
    let passed = validation.all_passed();
    let result = json!({
        "policy": trajectory.policy,
        "passed": passed,
        "validation": serde_json::to_value(&validation).expect("validation serializes"),
    });
    let report = ctx.report(digest, "validate".into(), Some(scenario.seed()), result);
    let text = deliver(report.to_json(), args.out.as_deref())?;
    if !passed {
        let failed: Vec<String> = validation
            .families
            .iter()
            .filter(|f| !f.passed)
            .map(|f| {
                serde_json::to_value(f.family)
                    .expect("family serializes")
                    .as_str()
                    .unwrap_or("")
                    .to_string()
            })
            .collect();
        print!("{text}");
        return Err(CliError::new(
            ErrorClass::Validation,
            format!("violated families: {}", failed.join(", ")),
        ));
    }
    Ok(text)
}

pub fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let summary = match &args.kind {
        GenerateKind::Instance {
            agents,
            tasks,
            lo,
            hi,
            sense,
            seed,
            out,
        } => {
            let params = InstanceParams {
                n_agents: *agents,
                n_tasks: tasks.unwrap_or(*agents),
                lo: *lo,
                hi: *hi,
                sense: *sense,
            };
            let instance = random_instance(&params, *seed).map_err(|e| CliError::usage(e.to_string()))?;
            let is_json = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let text = if is_json {
                emit_instance_json(&instance)
            } else {
                emit_instance_text(&instance)
            };
            write(out, &text)?;
            json!({
                "kind": "instance",
                "agents": params.n_agents,
                "tasks": params.n_tasks,
                "seed": seed,
                "digest": digest([emit_instance_text(&instance).as_str()]),
            })
        }
        GenerateKind::Scenario {
            agents,
            tasks,
            horizon,
            lo,
            hi,
            sense,
            mode,
            max_eta,
            max_duration,
            seed,
            out,
        } => {
            if *agents == 0 || *tasks == 0 || *agents > MAX_DIMENSION || *tasks > MAX_DIMENSION {
                return Err(CliError::usage(format!(
                    "agents and tasks must lie in 1..={MAX_DIMENSION}"
                )));
            }
            if *horizon == 0 || *horizon > MAX_HORIZON {
                return Err(CliError::usage(format!("horizon must lie in 1..={MAX_HORIZON}")));
            }
            let params = ScenarioParams {
                lo: *lo,
                hi: *hi,
                sense: *sense,
                mode: *mode,
                service: max_eta.zip(*max_duration),
                ..ScenarioParams::new(*agents, *tasks, *horizon)
            };
            let scenario = random_scenario(&params, *seed).map_err(|e| CliError::usage(e.to_string()))?;
            let text = emit_scenario_json(&scenario) + "\n";
            write(out, &text)?;
            json!({
                "kind": "scenario",
                "agents": agents,
                "tasks": tasks,
                "horizon": horizon,
                "mode": mode.to_string(),
                "seed": seed,
                "digest": digest([text.as_str()]),
            })
        }
        GenerateKind::Topology {
            kind,
            n,
            p,
            loss,
            seed,
            out,
        } => {
            if *n == 0 || *n > MAX_DIMENSION {
                return Err(CliError::usage(format!("n must lie in 1..={MAX_DIMENSION}")));
            }
            let topology = topology_kind(*kind, *p)
                .build(*n, *seed)
                .and_then(|t| t.with_loss(*loss))
                .map_err(|e| CliError::usage(e.to_string()))?;
            let text = emit_topology_json(&topology) + "\n";
            write(out, &text)?;
            json!({
                "kind": "topology",
                "n": n,
                "edges": topology.edges().len(),
                "diameter": topology.diameter(),
                "loss": r(topology.loss()),
                "seed": seed,
                "digest": digest([text.as_str()]),
            })
        }
    };
    Ok(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n")
}

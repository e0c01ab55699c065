// secstate: validate scenarios, run them headless, print scores, or serve the
// HTTP API.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "secstate/service.hpp"
#include "secstate/simulator.hpp"

namespace {

using namespace secstate;

struct Overrides {
    std::string weights;
    std::optional<double> scan_period;
    std::optional<double> tau_eff;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--weights", weights, "Composite weights as w_sce,w_vul,w_as")->envname("SECSTATE_WEIGHTS");
        cmd->add_option("--scan-period", scan_period, "Days between compliance scans")
            ->envname("SECSTATE_SCAN_PERIOD");
        cmd->add_option("--tau-eff", tau_eff, "ScE threshold for effective controls")->envname("SECSTATE_TAU_EFF");
    }

    void apply(SimConfig& cfg) const {
        if (!weights.empty()) cfg.weights = parse_weights(weights);
        if (scan_period) cfg.scan.scan_period = *scan_period;
        if (tau_eff) cfg.tau_eff = *tau_eff;
        cfg.validate();
    }

    EngineOptions engine_options() const {
        EngineOptions o;
        if (!weights.empty()) o.weights = parse_weights(weights);
        o.scan_period = scan_period;
        o.tau_eff = tau_eff;
        return o;
    }
};

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

int cmd_validate(const std::string& path) {
    std::string text;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    const auto problems = validate_scenario_text(text);
    for (const auto& p : problems) std::cout << path << ": " << p << '\n';
    if (!problems.empty()) return 1;
    std::cout << path << ": ok\n";
    return 0;
}

int cmd_run(const std::string& path, double until, const std::string& out, const Overrides& ov) {
    Scenario sc = load_scenario_file(path);
    ov.apply(sc.config);
    const RunLog log = run(std::move(sc), until);
    if (out.empty() || out == "-") {
        std::cout << log.to_jsonl();
    } else {
        log.write(out);
    }
    return 0;
}

// Final snapshot record per scope, in hierarchy order, plus the last report
// cycle. Every line printed is a record copied from the run log.
int cmd_score(const std::string& path, std::optional<double> until, const Overrides& ov) {
    Scenario sc = load_scenario_file(path);
    ov.apply(sc.config);
    double horizon = 0.0;
    if (until) {
        horizon = *until;
    } else if (!sc.events.empty()) {
        horizon = sc.events.back().time;
    }
    Simulator sim(std::move(sc));
    sim.run_until(horizon);

    std::map<std::string, json> latest;
    std::vector<json> reports;
    double report_time = -1.0;
    for (const auto& r : sim.log().records()) {
        const auto& type = r.at("type").get_ref<const std::string&>();
        if (type == "snapshot") {
            latest[r.at("scope").get<std::string>()] = r;
        } else if (type == "report") {
            if (r.at("time").get<double>() != report_time) reports.clear();
            report_time = r.at("time").get<double>();
            reports.push_back(r);
        }
    }
    std::vector<json> rows;
    for (const auto* s : sim.hierarchy().all()) rows.push_back(latest.at(s->scope.to_string()));

    std::printf("t=%s\n", fixed3(sim.now()).c_str());
    std::printf("%-24s %8s %8s %8s %9s  %s\n", "scope", "ScE", "VulMet", "AS_E", "composite", "state");
    for (const auto& r : rows) {
        const Scope scope = Scope::parse(r.at("scope").get<std::string>());
        std::string state;
        if (scope.level == ScopeLevel::Local) state = std::string(to_string(sim.fsm(scope.id).current()));
        std::printf("%-24s %8s %8s %8s %9s  %s\n", r.at("scope").get<std::string>().c_str(),
                    fixed3(r.at("sce").get<double>()).c_str(), fixed3(r.at("vulmet").get<double>()).c_str(),
                    fixed3(r.at("as_e").get<double>()).c_str(), fixed3(r.at("composite").get<double>()).c_str(),
                    state.c_str());
    }
    if (!reports.empty()) {
        std::printf("\n%-40s %-20s %9s %7s %9s  %s\n", "intent", "scope", "measured", "target", "shortfall",
                    "top");
        for (const auto& r : reports) {
            std::printf("%-40s %-20s %9s %7s %9s  %s\n", r.at("intent_id").get<std::string>().c_str(),
                        r.at("scope").get<std::string>().c_str(), fixed3(r.at("measured").get<double>()).c_str(),
                        fixed3(r.at("target").get<double>()).c_str(), fixed3(r.at("shortfall").get<double>()).c_str(),
                        r.at("compliant").get<bool>()
                            ? "compliant"
                            : r.at("ranked_contributions").at(0).at("metric").get<std::string>().c_str());
        }
    }
    std::printf("\n");
    for (const auto& r : rows) std::cout << record_line(r) << '\n';
    for (const auto& r : reports) std::cout << record_line(r) << '\n';
    return 0;
}

int cmd_serve(const std::string& host, int port, const std::string& scenario, const std::string& log_path,
              const std::string& replay, const Overrides& ov) {
    if (!replay.empty() && !scenario.empty()) {
        throw Error(ErrorCode::UsageError, "--replay and --scenario are mutually exclusive");
    }
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    EngineOptions opts = ov.engine_options();
    opts.log_path = replay.empty() ? log_path : std::string();
    Engine engine(opts);
    if (!replay.empty()) {
        engine.load_replay(RunLog::read(replay));
    } else if (!scenario.empty()) {
        engine.load_scenario(load_scenario_file(scenario));
    }
    Api api(engine);
    HttpServer server(api);
    const int bound = server.bind(host, port);
    std::cerr << "secstate listening on http://" << host << ":" << bound << (replay.empty() ? "" : " (replay)")
              << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.serve();
    waiter.join();
    engine.log().interrupt();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security state simulator and scoring service"};
    app.require_subcommand(1);

    Overrides ov;

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario file and list every problem");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    std::string run_path, run_out;
    double run_until = 0.0;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario headless and write the run log");
    run_cmd->add_option("--scenario", run_path, "Scenario file")->required()->envname("SECSTATE_SCENARIO");
    run_cmd->add_option("--until", run_until, "Simulated end time in days")->required()->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", run_out, "Run log path ('-' for stdout)")->envname("SECSTATE_LOG");
    ov.add_to(run_cmd);

    std::string score_path;
    std::optional<double> score_until;
    auto* score = app.add_subcommand("score", "Print the final hierarchy scores");
    score->add_option("--scenario", score_path, "Scenario file")->required()->envname("SECSTATE_SCENARIO");
    score->add_option("--until", score_until, "Simulated end time (default: last event)")
        ->check(CLI::NonNegativeNumber);
    ov.add_to(score);

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string serve_scenario, serve_log, serve_replay;
    auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON service");
    serve->add_option("--host", host, "Listen address")->envname("SECSTATE_HOST");
    serve->add_option("--port", port, "Listen port (0 picks a free one)")->envname("SECSTATE_PORT");
    serve->add_option("--scenario", serve_scenario, "Scenario to load at start")->envname("SECSTATE_SCENARIO");
    serve->add_option("--log", serve_log, "Mirror the run log to this file")->envname("SECSTATE_LOG");
    serve->add_option("--replay", serve_replay, "Serve a persisted run log read-only");
    ov.add_to(serve);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(validate_path);
        if (*run_cmd) return cmd_run(run_path, run_until, run_out, ov);
        if (*score) return cmd_score(score_path, score_until, ov);
        if (*serve) return cmd_serve(host, port, serve_scenario, serve_log, serve_replay, ov);
    } catch (const secstate::Error& e) {
        std::cerr << "secstate: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "secstate: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "secstate/simulator.hpp"
#include "support.hpp"

using namespace secstate;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result sh(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(SECSTATE_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string scenario() { return testsupport::source_path("scenarios/ran_intent_violation.json"); }

std::string temp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("secstate-cli-" + name)).string();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("validate") {
    const auto ok = sh("validate " + scenario());
    CHECK(ok.status == 0);
    CHECK(ok.out.find(": ok") != std::string::npos);

    const auto path = temp("bad.json");
    {
        auto doc = json::parse(testsupport::read_text(scenario()));
        doc["network_functions"][0]["entry_points"][0]["data_items_exposed"] = 400;
        doc["events"][0]["payload"]["count"] = 100000;
        std::ofstream(path) << doc.dump();
    }
    const auto bad = sh("validate " + path);
    CHECK(bad.status != 0);
    CHECK(bad.out.find("data_items_exposed") != std::string::npos);

    std::ofstream(path) << "{\"domains\": [";
    const auto broken = sh("validate " + path);
    CHECK(broken.status != 0);
    CHECK(broken.out.find("line") != std::string::npos);
    std::filesystem::remove(path);

    CHECK(sh("validate /nonexistent/file.json").status != 0);
    CHECK(sh("frobnicate").status != 0);
}

TEST_CASE("run is deterministic and writes a JSON-lines log") {
    const auto a = temp("a.jsonl"), b = temp("b.jsonl");
    REQUIRE(sh("run --scenario " + scenario() + " --until 10 --out " + a).status == 0);
    REQUIRE(sh("run --scenario " + scenario() + " --until 10 --out " + b).status == 0);
    const auto ta = testsupport::read_text(a), tb = testsupport::read_text(b);
    CHECK(ta == tb);
    const auto log = RunLog::from_jsonl(ta);
    CHECK(log.records().front().at("type") == "load");
    CHECK(log.records().back().at("time").get<double>() <= 10.0);
    std::filesystem::remove(a);
    std::filesystem::remove(b);

    const auto piped = sh("run --scenario " + scenario() + " --until 10 --out -");
    CHECK(piped.status == 0);
    CHECK(piped.out == ta);
}

TEST_CASE("overrides reach the run") {
    const auto base = sh("run --scenario " + scenario() + " --until 3 --out -");
    const auto coarse = sh("run --scenario " + scenario() + " --until 3 --out - --scan-period 2");
    REQUIRE(coarse.status == 0);
    CHECK(base.out != coarse.out);
    CHECK(sh("run --scenario " + scenario() + " --until 3 --out - --weights 0.5,0.5,0.5").status != 0);
    const auto env_bad = sh("run --scenario " + scenario() + " --until 1 --out -", "SECSTATE_WEIGHTS=0.9,0.9,0.9");
    CHECK(env_bad.status != 0);
    CHECK(env_bad.out.find("WeightsNotNormalized") != std::string::npos);
    const auto env_ok = sh("run --scenario " + scenario() + " --until 3 --out -", "SECSTATE_SCAN_PERIOD=2");
    CHECK(env_ok.out == coarse.out);
}

TEST_CASE("score shows RAN below target and machine lines match the table") {
    const auto r = sh("score --scenario " + scenario());
    REQUIRE(r.status == 0);
    std::map<std::string, json> records;
    std::map<std::string, std::vector<std::string>> rows;
    for (const auto& l : lines(r.out)) {
        if (!l.empty() && l.front() == '{') {
            const auto rec = json::parse(l);
            if (rec.at("type") == "snapshot") records[rec.at("scope").get<std::string>()] = rec;
            if (rec.at("type") == "report") records["report:" + rec.at("intent_id").get<std::string>()] = rec;
            continue;
        }
        std::istringstream in(l);
        std::vector<std::string> cells;
        for (std::string c; in >> c;) cells.push_back(c);
        if (!cells.empty()) rows[cells[0]] = cells;
    }
    REQUIRE(records.count("domain:ran") == 1);
    CHECK(records["domain:ran"].at("composite").get<double>() < 0.70);
    CHECK(records["domain:transport"].at("composite").get<double>() >= 0.70);
    CHECK(records["domain:core"].at("composite").get<double>() >= 0.70);

    const auto& ran = records["report:global-security-state/ran"];
    CHECK(ran.at("compliant") == false);
    CHECK(ran.at("ranked_contributions")[0].at("metric") == "ScE");
    CHECK(records["report:global-security-state/core"].at("compliant") == true);

    for (const char* scope : {"network", "domain:ran", "domain:transport", "domain:core", "nf:du-1"}) {
        REQUIRE(rows.count(scope) == 1);
        const auto& row = rows[scope];
        const auto& rec = records[scope];
        char buf[32];
        int col = 1;
        for (const char* k : {"sce", "vulmet", "as_e", "composite"}) {
            std::snprintf(buf, sizeof buf, "%.3f", rec.at(k).get<double>());
            CHECK(row.at(static_cast<std::size_t>(col++)) == buf);
        }
    }
    REQUIRE(rows.count("global-security-state/ran") == 1);
    CHECK(rows["global-security-state/ran"].back() == "ScE");
}

TEST_CASE("score rejects a bad horizon") {
    CHECK(sh("score --scenario " + scenario() + " --until -1").status != 0);
    CHECK(sh("score --scenario /nonexistent.json").status != 0);
}

#include <doctest.h>

#include "criteria.hpp"
#include "drmine/csv.hpp"
#include "drmine/digest.hpp"

using namespace drmine;
using criteria::run_cli;

namespace {

// Minimal XML well-formedness: balanced, properly nested tags and a single root.
bool well_formed_xml(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t roots = 0;
    std::size_t pos = 0;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        const auto end = text.find('>', pos);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.starts_with("?") || tag.starts_with("!")) continue;
        if (tag.starts_with("/")) {
            const auto name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.ends_with("/");
        const auto name = tag.substr(0, tag.find_first_of(" \t\n/"));
        if (stack.empty()) ++roots;
        if (!self_closing) stack.push_back(name);
    }
    // text content must not contain raw '<' or unescaped '&'
    for (std::size_t i = text.find('&'); i != std::string::npos; i = text.find('&', i + 1)) {
        const auto semi = text.find(';', i);
        if (semi == std::string::npos || semi - i > 6) return false;
    }
    return stack.empty() && roots == 1;
}

struct Workspace {
    std::filesystem::path dir;
    std::vector<std::string> inputs;

    explicit Workspace(const std::string& name) : dir(oracle::scratch(name)) {
        inputs = criteria::fixture_inputs(dir / "input");
    }
    ~Workspace() { std::filesystem::remove_all(dir); }

    std::string out(const std::string& name) const { return (dir / name).string(); }
};

int run_pipeline(const Workspace& ws, const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"--quiet", "--out", out};
    args.insert(args.end(), extra.begin(), extra.end());
    args.push_back("run");
    args.insert(args.end(), ws.inputs.begin(), ws.inputs.end());
    return run_cli(args);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"--topics", "zero", "topics"}) == 1);
    CHECK(run_cli({"--format", "xml", "topics"}) == 1);
    CHECK(run_cli({"merge"}) == 1);
    CHECK(run_cli({"drill"}) == 1);
}

TEST_CASE("help and version exit 0") {
    std::vector<std::string> args{"drmine", "--version"};
    std::ostringstream out, err;
    CHECK(cli::dispatch(args, out, err) == 0);
    CHECK(out.str().find("1.0.0") != std::string::npos);
    CHECK(run_cli({"--help"}) == 0);
    CHECK(run_cli({"run", "--help"}) == 0);
}

TEST_CASE("data errors exit 2") {
    Workspace ws("cli-errors");
    CHECK(run_cli({"--out", ws.out("o"), "merge", ws.out("missing.csv")}) == 2);
    std::string err;
    CHECK(run_cli({"--out", ws.out("empty"), "topics"}, &err) == 2);
    CHECK(err.find("merged.csv") == std::string::npos);
    CHECK(err.find("prep") != std::string::npos);
}

TEST_CASE("drilling into a missing cluster names it") {
    Workspace ws("cli-drill");
    REQUIRE(run_pipeline(ws, ws.out("o")) == 0);
    std::string err;
    CHECK(run_cli({"--out", ws.out("o"), "drill", "--cluster", "99"}, &err) == 2);
    CHECK(err.find("cluster 99") != std::string::npos);
    CHECK(run_cli({"--quiet", "--out", ws.out("o"), "drill", "--cluster", "0"}) == 0);
    CHECK(std::filesystem::exists(ws.dir / "o" / "drill_cluster_0.csv"));
}

TEST_CASE("stage by stage equals the full run") {
    Workspace ws("cli-stages");
    REQUIRE(run_pipeline(ws, ws.out("full")) == 0);
    const auto manifest = nlohmann::json::parse(oracle::slurp(ws.dir / "full" / "manifest.json"));
    const std::string drilled = std::to_string(manifest["stages"]["drill"]["cluster"].get<std::size_t>());

    const auto out = ws.out("staged");
    std::vector<std::string> merge{"--quiet", "--out", out, "merge"};
    merge.insert(merge.end(), ws.inputs.begin(), ws.inputs.end());
    REQUIRE(run_cli(merge) == 0);
    for (const char* stage : {"dedupe", "prep", "topics", "select-k", "cluster", "embed", "report"}) {
        REQUIRE(run_cli({"--quiet", "--out", out, stage}) == 0);
    }
    REQUIRE(run_cli({"--quiet", "--out", out, "drill", "--cluster", drilled}) == 0);

    auto full = oracle::snapshot(ws.dir / "full");
    full.erase("manifest.json");
    CHECK(full == oracle::snapshot(out));
}

TEST_CASE("reruns are byte-identical apart from the timestamp") {
    Workspace ws("cli-rerun");
    REQUIRE(run_pipeline(ws, ws.out("a")) == 0);
    REQUIRE(run_pipeline(ws, ws.out("b")) == 0);
    CHECK(criteria::comparable(ws.dir / "a") == criteria::comparable(ws.dir / "b"));
    REQUIRE(run_pipeline(ws, ws.out("c"), {"--seed", "7"}) == 0);
    CHECK(oracle::slurp(ws.dir / "a" / "theta.csv") != oracle::slurp(ws.dir / "c" / "theta.csv"));
}

TEST_CASE("artifacts parse and nothing is written outside --out") {
    Workspace ws("cli-artifacts");
    const auto before = oracle::snapshot(ws.dir);
    REQUIRE(run_pipeline(ws, ws.out("o"), {"--format", "json"}) == 0);
    auto after = oracle::snapshot(ws.dir);
    std::size_t svgs = 0, csvs = 0, jsons = 0;
    for (const auto& [path, bytes] : after) {
        if (!path.starts_with("o/")) {
            CHECK(before.count(path) == 1);
            CHECK(before.at(path) == bytes);
            continue;
        }
        INFO(path);
        if (path.ends_with(".svg")) {
            ++svgs;
            CHECK(bytes.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg"));
            CHECK(well_formed_xml(bytes));
        } else if (path.ends_with(".csv")) {
            ++csvs;
            const auto rows = csv::parse(bytes);
            REQUIRE_FALSE(rows.empty());
            for (const auto& row : rows) CHECK(row.size() == rows.front().size());
        } else if (path.ends_with(".json")) {
            ++jsons;
            CHECK(nlohmann::json::accept(bytes));
        }
    }
    CHECK(after.size() - before.size() == svgs + csvs + jsons);
    CHECK(svgs >= 6);
    CHECK(after.count("o/assignments.json") == 1);
    CHECK(after.count("o/silhouette.json") == 1);

    const auto manifest = nlohmann::json::parse(after.at("o/manifest.json"));
    for (const auto& a : manifest["artifacts"]) {
        const std::string path = "o/" + a["path"].get<std::string>();
        REQUIRE(after.count(path) == 1);
        CHECK(a["sha256"] == sha256_hex(after.at(path)));
    }
    CHECK(manifest["inputs"].size() == 3);
    CHECK(manifest["seed"] == 42);
}

TEST_CASE("pipeline output on the fixture") {
    Workspace ws("cli-fixture");
    const auto r = criteria::end_to_end(ws.dir);
    REQUIRE(r.error == "");
    CHECK(r.unique_descriptions == 40);
    CHECK(r.ari >= 0.9);
    CHECK(r.merged_back == 600);
    CHECK(r.frequencies_match_themes);
    CHECK(r.identical_reruns);
    for (const char* name : {"silhouette.csv", "assignments.csv", "embedding.csv", "heatmap.csv", "frequency.csv"}) {
        CHECK(std::filesystem::exists(ws.dir / "run1" / name));
    }
}

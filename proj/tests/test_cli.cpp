#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "homoglab/io.hpp"
#include "homoglab/pipelines.hpp"

using namespace homoglab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("homoglab_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return (sub.empty() ? path : path / sub).string();
    }
};

const char* kAuditConfig = R"(pipeline = audit
seed = 0

[field]
descriptor = constant 1 1

[mesh]
h = 0.03125
eps = 0

[domain]
radius = 1.0

[data]
boundary = harmonic-re 3

[triple]
kind = ellipsoid
r1 = 0.1
r2 = 0.2
R = 0.8
)";

}  // namespace

TEST_CASE("config parsing") {
    auto cfg = ExperimentConfig::parse_text(kAuditConfig);
    CHECK(cfg.pipeline == "audit");
    CHECK(cfg.h == 0.03125);
    CHECK(cfg.triple_b == 0.2);
    CHECK(cfg.boundary == "harmonic-re 3");
    CHECK(cfg.validate().empty());

    CHECK_THROWS_AS(ExperimentConfig::parse_text("bogus_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("[mesh\nh = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("pipeline audit\n"), std::invalid_argument);
}

TEST_CASE("validation collects every violation") {
    auto cfg = ExperimentConfig::parse_text(kAuditConfig);
    cfg.field_desc = "laminate 2 1";
    cfg.eps = 0;               // oscillating field needs eps
    cfg.h = -1;                // bad mesh size
    cfg.triple_b = 0.5;        // breaks the triple
    const auto v = cfg.validate();
    CHECK(v.size() >= 3);
    bool saw_eps = false, saw_h = false, saw_triple = false;
    for (const auto& msg : v) {
        if (msg.find("eps") != std::string::npos) saw_eps = true;
        if (msg.find("mesh.h") != std::string::npos) saw_h = true;
        if (msg.find("triple") != std::string::npos) saw_triple = true;
    }
    CHECK(saw_eps);
    CHECK(saw_h);
    CHECK(saw_triple);
}

TEST_CASE("validation failure writes nothing") {
    TempDir tmp("validate");
    auto cfg = ExperimentConfig::parse_text(kAuditConfig);
    cfg.triple_b = 0.5;
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    CHECK(res.status == kStatusValidation);
    CHECK(!fs::exists(cfg.out_dir));
}

TEST_CASE("cell pipeline on the constant family") {
    TempDir tmp("cell");
    ExperimentConfig cfg;
    cfg.pipeline = "cell";
    cfg.raw_text = "pipeline = cell\n[field]\ndescriptor = constant 2 0.5\n[mesh]\ncell_n = 16\n";
    cfg.field_desc = "constant 2 0.5";
    cfg.cell_n = 16;
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    REQUIRE(res.status == kStatusOk);
    REQUIRE(fs::exists(tmp.str("out/report.json")));
    REQUIRE(fs::exists(tmp.str("out/corrector.txt")));
    const json rep = json::parse(read_file(tmp.str("out/report.json")));
    CHECK(rep["schema"] == "audit-v1");
    CHECK(rep["residual"].get<double>() == 0.0);
    CHECK(rep["tensor"]["A"][0][0].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep["tensor"]["A"][1][1].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

    const ReplayResult rr = replay(tmp.str("out/report.json"));
    CHECK(rr.status == kStatusOk);
    CHECK(rr.diffs.empty());
}

TEST_CASE("audit pipeline with determinism and replay") {
    TempDir tmp("audit");
    auto cfg = ExperimentConfig::parse_text(kAuditConfig);
    cfg.out_dir = tmp.str("a");
    const RunResult r1 = run(cfg);
    REQUIRE(r1.status == kStatusOk);
    const json rep = json::parse(read_file(tmp.str("a/report.json")));
    CHECK(rep["audit"]["exponent"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rep["audit"]["delta"].get<double>() == doctest::Approx(0.001).epsilon(0.3));
    CHECK(rep["audit"]["mid"].get<double>() == doctest::Approx(0.008).epsilon(0.3));
    CHECK(rep["audit"]["M"].get<double>() == doctest::Approx(0.512).epsilon(0.3));
    CHECK(rep["audit"]["c_hat"].get<double>() <= 4.0);

    // byte-identical rerun
    cfg.out_dir = tmp.str("b");
    const RunResult r2 = run(cfg);
    REQUIRE(r2.status == kStatusOk);
    CHECK(read_file(tmp.str("a/report.json")) == read_file(tmp.str("b/report.json")));
    CHECK(read_file(tmp.str("a/solution.ufield")) == read_file(tmp.str("b/solution.ufield")));

    // replay produces an empty diff
    const ReplayResult rr = replay(tmp.str("a/report.json"));
    CHECK(rr.status == kStatusOk);
    CHECK(rr.diffs.empty());

    // an edited tensor entry is named in the replay diff
    json edited = rep;
    edited["tensor"]["A"][0][0] = 1.5;
    write_file_atomic(tmp.str("a/report.json"), edited.dump(2) + "\n");
    const ReplayResult rd = replay(tmp.str("a/report.json"));
    CHECK(rd.status != kStatusOk);
    bool named = false;
    for (const auto& d : rd.diffs)
        if (d.find("tensor.A[0][0]") != std::string::npos) named = true;
    CHECK(named);
}

TEST_CASE("sweep pipeline emits the table") {
    TempDir tmp("sweep");
    ExperimentConfig cfg;
    cfg.pipeline = "sweep";
    cfg.raw_text =
        "pipeline = sweep\n[field]\ndescriptor = laminate 2 1\n[mesh]\ncell_n = 32\n"
        "[triple]\nr1 = 0.05\nr2 = 0.15\nR = 0.6\n"
        "[sweep]\neps_list = 0.125, 0.0625\nquad = 512\ndefect_R = 0.5\n";
    cfg.field_desc = "laminate 2 1";
    cfg.cell_n = 32;
    cfg.eps_list = {0.125, 0.0625};
    cfg.quad = 512;
    // keep the audit and defect ellipsoids inside the disk for A = diag(sqrt3, 2)
    cfg.triple_a = 0.05;
    cfg.triple_b = 0.15;
    cfg.triple_c = 0.6;
    cfg.defect_R = 0.5;
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    REQUIRE(res.status == kStatusOk);
    const std::string csv = read_file(tmp.str("out/sweep.csv"));
    CHECK(csv.rfind("eps,delta,mid,M,term1,term2,c_hat,kernel_defect\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    const json rep = json::parse(read_file(tmp.str("out/report.json")));
    CHECK(rep["sweep"]["rows"].size() == 2);
    CHECK(rep["sweep"].contains("slope"));
    for (const auto& row : rep["sweep"]["rows"]) REQUIRE(row["ok"].get<bool>());

    const ReplayResult rr = replay(tmp.str("out/report.json"));
    CHECK(rr.status == kStatusOk);
    CHECK(rr.diffs.empty());
}

TEST_CASE("propagate pipeline") {
    TempDir tmp("prop");
    ExperimentConfig cfg;
    cfg.pipeline = "propagate";
    cfg.raw_text = "pipeline = propagate\n";
    cfg.field_desc = "constant 1 1";
    cfg.eps = 0;
    cfg.h = 1.0 / 48;
    cfg.boundary = "harmonic-re 3";
    cfg.prop_r = 0.05;
    cfg.target_x = 0.3;
    cfg.target_y = 0.0;
    cfg.delta_target = 1e-4;
    cfg.user_C = 2.0;
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    REQUIRE(res.status == kStatusOk);
    const json rep = json::parse(read_file(tmp.str("out/report.json")));
    CHECK(rep["chain"]["m"].get<long>() == 6);
    CHECK(rep["chain"]["steps"].size() == 6);
    CHECK(rep["chain"]["closed_form_bound"].get<double>() > 0);
    const std::string csv = read_file(tmp.str("out/chain.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 6 steps
}

TEST_CASE("solver failure retains the marker file") {
    TempDir tmp("fail");
    ExperimentConfig cfg;
    cfg.pipeline = "solve";
    cfg.raw_text = "pipeline = solve\n";
    // declared elliptic but actually indefinite: the solve must fail
    cfg.field_desc = "expression d=2 lambda=0.5 tau=10 mu=1 block=1 ; "
                     "0.1 + sin(2*pi*y1) ; 0 ; 1";
    cfg.eps = 0.125;
    cfg.h = 0.015625;
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    CHECK(res.status == kStatusSolver);
    CHECK(fs::exists(tmp.str("out/FAILED.txt")));
    CHECK(!fs::exists(tmp.str("out/report.json")));
}

TEST_CASE("halfball and lift pipelines") {
    TempDir tmp("half");
    ExperimentConfig cfg;
    cfg.pipeline = "halfball";
    cfg.raw_text = "pipeline = halfball\n";
    cfg.field_desc = "block 0.5";
    cfg.eps = 0.125;
    cfg.h = 0.125 / 8.0;
    cfg.boundary = "harmonic-im 2";
    cfg.flat_bc = "dirichlet";
    cfg.out_dir = tmp.str("out");
    const RunResult res = run(cfg);
    REQUIRE(res.status == kStatusOk);
    const json rep = json::parse(read_file(tmp.str("out/report.json")));
    CHECK(rep["residual_reflected"].get<double>() <= rep["bound_10h2"].get<double>());
    CHECK(rep["restriction_diff"].get<double>() <= rep["bound_10h2"].get<double>());
    REQUIRE(fs::exists(tmp.str("out/half.ufield")));
    REQUIRE(fs::exists(tmp.str("out/reflected.ufield")));

    ExperimentConfig lc;
    lc.pipeline = "lift";
    lc.raw_text = "pipeline = lift\n";
    lc.field_desc = "constant 1 1";
    lc.eps = 0;
    lc.h = 1.0 / 32;
    lc.boundary = "harmonic-re 2";
    lc.lambda_k = 1.0;
    lc.t_extent = 0.5;
    lc.h_t = 1.0 / 32;
    lc.out_dir = tmp.str("lift");
    const RunResult lres = run(lc);
    REQUIRE(lres.status == kStatusOk);
    const json lrep = json::parse(read_file(tmp.str("lift/report.json")));
    CHECK(lrep["residual_lifted"].get<double>() <= lrep["bound"].get<double>());
}

TEST_CASE("ufield round trip") {
    TempDir tmp("ufield");
    auto f = CoefficientField::laminate(2.0, 1.0);
    auto u = solve_dirichlet(f, 0.125, Domain::disk(1.0), BoundaryData::harmonic_re(2),
                             0.125 / 8.0);
    dump_ufield(tmp.str("u.ufield"), u);
    auto v = load_ufield(tmp.str("u.ufield"));
    REQUIRE(v.nodes() == u.nodes());
    for (int64_t i = 0; i < u.nodes(); ++i)
        REQUIRE(v.values[size_t(i)] == u.values[size_t(i)]);
    CHECK(v.meta.eps == u.meta.eps);
    CHECK(v.meta.field_desc == u.meta.field_desc);
    CHECK(v.coeff.family() == Family::Laminate);
    // the reloaded field audits identically
    CHECK(residual(v) == doctest::Approx(residual(u)).epsilon(1e-12));

    // corrupted header is rejected
    std::string text = read_file(tmp.str("u.ufield"));
    text.replace(text.find("h 0.015625"), 10, "h 0.03125\n");
    write_file_atomic(tmp.str("bad.ufield"), text);
    CHECK_THROWS(load_ufield(tmp.str("bad.ufield")));
}

TEST_CASE("atomic writes leave no temp files") {
    TempDir tmp("atomic");
    write_file_atomic(tmp.str("x.txt"), "hello\n");
    CHECK(read_file(tmp.str("x.txt")) == "hello\n");
    CHECK(!fs::exists(tmp.str("x.txt.tmp")));
}

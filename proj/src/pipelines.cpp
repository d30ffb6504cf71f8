#include "homoglab/pipelines.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "homoglab/audit.hpp"
#include "homoglab/io.hpp"
#include "homoglab/kernel.hpp"

namespace homoglab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json report_skeleton(const ExperimentConfig& cfg) {
    json j;
    j["schema"] = "audit-v1";
    j["pipeline"] = cfg.pipeline;
    j["seed"] = cfg.seed;
    j["config_text"] = cfg.raw_text;
    return j;
}

HomogenizedTensor tensor_for(const CoefficientField& field, int cell_n) {
    if (field.oscillating()) return homogenized_tensor(field, cell_n);
    return make_tensor(field.evaluate(Vec(0.0, 0.0)), field.lambda());
}

double whole_sup(const DiscreteField& u) {
    double s = 0;
    for (double v : u.values) s = std::max(s, std::abs(v));
    return s;
}

struct PipelineOutput {
    json report;
    std::vector<std::pair<std::string, std::string>> extra_files;  // name -> content
    std::vector<std::pair<std::string, DiscreteField>> fields;     // name -> dump
    std::vector<std::string> messages;
};

PipelineOutput run_cell(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const EllipticityReport ell = verify_ellipticity(field, 10000, cfg.seed);
    if (!ell.pass)
        throw std::runtime_error("coefficient field violates its declared band: " + ell.violation);
    const Corrector c = solve_corrector(field, cfg.cell_n);
    const HomogenizedTensor T = homogenize(field, c);
    out.report = report_skeleton(cfg);
    out.report["field"] = field.describe();
    out.report["n"] = c.n;
    out.report["residual"] = c.residual;
    out.report["means"] = c.means;
    out.report["ellipticity"] = {{"min_rayleigh", ell.min_rayleigh},
                                 {"max_rayleigh", ell.max_rayleigh},
                                 {"pass", ell.pass}};
    out.report["tau_hat"] = estimate_holder(field, field.mu(), 10000, cfg.seed);
    out.report["tensor"] = tensor_to_json(T);
    std::ostringstream msg;
    msg << "cell: n=" << c.n << " residual=" << fmt(c.residual) << " A=[" << fmt(T.A(0, 0))
        << " " << fmt(T.A(0, 1)) << "; " << fmt(T.A(1, 0)) << " " << fmt(T.A(1, 1)) << "]";
    out.messages.push_back(msg.str());
    out.extra_files.emplace_back("corrector.txt", corrector_text(c, field.describe()));
    return out;
}

PipelineOutput run_solve(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const BoundaryData data = BoundaryData::parse(cfg.boundary);
    const DiscreteField u =
        solve_dirichlet(field, cfg.eps, Domain::disk(cfg.radius), data, cfg.h);
    out.report = report_skeleton(cfg);
    out.report["field"] = field.describe();
    out.report["eps"] = cfg.eps;
    out.report["h"] = cfg.h;
    out.report["nodes"] = u.nodes();
    out.report["residual"] = residual(u);
    out.report["sup"] = whole_sup(u);
    out.fields.emplace_back("solution.ufield", u);
    std::ostringstream msg;
    msg << "solve: nodes=" << u.nodes() << " sup=" << fmt(whole_sup(u));
    out.messages.push_back(msg.str());
    return out;
}

PipelineOutput run_audit(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const BoundaryData data = BoundaryData::parse(cfg.boundary);
    const HomogenizedTensor T = tensor_for(field, cfg.cell_n);
    const DiscreteField u =
        solve_dirichlet(field, cfg.eps, Domain::disk(cfg.radius), data, cfg.h);
    const BallTriple triple =
        cfg.triple_kind == "ellipsoid"
            ? BallTriple::ellipsoid_triple(cfg.triple_a, cfg.triple_b, cfg.triple_c,
                                           field.lambda())
            : BallTriple::ball_triple(cfg.triple_a, cfg.triple_b, cfg.triple_c, field.lambda());
    const AuditReport rep = three_ball_audit(u, triple, T, cfg.eps);
    out.report = report_skeleton(cfg);
    out.report["tensor"] = tensor_to_json(T);
    out.report["audit"] = audit_to_json(rep);
    out.fields.emplace_back("solution.ufield", u);
    std::ostringstream msg;
    msg << "audit: delta=" << fmt(rep.delta) << " mid=" << fmt(rep.mid) << " M=" << fmt(rep.M)
        << " exponent=" << fmt(rep.exponent)
        << " c_hat=" << (rep.c_hat_defined ? fmt(rep.c_hat) : "undefined");
    out.messages.push_back(msg.str());
    return out;
}

PipelineOutput run_sweep(const ExperimentConfig& cfg) {
    PipelineOutput out;
    SweepConfig sc{parse_field_descriptor(cfg.field_desc)};
    sc.eps_list = cfg.eps_list;
    sc.data = BoundaryData::parse(cfg.boundary);
    sc.domain_radius = cfg.radius;
    sc.triple_r1 = cfg.triple_a;
    sc.triple_r2 = cfg.triple_b;
    sc.triple_R = cfg.triple_c;
    sc.defect_R = cfg.defect_R;
    sc.h_factor = cfg.h_factor;
    sc.cell_n = cfg.cell_n;
    sc.quad_count = cfg.quad;
    sc.floor_threshold = cfg.floor_threshold;
    const SweepResult res = epsilon_sweep(sc);
    out.report = report_skeleton(cfg);
    out.report["sweep"] = sweep_to_json(res);
    out.extra_files.emplace_back("sweep.csv", sweep_to_csv(res));
    for (const SweepRow& row : res.rows) {
        std::ostringstream msg;
        msg << "sweep eps=" << fmt(row.eps) << ": "
            << (row.ok ? "defect=" + fmt(row.defect) + " c_hat=" + fmt(row.c_hat)
                       : "failed: " + row.error);
        out.messages.push_back(msg.str());
    }
    std::ostringstream msg;
    msg << "sweep: slope="
        << (res.slope_defined ? fmt(res.slope) : std::string("undefined"))
        << (res.floor_limited ? " (floor-limited)" : "");
    out.messages.push_back(msg.str());
    return out;
}

PipelineOutput run_propagate(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const BoundaryData data = BoundaryData::parse(cfg.boundary);
    const HomogenizedTensor T = tensor_for(field, cfg.cell_n);
    const DiscreteField u =
        solve_dirichlet(field, cfg.eps, Domain::disk(cfg.radius), data, cfg.h);
    const ChainReport chain =
        propagate_smallness(u, T, cfg.eps, cfg.prop_r, Vec(cfg.target_x, cfg.target_y),
                            field.lambda(), cfg.delta_target, cfg.user_C);
    out.report = report_skeleton(cfg);
    out.report["tensor"] = tensor_to_json(T);
    out.report["chain"] = chain_to_json(chain);
    out.extra_files.emplace_back("chain.csv", chain_to_csv(chain));
    std::ostringstream msg;
    msg << "propagate: m=" << chain.m << " beta=" << fmt(chain.beta)
        << " closed_form=" << fmt(chain.closed_form_bound)
        << " iterated=" << fmt(chain.iterated_bound);
    out.messages.push_back(msg.str());
    return out;
}

PipelineOutput run_halfball(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const BoundaryData data = BoundaryData::parse(cfg.boundary);
    const bool dirichlet = cfg.flat_bc == "dirichlet";
    const FlatBC bc = dirichlet ? FlatBC::Dirichlet : FlatBC::Neumann;
    const Parity parity = dirichlet ? Parity::Odd : Parity::Even;

    const DiscreteField u_half = solve_half(field, cfg.eps, cfg.radius, bc, data, cfg.h);
    const DiscreteField refl = reflect_solution(u_half, parity);
    const double res_half = residual(u_half);
    const double res_refl = residual(refl);

    const DiscreteField u_full =
        solve_dirichlet(reflect_even(field), cfg.eps, Domain::disk(cfg.radius),
                        BoundaryData::extended(data, dirichlet), cfg.h);
    // restriction of the full solve against the half solve, node by node
    double diff_restrict = 0;
    const PolarMesh& hm = *u_half.mesh;
    const PolarMesh& fm = *u_full.mesh;
    diff_restrict = std::abs(u_half.values[0] - u_full.values[0]);
    for (int j = 1; j <= hm.rings(); ++j)
        for (int k = 0; k < hm.nodes_per_ring(); ++k)
            diff_restrict = std::max(
                diff_restrict, std::abs(u_half.values[size_t(hm.node_index(j, k))] -
                                        u_full.values[size_t(fm.node_index(j, k))]));
    double diff_reflected = 0;
    for (int64_t i = 0; i < refl.nodes(); ++i)
        diff_reflected =
            std::max(diff_reflected, std::abs(refl.values[size_t(i)] - u_full.values[size_t(i)]));

    out.report = report_skeleton(cfg);
    out.report["flat_bc"] = cfg.flat_bc;
    out.report["residual_half"] = res_half;
    out.report["residual_reflected"] = res_refl;
    out.report["restriction_diff"] = diff_restrict;
    out.report["reflected_vs_full"] = diff_reflected;
    out.report["h"] = cfg.h;
    out.report["bound_10h2"] = 10.0 * cfg.h * cfg.h;
    out.fields.emplace_back("half.ufield", u_half);
    out.fields.emplace_back("reflected.ufield", refl);
    std::ostringstream msg;
    msg << "halfball(" << cfg.flat_bc << "): reflected residual=" << fmt(res_refl)
        << " restriction diff=" << fmt(diff_restrict) << " (10h^2=" << fmt(10 * cfg.h * cfg.h)
        << ")";
    out.messages.push_back(msg.str());
    return out;
}

PipelineOutput run_lift(const ExperimentConfig& cfg) {
    PipelineOutput out;
    const CoefficientField field = parse_field_descriptor(cfg.field_desc);
    const BoundaryData data = BoundaryData::parse(cfg.boundary);
    const DiscreteField u = solve_eigen_type(field, cfg.eps, cfg.lambda_k, data,
                                             Domain::disk(cfg.radius), cfg.h);
    const DiscreteField v = lift_eigen(u, cfg.lambda_k, cfg.t_extent, cfg.h_t);
    const double res_base = residual(u);
    const double res_lift = residual(v);
    out.report = report_skeleton(cfg);
    out.report["lambda_k"] = cfg.lambda_k;
    out.report["residual_base"] = res_base;
    out.report["residual_lifted"] = res_lift;
    out.report["h"] = cfg.h;
    out.report["h_t"] = v.tgrid->h_t;
    out.report["bound"] = 10.0 * (cfg.h * cfg.h + v.tgrid->h_t * v.tgrid->h_t);
    out.fields.emplace_back("base.ufield", u);
    std::ostringstream msg;
    msg << "lift: lambda_k=" << fmt(cfg.lambda_k) << " lifted residual=" << fmt(res_lift)
        << " bound=" << fmt(10.0 * (cfg.h * cfg.h + v.tgrid->h_t * v.tgrid->h_t));
    out.messages.push_back(msg.str());
    return out;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
    RunResult result;
    const std::vector<std::string> violations = cfg.validate();
    if (!violations.empty()) {
        result.status = kStatusValidation;
        result.messages = violations;
        return result;
    }
    fs::create_directories(cfg.out_dir);
    PipelineOutput out;
    try {
        if (cfg.pipeline == "cell") out = run_cell(cfg);
        else if (cfg.pipeline == "solve") out = run_solve(cfg);
        else if (cfg.pipeline == "audit") out = run_audit(cfg);
        else if (cfg.pipeline == "sweep") out = run_sweep(cfg);
        else if (cfg.pipeline == "propagate") out = run_propagate(cfg);
        else if (cfg.pipeline == "halfball") out = run_halfball(cfg);
        else out = run_lift(cfg);
    } catch (const std::exception& e) {
        result.status = kStatusSolver;
        result.messages.push_back(std::string("solver failure: ") + e.what());
        write_file_atomic(cfg.out_dir + "/FAILED.txt", std::string(e.what()) + "\n");
        result.artifacts.push_back(cfg.out_dir + "/FAILED.txt");
        return result;
    }

    const std::string report_path = cfg.out_dir + "/report.json";
    write_file_atomic(report_path, out.report.dump(2) + "\n");
    result.artifacts.push_back(report_path);
    for (const auto& [name, content] : out.extra_files) {
        write_file_atomic(cfg.out_dir + "/" + name, content);
        result.artifacts.push_back(cfg.out_dir + "/" + name);
    }
    for (const auto& [name, field] : out.fields) {
        dump_ufield(cfg.out_dir + "/" + name, field);
        result.artifacts.push_back(cfg.out_dir + "/" + name);
    }
    result.messages = out.messages;
    return result;
}

namespace {

void diff_json(const json& a, const json& b, const std::string& path,
               std::vector<std::string>& diffs) {
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        if (std::abs(x - y) > 1e-12 * std::max({1.0, std::abs(x), std::abs(y)})) {
            std::ostringstream os;
            os << path << ": " << fmt(x) << " vs " << fmt(y);
            diffs.push_back(os.str());
        }
        return;
    }
    if (a.type() != b.type()) {
        diffs.push_back(path + ": type mismatch");
        return;
    }
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) diffs.push_back(path + "." + it.key() + ": missing");
            else diff_json(it.value(), b.at(it.key()), path + "." + it.key(), diffs);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) diffs.push_back(path + "." + it.key() + ": extra");
        return;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) {
            diffs.push_back(path + ": array length " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
            return;
        }
        for (size_t i = 0; i < a.size(); ++i)
            diff_json(a[i], b[i], path + "[" + std::to_string(i) + "]", diffs);
        return;
    }
    if (a != b) diffs.push_back(path + ": value mismatch");
}

}  // namespace

ReplayResult replay(const std::string& report_path) {
    ReplayResult result;
    const json original = json::parse(read_file(report_path));
    if (!original.contains("config_text"))
        throw std::runtime_error("replay: report carries no embedded config");
    ExperimentConfig cfg = ExperimentConfig::parse_text(original["config_text"].get<std::string>());
    cfg.out_dir = fs::path(report_path).parent_path().string() + "/replay";
    const RunResult rerun = run(cfg);
    if (rerun.status != kStatusOk) {
        result.status = rerun.status;
        result.diffs = rerun.messages;
        return result;
    }
    const json fresh = json::parse(read_file(cfg.out_dir + "/report.json"));
    diff_json(original, fresh, "report", result.diffs);
    result.status = result.diffs.empty() ? kStatusOk : 1;
    return result;
}

}  // namespace homoglab

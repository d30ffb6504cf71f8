#include "homoglab/config.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "homoglab/audit.hpp"
#include "homoglab/coeff.hpp"
#include "homoglab/io.hpp"
#include "homoglab/pde.hpp"

namespace homoglab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.raw_text = text;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        try {
            if (full == "pipeline") cfg.pipeline = val;
            else if (full == "seed") cfg.seed = std::stoull(val);
            else if (full == "out") cfg.out_dir = val;
            else if (full == "field.descriptor") cfg.field_desc = val;
            else if (full == "mesh.h") cfg.h = std::stod(val);
            else if (full == "mesh.eps") cfg.eps = std::stod(val);
            else if (full == "mesh.cell_n") cfg.cell_n = std::stoi(val);
            else if (full == "domain.radius") cfg.radius = std::stod(val);
            else if (full == "data.boundary") cfg.boundary = val;
            else if (full == "triple.kind") cfg.triple_kind = val;
            else if (full == "triple.r1") cfg.triple_a = std::stod(val);
            else if (full == "triple.r2") cfg.triple_b = std::stod(val);
            else if (full == "triple.R") cfg.triple_c = std::stod(val);
            else if (full == "sweep.eps_list") cfg.eps_list = parse_list(val);
            else if (full == "sweep.h_factor") cfg.h_factor = std::stod(val);
            else if (full == "sweep.defect_R") cfg.defect_R = std::stod(val);
            else if (full == "sweep.quad") cfg.quad = std::stoi(val);
            else if (full == "sweep.floor") cfg.floor_threshold = std::stod(val);
            else if (full == "propagate.r") cfg.prop_r = std::stod(val);
            else if (full == "propagate.target_x") cfg.target_x = std::stod(val);
            else if (full == "propagate.target_y") cfg.target_y = std::stod(val);
            else if (full == "propagate.delta") cfg.delta_target = std::stod(val);
            else if (full == "propagate.C") cfg.user_C = std::stod(val);
            else if (full == "halfball.flat_bc") cfg.flat_bc = val;
            else if (full == "lift.lambda_k") cfg.lambda_k = std::stod(val);
            else if (full == "lift.t_extent") cfg.t_extent = std::stod(val);
            else if (full == "lift.h_t") cfg.h_t = std::stod(val);
            else
                throw std::invalid_argument("unknown key");
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + " (" + full +
                                        "): " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    return parse_text(read_file(path));
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> v;
    static const std::set<std::string> pipelines = {"cell",      "solve", "audit", "sweep",
                                                    "propagate", "halfball", "lift"};
    if (!pipelines.count(pipeline)) v.push_back("pipeline: unknown pipeline '" + pipeline + "'");

    CoefficientField field = CoefficientField::constant_diag({1.0, 1.0});
    bool field_ok = false;
    try {
        field = parse_field_descriptor(field_desc);
        field_ok = true;
    } catch (const std::exception& e) {
        v.push_back(std::string("field.descriptor: ") + e.what());
    }

    try {
        BoundaryData::parse(boundary);
    } catch (const std::exception& e) {
        v.push_back(std::string("data.boundary: ") + e.what());
    }

    if (h <= 0) v.push_back("mesh.h: must be positive");
    if (eps < 0) v.push_back("mesh.eps: must be nonnegative");
    if (radius <= 0) v.push_back("domain.radius: must be positive");
    if (cell_n < 8) v.push_back("mesh.cell_n: corrector grids need n >= 8");

    const bool needs_solve = pipeline == "solve" || pipeline == "audit" ||
                             pipeline == "propagate" || pipeline == "halfball" ||
                             pipeline == "lift";
    if (needs_solve && field_ok && field.oscillating()) {
        if (eps <= 0) v.push_back("mesh.eps: oscillating fields need eps > 0");
        else if (h > eps / 8.0 + 1e-15)
            v.push_back("mesh.h: mesh rule h <= eps/8 violated (h = " + fmt(h) +
                        ", eps/8 = " + fmt(eps / 8.0) + ")");
    }

    if (pipeline == "audit" || pipeline == "sweep") {
        try {
            if (triple_kind == "ellipsoid")
                BallTriple::ellipsoid_triple(triple_a, triple_b, triple_c,
                                             field_ok ? field.lambda() : 0.5);
            else if (triple_kind == "ball")
                BallTriple::ball_triple(triple_a, triple_b, triple_c,
                                        field_ok ? field.lambda() : 0.5);
            else
                v.push_back("triple.kind: expected 'ellipsoid' or 'ball'");
        } catch (const std::exception& e) {
            v.push_back(std::string("triple: ") + e.what());
        }
        // containment of the outer region is checked at runtime against the
        // actual homogenized tensor; the lambda-based bound is too coarse
    }

    if (pipeline == "sweep") {
        if (eps_list.empty()) v.push_back("sweep.eps_list: must not be empty");
        for (double e : eps_list)
            if (e <= 0) v.push_back("sweep.eps_list: entries must be positive");
        if (h_factor < 8.0)
            v.push_back("sweep.h_factor: mesh rule needs h = eps/h_factor <= eps/8");
        if (defect_R <= 0) v.push_back("sweep.defect_R: must be positive");
        if (quad < 8) v.push_back("sweep.quad: need at least 8 quadrature nodes");
    }

    if (pipeline == "propagate" && field_ok) {
        const double lambda = field.lambda();
        if (!(prop_r > 0 && prop_r < lambda / 9.0))
            v.push_back("propagate.r: need 0 < r < lambda/9 = " + fmt(lambda / 9.0));
        if (user_C < 1) v.push_back("propagate.C: need C >= 1");
        if (delta_target < 0) v.push_back("propagate.delta: must be nonnegative");
        const double dist = std::hypot(target_x, target_y);
        if (prop_r > 0 && dist + 9.0 * prop_r / lambda > radius)
            v.push_back("propagate.target: chain would leave the domain");
    }

    if (pipeline == "halfball") {
        if (flat_bc != "dirichlet" && flat_bc != "neumann")
            v.push_back("halfball.flat_bc: expected 'dirichlet' or 'neumann'");
        if (field_ok && !field.block_structure())
            v.push_back("field.descriptor: half-ball problems need the block structure");
    }

    if (pipeline == "lift") {
        if (lambda_k < 0) v.push_back("lift.lambda_k: must be nonnegative");
        if (t_extent <= 0) v.push_back("lift.t_extent: must be positive");
        if (h_t <= 0) v.push_back("lift.h_t: must be positive");
    }

    return v;
}

}  // namespace homoglab

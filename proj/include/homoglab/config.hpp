#pragma once

// Flat key/value experiment configs with one section per pipeline. Parsing
// keeps the raw text for embedding into reports; validation collects every
// violation before any solve starts.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace homoglab {

struct ExperimentConfig {
    std::string pipeline;
    uint64_t seed = 0;
    std::string out_dir = "out";
    std::string raw_text;

    // [field]
    std::string field_desc = "constant 1 1";
    // [mesh]
    double h = 1.0 / 64;
    double eps = 0.0;
    int cell_n = 64;
    // [domain]
    double radius = 1.0;
    // [data]
    std::string boundary = "harmonic-re 3";
    // [triple]
    std::string triple_kind = "ellipsoid";
    double triple_a = 0.1, triple_b = 0.2, triple_c = 0.8;
    // [sweep]
    std::vector<double> eps_list;
    double h_factor = 8.0;  // h = eps / h_factor per row
    double defect_R = 0.6;
    int quad = 1024;
    double floor_threshold = 1e-4;
    // [propagate]
    double prop_r = 0.03;
    double target_x = 0.5, target_y = 0.1;
    double delta_target = 1e-4;
    double user_C = 2.0;
    // [halfball]
    std::string flat_bc = "dirichlet";
    // [lift]
    double lambda_k = 1.0;
    double t_extent = 0.5;
    double h_t = 1.0 / 64;

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    // empty iff the config satisfies every precondition of the pipeline
    std::vector<std::string> validate() const;
};

}  // namespace homoglab

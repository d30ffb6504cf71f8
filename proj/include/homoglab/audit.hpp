#pragma once

// Inequality audits on computed solutions: the three-ball exponents and
// m-selection, per-solution audit reports with the empirical constant, the
// propagation-of-smallness chain, the doubling-based delta_0 calculator,
// and the eps-sweep scaling study.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/kernel.hpp"
#include "homoglab/pde.hpp"

namespace homoglab {

// eps * ln(1/eps + 2); defined as 0 for eps <= 0 (the eps -> 0 limit)
double eps_factor(double eps);

struct BallTriple {
    enum class Kind { Ellipsoid, Ball };
    Kind kind = Kind::Ellipsoid;
    double a = 0, b = 0, c = 0;  // (r1, r2, R) or (R1, R2, R3)
    double lambda = 1.0;
    Vec center;                  // ball triples may be translated (chain audits)

    // validates 0 < r1 < r2 < R/4 < 1
    static BallTriple ellipsoid_triple(double r1, double r2, double R, double lambda);
    // validates 0 < R1 < R2 < lambda R3 / 4 < lambda / 4
    static BallTriple ball_triple(double R1, double R2, double R3, double lambda,
                                  const Vec& center = Vec(0.0, 0.0));

    // equivalent ellipsoid radii feeding the m-selection
    void ellipsoid_radii(double& r1, double& r2, double& R) const;
};

// alpha = ln(R/(2 r2)) / ln(R/r1), in (0,1) on valid triples
double exponent_alpha(double r1, double r2, double R);

struct BetaResult {
    bool valid = false;
    double beta = 0;
    std::string rejection;  // set when R2 >= lambda R3 / 2 (beta <= 0)
};
BetaResult exponent_beta(double R1, double R2, double R3, double lambda);

struct MSelection {
    bool m0_defined = false;
    long m0 = 0;
    bool m1_defined = false;
    long m1 = 0;
    int case_id = 0;  // 1 or 2; 0 if degenerate (M = 0)
};
// m0 = floor(ln(M/delta)/ln(R/r1)) + 1; case 1 iff
// eps ln(1/eps+2) (2r2/r1)^m0 <= (2r2/R)^m0; m1 from the eps balance.
MSelection select_m(double delta, double M, double r1, double r2, double R, double eps);

struct AuditReport {
    std::string kind;            // "ellipsoid" | "ball"
    double radius_a = 0, radius_b = 0, radius_c = 0;
    double lambda = 0;
    Vec center;
    double eps = 0;
    double eps_term = 0;         // eps ln(1/eps + 2)
    double delta = 0, mid = 0, M = 0;
    int64_t count_inner = 0, count_mid = 0, count_outer = 0;
    double exponent = 0;         // alpha or beta
    MSelection selection;
    double term1 = 0;            // (r2/R) delta^a M^(1-a)
    double term2 = 0;            // (R^2/r1^2) [eps ln]^a M
    double c_hat = 0;
    bool c_hat_defined = false;
    bool case1_consistent = false;  // eps-term <= middle term at m0
    bool case2_consistent = false;  // delta r1 / (M R) < eps-term
    std::string field_desc, boundary_desc;
};

AuditReport three_ball_audit(const DiscreteField& u, const BallTriple& triple,
                             const HomogenizedTensor& T, double eps);

// C^{1/(1-beta)} delta^{beta^m} + m C^{1/(1-beta)} eps_term^{beta^m}
double propagation_bound(double beta, double C, double delta, double eps_term, long m);

struct ChainReport {
    long m = 0;
    double beta = 0;
    double r = 0;
    Vec target;
    std::vector<AuditReport> steps;
    double c_hat_max = 0;
    double iterated_bound = 0;     // recursion with the empirical constant
    double closed_form_bound = 0;  // propagation_bound with the user C
    double user_C = 0;
};

// Chain of ball triples (r, 2r, 9r/lambda) along the straight path from the
// origin to `target`, stepping r. Errors if a chain ball leaves the domain.
ChainReport propagate_smallness(const DiscreteField& u, const HomogenizedTensor& T, double eps,
                                double r, const Vec& target, double lambda,
                                double delta_target, double user_C);

// k0 = ceil(log2(sqrt(lambda)/r0)); delta_0 = (eta0/2) C(1/eta0)^{-k0}
double doubling_propagation(const std::function<double(double)>& C_fn, double lambda,
                            double r0, double eta0);

struct SweepConfig {
    CoefficientField field;
    std::vector<double> eps_list;
    BoundaryData data = BoundaryData::harmonic_re(3);
    double domain_radius = 1.0;
    double triple_r1 = 0.1, triple_r2 = 0.2, triple_R = 0.8;
    double defect_R = 0.6;
    int cell_n = 128;           // resolution of the corrector solve for the tensor
    int quad_count = 1024;
    double floor_threshold = 1e-4;
    double tol = 1e-11;
    double h_factor = 8.0;       // h = eps / h_factor
};

struct SweepRow {
    double eps = 0;
    bool ok = false;
    std::string error;
    double h = 0;
    double delta = 0, mid = 0, M = 0, term1 = 0, term2 = 0, c_hat = 0;
    double defect = 0;
    long m0 = 0, m1 = 0;
    int case_id = 0;
};

struct SweepResult {
    HomogenizedTensor tensor;
    std::vector<SweepRow> rows;
    bool slope_defined = false;
    double slope = 0;           // d ln(defect) / d ln(eps ln(1/eps+2))
    bool floor_limited = false;
    double c_hat_min = 0, c_hat_max = 0;
};

SweepResult epsilon_sweep(const SweepConfig& cfg);

}  // namespace homoglab

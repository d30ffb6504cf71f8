#pragma once

// Periodic coefficient fields A(y): the built-in test families, user-defined
// expression fields, sampling-based regularity verification, and the even
// reflection used by the half-ball problems.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/expr.hpp"
#include "homoglab/linalg.hpp"

namespace homoglab {

enum class Family { Constant, Matrix, Laminate, Trigonometric, Block, Reflected, Expression };

std::string family_name(Family f);

class CoefficientField {
  public:
    // diag(entries), any d in 2..4
    static CoefficientField constant_diag(const std::vector<double>& entries);
    // constant symmetric matrix, any d in 2..4
    static CoefficientField constant_matrix(const Mat& A);
    // (base + amp*sin(2*pi*y1)) * I, d = 2
    static CoefficientField laminate(double base, double amplitude);
    // (1 + rho*sin(2*pi*y1)*sin(2*pi*y2)) * I, d = 2, rho in (0,1)
    static CoefficientField trigonometric(double rho);
    // diag(1 + rho*sin(2*pi*y1), 1 + rho*cos(2*pi*y2)), d = 2, block structure
    static CoefficientField block(double rho);
    // entries: upper triangle row-major, d*(d+1)/2 expressions in y1..yd
    static CoefficientField expression(int d, const std::vector<std::string>& entries,
                                       double lambda, double tau, double mu,
                                       bool block_structure);

    Mat evaluate(const Vec& y) const;

    int dim() const { return d_; }
    double lambda() const { return lambda_; }
    double tau() const { return tau_; }
    double mu() const { return mu_; }
    bool block_structure() const { return block_; }
    Family family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    bool oscillating() const;

    // one-line descriptor, parseable by parse_field_descriptor
    std::string describe() const;

    friend CoefficientField reflect_even(const CoefficientField& field);

  public:
    // identity field diag(1,1); DiscreteField and loaders need a default
    CoefficientField() : params_{1.0, 1.0} {}

  private:
    Family family_ = Family::Constant;
    int d_ = 2;
    double lambda_ = 0.5, tau_ = 0.0, mu_ = 1.0;
    bool block_ = false;
    std::vector<double> params_;
    std::vector<Expr> exprs_;                          // Expression family
    std::shared_ptr<const CoefficientField> base_;     // Reflected family
};

struct EllipticityReport {
    double min_rayleigh = 0.0;
    double max_rayleigh = 0.0;
    bool pass = false;
    Vec worst_y;       // sample with the largest band violation (or extreme quotient)
    Vec worst_xi;
    double worst_quotient = 0.0;
    std::string violation;  // empty when pass
};

// y on a Halton sequence over the periodicity cell, xi random unit vectors.
EllipticityReport verify_ellipticity(const CoefficientField& field, int sample_count,
                                     uint64_t seed);

// Empirical Hoelder quotient max |A(x)-A(y)|_F / |x-y|^mu over sampled pairs;
// a lower bound for the true tau.
double estimate_holder(const CoefficientField& field, double mu, int pair_count,
                       uint64_t seed);

// A~(x', x_d) = A(x', |x_d|); requires block structure.
CoefficientField reflect_even(const CoefficientField& field);

// Round-trips the describe() format: "laminate base=2 amp=1" etc.
CoefficientField parse_field_descriptor(const std::string& text);

}  // namespace homoglab

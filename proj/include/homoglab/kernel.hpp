#pragma once

// The explicit Poisson kernel of the homogenized operator on ellipsoid
// boundaries, boundary-integral reconstruction, the Chebyshev-Lagrange
// interpolation plan with its attached bounds, the boundary weight w_eps,
// and the kernel-defect probe for the expansion remainder.

#include <complex>
#include <functional>
#include <vector>

#include "homoglab/ellipsoid.hpp"
#include "homoglab/pde.hpp"

namespace homoglab {

// 1 / (surface area of the unit sphere in R^d)
double kernel_normalization(int d);

// P0(x, y) for x inside E_r and y on its boundary, taken against the
// Euclidean surface measure: the flat-ball kernel transported through S,
// including the boundary Jacobian det(S) r / |S^T S y| that makes
// int_{dE_r} P0(x, .) = 1 hold for every tensor.
double poisson_kernel(const Ellipsoid& E, const Vec& x, const Vec& y);

// quadrature of P0(x, .) u over precomputed boundary nodes
double reconstruct(const Ellipsoid& E, const std::vector<BoundaryNode>& nodes,
                   const std::vector<double>& u_boundary, const Vec& x);
double reconstruct(const Ellipsoid& E, int count, const std::function<double(const Vec&)>& u,
                   const Vec& x);

// t_i = cos((2i-1) pi / (2m)), i = 1..m
std::vector<double> chebyshev_nodes(int m);

struct InterpolationPlan {
    int m = 0;
    double r1 = 0, r2 = 0;
    double R = 0;                 // optional outer radius, set by callers that have one
    std::vector<double> nodes;    // Chebyshev nodes t_i
    std::vector<double> coeffs;   // Lagrange coefficients c_j at r2/r1
    double coeff_bound = 0;       // (2m)^{-1} (2 r2 / r1)^m
    double sum_bound = 0;         // (1/2) (2 r2 / r1)^m
    double coeff_sum = 0;         // computed sum of c_j (must be ~1)
};

// c_j = prod_{i != j} (r2/r1 - t_i) / (t_j - t_i); validates the plan
// invariants (per-coefficient bound, sum = 1 up to summation roundoff).
InterpolationPlan lagrange_coeffs(int m, double r1, double r2);

// Phi_m(z) = prod (z - t_i)
std::complex<double> node_polynomial(const InterpolationPlan& plan, std::complex<double> z);

// |Phi'_m(t_i)| for each node (all >= m 2^{1-m})
std::vector<double> node_polynomial_derivatives(const InterpolationPlan& plan);

// 2^m r2^m / R^{m+d-1}, the remainder bound with unit constant
double interpolation_error_bound(const InterpolationPlan& plan, double R, int d);

// w_eps(y) = (ahat n.n)^{-1} (dPsi_k/dn n_k) a(y/eps) n.n with one-sided
// second-order normal differences of the Dirichlet correctors.
double w_epsilon(const CoefficientField& field, double eps, const Ellipsoid& E,
                 const std::vector<DiscreteField>& psi, const Vec& y);

// |u(x) - int_{dE} P0(x,y) w(y) u(y) dy|: the computable surrogate for the
// integrated expansion remainder. Requires |Sx| <= R/2.
double kernel_defect(const DiscreteField& u, const Ellipsoid& E,
                     const std::function<double(const BoundaryNode&)>& w, const Vec& x,
                     int quad_count);

}  // namespace homoglab

#include "homoglab/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace homoglab {

double kernel_normalization(int d) {
    if (d < 2) throw std::invalid_argument("kernel_normalization: d >= 2");
    return std::tgamma(double(d) / 2.0) / (2.0 * std::pow(kPi, double(d) / 2.0));
}

double poisson_kernel(const Ellipsoid& E, const Vec& x, const Vec& y) {
    const int d = E.dim();
    const double r = E.radius();
    const Vec Sx = E.S() * x, Sy = E.S() * y;
    if (Sx.norm() >= r) throw std::invalid_argument("poisson_kernel: x not inside the ellipsoid");
    if (std::abs(Sy.norm() - r) > 1e-8 * r)
        throw std::invalid_argument("poisson_kernel: y not on the boundary");
    const double dist = (Sx - Sy).norm();
    const double jac = E.det_S() * r / (E.S() * Sy).norm();  // det(S) r / |S^T S y|
    return kernel_normalization(d) * jac * (r * r - Sx.norm2()) / (r * std::pow(dist, d));
}

double reconstruct(const Ellipsoid& E, const std::vector<BoundaryNode>& nodes,
                   const std::vector<double>& u_boundary, const Vec& x) {
    if (nodes.size() != u_boundary.size())
        throw std::invalid_argument("reconstruct: node/value count mismatch");
    double s = 0;
    for (size_t i = 0; i < nodes.size(); ++i)
        s += nodes[i].weight * poisson_kernel(E, x, nodes[i].y) * u_boundary[i];
    return s;
}

double reconstruct(const Ellipsoid& E, int count, const std::function<double(const Vec&)>& u,
                   const Vec& x) {
    const auto nodes = boundary_nodes(E, count);
    std::vector<double> ub(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) ub[i] = u(nodes[i].y);
    return reconstruct(E, nodes, ub, x);
}

std::vector<double> chebyshev_nodes(int m) {
    if (m < 1) throw std::invalid_argument("chebyshev_nodes: m >= 1");
    std::vector<double> t(static_cast<size_t>(m));
    for (int i = 1; i <= m; ++i)
        t[size_t(i - 1)] = std::cos((2.0 * i - 1.0) * kPi / (2.0 * m));
    return t;
}

InterpolationPlan lagrange_coeffs(int m, double r1, double r2) {
    if (!(0 < r1 && r1 < r2)) throw std::invalid_argument("lagrange_coeffs: need 0 < r1 < r2");
    InterpolationPlan plan;
    plan.m = m;
    plan.r1 = r1;
    plan.r2 = r2;
    plan.nodes = chebyshev_nodes(m);
    plan.coeffs.resize(static_cast<size_t>(m));
    const double u = r2 / r1;
    for (int j = 0; j < m; ++j) {
        double c = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == j) continue;
            c *= (u - plan.nodes[size_t(i)]) / (plan.nodes[size_t(j)] - plan.nodes[size_t(i)]);
        }
        plan.coeffs[size_t(j)] = c;
    }
    plan.coeff_bound = std::pow(2.0 * u, m) / (2.0 * m);
    plan.sum_bound = 0.5 * std::pow(2.0 * u, m);

    // invariants: per-coefficient bound, and reproduction of constants up to
    // the cancellation roundoff of an alternating sum of size sum(|c_j|)
    double sum = 0, comp = 0, abs_sum = 0;
    for (double c : plan.coeffs) {
        const double t = sum + c;
        comp += (std::abs(sum) >= std::abs(c)) ? (sum - t) + c : (c - t) + sum;
        sum = t;
        abs_sum += std::abs(c);
        if (std::abs(c) > plan.coeff_bound * (1.0 + 1e-9))
            throw std::logic_error("lagrange_coeffs: coefficient bound violated");
    }
    plan.coeff_sum = sum + comp;
    const double allowance = 1e-10 + 16.0 * m * 2.220446049250313e-16 * abs_sum;
    if (std::abs(plan.coeff_sum - 1.0) > allowance)
        throw std::logic_error("lagrange_coeffs: coefficients do not reproduce constants");
    return plan;
}

std::complex<double> node_polynomial(const InterpolationPlan& plan, std::complex<double> z) {
    std::complex<double> p(1.0, 0.0);
    for (double t : plan.nodes) p *= (z - t);
    return p;
}

std::vector<double> node_polynomial_derivatives(const InterpolationPlan& plan) {
    std::vector<double> out(plan.nodes.size());
    for (size_t i = 0; i < plan.nodes.size(); ++i) {
        double p = 1.0;
        for (size_t j = 0; j < plan.nodes.size(); ++j)
            if (j != i) p *= (plan.nodes[i] - plan.nodes[j]);
        out[i] = std::abs(p);
    }
    return out;
}

double interpolation_error_bound(const InterpolationPlan& plan, double R, int d) {
    if (plan.m < 1) throw std::invalid_argument("interpolation_error_bound: empty plan");
    if (!(plan.r2 <= R / 4.0 * (1.0 + 1e-12)))
        throw std::invalid_argument("interpolation_error_bound: need r2 <= R/4");
    return std::pow(2.0 * plan.r2, plan.m) / std::pow(R, plan.m + d - 1);
}

double w_epsilon(const CoefficientField& field, double eps, const Ellipsoid& E,
                 const std::vector<DiscreteField>& psi, const Vec& y) {
    const int d = E.dim();
    if (int(psi.size()) != d) throw std::invalid_argument("w_epsilon: need d correctors");
    const double r = E.radius();
    if (std::abs(E.mapped_radius(y) - r) > 1e-8 * r)
        throw std::invalid_argument("w_epsilon: y not on the boundary");
    const Vec n = E.unit_normal(y);

    const double s = psi[0].mesh->h();
    double dpsi_n = 0;  // dPsi_k/dn n_k summed over k
    for (int k = 0; k < d; ++k) {
        const double f0 = y[k];  // boundary data of Psi_k is exact on dE
        const double f1 = point_value(psi[size_t(k)], y - n * s);
        const double f2 = point_value(psi[size_t(k)], y - n * (2.0 * s));
        dpsi_n += n[k] * (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * s);
    }

    const Mat a_eps = eps > 0 ? field.evaluate(y * (1.0 / eps)) : field.evaluate(y);
    return dpsi_n * a_eps.quad(n) / E.tensor().A.quad(n);
}

double kernel_defect(const DiscreteField& u, const Ellipsoid& E,
                     const std::function<double(const BoundaryNode&)>& w, const Vec& x,
                     int quad_count) {
    if (E.mapped_radius(x) > E.radius() / 2.0 + 1e-12)
        throw std::invalid_argument("kernel_defect: probe needs |Sx| <= R/2");
    const auto nodes = boundary_nodes(E, quad_count);
    double integral = 0;
    for (const BoundaryNode& bn : nodes)
        integral += bn.weight * poisson_kernel(E, x, bn.y) * w(bn) * point_value(u, bn.y);
    return std::abs(point_value(u, x) - integral);
}

}  // namespace homoglab

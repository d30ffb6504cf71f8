#include "homoglab/ellipsoid.hpp"

#include <cmath>
#include <stdexcept>

namespace homoglab {

Ellipsoid::Ellipsoid(const HomogenizedTensor& tensor, double r) : tensor_(tensor), r_(r) {
    if (r <= 0) throw std::invalid_argument("Ellipsoid: radius must be positive");
    S_inv_ = sym_inverse(tensor_.S);
    // cached-factor consistency: |Sx|^2 vs <A^{-1}x, x> on a probe point
    Vec probe(dim());
    for (int i = 0; i < dim(); ++i) probe[i] = 0.3 + 0.1 * i;
    const Mat A_inv = tensor_.S.transposed() * tensor_.S;
    const double q = A_inv.quad(probe), s = (tensor_.S * probe).norm2();
    if (std::abs(q - s) > 1e-12 * (1.0 + probe.norm2()))
        throw std::runtime_error("Ellipsoid: cached S inconsistent with the tensor");
}

std::pair<double, double> Ellipsoid::inclusion_radii(double lambda) const {
    if (lambda <= 0 || lambda > 1) throw std::invalid_argument("inclusion_radii: lambda in (0,1]");
    return {std::sqrt(lambda) * r_, r_ / std::sqrt(lambda)};
}

Vec Ellipsoid::unit_normal(const Vec& y) const {
    const Vec g = S() * (S() * y);  // grad of |Sx|^2 up to the factor 2
    const double n = g.norm();
    if (n == 0) throw std::invalid_argument("unit_normal: point at the centre");
    return g * (1.0 / n);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(size_t(n), 0.0);
    weights.assign(size_t(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - double(j) * p2) / double(j + 1);
            }
            pp = double(n) * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[size_t(i)] = -x;
        nodes[size_t(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[size_t(i)] = w;
        weights[size_t(n - 1 - i)] = w;
    }
}

std::vector<BoundaryNode> boundary_nodes(const Ellipsoid& E, int count) {
    const int d = E.dim();
    if (count < 8) throw std::invalid_argument("boundary_nodes: count >= 8");
    if (d != 2 && d != 3) throw std::invalid_argument("boundary_nodes: d in {2,3}");

    const double r = E.radius();
    const double jac_scale = std::pow(r, d - 1) / det(E.S());  // r^{d-1} det(S^{-1})

    std::vector<BoundaryNode> out;
    if (d == 2) {
        out.reserve(static_cast<size_t>(count));
        const double dw = 2.0 * kPi / double(count);
        for (int i = 0; i < count; ++i) {
            const double th = dw * double(i);
            const Vec omega(std::cos(th), std::sin(th));
            BoundaryNode bn;
            bn.y = E.boundary_point(omega);
            bn.weight = jac_scale * (E.S() * omega).norm() * dw;
            bn.normal = E.unit_normal(bn.y);
            out.push_back(bn);
        }
        return out;
    }

    // d == 3: product rule, ~count nodes total
    const int n_polar = std::max(2, int(std::lround(std::sqrt(double(count) / 2.0))));
    const int n_az = 2 * n_polar;
    std::vector<double> gz, gw;
    gauss_legendre(n_polar, gz, gw);
    const double dphi = 2.0 * kPi / double(n_az);
    out.reserve(size_t(n_polar * n_az));
    for (int iz = 0; iz < n_polar; ++iz) {
        const double z = gz[size_t(iz)];
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int ia = 0; ia < n_az; ++ia) {
            const double phi = dphi * double(ia);
            Vec omega(s * std::cos(phi), s * std::sin(phi), z);
            BoundaryNode bn;
            bn.y = E.boundary_point(omega);
            bn.weight = jac_scale * (E.S() * omega).norm() * gw[size_t(iz)] * dphi;
            bn.normal = E.unit_normal(bn.y);
            out.push_back(bn);
        }
    }
    return out;
}

}  // namespace homoglab

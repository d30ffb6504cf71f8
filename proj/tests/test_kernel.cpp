#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "homoglab/kernel.hpp"
#include "homoglab/sampling.hpp"

using namespace homoglab;

namespace {

HomogenizedTensor diag_tensor(double a, double b) {
    Mat A(2);
    A(0, 0) = a;
    A(1, 1) = b;
    return make_tensor(A, std::min(std::min(a, b), 1.0 / std::max(a, b)));
}

// Chebyshev T_m and U_{m-1} by recurrence (oracle for the node polynomial)
double cheb_t(int m, double x) {
    double t0 = 1.0, t1 = x;
    if (m == 0) return t0;
    for (int k = 2; k <= m; ++k) {
        const double t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}
double cheb_u(int m, double x) {
    double u0 = 1.0, u1 = 2.0 * x;
    if (m == 0) return u0;
    for (int k = 2; k <= m; ++k) {
        const double u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

}  // namespace

TEST_CASE("kernel closed-form values on the disk") {
    Ellipsoid disk(diag_tensor(1.0, 1.0), 1.0);
    CHECK(kernel_normalization(2) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
    CHECK(poisson_kernel(disk, Vec(0.0, 0.0), Vec(1.0, 0.0)) ==
          doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
    CHECK(poisson_kernel(disk, Vec(0.5, 0.0), Vec(1.0, 0.0)) ==
          doctest::Approx(3.0 / (2.0 * kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(poisson_kernel(disk, Vec(1.5, 0.0), Vec(1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(poisson_kernel(disk, Vec(0.0, 0.0), Vec(0.9, 0.0)), std::invalid_argument);
}

TEST_CASE("normalization and reconstruction across tensors") {
    const std::vector<HomogenizedTensor> tensors = {
        diag_tensor(1.0, 1.0), diag_tensor(4.0, 1.0), diag_tensor(std::sqrt(3.0), 2.0),
        homogenized_tensor(CoefficientField::trigonometric(0.5), 32)};
    for (const auto& T : tensors) {
        for (double r : {0.5, 1.0}) {
            Ellipsoid E(T, r);
            const double unity =
                reconstruct(E, 2048, [](const Vec&) { return 1.0; }, Vec(0.05, -0.1));
            CHECK(unity == doctest::Approx(1.0).epsilon(1e-8));
            const double c5 = reconstruct(E, 2048, [](const Vec&) { return 5.0; },
                                          Vec(0.1 * r, 0.2 * r));
            CHECK(c5 == doctest::Approx(5.0).epsilon(1e-6));
            // linear functions are harmonic for any constant tensor
            const double lin = reconstruct(E, 2048, [](const Vec& y) { return y[0]; },
                                           Vec(0.3 * r, 0.1 * r));
            CHECK(lin == doctest::Approx(0.3 * r).epsilon(1e-6));
        }
    }

    // harmonic quadratic on the unit disk
    Ellipsoid disk(diag_tensor(1.0, 1.0), 1.0);
    const double quad = reconstruct(
        disk, 2048, [](const Vec& y) { return y[0] * y[0] - y[1] * y[1]; }, Vec(0.2, 0.4));
    CHECK(quad == doctest::Approx(-0.12).epsilon(1e-6));

    // A-harmonic quadratic q(Sx) for an anisotropic tensor
    const auto T = diag_tensor(4.0, 1.0);
    Ellipsoid E(T, 1.0);
    auto aharm = [&](const Vec& x) {
        const Vec w = T.S * x;
        return w[0] * w[0] - w[1] * w[1];
    };
    const Vec x0(0.4, 0.3);
    CHECK(reconstruct(E, 2048, aharm, x0) == doctest::Approx(aharm(x0)).epsilon(1e-6));
}

TEST_CASE("chebyshev nodes") {
    auto t1 = chebyshev_nodes(1);
    REQUIRE(t1.size() == 1);
    CHECK(std::abs(t1[0]) < 1e-16);
    auto t2 = chebyshev_nodes(2);
    CHECK(t2[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(t2[1] == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-15));
    auto t3 = chebyshev_nodes(3);
    CHECK(t3[0] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
    CHECK(std::abs(t3[1]) < 1e-16);
    CHECK(t3[2] == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(chebyshev_nodes(0), std::invalid_argument);
}

TEST_CASE("lagrange coefficients") {
    auto p1 = lagrange_coeffs(1, 0.1, 0.2);
    REQUIRE(p1.coeffs.size() == 1);
    CHECK(p1.coeffs[0] == 1.0);  // empty product

    auto p2 = lagrange_coeffs(2, 0.1, 0.2);
    CHECK(p2.coeffs[0] == doctest::Approx(std::sqrt(2.0) + 0.5).epsilon(1e-12));
    CHECK(p2.coeffs[1] == doctest::Approx(0.5 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(p2.coeff_sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p2.coeff_bound == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("coefficient and node-polynomial bounds hold over the full sweep") {
    for (int m = 1; m <= 30; ++m) {
        for (double ratio : {1.5, 2.0, 3.0, 5.0, 10.0}) {
            const double r1 = 0.05, r2 = r1 * ratio;
            const auto plan = lagrange_coeffs(m, r1, r2);

            // per-coefficient and sum bounds
            double sum_abs = 0;
            for (double c : plan.coeffs) {
                REQUIRE(std::abs(c) <= plan.coeff_bound * (1.0 + 1e-9));
                sum_abs += std::abs(c);
            }
            REQUIRE(sum_abs <= plan.sum_bound * (1.0 + 1e-9));

            // derivative lower bound m 2^{1-m}
            const auto dphi = node_polynomial_derivatives(plan);
            const double dmin = m * std::pow(2.0, 1 - m);
            for (double d : dphi) REQUIRE(d >= dmin * (1.0 - 1e-9));

            // |Phi_m(r2/r1)| <= (r2/r1)^m
            const double phi_u = std::abs(node_polynomial(plan, {ratio, 0.0}));
            REQUIRE(phi_u <= std::pow(ratio, m) * (1.0 + 1e-9));

            // |Phi_m(z)| >= (R/(2 r1) - 1)^m on the circle |z| = R/(2 r1)
            const double R = 4.0 * r2 * 1.25;
            const double rad = R / (2.0 * r1);
            const double lower = std::pow(rad - 1.0, m);
            for (int k = 0; k < 32; ++k) {
                const double th = 2.0 * kPi * k / 32.0;
                const std::complex<double> z(rad * std::cos(th), rad * std::sin(th));
                REQUIRE(std::abs(node_polynomial(plan, z)) >= lower * (1.0 - 1e-9));
            }
        }
    }
}

TEST_CASE("node polynomial matches the chebyshev closed form") {
    Rng rng(29);
    for (int m : {1, 2, 3, 5, 8, 13, 20}) {
        const auto plan = lagrange_coeffs(m, 0.1, 0.25);
        for (int k = 0; k < 50; ++k) {
            const double t = rng.uniform(-1.0, 1.0);
            // Phi_m = 2^{1-m} T_m
            const double phi = node_polynomial(plan, {t, 0.0}).real();
            const double tm = std::pow(2.0, 1 - m) * cheb_t(m, t);
            REQUIRE(phi == doctest::Approx(tm).epsilon(1e-9));
            // Phi'_m = m 2^{1-m} U_{m-1}, derivative via the product rule
            double dphi = 0;
            for (int i = 0; i < m; ++i) {
                double p = 1.0;
                for (int j = 0; j < m; ++j)
                    if (j != i) p *= (t - plan.nodes[size_t(j)]);
                dphi += p;
            }
            const double um = m * std::pow(2.0, 1 - m) * cheb_u(m - 1, t);
            REQUIRE(dphi == doctest::Approx(um).epsilon(1e-8));
        }
    }
}

TEST_CASE("interpolation error bound formula") {
    auto p1 = lagrange_coeffs(1, 0.05, 0.1);
    CHECK(interpolation_error_bound(p1, 0.8, 2) ==
          doctest::Approx(2.0 * 0.1 / 0.64).epsilon(1e-14));
    // geometric decrease at ratio 2 r2 / R per extra node
    for (int m = 1; m <= 6; ++m) {
        auto pa = lagrange_coeffs(m, 0.05, 0.1);
        auto pb = lagrange_coeffs(m + 1, 0.05, 0.1);
        const double ratio =
            interpolation_error_bound(pb, 0.8, 2) / interpolation_error_bound(pa, 0.8, 2);
        CHECK(ratio == doctest::Approx(2.0 * 0.1 / 0.8).epsilon(1e-12));
    }
    // r2 = R/4 sits exactly at the admissible edge: ratio 1/2
    auto pe = lagrange_coeffs(3, 0.05, 0.2);
    auto pf = lagrange_coeffs(4, 0.05, 0.2);
    CHECK(interpolation_error_bound(pf, 0.8, 2) / interpolation_error_bound(pe, 0.8, 2) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(interpolation_error_bound(lagrange_coeffs(2, 0.1, 0.3), 0.8, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(lagrange_coeffs(0, 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("lagrange exactness on low-degree polynomials") {
    for (int m : {2, 4, 6, 8}) {
        for (double ratio : {1.5, 3.0}) {
            const auto plan = lagrange_coeffs(m, 0.1, 0.1 * ratio);
            for (int q = 0; q < m; ++q) {
                double s = 0;
                for (int j = 0; j < m; ++j)
                    s += plan.coeffs[size_t(j)] * std::pow(plan.nodes[size_t(j)], q);
                const double expect = std::pow(ratio, q);
                REQUIRE(std::abs(s - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
            }
        }
    }
}

TEST_CASE("interpolated kernel error tracks the remainder bound") {
    Ellipsoid E(diag_tensor(1.0, 1.0), 0.8);
    const double r1 = 0.1, r2 = 0.2, R = 0.8;
    const Vec x0 = Vec(std::cos(0.7), std::sin(0.7)) * r2;
    const auto nodes = boundary_nodes(E, 512);

    double K_fit = 0;
    std::vector<double> errs;
    for (int m = 1; m <= 8; ++m) {
        const auto plan = lagrange_coeffs(m, r1, r2);
        double err = 0;
        for (const auto& bn : nodes) {
            double interp = 0;
            for (int i = 0; i < m; ++i) {
                const Vec xi = x0 * (plan.nodes[size_t(i)] * r1 / r2);
                interp += plan.coeffs[size_t(i)] * poisson_kernel(E, xi, bn.y);
            }
            err = std::max(err, std::abs(poisson_kernel(E, x0, bn.y) - interp));
        }
        errs.push_back(err);
        K_fit = std::max(K_fit, err / interpolation_error_bound(plan, R, 2));
    }
    CHECK(K_fit > 0);
    CHECK(K_fit < 1e3);
    // the actual error decays geometrically like the bound does
    for (size_t i = 0; i + 1 < errs.size(); ++i)
        if (errs[i] > 1e-12) CHECK(errs[i + 1] <= 0.8 * errs[i]);
    for (size_t i = 0; i < errs.size(); ++i) {
        const auto plan = lagrange_coeffs(int(i) + 1, r1, r2);
        CHECK(errs[i] <= K_fit * interpolation_error_bound(plan, R, 2) * (1.0 + 1e-12));
    }
}

TEST_CASE("kernel defect floors on constant fields") {
    // constant anisotropic field, linear data: u is exactly A-harmonic
    Mat A(2);
    A(0, 0) = 2.0;
    A(1, 1) = 1.0;
    auto field = CoefficientField::constant_matrix(A);
    auto T = make_tensor(A, field.lambda());
    Ellipsoid E(T, 0.6);
    auto u = solve_dirichlet(field, 0.0, Domain::disk(1.0), BoundaryData::coordinate(0),
                             1.0 / 64);
    auto psi = dirichlet_corrector(field, 0.0, E, 1.0 / 64);
    auto w = [&](const BoundaryNode& bn) { return w_epsilon(field, 0.0, E, psi, bn.y); };
    const Vec probes[] = {Vec(0.0, 0.0), E.S_inv() * Vec(0.25, 0.1)};
    for (const Vec& x : probes) CHECK(kernel_defect(u, E, w, x, 1024) < 1e-6);
    CHECK_THROWS_AS(kernel_defect(u, E, w, Vec(0.55, 0.0), 1024), std::invalid_argument);
}

TEST_CASE("w_eps stays bounded and stable under eps-halving") {
    auto field = CoefficientField::laminate(2.0, 1.0);
    auto T = homogenized_tensor(field, 64);
    Ellipsoid E(T, 0.5);
    double prev = 0;
    int step = 0;
    for (double eps : {1.0 / 16, 1.0 / 32}) {
        auto psi = dirichlet_corrector(field, eps, E, eps / 8.0);
        double wmax = 0;
        for (const auto& bn : boundary_nodes(E, 128))
            wmax = std::max(wmax, std::abs(w_epsilon(field, eps, E, psi, bn.y)));
        CHECK(wmax > 0.1);
        CHECK(wmax < 10.0);
        if (step++ > 0) {
            CHECK(wmax <= 2.0 * prev);
            CHECK(prev <= 2.0 * wmax);
        }
        prev = wmax;
    }
}

TEST_CASE("w_eps respects the rescaling identity") {
    // w on E_r at eps equals w on E_1 at eps/r at corresponding points
    auto field = CoefficientField::laminate(2.0, 1.0);
    auto T = make_tensor(Mat::identity(2), 1.0);
    const double r = 0.5, eps = 1.0 / 16;
    Ellipsoid Er(T, r), E1(T, 1.0);
    auto psi_r = dirichlet_corrector(field, eps, Er, eps / 8.0);
    auto psi_1 = dirichlet_corrector(field, eps / r, E1, (eps / r) / 8.0);
    for (int q = 0; q < 32; ++q) {
        const double th = 2.0 * kPi * q / 32.0;
        const Vec omega(std::cos(th), std::sin(th));
        const double wr = w_epsilon(field, eps, Er, psi_r, Er.boundary_point(omega));
        const double w1 = w_epsilon(field, eps / r, E1, psi_1, E1.boundary_point(omega));
        REQUIRE(wr == doctest::Approx(w1).epsilon(1e-7));
    }
}

TEST_CASE("w_eps is unity for constant coefficients") {
    Mat A(2);
    A(0, 0) = 1.3;
    A(0, 1) = A(1, 0) = 0.2;
    A(1, 1) = 0.9;
    auto field = CoefficientField::constant_matrix(A);
    auto T = make_tensor(A, field.lambda());
    Ellipsoid E(T, 0.7);
    auto psi = dirichlet_corrector(field, 0.0, E, 1.0 / 64);
    for (const auto& bn : boundary_nodes(E, 128))
        REQUIRE(w_epsilon(field, 0.0, E, psi, bn.y) == doctest::Approx(1.0).epsilon(1e-8));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homoglab/pde.hpp"
#include "homoglab/sampling.hpp"

using namespace homoglab;

namespace {

CoefficientField identity_field() { return CoefficientField::constant_diag({1.0, 1.0}); }

double exact_re_z3(const Vec& x) { return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1]; }

double sup_error_re_z3(const DiscreteField& u) {
    double err = 0;
    for (int64_t i = 0; i < u.nodes(); ++i)
        err = std::max(err, std::abs(u.values[size_t(i)] - exact_re_z3(u.mesh->node(i))));
    return err;
}

}  // namespace

TEST_CASE("manufactured harmonic cubic converges at second order") {
    auto f = identity_field();
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto u = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::harmonic_re(3), h);
        errs.push_back(sup_error_re_z3(u));
        CHECK(std::abs(u.values[0]) <= 10.0 * h * h);  // value at the centre
        CHECK(residual(u) <= 1e-9);
    }
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    CHECK(p1 > 1.7);
    CHECK(p1 < 2.3);
    CHECK(p2 > 1.7);
    CHECK(p2 < 2.3);
}

TEST_CASE("linear data is exact for constant coefficients") {
    auto f = CoefficientField::constant_diag({2.0, 1.0});
    auto u = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::coordinate(0), 1.0 / 32);
    for (int64_t i = 0; i < u.nodes(); ++i)
        REQUIRE(std::abs(u.values[size_t(i)] - u.mesh->node(i)[0]) < 1e-9);
}

TEST_CASE("oscillating solve approaches the homogenized solve") {
    auto f = CoefficientField::laminate(2.0, 1.0);
    auto T = homogenized_tensor(f, 64);
    auto g = BoundaryData::harmonic_re(3);
    auto homog_field = CoefficientField::constant_matrix(T.A);
    double prev = 0;
    int step = 0;
    for (double eps : {1.0 / 8, 1.0 / 16}) {
        const double h = eps / 8.0;
        auto ue = solve_dirichlet(f, eps, Domain::disk(1.0), g, h);
        auto u0 = solve_dirichlet(homog_field, 0.0, Domain::disk(1.0), g, h);
        double diff = 0;
        for (int64_t i = 0; i < ue.nodes(); ++i)
            diff = std::max(diff, std::abs(ue.values[size_t(i)] - u0.values[size_t(i)]));
        if (step++ > 0) CHECK(diff < prev);  // convergence trend, no rate asserted
        prev = diff;
    }
}

TEST_CASE("maximum principle surrogate") {
    auto f = CoefficientField::laminate(2.0, 1.0);
    const double h = 1.0 / 128, eps = 1.0 / 8;
    auto u = solve_dirichlet(f, eps, Domain::disk(1.0), BoundaryData::harmonic_re(2), h);
    double bdry = 0, interior = 0;
    for (int64_t i = 0; i < u.nodes(); ++i) {
        if (u.mesh->on_curved_boundary(i)) bdry = std::max(bdry, std::abs(u.values[size_t(i)]));
        else interior = std::max(interior, std::abs(u.values[size_t(i)]));
    }
    CHECK(interior <= bdry + 10.0 * h * h);
}

TEST_CASE("mesh rule enforcement") {
    auto f = CoefficientField::laminate(2.0, 1.0);
    CHECK_THROWS_AS(
        solve_dirichlet(f, 1.0 / 16, Domain::disk(1.0), BoundaryData::harmonic_re(1), 1.0 / 64),
        std::invalid_argument);
    // constant fields carry no oscillation: any h is fine
    CHECK_NOTHROW(solve_dirichlet(identity_field(), 1.0 / 16, Domain::disk(1.0),
                                  BoundaryData::harmonic_re(1), 1.0 / 16));
}

TEST_CASE("half-disk parity against the full-disk solve") {
    // constant block field; odd data for Dirichlet, even data for Neumann
    auto f = CoefficientField::constant_diag({1.0, 1.0});
    const double h = 1.0 / 48;

    auto ud = solve_half(f, 0.0, 1.0, FlatBC::Dirichlet, BoundaryData::harmonic_im(3), h);
    auto refl_d = reflect_solution(ud, Parity::Odd);
    CHECK(residual(refl_d) <= 10.0 * h * h);
    auto full_d = solve_dirichlet(reflect_even(f), 0.0, Domain::disk(1.0),
                                  BoundaryData::extended(BoundaryData::harmonic_im(3), true), h);
    double diff = 0;
    for (int64_t i = 0; i < refl_d.nodes(); ++i)
        diff = std::max(diff, std::abs(refl_d.values[size_t(i)] - full_d.values[size_t(i)]));
    CHECK(diff <= 10.0 * h * h);

    auto un = solve_half(f, 0.0, 1.0, FlatBC::Neumann, BoundaryData::harmonic_re(3), h);
    auto refl_n = reflect_solution(un, Parity::Even);
    CHECK(residual(refl_n) <= 10.0 * h * h);

    // Im(z^3) is odd in x2: the exact solution of the Dirichlet half problem
    double err = 0;
    for (int64_t i = 0; i < ud.nodes(); ++i) {
        const Vec x = ud.mesh->node(i);
        err = std::max(err, std::abs(ud.values[size_t(i)] -
                                     (3.0 * x[0] * x[0] * x[1] - x[1] * x[1] * x[1])));
    }
    CHECK(err <= 10.0 * h * h);
}

TEST_CASE("oscillating block field reflection equivalence") {
    auto f = CoefficientField::block(0.5);
    const double eps = 1.0 / 8, h = eps / 8.0;
    auto uh = solve_half(f, eps, 1.0, FlatBC::Dirichlet, BoundaryData::harmonic_im(2), h);
    auto refl = reflect_solution(uh, Parity::Odd);
    CHECK(residual(refl) <= 10.0 * h * h);
    auto full = solve_dirichlet(reflect_even(f), eps, Domain::disk(1.0),
                                BoundaryData::extended(BoundaryData::harmonic_im(2), true), h);
    const PolarMesh& hm = *uh.mesh;
    const PolarMesh& fm = *full.mesh;
    double diff = std::abs(uh.values[0] - full.values[0]);
    for (int j = 1; j <= hm.rings(); ++j)
        for (int k = 0; k < hm.nodes_per_ring(); ++k)
            diff = std::max(diff, std::abs(uh.values[size_t(hm.node_index(j, k))] -
                                           full.values[size_t(fm.node_index(j, k))]));
    CHECK(diff <= 10.0 * h * h);
}

TEST_CASE("mirror symmetry of full-disk solves") {
    // odd data gives an odd discrete solution, even data an even one
    auto f = CoefficientField::block(0.5);
    const double eps = 1.0 / 8, h = eps / 8.0;
    auto uo = solve_dirichlet(f, eps, Domain::disk(1.0), BoundaryData::harmonic_im(3), h);
    auto ue = solve_dirichlet(f, eps, Domain::disk(1.0), BoundaryData::harmonic_re(3), h);
    double odd_err = 0, even_err = 0;
    for (int64_t i = 0; i < uo.nodes(); ++i) {
        const int64_t m = uo.mesh->mirror_node(i);
        odd_err = std::max(odd_err, std::abs(uo.values[size_t(i)] + uo.values[size_t(m)]));
        even_err = std::max(even_err, std::abs(ue.values[size_t(i)] - ue.values[size_t(m)]));
    }
    CHECK(odd_err < 1e-8);
    CHECK(even_err < 1e-8);
}

TEST_CASE("odd reflection requires a vanishing flat trace") {
    auto f = identity_field();
    auto u = solve_half(f, 0.0, 1.0, FlatBC::Neumann, BoundaryData::harmonic_re(2), 1.0 / 32);
    CHECK_THROWS_AS(reflect_solution(u, Parity::Odd), std::invalid_argument);
    CHECK_NOTHROW(reflect_solution(u, Parity::Even));
}

TEST_CASE("solve_half rejects fields without the block structure") {
    auto nonblock = CoefficientField::expression(2, {"1.2", "0.1", "1.0"}, 0.5, 0.0, 1.0, false);
    CHECK_THROWS_AS(
        solve_half(nonblock, 0.0, 1.0, FlatBC::Dirichlet, BoundaryData::harmonic_im(1), 1.0 / 16),
        std::invalid_argument);
}

TEST_CASE("eigen-type solve") {
    auto f = identity_field();
    const double h = 1.0 / 48;
    // lambda -> 0 limit agrees with the dirichlet solve
    auto u0 = solve_eigen_type(f, 0.0, 0.0, BoundaryData::harmonic_re(2), Domain::disk(1.0), h);
    auto ud = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::harmonic_re(2), h);
    double diff = 0;
    for (int64_t i = 0; i < u0.nodes(); ++i)
        diff = std::max(diff, std::abs(u0.values[size_t(i)] - ud.values[size_t(i)]));
    CHECK(diff < 1e-8);

    // zero boundary data below the first Dirichlet eigenvalue (~5.783)
    auto uz = solve_eigen_type(f, 0.0, 2.0, BoundaryData::constant(0.0), Domain::disk(1.0), h);
    for (double v : uz.values) REQUIRE(v == 0.0);

    // nonzero data solves the Helmholtz-type equation: residual is small
    auto ue = solve_eigen_type(f, 0.0, 4.0, BoundaryData::harmonic_re(2), Domain::disk(1.0), h);
    CHECK(residual(ue) <= 1e-8);
    CHECK_THROWS_AS(
        solve_eigen_type(f, 0.0, -1.0, BoundaryData::constant(0.0), Domain::disk(1.0), h),
        std::invalid_argument);
}

TEST_CASE("eigen solve near a discrete eigenvalue fails loudly") {
    auto f = identity_field();
    const double h = 1.0 / 24;
    auto mesh = PolarMesh::build(Domain::disk(1.0), h);
    const Csr K = assemble_stiffness(*mesh, f, 0.0);
    const Csr M = assemble_mass(*mesh);
    std::vector<uint8_t> mask(size_t(mesh->node_count()), 0);
    for (int64_t i = 0; i < mesh->node_count(); ++i)
        if (mesh->on_curved_boundary(i)) mask[size_t(i)] = 1;

    // smallest Dirichlet eigenvalue by inverse power iteration (test oracle)
    const IncompleteCholesky prec(K, mask);
    std::vector<double> v(size_t(mesh->node_count()), 0.0), mv(v.size()), x;
    Rng rng(3);
    for (auto& e : v) e = rng.next_double();
    for (int64_t i = 0; i < mesh->node_count(); ++i)
        if (mask[size_t(i)]) v[size_t(i)] = 0;
    double lam = 0;
    for (int it = 0; it < 60; ++it) {
        M.apply_pinned(mask, v, mv);
        for (int64_t i = 0; i < mesh->node_count(); ++i)
            if (mask[size_t(i)]) mv[size_t(i)] = 0;
        cg_solve(K, mask, mv, x, 1e-12, 20000, &prec);
        double kx = 0, mx = 0;
        M.apply_pinned(mask, x, mv);
        for (size_t i = 0; i < x.size(); ++i) {
            mx += x[i] * mv[i];
        }
        std::vector<double> kxv(x.size());
        K.apply_pinned(mask, x, kxv);
        for (size_t i = 0; i < x.size(); ++i) kx += x[i] * kxv[i];
        lam = kx / mx;
        const double nrm = std::sqrt(mx);
        for (size_t i = 0; i < x.size(); ++i) v[i] = x[i] / nrm;
    }
    CHECK(lam == doctest::Approx(5.783).epsilon(0.05));  // j_{0,1}^2 up to O(h^2)

    // constant data excites the (radial) singular mode
    CHECK_THROWS_AS(solve_eigen_type(f, 0.0, lam, BoundaryData::constant(1.0),
                                     Domain::disk(1.0), h),
                    std::runtime_error);
}

TEST_CASE("dirichlet corrector") {
    // constant field: Psi_k = x_k exactly
    Mat A(2);
    A(0, 0) = 1.5;
    A(1, 1) = 0.8;
    auto f = CoefficientField::constant_matrix(A);
    Ellipsoid E(make_tensor(A, f.lambda()), 0.8);
    auto psi = dirichlet_corrector(f, 0.0, E, 1.0 / 32);
    REQUIRE(psi.size() == 2);
    for (int k = 0; k < 2; ++k)
        for (int64_t i = 0; i < psi[size_t(k)].nodes(); ++i)
            REQUIRE(std::abs(psi[size_t(k)].values[size_t(i)] -
                             psi[size_t(k)].mesh->node(i)[k]) < 1e-9);
    CHECK(max_gradient(psi[0]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dirichlet corrector rescaling identity") {
    // Psi on E_r at eps equals r * Psi on E_1 at eps/r, node for node
    auto f = CoefficientField::laminate(2.0, 1.0);
    const double r = 0.5, eps = 1.0 / 8;
    Ellipsoid Er(make_tensor(Mat::identity(2), 1.0), r);
    Ellipsoid E1(make_tensor(Mat::identity(2), 1.0), 1.0);
    auto psi_r = dirichlet_corrector(f, eps, Er, eps / 8.0);
    auto psi_1 = dirichlet_corrector(f, eps / r, E1, (eps / r) / 8.0);
    REQUIRE(psi_r[0].nodes() == psi_1[0].nodes());
    for (int k = 0; k < 2; ++k)
        for (int64_t i = 0; i < psi_r[size_t(k)].nodes(); ++i) {
            const double lhs = psi_r[size_t(k)].values[size_t(i)];
            const double rhs = r * psi_1[size_t(k)].values[size_t(i)];
            REQUIRE(std::abs(lhs - rhs) < 1e-8);
        }
}

TEST_CASE("gradient of the oscillating corrector stays bounded") {
    auto f = CoefficientField::laminate(2.0, 1.0);
    Ellipsoid E(make_tensor(Mat::identity(2), 1.0), 0.8);
    const double g16 = max_gradient(dirichlet_corrector(f, 1.0 / 16, E, 1.0 / 128)[0]);
    const double g32 = max_gradient(dirichlet_corrector(f, 1.0 / 32, E, 1.0 / 256)[0]);
    CHECK(g16 < 10.0);
    CHECK(g32 < 10.0);
    CHECK(g32 <= 2.0 * g16);
    CHECK(g16 <= 2.0 * g32);
}

TEST_CASE("sup norm") {
    auto f = identity_field();
    const double h = 1.0 / 64;
    auto u = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::coordinate(0), h);
    int64_t count = 0;
    const double s = sup_norm(u, Region::ball(Vec(0.0, 0.0), 0.5), &count);
    CHECK(s <= 0.5);
    CHECK(s >= 0.5 - 2.0 * h);
    CHECK(count > 0);

    auto uc = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::constant(3.5), h);
    CHECK(sup_norm(uc, Region::ball(Vec(0.1, 0.2), 0.3)) == doctest::Approx(3.5).epsilon(1e-10));

    // nested regions are monotone
    const double s1 = sup_norm(u, Region::ball(Vec(0.0, 0.0), 0.3));
    const double s2 = sup_norm(u, Region::ball(Vec(0.0, 0.0), 0.6));
    CHECK(s1 <= s2);

    CHECK_THROWS_AS(sup_norm(u, Region::ball(Vec(5.0, 5.0), 0.1)), std::invalid_argument);
}

TEST_CASE("residual detects corruption") {
    auto f = identity_field();
    auto u = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::harmonic_re(3), 1.0 / 32);
    CHECK(residual(u) <= 1e-9);
    DiscreteField bad = u;
    bad.values[size_t(bad.nodes() / 2)] += 1.0;
    CHECK(residual(bad) > 1e-3);
}

TEST_CASE("eigen lift") {
    auto f = identity_field();
    const double h = 1.0 / 48;
    auto u = solve_eigen_type(f, 0.0, 1.0, BoundaryData::harmonic_re(2), Domain::disk(1.0), h);

    // lambda = 0: constant in t
    auto u0 = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::harmonic_re(2), h);
    auto v0 = lift_eigen(u0, 0.0, 0.5, h);
    for (int l = 0; l < v0.tgrid->nt; ++l)
        for (int64_t i = 0; i < v0.nodes(); ++i)
            REQUIRE(v0.value_at(i, l) == u0.values[size_t(i)]);

    // v(x, 0) = u(x) exactly
    auto v = lift_eigen(u, 1.0, 0.5, h);
    const int mid = (v.tgrid->nt - 1) / 2;
    CHECK(v.tgrid->t[size_t(mid)] == 0.0);
    for (int64_t i = 0; i < v.nodes(); ++i) REQUIRE(v.value_at(i, mid) == u.values[size_t(i)]);

    // lifted residual within the consistency budget
    for (double lam : {1.0, 4.0}) {
        auto ue = solve_eigen_type(f, 0.0, lam, BoundaryData::harmonic_re(2), Domain::disk(1.0), h);
        auto ve = lift_eigen(ue, lam, 0.5, h);
        CHECK(residual(ve) <= 10.0 * (h * h + ve.tgrid->h_t * ve.tgrid->h_t));
    }

    // sup over the embedded cylinder ball dominates the base sup
    const double sb = sup_norm(u, Region::ball(Vec(0.0, 0.0), 0.4));
    const double sv = sup_norm(v, Region::ball(Vec(0.0, 0.0), 0.4));
    CHECK(sv >= sb * (1 - 1e-12));
}

TEST_CASE("point evaluation") {
    auto f = identity_field();
    const double h = 1.0 / 64;
    auto u = solve_dirichlet(f, 0.0, Domain::disk(1.0), BoundaryData::harmonic_re(3), h);
    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        const double r = rng.uniform(0.0, 0.95), th = rng.uniform(0.0, 2.0 * kPi);
        const Vec x(r * std::cos(th), r * std::sin(th));
        REQUIRE(std::abs(point_value(u, x) - exact_re_z3(x)) < 20.0 * h * h);
    }
    CHECK_THROWS_AS(point_value(u, Vec(1.2, 0.0)), std::invalid_argument);
}

#include "homoglab/audit.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace homoglab {

double eps_factor(double eps) {
    if (eps <= 0) return 0.0;
    return eps * std::log(1.0 / eps + 2.0);
}

BallTriple BallTriple::ellipsoid_triple(double r1, double r2, double R, double lambda) {
    // closure of the hypothesis: the canonical triple sits on r2 = R/4
    if (!(0 < r1 && r1 < r2 && r2 <= R / 4.0 * (1.0 + 1e-12) && R <= 4.0 * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "ellipsoid triple needs 0 < r1 < r2 <= R/4 <= 1, got (" << r1 << ", " << r2 << ", "
           << R << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(lambda > 0 && lambda <= 1))
        throw std::invalid_argument("ellipsoid triple: lambda in (0,1]");
    BallTriple t;
    t.kind = Kind::Ellipsoid;
    t.a = r1;
    t.b = r2;
    t.c = R;
    t.lambda = lambda;
    return t;
}

BallTriple BallTriple::ball_triple(double R1, double R2, double R3, double lambda,
                                   const Vec& center) {
    if (!(lambda > 0 && lambda <= 1)) throw std::invalid_argument("ball triple: lambda in (0,1]");
    if (!(0 < R1 && R1 < R2 && R2 <= lambda * R3 / 4.0 * (1.0 + 1e-12) &&
          R3 <= 1.0 + 1e-12)) {
        std::ostringstream os;
        os << "ball triple needs 0 < R1 < R2 <= lambda R3/4 <= lambda/4, got (" << R1 << ", "
           << R2 << ", " << R3 << ") with lambda = " << lambda;
        throw std::invalid_argument(os.str());
    }
    BallTriple t;
    t.kind = Kind::Ball;
    t.a = R1;
    t.b = R2;
    t.c = R3;
    t.lambda = lambda;
    t.center = center;
    return t;
}

void BallTriple::ellipsoid_radii(double& r1, double& r2, double& R) const {
    if (kind == Kind::Ellipsoid) {
        r1 = a;
        r2 = b;
        R = c;
    } else {
        const double rt = std::sqrt(lambda);
        r1 = rt * a;      // R1 = r1 / sqrt(lambda)
        r2 = b / rt;      // R2 = sqrt(lambda) r2
        R = rt * c;       // R3 = R / sqrt(lambda)
    }
}

double exponent_alpha(double r1, double r2, double R) {
    if (!(0 < r1 && r1 < r2 && r2 <= R / 4.0 * (1.0 + 1e-12)))
        throw std::invalid_argument("exponent_alpha: need 0 < r1 < r2 <= R/4");
    return std::log(R / (2.0 * r2)) / std::log(R / r1);
}

BetaResult exponent_beta(double R1, double R2, double R3, double lambda) {
    if (!(0 < R1 && R1 < R2 && R2 < R3))
        throw std::invalid_argument("exponent_beta: need 0 < R1 < R2 < R3");
    if (!(lambda > 0 && lambda <= 1)) throw std::invalid_argument("exponent_beta: lambda in (0,1]");
    BetaResult res;
    if (R2 >= lambda * R3 / 2.0) {
        std::ostringstream os;
        os << "beta = ln(lambda R3/(2 R2))/ln(R3/R1) <= 0 for R2 >= lambda R3/2 (R2 = " << R2
           << ", lambda R3/2 = " << lambda * R3 / 2.0
           << "); the inequality only holds trivially through the eps term";
        res.rejection = os.str();
        return res;
    }
    res.valid = true;
    res.beta = std::log(lambda * R3 / (2.0 * R2)) / std::log(R3 / R1);
    return res;
}

MSelection select_m(double delta, double M, double r1, double r2, double R, double eps) {
    if (delta < 0 || M < 0 || delta > M)
        throw std::invalid_argument("select_m: need 0 <= delta <= M");
    if (!(0 < r1 && r1 < r2 && r2 < R)) throw std::invalid_argument("select_m: bad radii");
    MSelection sel;
    const double ef = eps_factor(eps);
    if (ef > 0) {
        sel.m1_defined = true;
        sel.m1 = long(std::floor(std::log(ef) / std::log(r1 / R))) + 1;
    }
    if (M == 0) return sel;  // degenerate: zero solution
    if (delta > 0) {
        sel.m0_defined = true;
        sel.m0 = long(std::floor(std::log(M / delta) / std::log(R / r1))) + 1;
        // case 1 iff the eps term at m0 is dominated by the middle term,
        // compared in logs so large m0 cannot overflow
        const double l_eps = ef > 0 ? std::log(ef) : -std::numeric_limits<double>::infinity();
        const double log_lhs = l_eps + double(sel.m0) * std::log(2.0 * r2 / r1);
        const double log_rhs = double(sel.m0) * std::log(2.0 * r2 / R);
        sel.case_id = (log_lhs <= log_rhs) ? 1 : 2;
    } else {
        // delta = 0: m0 undefined, fall back to the case-2 path with m1
        sel.case_id = 2;
    }
    return sel;
}

AuditReport three_ball_audit(const DiscreteField& u, const BallTriple& triple,
                             const HomogenizedTensor& T, double eps) {
    AuditReport rep;
    rep.kind = triple.kind == BallTriple::Kind::Ellipsoid ? "ellipsoid" : "ball";
    rep.radius_a = triple.a;
    rep.radius_b = triple.b;
    rep.radius_c = triple.c;
    rep.lambda = triple.lambda;
    rep.center = triple.center;
    rep.eps = eps;
    rep.eps_term = eps_factor(eps);
    rep.field_desc = u.meta.field_desc;
    rep.boundary_desc = u.meta.boundary_desc;

    // the outer region must stay inside the solved domain, otherwise the
    // node sup silently under-reports
    {
        const double domain_radius = u.mesh->domain().radius;
        const double reach = triple.kind == BallTriple::Kind::Ellipsoid
                                 ? std::sqrt(std::max(T.eig_max, 0.0)) * triple.c
                                 : triple.center.norm() + triple.c;
        if (u.mesh->domain().kind != DomainKind::EllipsoidDomain &&
            reach > domain_radius + 1e-12) {
            std::ostringstream os;
            os << "three_ball_audit: outer region reaches " << reach
               << " but the solution domain has radius " << domain_radius;
            throw std::invalid_argument(os.str());
        }
    }
    Region inner = Region::ball(triple.center, triple.a);
    Region middle = Region::ball(triple.center, triple.b);
    Region outer = Region::ball(triple.center, triple.c);
    if (triple.kind == BallTriple::Kind::Ellipsoid) {
        inner = Region::ellipsoid_region(Ellipsoid(T, triple.a));
        middle = Region::ellipsoid_region(Ellipsoid(T, triple.b));
        outer = Region::ellipsoid_region(Ellipsoid(T, triple.c));
    }
    rep.delta = sup_norm(u, inner, &rep.count_inner);
    rep.mid = sup_norm(u, middle, &rep.count_mid);
    rep.M = sup_norm(u, outer, &rep.count_outer);

    double r1, r2, R;
    triple.ellipsoid_radii(r1, r2, R);
    if (triple.kind == BallTriple::Kind::Ellipsoid) {
        rep.exponent = exponent_alpha(triple.a, triple.b, triple.c);
    } else {
        const BetaResult beta = exponent_beta(triple.a, triple.b, triple.c, triple.lambda);
        if (!beta.valid) throw std::invalid_argument("three_ball_audit: " + beta.rejection);
        rep.exponent = beta.beta;
    }

    rep.selection = select_m(rep.delta, rep.M, r1, r2, R, eps);

    const double geo1 = triple.b / triple.c;
    const double geo2 = (triple.c * triple.c) / (triple.a * triple.a);
    if (rep.M > 0) {
        rep.term1 = rep.delta > 0
                        ? geo1 * std::pow(rep.delta, rep.exponent) *
                              std::pow(rep.M, 1.0 - rep.exponent)
                        : 0.0;
        rep.term2 = geo2 * std::pow(rep.eps_term, rep.exponent) * rep.M;
        const double denom = rep.term1 + rep.term2;
        if (denom > 0) {
            rep.c_hat = rep.mid / denom;
            rep.c_hat_defined = true;
        }
        if (rep.selection.m0_defined) {
            const double m0 = double(rep.selection.m0);
            rep.case1_consistent =
                rep.eps_term == 0.0 ||
                std::log(rep.eps_term) + m0 * std::log(2.0 * r2 / r1) <=
                    m0 * std::log(2.0 * r2 / R) + 1e-12;
            rep.case2_consistent =
                rep.eps_term > 0.0 && rep.delta * r1 / (rep.M * R) < rep.eps_term;
        }
    }
    return rep;
}

double propagation_bound(double beta, double C, double delta, double eps_term, long m) {
    if (!(beta > 0 && beta < 1)) throw std::invalid_argument("propagation_bound: beta in (0,1)");
    if (C < 1) throw std::invalid_argument("propagation_bound: C >= 1");
    if (m < 1) throw std::invalid_argument("propagation_bound: m >= 1");
    const double cpow = std::pow(C, 1.0 / (1.0 - beta));
    const double bm = std::pow(beta, double(m));
    const double first = delta > 0 ? cpow * std::pow(delta, bm) : 0.0;
    const double second = eps_term > 0 ? double(m) * cpow * std::pow(eps_term, bm) : 0.0;
    return first + second;
}

ChainReport propagate_smallness(const DiscreteField& u, const HomogenizedTensor& T, double eps,
                                double r, const Vec& target, double lambda,
                                double delta_target, double user_C) {
    if (!(lambda > 0 && lambda <= 1))
        throw std::invalid_argument("propagate_smallness: lambda in (0,1]");
    if (!(r > 0 && r < lambda / 9.0))
        throw std::invalid_argument("propagate_smallness: need 0 < r < lambda/9");
    if (user_C < 1) throw std::invalid_argument("propagate_smallness: user C >= 1");
    {
        double sup = 0;
        for (double v : u.values) sup = std::max(sup, std::abs(v));
        if (sup > 1.0 + 1e-9)
            throw std::invalid_argument(
                "propagate_smallness: the chain normalisation needs sup|u| <= 1, got " +
                std::to_string(sup));
    }

    ChainReport chain;
    chain.r = r;
    chain.target = target;
    chain.user_C = user_C;
    chain.beta = std::log(9.0 / 4.0) / std::log(9.0 / lambda);

    const double dist = target.norm();
    chain.m = std::max<long>(1, long(std::ceil(dist / r - 1e-12)));
    Vec dir = dist > 0 ? target * (1.0 / dist) : Vec(1.0, 0.0);

    const double domain_radius = u.mesh->domain().radius;
    const double outer = 9.0 * r / lambda;
    for (long i = 0; i < chain.m; ++i) {
        const Vec center = dir * (double(i) * r);
        if (center.norm() + outer > domain_radius + 1e-12) {
            std::ostringstream os;
            os.precision(12);
            os << "propagate_smallness: chain ball " << i + 1 << " centred at (" << center[0]
               << ", " << center[1] << ") with outer radius " << outer
               << " leaves the solution domain (radius " << domain_radius << ")";
            throw std::runtime_error(os.str());
        }
        const BallTriple triple = BallTriple::ball_triple(r, 2.0 * r, outer, lambda, center);
        chain.steps.push_back(three_ball_audit(u, triple, T, eps));
        if (chain.steps.back().c_hat_defined)
            chain.c_hat_max = std::max(chain.c_hat_max, chain.steps.back().c_hat);
    }

    // iterated bound: b_i = C (b_{i-1}^beta + eps_term^beta), normalised sup <= 1
    const double C_emp = std::max(1.0, chain.c_hat_max);
    const double ef = eps_factor(eps);
    double b = delta_target;
    for (long i = 0; i < chain.m; ++i) {
        const double p1 = b > 0 ? std::pow(b, chain.beta) : 0.0;
        const double p2 = ef > 0 ? std::pow(ef, chain.beta) : 0.0;
        b = C_emp * (p1 + p2);
    }
    chain.iterated_bound = b;
    chain.closed_form_bound = propagation_bound(chain.beta, user_C, delta_target, ef, chain.m);
    return chain;
}

double doubling_propagation(const std::function<double(double)>& C_fn, double lambda,
                            double r0, double eta0) {
    if (!(lambda > 0 && lambda <= 1))
        throw std::invalid_argument("doubling_propagation: lambda in (0,1]");
    const double root = std::sqrt(lambda);
    if (!(r0 > 0 && r0 < root / 2.0))
        throw std::invalid_argument("doubling_propagation: need 0 < r0 < sqrt(lambda)/2");
    if (eta0 <= 0) throw std::invalid_argument("doubling_propagation: eta0 > 0");
    const double C = C_fn(1.0 / eta0);
    if (C < 1.0) throw std::invalid_argument("doubling_propagation: C_fn must be >= 1");
    const double k0 = std::ceil(std::log2(root / r0));
    return eta0 / 2.0 * std::pow(C, -k0);
}

SweepResult epsilon_sweep(const SweepConfig& cfg) {
    if (cfg.eps_list.empty()) throw std::invalid_argument("epsilon_sweep: empty eps list");
    SweepResult result;
    result.tensor = cfg.field.oscillating()
                        ? homogenized_tensor(cfg.field, cfg.cell_n)
                        : make_tensor(cfg.field.evaluate(Vec(0.0, 0.0)), cfg.field.lambda());

    const BallTriple triple = BallTriple::ellipsoid_triple(cfg.triple_r1, cfg.triple_r2,
                                                           cfg.triple_R, cfg.field.lambda());
    const double semi_max = std::sqrt(result.tensor.eig_max);
    if (semi_max * cfg.defect_R > cfg.domain_radius + 1e-12)
        throw std::invalid_argument("epsilon_sweep: defect ellipsoid leaves the domain");
    const Ellipsoid E_defect(result.tensor, cfg.defect_R);

    // probes: the centre plus points on |Sx| = R/2, where the kernel is
    // peaked and the remainder is sampled locally instead of averaged out
    std::vector<Vec> probes;
    probes.push_back(Vec(0.0, 0.0));
    for (const double th : {0.35, 0.35 + kPi / 4.0, 0.35 + kPi / 2.0})
        probes.push_back(E_defect.S_inv() *
                         (Vec(std::cos(th), std::sin(th)) * (0.5 * cfg.defect_R)));

    result.c_hat_min = std::numeric_limits<double>::infinity();
    for (double eps : cfg.eps_list) {
        SweepRow row;
        row.eps = eps;
        row.h = eps / cfg.h_factor;
        try {
            SolveOptions opt;
            opt.tol = cfg.tol;
            const DiscreteField u = solve_dirichlet(cfg.field, eps,
                                                    Domain::disk(cfg.domain_radius), cfg.data,
                                                    row.h, opt);
            const AuditReport rep = three_ball_audit(u, triple, result.tensor, eps);
            row.delta = rep.delta;
            row.mid = rep.mid;
            row.M = rep.M;
            row.term1 = rep.term1;
            row.term2 = rep.term2;
            row.c_hat = rep.c_hat;
            row.m0 = rep.selection.m0;
            row.m1 = rep.selection.m1;
            row.case_id = rep.selection.case_id;

            const auto psi = dirichlet_corrector(cfg.field, eps, E_defect, row.h, opt);
            auto w = [&](const BoundaryNode& bn) {
                return w_epsilon(cfg.field, eps, E_defect, psi, bn.y);
            };
            for (const Vec& x : probes)
                row.defect = std::max(row.defect, kernel_defect(u, E_defect, w, x,
                                                                cfg.quad_count));
            row.ok = true;
            if (rep.c_hat_defined) {
                result.c_hat_min = std::min(result.c_hat_min, rep.c_hat);
                result.c_hat_max = std::max(result.c_hat_max, rep.c_hat);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.rows.push_back(row);
    }

    // least-squares slope of ln(defect) against ln(eps ln(1/eps + 2))
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long nfit = 0;
    double max_defect = 0;
    for (const SweepRow& row : result.rows) {
        if (!row.ok || row.defect <= 0) continue;
        const double x = std::log(eps_factor(row.eps)), y = std::log(row.defect);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++nfit;
        max_defect = std::max(max_defect, row.defect);
    }
    if (nfit >= 2 && sxx - sx * sx / double(nfit) > 0) {
        result.slope = (sxy - sx * sy / double(nfit)) / (sxx - sx * sx / double(nfit));
        result.slope_defined = true;
    }
    result.floor_limited = max_defect < cfg.floor_threshold;
    return result;
}

}  // namespace homoglab

#include "homoglab/pde.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace homoglab {

// ---------------------------------------------------------------- boundary

BoundaryData BoundaryData::harmonic_re(int n) {
    if (n < 0) throw std::invalid_argument("harmonic_re: n >= 0");
    BoundaryData b;
    b.kind_ = Kind::HarmonicRe;
    b.n_ = n;
    return b;
}

BoundaryData BoundaryData::harmonic_im(int n) {
    if (n < 0) throw std::invalid_argument("harmonic_im: n >= 0");
    BoundaryData b;
    b.kind_ = Kind::HarmonicIm;
    b.n_ = n;
    return b;
}

BoundaryData BoundaryData::coordinate(int k) {
    if (k < 0 || k >= kMaxDim) throw std::invalid_argument("coordinate: bad index");
    BoundaryData b;
    b.kind_ = Kind::Coordinate;
    b.n_ = k;
    return b;
}

BoundaryData BoundaryData::constant(double c) {
    BoundaryData b;
    b.kind_ = Kind::Constant;
    b.c_ = c;
    return b;
}

BoundaryData BoundaryData::expression(const std::string& text, int d) {
    BoundaryData b;
    b.kind_ = Kind::Expression;
    b.expr_ = Expr::parse(text, d);
    return b;
}

BoundaryData BoundaryData::extended(const BoundaryData& base, bool odd) {
    BoundaryData b;
    b.kind_ = Kind::Extended;
    b.n_ = odd ? 1 : 0;
    b.base_ = std::make_shared<BoundaryData>(base);
    return b;
}

double BoundaryData::eval(const Vec& x) const {
    switch (kind_) {
        case Kind::HarmonicRe:
        case Kind::HarmonicIm: {
            std::complex<double> z(x[0], x[1]), p(1.0, 0.0);
            for (int i = 0; i < n_; ++i) p *= z;
            return kind_ == Kind::HarmonicRe ? p.real() : p.imag();
        }
        case Kind::Coordinate: return x[n_];
        case Kind::Constant: return c_;
        case Kind::Expression: return expr_->eval(x);
        case Kind::Extended: {
            Vec xm = x;
            xm[1] = std::abs(x[1]);
            const double v = base_->eval(xm);
            return (n_ && x[1] < 0) ? -v : v;
        }
    }
    return 0;
}

std::string BoundaryData::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::HarmonicRe: os << "harmonic-re " << n_; break;
        case Kind::HarmonicIm: os << "harmonic-im " << n_; break;
        case Kind::Coordinate: os << "coordinate " << n_ + 1; break;
        case Kind::Constant: os << "constant " << c_; break;
        case Kind::Expression: os << "expr " << expr_->text(); break;
        case Kind::Extended:
            os << (n_ ? "odd-of { " : "even-of { ") << base_->describe() << " }";
            break;
    }
    return os.str();
}

BoundaryData BoundaryData::parse(const std::string& text, int d) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    if (kind == "harmonic-re" || kind == "harmonic-im") {
        int n;
        if (!(is >> n)) throw std::invalid_argument("boundary data: expected degree");
        return kind == "harmonic-re" ? harmonic_re(n) : harmonic_im(n);
    }
    if (kind == "coordinate") {
        int k;
        if (!(is >> k)) throw std::invalid_argument("boundary data: expected index");
        return coordinate(k - 1);
    }
    if (kind == "constant") {
        double c;
        if (!(is >> c)) throw std::invalid_argument("boundary data: expected value");
        return constant(c);
    }
    if (kind == "expr") {
        const size_t pos = text.find("expr");
        return expression(text.substr(pos + 5), d);
    }
    if (kind == "odd-of" || kind == "even-of") {
        const size_t open = text.find('{'), close = text.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close <= open)
            throw std::invalid_argument("boundary data: expected { base }");
        return extended(parse(text.substr(open + 1, close - open - 1), d), kind == "odd-of");
    }
    throw std::invalid_argument("boundary data: unknown kind " + kind);
}

// ---------------------------------------------------------------- assembly

namespace {

Mat coeff_at(const CoefficientField& field, double eps, const Vec& x) {
    if (eps > 0) return field.evaluate(x * (1.0 / eps));
    return field.evaluate(x);
}

struct TriGeom {
    double area = 0;
    double gx[3], gy[3];  // P1 gradients
    Vec centroid;
};

TriGeom tri_geometry(const PolarMesh& mesh, int64_t t) {
    const int32_t* tv = mesh.tri(t);
    const Vec p0 = mesh.node(tv[0]), p1 = mesh.node(tv[1]), p2 = mesh.node(tv[2]);
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    TriGeom g;
    g.area = 0.5 * std::abs(det);
    g.gx[0] = (p1[1] - p2[1]) / det;
    g.gy[0] = (p2[0] - p1[0]) / det;
    g.gx[1] = (p2[1] - p0[1]) / det;
    g.gy[1] = (p0[0] - p2[0]) / det;
    g.gx[2] = (p0[1] - p1[1]) / det;
    g.gy[2] = (p1[0] - p0[0]) / det;
    g.centroid = (p0 + p1 + p2) * (1.0 / 3.0);
    return g;
}

}  // namespace

Csr assemble_stiffness(const PolarMesh& mesh, const CoefficientField& field, double eps) {
    Csr K = build_pattern(mesh.node_count(), mesh.tri_data());
    const int64_t nt = mesh.tri_count();
    for (int64_t t = 0; t < nt; ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const Mat C = coeff_at(field, eps, g.centroid);
        const int32_t* tv = mesh.tri(t);
        for (int a = 0; a < 3; ++a) {
            const double cax = C(0, 0) * g.gx[a] + C(0, 1) * g.gy[a];
            const double cay = C(1, 0) * g.gx[a] + C(1, 1) * g.gy[a];
            for (int b = 0; b < 3; ++b)
                K.at(tv[a], tv[b]) += g.area * (cax * g.gx[b] + cay * g.gy[b]);
        }
    }
    return K;
}

Csr assemble_mass(const PolarMesh& mesh) {
    Csr M = build_pattern(mesh.node_count(), mesh.tri_data());
    const int64_t nt = mesh.tri_count();
    for (int64_t t = 0; t < nt; ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const int32_t* tv = mesh.tri(t);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                M.at(tv[a], tv[b]) += g.area / 12.0 * (a == b ? 2.0 : 1.0);
    }
    return M;
}

// ---------------------------------------------------------------- solves

namespace {

void check_mesh_rule(const CoefficientField& field, double eps, double h, bool enforce) {
    if (!enforce) return;
    if (eps > 0 && field.oscillating() && h > eps / 8.0 + 1e-15) {
        std::ostringstream os;
        os << "mesh rule violated: h = " << h << " exceeds eps/8 = " << eps / 8.0
           << " for an oscillating field";
        throw std::invalid_argument(os.str());
    }
}

std::vector<uint8_t> dirichlet_mask(const PolarMesh& mesh, FlatBC flat_bc) {
    std::vector<uint8_t> mask(size_t(mesh.node_count()), 0);
    for (int64_t i = 0; i < mesh.node_count(); ++i) {
        if (mesh.on_curved_boundary(i)) mask[size_t(i)] = 1;
        else if (mesh.half() && flat_bc == FlatBC::Dirichlet && mesh.on_flat_boundary(i))
            mask[size_t(i)] = 1;
    }
    return mask;
}

std::vector<double> boundary_values(const PolarMesh& mesh, const std::vector<uint8_t>& mask,
                                    const BoundaryData& g) {
    std::vector<double> u(size_t(mesh.node_count()), 0.0);
    for (int64_t i = 0; i < mesh.node_count(); ++i)
        if (mask[size_t(i)]) u[size_t(i)] = mesh.on_curved_boundary(i) ? g.eval(mesh.node(i)) : 0.0;
    return u;
}

long iteration_cap(int64_t nodes, long user_cap) {
    if (user_cap > 0) return user_cap;
    return std::max<long>(50000, long(nodes));
}

DiscreteField run_dirichlet_solve(const CoefficientField& field, double eps,
                                  std::shared_ptr<const PolarMesh> mesh, FlatBC flat_bc,
                                  const BoundaryData& g, const SolveOptions& opt,
                                  const char* bc_name) {
    const Csr K = assemble_stiffness(*mesh, field, eps);
    const std::vector<uint8_t> mask = dirichlet_mask(*mesh, flat_bc);
    const std::vector<double> u_bc = boundary_values(*mesh, mask, g);

    std::vector<double> b(size_t(K.n));
    K.apply(u_bc, b);
    for (int64_t i = 0; i < K.n; ++i) b[size_t(i)] = mask[size_t(i)] ? 0.0 : -b[size_t(i)];

    const IncompleteCholesky prec(K, mask);
    std::vector<double> x;
    cg_solve(K, mask, b, x, opt.tol, iteration_cap(K.n, opt.max_iter), &prec);

    DiscreteField out;
    out.mesh = std::move(mesh);
    out.values.resize(size_t(K.n));
    for (int64_t i = 0; i < K.n; ++i) out.values[size_t(i)] = x[size_t(i)] + u_bc[size_t(i)];
    out.coeff = field;
    out.meta.eps = eps;
    out.meta.field_desc = field.describe();
    out.meta.bc = bc_name;
    out.meta.boundary_desc = g.describe();
    return out;
}

}  // namespace

DiscreteField solve_dirichlet(const CoefficientField& field, double eps, const Domain& domain,
                              const BoundaryData& g, double h, const SolveOptions& opt) {
    if (field.dim() != 2) throw std::invalid_argument("solve_dirichlet: d = 2 solves only");
    if (domain.kind == DomainKind::HalfDisk)
        throw std::invalid_argument("solve_dirichlet: use solve_half for half-disks");
    check_mesh_rule(field, eps, h, opt.enforce_mesh_rule);
    return run_dirichlet_solve(field, eps, PolarMesh::build(domain, h), FlatBC::Dirichlet, g,
                               opt, "dirichlet");
}

DiscreteField solve_half(const CoefficientField& field, double eps, double radius, FlatBC bc,
                         const BoundaryData& g, double h, const SolveOptions& opt) {
    if (field.dim() != 2) throw std::invalid_argument("solve_half: d = 2 solves only");
    if (!field.block_structure())
        throw std::invalid_argument("solve_half: field must have the block structure");
    check_mesh_rule(field, eps, h, opt.enforce_mesh_rule);
    return run_dirichlet_solve(field, eps, PolarMesh::build(Domain::half_disk(radius), h), bc, g,
                               opt, bc == FlatBC::Dirichlet ? "half-dirichlet" : "half-neumann");
}

DiscreteField solve_eigen_type(const CoefficientField& field, double eps, double lambda_k,
                               const BoundaryData& g, const Domain& domain, double h,
                               const SolveOptions& opt) {
    if (field.dim() != 2) throw std::invalid_argument("solve_eigen_type: d = 2 solves only");
    if (lambda_k < 0) throw std::invalid_argument("solve_eigen_type: lambda_k >= 0");
    check_mesh_rule(field, eps, h, opt.enforce_mesh_rule);

    auto mesh = PolarMesh::build(domain, h);
    const Csr K = assemble_stiffness(*mesh, field, eps);
    const Csr M = assemble_mass(*mesh);
    const std::vector<uint8_t> mask = dirichlet_mask(*mesh, FlatBC::Dirichlet);
    const std::vector<double> u_bc = boundary_values(*mesh, mask, g);
    const int64_t n = K.n;

    std::vector<double> mbuf(static_cast<size_t>(n));
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        y.resize(static_cast<size_t>(n));
        K.apply_pinned(mask, x, y);
        M.apply_pinned(mask, x, mbuf);
        for (int64_t i = 0; i < n; ++i)
            if (!mask[size_t(i)]) y[size_t(i)] -= lambda_k * mbuf[size_t(i)];
    };

    std::vector<double> b(static_cast<size_t>(n)), tmp(static_cast<size_t>(n));
    K.apply(u_bc, b);
    M.apply(u_bc, tmp);
    for (int64_t i = 0; i < n; ++i)
        b[size_t(i)] = mask[size_t(i)] ? 0.0 : -(b[size_t(i)] - lambda_k * tmp[size_t(i)]);

    std::vector<double> dinv(size_t(n), 1.0);
    for (int64_t i = 0; i < n; ++i) {
        if (mask[size_t(i)]) continue;
        const double d = K.get(i, int32_t(i)) - lambda_k * M.get(i, int32_t(i));
        dinv[size_t(i)] = (std::abs(d) > 1e-300) ? 1.0 / std::abs(d) : 1.0;
    }

    std::ostringstream ctx;
    ctx << "solve_eigen_type(lambda_k=" << lambda_k << ")";
    std::vector<double> x;
    minres_solve(apply, dinv, b, x, opt.tol, iteration_cap(n, opt.max_iter), ctx.str());

    double xmax = 0, gmax = 0;
    for (int64_t i = 0; i < n; ++i) {
        xmax = std::max(xmax, std::abs(x[size_t(i)]));
        gmax = std::max(gmax, std::abs(u_bc[size_t(i)]));
    }
    if (xmax > 1e8 * std::max(gmax, 1e-30))
        throw std::runtime_error(
            "solve_eigen_type: solution blow-up, lambda_k is near a discrete Dirichlet eigenvalue");

    DiscreteField out;
    out.mesh = std::move(mesh);
    out.values.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) out.values[size_t(i)] = x[size_t(i)] + u_bc[size_t(i)];
    out.coeff = field;
    out.meta.eps = eps;
    out.meta.field_desc = field.describe();
    out.meta.bc = "dirichlet";
    out.meta.source = "eigen";
    out.meta.lambda_k = lambda_k;
    out.meta.boundary_desc = g.describe();
    return out;
}

std::vector<DiscreteField> dirichlet_corrector(const CoefficientField& field, double eps,
                                               const Ellipsoid& E, double h,
                                               const SolveOptions& opt) {
    std::vector<DiscreteField> psi;
    for (int k = 0; k < E.dim(); ++k) {
        psi.push_back(solve_dirichlet(field, eps, Domain::ellipsoid(E),
                                      BoundaryData::coordinate(k), h, opt));
        psi.back().meta.note = "dirichlet corrector";
    }
    return psi;
}

// ---------------------------------------------------------------- measures

Region Region::ball(const Vec& c, double r) {
    if (r <= 0) throw std::invalid_argument("Region::ball: radius must be positive");
    Region reg;
    reg.kind = Kind::Ball;
    reg.center = c;
    reg.radius = r;
    return reg;
}

Region Region::ellipsoid_region(const Ellipsoid& E) {
    Region reg;
    reg.kind = Kind::EllipsoidRegion;
    reg.center = Vec(0.0, 0.0);
    reg.radius = E.radius();
    reg.ellipsoid = E;
    return reg;
}

double sup_norm(const DiscreteField& u, const Region& region, int64_t* count_out) {
    const int64_t n = u.nodes();
    int64_t count = 0;
    double sup = 0;
    const int levels = u.lifted() ? u.tgrid->nt : 1;
    for (int64_t i = 0; i < n; ++i) {
        const Vec x = u.mesh->node(i);
        for (int l = 0; l < levels; ++l) {
            bool inside = false;
            const double t = u.lifted() ? u.tgrid->t[size_t(l)] : 0.0;
            if (region.kind == Region::Kind::Ball) {
                const Vec dx = x - region.center;
                inside = dx.norm2() + t * t < region.radius * region.radius;
            } else {
                if (u.lifted())
                    throw std::invalid_argument("sup_norm: ellipsoid regions need plain fields");
                inside = region.ellipsoid->mapped_radius(x) < region.ellipsoid->radius();
            }
            if (inside) {
                ++count;
                sup = std::max(sup, std::abs(u.value_at(i, l)));
            }
        }
    }
    if (count == 0)
        throw std::invalid_argument("sup_norm: region contains no mesh node");
    if (count_out) *count_out = count;
    return sup;
}

namespace {

std::vector<uint8_t> interior_test_mask(const DiscreteField& u) {
    // nodes carrying prescribed data are excluded from the residual
    const PolarMesh& mesh = *u.mesh;
    std::vector<uint8_t> interior(size_t(mesh.node_count()), 1);
    const bool flat_constrained = (u.meta.bc == "half-dirichlet");
    for (int64_t i = 0; i < mesh.node_count(); ++i) {
        if (mesh.on_curved_boundary(i)) interior[size_t(i)] = 0;
        else if (flat_constrained && mesh.on_flat_boundary(i)) interior[size_t(i)] = 0;
    }
    return interior;
}

double plain_residual(const DiscreteField& u) {
    const Csr K = assemble_stiffness(*u.mesh, u.coeff, u.meta.eps);
    const int64_t n = K.n;
    std::vector<double> r(static_cast<size_t>(n));
    K.apply(u.values, r);
    double energy2 = 0;
    for (int64_t i = 0; i < n; ++i) energy2 += u.values[size_t(i)] * r[size_t(i)];
    if (u.meta.source == "eigen" && u.meta.lambda_k != 0.0) {
        const Csr M = assemble_mass(*u.mesh);
        std::vector<double> mu(static_cast<size_t>(n));
        M.apply(u.values, mu);
        for (int64_t i = 0; i < n; ++i) r[size_t(i)] -= u.meta.lambda_k * mu[size_t(i)];
    }
    const std::vector<uint8_t> interior = interior_test_mask(u);
    double rn2 = 0;
    for (int64_t i = 0; i < n; ++i)
        if (interior[size_t(i)]) rn2 += r[size_t(i)] * r[size_t(i)];
    const double energy = std::sqrt(std::max(energy2, 0.0));
    return energy > 0 ? std::sqrt(rn2) / energy : std::sqrt(rn2);
}

// tridiagonal 1D P1 operators on the time grid
void time_matrices(const TimeGrid& tg, std::vector<double>& Kt_lo, std::vector<double>& Kt_di,
                   std::vector<double>& Mt_lo, std::vector<double>& Mt_di) {
    const int nt = tg.nt;
    const double ht = tg.h_t;
    Kt_lo.assign(size_t(nt - 1), -1.0 / ht);
    Kt_di.assign(size_t(nt), 2.0 / ht);
    Kt_di.front() = Kt_di.back() = 1.0 / ht;
    Mt_lo.assign(size_t(nt - 1), ht / 6.0);
    Mt_di.assign(size_t(nt), 4.0 * ht / 6.0);
    Mt_di.front() = Mt_di.back() = 2.0 * ht / 6.0;
}

double lifted_residual(const DiscreteField& u) {
    const Csr K = assemble_stiffness(*u.mesh, u.coeff, u.meta.eps);
    const Csr M = assemble_mass(*u.mesh);
    const TimeGrid& tg = *u.tgrid;
    const int64_t n = K.n;
    const int nt = tg.nt;

    std::vector<double> Kt_lo, Kt_di, Mt_lo, Mt_di;
    time_matrices(tg, Kt_lo, Kt_di, Mt_lo, Mt_di);

    // W1 = K V, W2 = M V  (level by level)
    std::vector<std::vector<double>> W1(static_cast<size_t>(nt)), W2(static_cast<size_t>(nt));
    std::vector<double> level(static_cast<size_t>(n));
    for (int l = 0; l < nt; ++l) {
        std::copy(u.values.begin() + int64_t(l) * n, u.values.begin() + int64_t(l + 1) * n,
                  level.begin());
        W1[size_t(l)].resize(static_cast<size_t>(n));
        W2[size_t(l)].resize(static_cast<size_t>(n));
        K.apply(level, W1[size_t(l)]);
        M.apply(level, W2[size_t(l)]);
    }

    const std::vector<uint8_t> interior = interior_test_mask(u);
    double rn2 = 0, energy2 = 0;
    for (int l = 0; l < nt; ++l) {
        for (int64_t i = 0; i < n; ++i) {
            double r = Mt_di[size_t(l)] * W1[size_t(l)][size_t(i)] +
                       Kt_di[size_t(l)] * W2[size_t(l)][size_t(i)];
            if (l > 0)
                r += Mt_lo[size_t(l - 1)] * W1[size_t(l - 1)][size_t(i)] +
                     Kt_lo[size_t(l - 1)] * W2[size_t(l - 1)][size_t(i)];
            if (l < nt - 1)
                r += Mt_lo[size_t(l)] * W1[size_t(l + 1)][size_t(i)] +
                     Kt_lo[size_t(l)] * W2[size_t(l + 1)][size_t(i)];
            energy2 += u.value_at(i, l) * r;
            if (interior[size_t(i)] && l > 0 && l < nt - 1) rn2 += r * r;
        }
    }
    const double energy = std::sqrt(std::max(energy2, 0.0));
    return energy > 0 ? std::sqrt(rn2) / energy : std::sqrt(rn2);
}

}  // namespace

double residual(const DiscreteField& u) {
    return u.lifted() ? lifted_residual(u) : plain_residual(u);
}

DiscreteField reflect_solution(const DiscreteField& u, Parity parity) {
    const PolarMesh& hm = *u.mesh;
    if (!hm.half()) throw std::invalid_argument("reflect_solution: field not on a half-disk");
    if (parity == Parity::Odd) {
        double trace = 0;
        for (int64_t i = 0; i < hm.node_count(); ++i)
            if (hm.on_flat_boundary(i)) trace = std::max(trace, std::abs(u.values[size_t(i)]));
        if (trace > 1e-8) {
            std::ostringstream os;
            os << "reflect_solution: odd parity needs a vanishing flat trace, found " << trace;
            throw std::invalid_argument(os.str());
        }
    }

    auto full = PolarMesh::build(Domain::disk(hm.domain().radius), hm.h());
    if (full->rings() != hm.rings() || full->sectors_full() != hm.sectors_full())
        throw std::logic_error("reflect_solution: full mesh does not match the half mesh");

    const double sign = parity == Parity::Odd ? -1.0 : 1.0;
    const int half_npr = hm.nodes_per_ring();
    DiscreteField out;
    out.values.assign(size_t(full->node_count()), 0.0);
    out.values[0] = u.values[0];
    for (int j = 1; j <= full->rings(); ++j) {
        for (int k = 0; k < full->sectors_full(); ++k) {
            const int64_t id = full->node_index(j, k);
            if (k < half_npr) {
                out.values[size_t(id)] = u.values[size_t(hm.node_index(j, k))];
            } else {
                const int km = full->sectors_full() - k;  // mirror sector, 1..half_npr-2
                out.values[size_t(id)] = sign * u.values[size_t(hm.node_index(j, km))];
            }
        }
    }
    out.mesh = std::move(full);
    out.coeff = reflect_even(u.coeff);
    out.meta = u.meta;
    out.meta.bc = "dirichlet";
    out.meta.field_desc = out.coeff.describe();
    out.meta.note = std::string(parity == Parity::Odd ? "odd" : "even") +
                    " reflection of half-disk solve, coefficients evenly reflected";
    return out;
}

DiscreteField lift_eigen(const DiscreteField& u, double lambda_k, double t_extent, double h_t) {
    if (lambda_k < 0) throw std::invalid_argument("lift_eigen: lambda_k >= 0");
    if (t_extent <= 0 || h_t <= 0) throw std::invalid_argument("lift_eigen: t_extent, h_t > 0");
    if (u.lifted()) throw std::invalid_argument("lift_eigen: field already lifted");

    auto tg = std::make_shared<TimeGrid>();
    const int half = std::max(1, int(std::ceil(t_extent / h_t - 1e-12)));
    tg->t_extent = t_extent;
    tg->nt = 2 * half + 1;
    tg->h_t = t_extent / double(half);
    for (int l = 0; l < tg->nt; ++l) tg->t.push_back(-t_extent + tg->h_t * double(l));

    const int64_t n = u.nodes();
    DiscreteField out;
    out.mesh = u.mesh;
    out.tgrid = tg;
    out.coeff = u.coeff;
    out.values.resize(size_t(n) * size_t(tg->nt));
    const double root = std::sqrt(lambda_k);
    for (int l = 0; l < tg->nt; ++l) {
        const double f = std::exp(root * tg->t[size_t(l)]);
        for (int64_t i = 0; i < n; ++i)
            out.values[size_t(l) * size_t(n) + size_t(i)] = f * u.values[size_t(i)];
    }
    out.meta = u.meta;
    out.meta.lambda_k = lambda_k;
    out.meta.source = "lifted-eigen";
    out.meta.note = "lifted operator with block coefficient diag(A, 1)";
    return out;
}

double point_value(const DiscreteField& u, const Vec& x) {
    if (u.lifted()) throw std::invalid_argument("point_value: plain fields only");
    const LocateResult loc = u.mesh->locate(x);
    if (!loc.inside) {
        std::ostringstream os;
        os.precision(17);
        os << "point_value: (" << x[0] << ", " << x[1] << ") outside the mesh";
        throw std::invalid_argument(os.str());
    }
    return u.mesh->interpolate(loc, u.values);
}

double max_gradient(const DiscreteField& u) {
    double g2max = 0;
    for (int64_t t = 0; t < u.mesh->tri_count(); ++t) {
        const TriGeom g = tri_geometry(*u.mesh, t);
        const int32_t* tv = u.mesh->tri(t);
        double gx = 0, gy = 0;
        for (int a = 0; a < 3; ++a) {
            gx += u.values[size_t(tv[a])] * g.gx[a];
            gy += u.values[size_t(tv[a])] * g.gy[a];
        }
        g2max = std::max(g2max, gx * gx + gy * gy);
    }
    return std::sqrt(g2max);
}

}  // namespace homoglab

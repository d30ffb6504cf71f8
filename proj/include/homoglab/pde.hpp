#pragma once

// Discrete solves of -div(A(x/eps) grad u) = f on disks, ellipsoids and
// half-disks; the Dirichlet corrector; eigenvalue-type solves; reflections;
// the eigen-lift onto the cylinder; and sup-norm / residual measurement.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/coeff.hpp"
#include "homoglab/ellipsoid.hpp"
#include "homoglab/mesh.hpp"
#include "homoglab/sparse.hpp"

namespace homoglab {

class BoundaryData {
  public:
    // Re((x1 + i x2)^n) and Im(...): harmonic polynomial families
    static BoundaryData harmonic_re(int n);
    static BoundaryData harmonic_im(int n);
    static BoundaryData coordinate(int k);  // x_k, 0-based
    static BoundaryData constant(double c);
    static BoundaryData expression(const std::string& text, int d);
    // g~(x1, x2) = sign(x2)^{odd} g(x1, |x2|): data for reflected full-disk solves
    static BoundaryData extended(const BoundaryData& base, bool odd);

    double eval(const Vec& x) const;
    std::string describe() const;
    static BoundaryData parse(const std::string& text, int d = 2);

  private:
    enum class Kind { HarmonicRe, HarmonicIm, Coordinate, Constant, Expression, Extended };
    Kind kind_ = Kind::Constant;
    int n_ = 0;          // degree / coordinate index / odd flag for Extended
    double c_ = 0;
    std::optional<Expr> expr_;
    std::shared_ptr<const BoundaryData> base_;
};

enum class FlatBC { Dirichlet, Neumann };

struct FieldMeta {
    double eps = 0.0;               // 0: coefficient evaluated unscaled
    std::string field_desc;
    std::string bc = "dirichlet";   // dirichlet | half-dirichlet | half-neumann
    std::string source = "none";    // none | eigen
    double lambda_k = 0.0;
    std::string boundary_desc;
    std::string note;               // free-form (reflection pairing etc.)
};

struct TimeGrid {
    double t_extent = 0.0;
    int nt = 0;        // number of levels, odd, t = -T..T
    double h_t = 0.0;
    std::vector<double> t;
};

struct DiscreteField {
    std::shared_ptr<const PolarMesh> mesh;
    std::shared_ptr<const TimeGrid> tgrid;  // set only for lifted (box) fields
    std::vector<double> values;             // node values; lifted: level-major
    CoefficientField coeff;
    FieldMeta meta;

    int64_t nodes() const { return mesh->node_count(); }
    bool lifted() const { return tgrid != nullptr; }
    double value_at(int64_t node, int level = 0) const {
        return values[size_t(level) * size_t(nodes()) + size_t(node)];
    }
};

struct Region {
    enum class Kind { Ball, EllipsoidRegion };
    Kind kind = Kind::Ball;
    Vec center;
    double radius = 0.0;
    std::optional<Ellipsoid> ellipsoid;  // centred at the origin

    static Region ball(const Vec& c, double r);
    static Region ellipsoid_region(const Ellipsoid& E);
};

struct SolveOptions {
    double tol = 1e-11;
    long max_iter = -1;       // default: 40 * (nodes)^(1/2) * 10 ... see source
    bool enforce_mesh_rule = true;
};

// Dirichlet problem for the oscillating operator. eps > 0 requires h <= eps/8
// when the field oscillates.
DiscreteField solve_dirichlet(const CoefficientField& field, double eps, const Domain& domain,
                              const BoundaryData& g, double h, const SolveOptions& opt = {});

// Half-disk problem: flat part x2 = 0 carries the Dirichlet (essential, zero)
// or Neumann (natural) condition; the curved part carries g.
DiscreteField solve_half(const CoefficientField& field, double eps, double radius, FlatBC bc,
                         const BoundaryData& g, double h, const SolveOptions& opt = {});

// -div(A grad u) = lambda_k u with Dirichlet data g (lambda_k >= 0).
DiscreteField solve_eigen_type(const CoefficientField& field, double eps, double lambda_k,
                               const BoundaryData& g, const Domain& domain, double h,
                               const SolveOptions& opt = {});

// Dirichlet correctors Psi_{eps,k}, boundary data x_k, k = 1..d.
std::vector<DiscreteField> dirichlet_corrector(const CoefficientField& field, double eps,
                                               const Ellipsoid& E, double h,
                                               const SolveOptions& opt = {});

// max |u| over mesh nodes strictly inside the region; node count optionally
// reported. Throws if no node lies in the region.
double sup_norm(const DiscreteField& u, const Region& region, int64_t* count_out = nullptr);

// Weak-form residual against interior test functions, normalised by the
// energy norm of the field. Understands plain, eigen-type and lifted fields.
double residual(const DiscreteField& u);

enum class Parity { Odd, Even };

// Mirror a half-disk solution onto the full disk; pairs the result with the
// even-reflected coefficient field so residual() checks the extended
// equation. Odd parity requires a vanishing flat trace.
DiscreteField reflect_solution(const DiscreteField& u, Parity parity);

// v(x,t) = exp(sqrt(lambda_k) t) u(x) on domain x (-t_extent, t_extent).
DiscreteField lift_eigen(const DiscreteField& u, double lambda_k, double t_extent, double h_t);

// P1 interpolation at an arbitrary point (boundary-clamped within tolerance).
double point_value(const DiscreteField& u, const Vec& x);

// max |grad u| over triangles
double max_gradient(const DiscreteField& u);

// Assembled operators (shared by kernel probes and tests).
Csr assemble_stiffness(const PolarMesh& mesh, const CoefficientField& field, double eps);
Csr assemble_mass(const PolarMesh& mesh);

}  // namespace homoglab

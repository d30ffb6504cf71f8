#pragma once

// CSR matrices and the iterative solvers used by the PDE module: CG with an
// IC(0) preconditioner for the definite solves, MINRES with diagonal
// preconditioning for the eigenvalue-type (possibly indefinite) solves.
// Dirichlet constraints are handled by pinning: constrained entries of the
// iterates are held at zero and constrained rows act as the identity.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace homoglab {

struct Csr {
    int64_t n = 0;
    std::vector<int64_t> rowptr;
    std::vector<int32_t> col;
    std::vector<double> val;

    double& at(int64_t i, int32_t j);        // entry must exist in the pattern
    double get(int64_t i, int32_t j) const;  // 0 if absent

    // y = A x for rows with mask==0; y_i = x_i on masked rows
    void apply_pinned(const std::vector<uint8_t>& mask, const std::vector<double>& x,
                      std::vector<double>& y) const;
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

// pattern from a triangle list (3 int32 per element), sorted columns
Csr build_pattern(int64_t n_nodes, const std::vector<int32_t>& tris);

class IncompleteCholesky {
  public:
    // factors A with masked rows/cols treated as identity; retries with
    // diagonal shifts on breakdown
    IncompleteCholesky(const Csr& A, const std::vector<uint8_t>& mask);

    void solve(const std::vector<double>& r, std::vector<double>& z) const;
    double shift_used() const { return shift_; }

  private:
    Csr L_;       // lower triangle incl. diagonal, columns ascending
    Csr U_;       // transpose of L_
    double shift_ = 0.0;

    bool try_factor(const Csr& A, const std::vector<uint8_t>& mask, double shift);
};

struct IterStats {
    long iterations = 0;
    double relative_residual = 0.0;
};

// Preconditioned CG on the pinned system; b must vanish on masked entries.
// Throws on non-convergence and on detected indefiniteness.
IterStats cg_solve(const Csr& A, const std::vector<uint8_t>& mask,
                   const std::vector<double>& b, std::vector<double>& x, double tol,
                   long max_iter, const IncompleteCholesky* prec);

// Preconditioned MINRES for a symmetric (possibly indefinite) operator.
IterStats minres_solve(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                       const std::vector<double>& diag_precond_inv,
                       const std::vector<double>& b, std::vector<double>& x, double tol,
                       long max_iter, const std::string& context);

}  // namespace homoglab

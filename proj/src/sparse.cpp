#include "homoglab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace homoglab {

namespace {

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double& Csr::at(int64_t i, int32_t j) {
    auto begin = col.begin() + rowptr[size_t(i)], end = col.begin() + rowptr[size_t(i) + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) throw std::logic_error("Csr::at: entry not in pattern");
    return val[size_t(it - col.begin())];
}

double Csr::get(int64_t i, int32_t j) const {
    auto begin = col.begin() + rowptr[size_t(i)], end = col.begin() + rowptr[size_t(i) + 1];
    auto it = std::lower_bound(begin, end, j);
    return (it == end || *it != j) ? 0.0 : val[size_t(it - col.begin())];
}

void Csr::apply(const std::vector<double>& x, std::vector<double>& y) const {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        double s = 0;
        for (int64_t p = rowptr[size_t(i)]; p < rowptr[size_t(i) + 1]; ++p)
            s += val[size_t(p)] * x[size_t(col[size_t(p)])];
        y[size_t(i)] = s;
    }
}

void Csr::apply_pinned(const std::vector<uint8_t>& mask, const std::vector<double>& x,
                       std::vector<double>& y) const {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        if (mask[size_t(i)]) {
            y[size_t(i)] = x[size_t(i)];
            continue;
        }
        double s = 0;
        for (int64_t p = rowptr[size_t(i)]; p < rowptr[size_t(i) + 1]; ++p)
            s += val[size_t(p)] * x[size_t(col[size_t(p)])];
        y[size_t(i)] = s;
    }
}

Csr build_pattern(int64_t n_nodes, const std::vector<int32_t>& tris) {
    // padded adjacency (with duplicates), then sort+unique row by row
    std::vector<int64_t> cnt(size_t(n_nodes) + 1, 0);
    for (size_t t = 0; t < tris.size(); t += 3)
        for (int a = 0; a < 3; ++a) cnt[size_t(tris[t + size_t(a)]) + 1] += 3;
    std::vector<int64_t> pad(size_t(n_nodes) + 1, 0);
    for (int64_t i = 0; i < n_nodes; ++i) pad[size_t(i) + 1] = pad[size_t(i)] + cnt[size_t(i) + 1];
    std::vector<int32_t> adj(size_t(pad[size_t(n_nodes)]));
    std::vector<int64_t> fill(pad.begin(), pad.end() - 1);
    for (size_t t = 0; t < tris.size(); t += 3)
        for (int a = 0; a < 3; ++a) {
            const int32_t r = tris[t + size_t(a)];
            for (int b = 0; b < 3; ++b) adj[size_t(fill[size_t(r)]++)] = tris[t + size_t(b)];
        }

    Csr A;
    A.n = n_nodes;
    A.rowptr.assign(size_t(n_nodes) + 1, 0);
    for (int64_t i = 0; i < n_nodes; ++i) {
        auto begin = adj.begin() + pad[size_t(i)], end = adj.begin() + pad[size_t(i) + 1];
        std::sort(begin, end);
        A.rowptr[size_t(i) + 1] = A.rowptr[size_t(i)] + (std::unique(begin, end) - begin);
    }
    A.col.resize(size_t(A.rowptr[size_t(n_nodes)]));
    for (int64_t i = 0; i < n_nodes; ++i) {
        auto begin = adj.begin() + pad[size_t(i)];
        std::copy(begin, begin + (A.rowptr[size_t(i) + 1] - A.rowptr[size_t(i)]),
                  A.col.begin() + A.rowptr[size_t(i)]);
    }
    A.val.assign(A.col.size(), 0.0);
    return A;
}

bool IncompleteCholesky::try_factor(const Csr& A, const std::vector<uint8_t>& mask,
                                    double shift) {
    const int64_t n = A.n;
    L_ = Csr{};
    L_.n = n;
    L_.rowptr.assign(size_t(n) + 1, 0);
    for (int64_t i = 0; i < n; ++i) {
        int64_t c = 0;
        for (int64_t p = A.rowptr[size_t(i)]; p < A.rowptr[size_t(i) + 1]; ++p)
            if (A.col[size_t(p)] <= i) ++c;
        L_.rowptr[size_t(i) + 1] = L_.rowptr[size_t(i)] + c;
    }
    L_.col.resize(size_t(L_.rowptr[size_t(n)]));
    L_.val.assign(L_.col.size(), 0.0);

    auto a_pinned = [&](int64_t i, int32_t j, double v) {
        if (mask[size_t(i)] || mask[size_t(j)]) return (int64_t(j) == i) ? 1.0 : 0.0;
        return v;
    };

    for (int64_t i = 0; i < n; ++i) {
        int64_t q = L_.rowptr[size_t(i)];
        for (int64_t p = A.rowptr[size_t(i)]; p < A.rowptr[size_t(i) + 1]; ++p) {
            if (A.col[size_t(p)] > i) break;
            L_.col[size_t(q)] = A.col[size_t(p)];
            double v = a_pinned(i, A.col[size_t(p)], A.val[size_t(p)]);
            if (int64_t(A.col[size_t(p)]) == i) v += shift * std::abs(v);
            L_.val[size_t(q)] = v;
            ++q;
        }
        // eliminate: L_ij = (A_ij - sum_k L_ik L_jk) / L_jj for j < i, then diag
        const int64_t ib = L_.rowptr[size_t(i)], ie = L_.rowptr[size_t(i) + 1];
        for (int64_t p = ib; p < ie; ++p) {
            const int64_t j = L_.col[size_t(p)];
            double s = L_.val[size_t(p)];
            // intersect row i (cols < j) with row j (cols < j)
            int64_t pi = ib, pj = L_.rowptr[size_t(j)];
            const int64_t je = L_.rowptr[size_t(j) + 1] - 1;  // exclude diag of j
            while (pi < p && pj < je) {
                const int32_t ci = L_.col[size_t(pi)], cj = L_.col[size_t(pj)];
                if (ci == cj) {
                    s -= L_.val[size_t(pi)] * L_.val[size_t(pj)];
                    ++pi;
                    ++pj;
                } else if (ci < cj) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            if (j < i) {
                const double ljj = L_.val[size_t(L_.rowptr[size_t(j) + 1] - 1)];
                L_.val[size_t(p)] = s / ljj;
            } else {
                if (s <= 0) return false;
                L_.val[size_t(p)] = std::sqrt(s);
            }
        }
    }

    // transpose for the backward sweep
    U_ = Csr{};
    U_.n = n;
    U_.rowptr.assign(size_t(n) + 1, 0);
    for (int32_t c : L_.col) U_.rowptr[size_t(c) + 1]++;
    for (int64_t i = 0; i < n; ++i) U_.rowptr[size_t(i) + 1] += U_.rowptr[size_t(i)];
    U_.col.resize(L_.col.size());
    U_.val.resize(L_.val.size());
    std::vector<int64_t> fill(U_.rowptr.begin(), U_.rowptr.end() - 1);
    for (int64_t i = 0; i < n; ++i)
        for (int64_t p = L_.rowptr[size_t(i)]; p < L_.rowptr[size_t(i) + 1]; ++p) {
            const int64_t q = fill[size_t(L_.col[size_t(p)])]++;
            U_.col[size_t(q)] = int32_t(i);
            U_.val[size_t(q)] = L_.val[size_t(p)];
        }
    return true;
}

IncompleteCholesky::IncompleteCholesky(const Csr& A, const std::vector<uint8_t>& mask) {
    for (double s : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        if (try_factor(A, mask, s)) {
            shift_ = s;
            return;
        }
    }
    throw std::runtime_error("IncompleteCholesky: breakdown persists under diagonal shifts");
}

void IncompleteCholesky::solve(const std::vector<double>& r, std::vector<double>& z) const {
    const int64_t n = L_.n;
    z.resize(static_cast<size_t>(n));
    // forward: L y = r  (diag stored last in each L row)
    for (int64_t i = 0; i < n; ++i) {
        double s = r[size_t(i)];
        const int64_t e = L_.rowptr[size_t(i) + 1] - 1;
        for (int64_t p = L_.rowptr[size_t(i)]; p < e; ++p)
            s -= L_.val[size_t(p)] * z[size_t(L_.col[size_t(p)])];
        z[size_t(i)] = s / L_.val[size_t(e)];
    }
    // backward: L^T z = y  (diag stored first in each U row)
    for (int64_t i = n - 1; i >= 0; --i) {
        double s = z[size_t(i)];
        const int64_t b = U_.rowptr[size_t(i)], e = U_.rowptr[size_t(i) + 1];
        for (int64_t p = b + 1; p < e; ++p)
            s -= U_.val[size_t(p)] * z[size_t(U_.col[size_t(p)])];
        z[size_t(i)] = s / U_.val[size_t(b)];
    }
}

IterStats cg_solve(const Csr& A, const std::vector<uint8_t>& mask,
                   const std::vector<double>& b, std::vector<double>& x, double tol,
                   long max_iter, const IncompleteCholesky* prec) {
    const int64_t n = A.n;
    x.assign(size_t(n), 0.0);
    const double bnorm = std::sqrt(vdot(b, b));
    IterStats st;
    if (bnorm == 0) return st;

    std::vector<double> r = b, z(static_cast<size_t>(n)), p(static_cast<size_t>(n)), Ap(static_cast<size_t>(n));
    std::vector<double> jacobi;
    if (!prec) {
        jacobi.assign(size_t(n), 1.0);
        for (int64_t i = 0; i < n; ++i) {
            if (mask[size_t(i)]) continue;
            const double d = A.get(i, int32_t(i));
            if (d <= 0) throw std::runtime_error("cg_solve: nonpositive diagonal (field not elliptic?)");
            jacobi[size_t(i)] = 1.0 / d;
        }
    }
    auto precondition = [&](const std::vector<double>& rr, std::vector<double>& zz) {
        if (prec) {
            prec->solve(rr, zz);
        } else {
            zz.resize(static_cast<size_t>(n));
            for (int64_t i = 0; i < n; ++i) zz[size_t(i)] = rr[size_t(i)] * jacobi[size_t(i)];
        }
    };

    precondition(r, z);
    p = z;
    double rz = vdot(r, z);
    double rnorm = bnorm;
    while (rnorm / bnorm > tol) {
        if (++st.iterations > max_iter) {
            std::ostringstream os;
            os << "cg_solve: no convergence after " << max_iter
               << " iterations (relative residual " << rnorm / bnorm << ")";
            throw std::runtime_error(os.str());
        }
        A.apply_pinned(mask, p, Ap);
        const double pAp = vdot(p, Ap);
        if (pAp <= 0)
            throw std::runtime_error("cg_solve: indefinite operator encountered");
        const double alpha = rz / pAp;
        for (int64_t i = 0; i < n; ++i) {
            x[size_t(i)] += alpha * p[size_t(i)];
            r[size_t(i)] -= alpha * Ap[size_t(i)];
        }
        rnorm = std::sqrt(vdot(r, r));
        precondition(r, z);
        const double rz_new = vdot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int64_t i = 0; i < n; ++i) p[size_t(i)] = z[size_t(i)] + beta * p[size_t(i)];
    }
    st.relative_residual = rnorm / bnorm;
    return st;
}

IterStats minres_solve(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
    const std::vector<double>& diag_precond_inv, const std::vector<double>& b,
    std::vector<double>& x, double tol, long max_iter, const std::string& context) {
    const int64_t n = int64_t(b.size());
    x.assign(size_t(n), 0.0);
    IterStats st;
    const double bnorm = std::sqrt(vdot(b, b));
    if (bnorm == 0) return st;

    auto prec = [&](const std::vector<double>& r, std::vector<double>& z) {
        z.resize(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) z[size_t(i)] = r[size_t(i)] * diag_precond_inv[size_t(i)];
    };

    std::vector<double> r1 = b, r2 = b, y(static_cast<size_t>(n)), v(static_cast<size_t>(n)), w(size_t(n), 0.0),
        w1(size_t(n), 0.0), w2(size_t(n), 0.0), tmp(static_cast<size_t>(n));
    prec(b, y);
    double beta1 = vdot(b, y);
    if (beta1 < 0) throw std::logic_error("minres: preconditioner not positive definite");
    beta1 = std::sqrt(beta1);

    double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1, cs = -1, sn = 0;
    for (long it = 1; it <= max_iter; ++it) {
        st.iterations = it;
        for (int64_t i = 0; i < n; ++i) v[size_t(i)] = y[size_t(i)] / beta;
        apply(v, tmp);
        if (it >= 2)
            for (int64_t i = 0; i < n; ++i) tmp[size_t(i)] -= (beta / oldb) * r1[size_t(i)];
        const double alfa = vdot(v, tmp);
        for (int64_t i = 0; i < n; ++i) tmp[size_t(i)] -= (alfa / beta) * r2[size_t(i)];
        r1 = r2;
        r2 = tmp;
        prec(r2, y);
        oldb = beta;
        beta = vdot(r2, y);
        if (beta < 0) throw std::logic_error("minres: preconditioner not positive definite");
        beta = std::sqrt(beta);

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::sqrt(gbar * gbar + beta * beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        for (int64_t i = 0; i < n; ++i)
            w[size_t(i)] = (v[size_t(i)] - oldeps * w1[size_t(i)] - delta * w2[size_t(i)]) / gamma;
        for (int64_t i = 0; i < n; ++i) x[size_t(i)] += phi * w[size_t(i)];

        if (phibar / beta1 <= tol) break;
    }

    apply(x, tmp);
    double rn = 0;
    for (int64_t i = 0; i < n; ++i) {
        const double d = b[size_t(i)] - tmp[size_t(i)];
        rn += d * d;
    }
    st.relative_residual = std::sqrt(rn) / bnorm;
    if (st.relative_residual > 50.0 * tol) {
        std::ostringstream os;
        os << context << ": minres stalled at relative residual " << st.relative_residual
           << " after " << st.iterations << " iterations (near-singular operator?)";
        throw std::runtime_error(os.str());
    }
    return st;
}

}  // namespace homoglab

#include "homoglab/cell.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace homoglab {

namespace {

// Reference-element integrals for Q1 on [0,1]^d, evaluated once with 2-point
// Gauss per axis (exact for these integrands).
struct RefElement {
    int d;
    int nb;                                  // 2^d local basis functions
    std::vector<double> G;                   // [i][j][a][b] grad-grad integrals
    std::vector<double> g;                   // [i][a] int of d_i phi_a
    std::vector<double> dphi_center;         // [k][a] d_k phi_a at the midpoint

    double& Gref(int i, int j, int a, int b) {
        return G[size_t(((i * d + j) * nb + a) * nb + b)];
    }
    double Gref(int i, int j, int a, int b) const {
        return G[size_t(((i * d + j) * nb + a) * nb + b)];
    }

    explicit RefElement(int dim) : d(dim), nb(1 << dim) {
        G.assign(size_t(d * d * nb * nb), 0.0);
        g.assign(size_t(d * nb), 0.0);
        dphi_center.assign(size_t(d * nb), 0.0);
        const double q[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        const int nq = 1 << d;
        for (int p = 0; p < nq; ++p) {
            double x[kMaxDim];
            for (int i = 0; i < d; ++i) x[i] = q[(p >> i) & 1];
            const double w = 1.0 / double(nq);
            for (int a = 0; a < nb; ++a) {
                double da[kMaxDim];
                grad_phi(a, x, da);
                for (int i = 0; i < d; ++i) {
                    g[size_t(i * nb + a)] += w * da[i];
                    for (int b = 0; b < nb; ++b) {
                        double db[kMaxDim];
                        grad_phi(b, x, db);
                        for (int j = 0; j < d; ++j) Gref(i, j, a, b) += w * da[i] * db[j];
                    }
                }
            }
        }
        double c[kMaxDim];
        for (int i = 0; i < d; ++i) c[i] = 0.5;
        for (int a = 0; a < nb; ++a) {
            double da[kMaxDim];
            grad_phi(a, c, da);
            for (int k = 0; k < d; ++k) dphi_center[size_t(k * nb + a)] = da[k];
        }
    }

    void grad_phi(int a, const double* x, double* out) const {
        for (int k = 0; k < d; ++k) {
            double v = 1.0;
            for (int i = 0; i < d; ++i) {
                const bool hi = (a >> i) & 1;
                if (i == k) v *= hi ? 1.0 : -1.0;
                else v *= hi ? x[i] : 1.0 - x[i];
            }
            out[k] = v;
        }
    }
};

// ELL storage: each periodic node couples to its 3^d neighbours.
struct PeriodicOperator {
    int d, n;
    int64_t nodes;
    int stencil;                 // 3^d
    std::vector<double> vals;    // nodes * stencil
    std::vector<int64_t> cols;   // nodes * stencil
    std::vector<double> diag_inv;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
#pragma omp parallel for schedule(static)
        for (int64_t r = 0; r < nodes; ++r) {
            double s = 0;
            const size_t base = size_t(r) * size_t(stencil);
            for (int k = 0; k < stencil; ++k) s += vals[base + size_t(k)] * x[size_t(cols[base + size_t(k)])];
            y[size_t(r)] = s;
        }
    }
};

int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

void subtract_mean(std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= double(v.size());
    for (double& x : v) x -= m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Corrector solve_corrector(const CoefficientField& field, int n, double tol, long max_iter) {
    const int d = field.dim();
    if (d < 2 || d > 3) throw std::invalid_argument("solve_corrector: d in {2,3}");
    if (n < 8) throw std::invalid_argument("solve_corrector: n >= 8");
    if (max_iter < 0) max_iter = 10L * long(n) * long(n);

    const RefElement ref(d);
    const int nb = ref.nb;
    const double h = 1.0 / double(n);
    const int64_t N = ipow(n, d);
    const double hK = std::pow(h, d - 2);  // stiffness scale
    const double hF = std::pow(h, d - 1);  // rhs scale

    PeriodicOperator op;
    op.d = d;
    op.n = n;
    op.nodes = N;
    op.stencil = int(ipow(3, d));
    op.vals.assign(size_t(N) * size_t(op.stencil), 0.0);
    op.cols.assign(size_t(N) * size_t(op.stencil), 0);

    std::vector<std::vector<double>> rhs(static_cast<size_t>(d));
    for (auto& r : rhs) r.assign(size_t(N), 0.0);

    // node flat index from a (possibly out-of-range) multi-index, wrapped
    auto node_of = [&](const int* m) {
        int64_t idx = 0;
        for (int i = d - 1; i >= 0; --i) {
            int c = m[i] % n;
            if (c < 0) c += n;
            idx = idx * n + c;
        }
        return idx;
    };

    // precompute stencil columns
    {
        int m[kMaxDim];
        for (int64_t node = 0; node < N; ++node) {
            int64_t rem = node;
            for (int i = 0; i < d; ++i) {
                m[i] = int(rem % n);
                rem /= n;
            }
            for (int s = 0; s < op.stencil; ++s) {
                int mm[kMaxDim];
                int t = s;
                for (int i = 0; i < d; ++i) {
                    mm[i] = m[i] + (t % 3) - 1;
                    t /= 3;
                }
                op.cols[size_t(node) * size_t(op.stencil) + size_t(s)] = node_of(mm);
            }
        }
    }

    // assemble cell by cell; the offset between local nodes a and b indexes
    // the stencil slot directly
    {
        int m[kMaxDim];
        Vec yc(d);
        for (int64_t cell = 0; cell < N; ++cell) {
            int64_t rem = cell;
            for (int i = 0; i < d; ++i) {
                m[i] = int(rem % n);
                rem /= n;
            }
            for (int i = 0; i < d; ++i) yc[i] = (double(m[i]) + 0.5) * h;
            const Mat A = field.evaluate(yc);

            int64_t local_node[1 << kMaxDim];
            for (int a = 0; a < nb; ++a) {
                int mm[kMaxDim];
                for (int i = 0; i < d; ++i) mm[i] = m[i] + ((a >> i) & 1);
                local_node[a] = node_of(mm);
            }
            for (int a = 0; a < nb; ++a) {
                const int64_t row = local_node[a];
                for (int b = 0; b < nb; ++b) {
                    double kab = 0;
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j)
                            kab += A(i, j) * ref.Gref(i, j, a, b);
                    int slot = 0, p3 = 1;
                    for (int i = 0; i < d; ++i) {
                        slot += (((b >> i) & 1) - ((a >> i) & 1) + 1) * p3;
                        p3 *= 3;
                    }
                    op.vals[size_t(row) * size_t(op.stencil) + size_t(slot)] += hK * kab;
                }
                for (int j = 0; j < d; ++j) {
                    double f = 0;
                    for (int i = 0; i < d; ++i) f += A(i, j) * ref.g[size_t(i * nb + a)];
                    rhs[size_t(j)][size_t(row)] -= hF * f;
                }
            }
        }
    }

    op.diag_inv.assign(size_t(N), 0.0);
    {
        const int self = (op.stencil - 1) / 2;
        for (int64_t r = 0; r < N; ++r) {
            const double dv = op.vals[size_t(r) * size_t(op.stencil) + size_t(self)];
            if (dv <= 0)
                throw std::runtime_error("solve_corrector: non-elliptic field detected (nonpositive diagonal)");
            op.diag_inv[size_t(r)] = 1.0 / dv;
        }
    }

    Corrector out;
    out.d = d;
    out.n = n;
    out.chi.resize(size_t(d));
    out.means.assign(size_t(d), 0.0);

    std::vector<double> x(static_cast<size_t>(N)), r(static_cast<size_t>(N)),
        z(static_cast<size_t>(N)), p(static_cast<size_t>(N)), Ap(static_cast<size_t>(N));
    for (int j = 0; j < d; ++j) {
        std::vector<double>& b = rhs[size_t(j)];
        subtract_mean(b);
        const double bnorm = std::sqrt(dot(b, b));
        std::fill(x.begin(), x.end(), 0.0);
        double rel = 0.0;
        if (bnorm > 0) {
            r = b;
            for (int64_t i = 0; i < N; ++i) z[size_t(i)] = r[size_t(i)] * op.diag_inv[size_t(i)];
            subtract_mean(z);
            p = z;
            double rz = dot(r, z);
            long it = 0;
            double rnorm = bnorm;
            while (rnorm / bnorm > tol) {
                if (++it > max_iter) {
                    std::ostringstream os;
                    os << "solve_corrector: no convergence after " << max_iter
                       << " iterations, last relative residual " << rnorm / bnorm;
                    throw std::runtime_error(os.str());
                }
                op.apply(p, Ap);
                const double pAp = dot(p, Ap);
                if (pAp <= 0)
                    throw std::runtime_error(
                        "solve_corrector: non-elliptic field detected (indefinite operator)");
                const double alpha = rz / pAp;
                for (int64_t i = 0; i < N; ++i) {
                    x[size_t(i)] += alpha * p[size_t(i)];
                    r[size_t(i)] -= alpha * Ap[size_t(i)];
                }
                rnorm = std::sqrt(dot(r, r));
                for (int64_t i = 0; i < N; ++i) z[size_t(i)] = r[size_t(i)] * op.diag_inv[size_t(i)];
                subtract_mean(z);
                const double rz_new = dot(r, z);
                const double beta = rz_new / rz;
                rz = rz_new;
                for (int64_t i = 0; i < N; ++i) p[size_t(i)] = z[size_t(i)] + beta * p[size_t(i)];
            }
            rel = rnorm / bnorm;
        }
        double mean = 0;
        for (double v : x) mean += v;
        mean /= double(N);
        for (double& v : x) v -= mean;
        double m2 = 0;
        for (double v : x) m2 += v;
        out.means[size_t(j)] = m2 / double(N);
        out.chi[size_t(j)] = x;
        out.residual = std::max(out.residual, rel);
    }
    return out;
}

namespace {

// midpoint gradient of a periodic grid function on cell `m`
void cell_gradient(const RefElement& ref, const std::vector<double>& u, int n, int d,
                   const int* m, double h, double* grad) {
    const int nb = ref.nb;
    for (int k = 0; k < d; ++k) grad[k] = 0;
    for (int a = 0; a < nb; ++a) {
        int64_t idx = 0;
        for (int i = d - 1; i >= 0; --i) {
            int c = (m[i] + ((a >> i) & 1)) % n;
            idx = idx * n + c;
        }
        const double ua = u[size_t(idx)];
        for (int k = 0; k < d; ++k)
            grad[k] += ua * ref.dphi_center[size_t(k * nb + a)];
    }
    for (int k = 0; k < d; ++k) grad[k] /= h;
}

}  // namespace

HomogenizedTensor homogenize(const CoefficientField& field, const Corrector& corrector) {
    const int d = field.dim();
    if (corrector.d != d) throw std::invalid_argument("homogenize: corrector dimension mismatch");
    const int n = corrector.n;
    const RefElement ref(d);
    const double h = 1.0 / double(n);
    const int64_t N = ipow(n, d);

    Mat acc(d);
    int m[kMaxDim];
    Vec yc(d);
    double grad[kMaxDim];
    for (int64_t cell = 0; cell < N; ++cell) {
        int64_t rem = cell;
        for (int i = 0; i < d; ++i) {
            m[i] = int(rem % n);
            rem /= n;
        }
        for (int i = 0; i < d; ++i) yc[i] = (double(m[i]) + 0.5) * h;
        const Mat A = field.evaluate(yc);
        for (int j = 0; j < d; ++j) {
            cell_gradient(ref, corrector.chi[size_t(j)], n, d, m, h, grad);
            for (int i = 0; i < d; ++i) {
                double v = A(i, j);
                for (int k = 0; k < d; ++k) v += A(i, k) * grad[k];
                acc(i, j) += v;
            }
        }
    }
    Mat Ahat = acc * (1.0 / double(N));
    Ahat = (Ahat + Ahat.transposed()) * 0.5;
    return make_tensor(Ahat, field.lambda());
}

HomogenizedTensor make_tensor(const Mat& A, double lambda) {
    HomogenizedTensor t;
    t.A = (A + A.transposed()) * 0.5;
    t.lambda = lambda;
    const SymEig e = sym_eigen(t.A);
    t.eig_min = e.values[0];
    t.eig_max = e.values[A.d - 1];
    const double tol = 1e-6;
    if (t.eig_min < lambda - tol || t.eig_max > 1.0 / lambda + tol) {
        std::ostringstream os;
        os.precision(17);
        os << "homogenized tensor eigenvalues [" << t.eig_min << ", " << t.eig_max
           << "] leave the band [" << lambda << ", " << 1.0 / lambda
           << "]; corrector likely under-resolved";
        throw std::runtime_error(os.str());
    }
    t.S = sym_inverse_sqrt(t.A);
    t.det_S = det(t.S);
    const Mat check = t.S * t.A * t.S.transposed() - Mat::identity(A.d);
    if (check.frobenius() > 1e-10)
        throw std::runtime_error("make_tensor: S A S^T deviates from identity beyond 1e-10");
    return t;
}

double corrector_energy(const CoefficientField& field, const Corrector& corrector,
                        const Vec& xi) {
    const int d = field.dim();
    const int n = corrector.n;
    const RefElement ref(d);
    const int nb = ref.nb;
    const double h = 1.0 / double(n);
    const int64_t N = ipow(n, d);
    const double hK = std::pow(h, d - 2), hF = std::pow(h, d - 1), hV = std::pow(h, d);

    // chi_xi = sum_j xi_j chi_j
    std::vector<double> u(static_cast<size_t>(N), 0.0);
    for (int j = 0; j < d; ++j)
        for (int64_t i = 0; i < N; ++i) u[size_t(i)] += xi[j] * corrector.chi[size_t(j)][size_t(i)];

    double energy = 0;
    int m[kMaxDim];
    Vec yc(d);
    for (int64_t cell = 0; cell < N; ++cell) {
        int64_t rem = cell;
        for (int i = 0; i < d; ++i) {
            m[i] = int(rem % n);
            rem /= n;
        }
        for (int i = 0; i < d; ++i) yc[i] = (double(m[i]) + 0.5) * h;
        const Mat A = field.evaluate(yc);

        double ua[1 << kMaxDim];
        for (int a = 0; a < nb; ++a) {
            int64_t idx = 0;
            for (int i = d - 1; i >= 0; --i) {
                int c = (m[i] + ((a >> i) & 1)) % n;
                idx = idx * n + c;
            }
            ua[a] = u[size_t(idx)];
        }
        // grad-grad term
        for (int a = 0; a < nb; ++a)
            for (int b = 0; b < nb; ++b) {
                double kab = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) kab += A(i, j) * ref.Gref(i, j, a, b);
                energy += hK * kab * ua[a] * ua[b];
            }
        // cross term 2 xi^T A grad(chi)
        for (int a = 0; a < nb; ++a) {
            double f = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) f += xi[i] * A(i, j) * ref.g[size_t(j * nb + a)];
            energy += 2.0 * hF * f * ua[a];
        }
        energy += hV * A.quad(xi);
    }
    return energy;
}

}  // namespace homoglab

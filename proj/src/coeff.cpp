#include "homoglab/coeff.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "homoglab/sampling.hpp"

namespace homoglab {

namespace {

double wrap01(double t) {
    const double w = t - std::floor(t);
    return (w < 1.0) ? w : 0.0;
}

Vec wrap01(const Vec& y) {
    Vec w(y.d);
    for (int i = 0; i < y.d; ++i) w[i] = wrap01(y[i]);
    return w;
}

int upper_index(int i, int j, int d) {
    // row-major upper triangle, i <= j
    return i * d - i * (i - 1) / 2 + (j - i);
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Constant: return "constant";
        case Family::Matrix: return "matrix";
        case Family::Laminate: return "laminate";
        case Family::Trigonometric: return "trigonometric";
        case Family::Block: return "block";
        case Family::Reflected: return "reflected";
        case Family::Expression: return "expression";
    }
    return "?";
}

CoefficientField CoefficientField::constant_diag(const std::vector<double>& entries) {
    if (entries.size() < 2 || entries.size() > size_t(kMaxDim))
        throw std::invalid_argument("constant_diag: need 2..4 diagonal entries");
    double lo = entries[0], hi = entries[0];
    for (double e : entries) {
        if (e <= 0) throw std::invalid_argument("constant_diag: entries must be positive");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    CoefficientField f;
    f.family_ = Family::Constant;
    f.d_ = int(entries.size());
    f.params_ = entries;
    f.lambda_ = std::min(lo, 1.0 / hi);
    f.tau_ = 0.0;
    f.mu_ = 1.0;
    f.block_ = true;  // diagonal fields trivially have the half-ball structure
    return f;
}

CoefficientField CoefficientField::constant_matrix(const Mat& A) {
    const int d = A.d;
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("constant_matrix: d in 2..4");
    const Mat S = (A + A.transposed()) * 0.5;
    const SymEig e = sym_eigen(S);
    if (e.values[0] <= 0) throw std::invalid_argument("constant_matrix: not positive definite");
    CoefficientField f;
    f.family_ = Family::Matrix;
    f.d_ = d;
    f.params_.assign(size_t(d) * size_t(d), 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) f.params_[size_t(i * d + j)] = S(i, j);
    f.lambda_ = std::min(e.values[0], 1.0 / e.values[d - 1]);
    f.tau_ = 0.0;
    f.mu_ = 1.0;
    f.block_ = true;
    for (int i = 0; i < d - 1; ++i)
        if (S(i, d - 1) != 0.0) f.block_ = false;
    return f;
}

CoefficientField CoefficientField::laminate(double base, double amplitude) {
    if (base - std::abs(amplitude) <= 0)
        throw std::invalid_argument("laminate: base - |amplitude| must be positive");
    CoefficientField f;
    f.family_ = Family::Laminate;
    f.d_ = 2;
    f.params_ = {base, amplitude};
    const double lo = base - std::abs(amplitude), hi = base + std::abs(amplitude);
    f.lambda_ = std::min(lo, 1.0 / hi);
    f.tau_ = 2.0 * std::sqrt(2.0) * kPi * std::abs(amplitude);  // Frobenius norm
    f.mu_ = 1.0;
    f.block_ = true;
    return f;
}

CoefficientField CoefficientField::trigonometric(double rho) {
    if (rho <= 0 || rho >= 1) throw std::invalid_argument("trigonometric: rho in (0,1)");
    CoefficientField f;
    f.family_ = Family::Trigonometric;
    f.d_ = 2;
    f.params_ = {rho};
    f.lambda_ = std::min(1.0 - rho, 1.0 / (1.0 + rho));
    f.tau_ = 2.0 * std::sqrt(2.0) * kPi * rho;
    f.mu_ = 1.0;
    f.block_ = true;
    return f;
}

CoefficientField CoefficientField::block(double rho) {
    if (rho <= 0 || rho >= 1) throw std::invalid_argument("block: rho in (0,1)");
    CoefficientField f;
    f.family_ = Family::Block;
    f.d_ = 2;
    f.params_ = {rho};
    f.lambda_ = std::min(1.0 - rho, 1.0 / (1.0 + rho));
    f.tau_ = 2.0 * kPi * rho;
    f.mu_ = 1.0;
    f.block_ = true;
    return f;
}

CoefficientField CoefficientField::expression(int d, const std::vector<std::string>& entries,
                                              double lambda, double tau, double mu,
                                              bool block_structure) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("expression: d in 2..4");
    if (int(entries.size()) != d * (d + 1) / 2)
        throw std::invalid_argument("expression: need d*(d+1)/2 upper-triangle entries");
    if (lambda <= 0 || lambda >= 1) throw std::invalid_argument("expression: lambda in (0,1)");
    if (mu <= 0 || mu > 1) throw std::invalid_argument("expression: mu in (0,1]");
    CoefficientField f;
    f.family_ = Family::Expression;
    f.d_ = d;
    f.lambda_ = lambda;
    f.tau_ = tau;
    f.mu_ = mu;
    f.block_ = block_structure;
    for (const auto& s : entries) f.exprs_.push_back(Expr::parse(s, d));
    if (block_structure) {
        // the flag is a promise about the evaluator; spot-check it
        for (uint64_t k = 0; k < 128; ++k) {
            const Mat A = f.evaluate(halton(k + 1, d));
            for (int i = 0; i < d - 1; ++i)
                if (std::abs(A(i, d - 1)) > 0.0)
                    throw std::invalid_argument(
                        "expression: block flag set but a_{id} != 0 at a sample point");
        }
    }
    return f;
}

Mat CoefficientField::evaluate(const Vec& y) const {
    if (y.d != d_) throw std::invalid_argument("evaluate: point dimension mismatch");
    switch (family_) {
        case Family::Constant: {
            Mat A(d_);
            for (int i = 0; i < d_; ++i) A(i, i) = params_[size_t(i)];
            return A;
        }
        case Family::Matrix: {
            Mat A(d_);
            for (int i = 0; i < d_; ++i)
                for (int j = 0; j < d_; ++j) A(i, j) = params_[size_t(i * d_ + j)];
            return A;
        }
        case Family::Laminate: {
            const double a = params_[0] + params_[1] * std::sin(2.0 * kPi * wrap01(y[0]));
            Mat A(2);
            A(0, 0) = A(1, 1) = a;
            return A;
        }
        case Family::Trigonometric: {
            const double s = 1.0 + params_[0] * std::sin(2.0 * kPi * wrap01(y[0])) *
                                       std::sin(2.0 * kPi * wrap01(y[1]));
            Mat A(2);
            A(0, 0) = A(1, 1) = s;
            return A;
        }
        case Family::Block: {
            Mat A(2);
            A(0, 0) = 1.0 + params_[0] * std::sin(2.0 * kPi * wrap01(y[0]));
            A(1, 1) = 1.0 + params_[0] * std::cos(2.0 * kPi * wrap01(y[1]));
            return A;
        }
        case Family::Reflected: {
            Vec z = y;
            z[d_ - 1] = std::abs(y[d_ - 1]);
            return base_->evaluate(z);
        }
        case Family::Expression: {
            const Vec w = wrap01(y);
            Mat A(d_);
            for (int i = 0; i < d_; ++i)
                for (int j = i; j < d_; ++j) {
                    const double v = exprs_[size_t(upper_index(i, j, d_))].eval(w);
                    A(i, j) = v;
                    A(j, i) = v;
                }
            return A;
        }
    }
    throw std::logic_error("evaluate: unknown family");
}

bool CoefficientField::oscillating() const {
    return family_ != Family::Constant && family_ != Family::Matrix;
}

std::string CoefficientField::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case Family::Constant: {
            os << "constant";
            for (double p : params_) os << " " << p;
            break;
        }
        case Family::Matrix: {
            os << "matrix " << d_;
            for (double p : params_) os << " " << p;
            break;
        }
        case Family::Laminate: os << "laminate " << params_[0] << " " << params_[1]; break;
        case Family::Trigonometric: os << "trigonometric " << params_[0]; break;
        case Family::Block: os << "block " << params_[0]; break;
        case Family::Reflected: os << "reflected { " << base_->describe() << " }"; break;
        case Family::Expression: {
            os << "expression d=" << d_ << " lambda=" << lambda_ << " tau=" << tau_
               << " mu=" << mu_ << " block=" << (block_ ? 1 : 0);
            for (const auto& e : exprs_) os << " ; " << e.text();
            break;
        }
    }
    return os.str();
}

EllipticityReport verify_ellipticity(const CoefficientField& field, int sample_count,
                                     uint64_t seed) {
    if (sample_count < 1) throw std::invalid_argument("verify_ellipticity: sample_count >= 1");
    const int d = field.dim();
    const double lo = field.lambda(), hi = 1.0 / field.lambda();
    Rng rng(seed);
    EllipticityReport rep;
    rep.min_rayleigh = std::numeric_limits<double>::infinity();
    rep.max_rayleigh = -std::numeric_limits<double>::infinity();
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < sample_count; ++k) {
        const Vec y = halton(uint64_t(k) + 1, d);
        const Vec xi = rng.unit_vector(d);
        const Mat A = field.evaluate(y);
        const double q = A.quad(xi);
        rep.min_rayleigh = std::min(rep.min_rayleigh, q);
        rep.max_rayleigh = std::max(rep.max_rayleigh, q);
        const double excess = std::max(lo - q, q - hi);
        if (excess > worst_excess) {
            worst_excess = excess;
            rep.worst_y = y;
            rep.worst_xi = xi;
            rep.worst_quotient = q;
        }
    }
    const double slack = 1e-12 * std::max(1.0, hi);
    rep.pass = (rep.min_rayleigh >= lo - slack) && (rep.max_rayleigh <= hi + slack);
    if (!rep.pass) {
        std::ostringstream os;
        os.precision(17);
        os << "Rayleigh quotient " << rep.worst_quotient << " outside [" << lo << ", " << hi
           << "] at y = (";
        for (int i = 0; i < d; ++i) os << (i ? ", " : "") << rep.worst_y[i];
        os << "), xi = (";
        for (int i = 0; i < d; ++i) os << (i ? ", " : "") << rep.worst_xi[i];
        os << ")";
        rep.violation = os.str();
    }
    return rep;
}

double estimate_holder(const CoefficientField& field, double mu, int pair_count,
                       uint64_t seed) {
    if (mu <= 0 || mu > 1.0) throw std::invalid_argument("estimate_holder: mu in (0,1]");
    if (pair_count < 1) throw std::invalid_argument("estimate_holder: pair_count >= 1");
    const int d = field.dim();
    Rng rng(seed);
    double tau_hat = 0.0;
    for (int k = 0; k < pair_count; ++k) {
        Vec a = halton(uint64_t(k) + 1, d);
        for (int i = 0; i < d; ++i) a[i] = 2.0 * a[i] - 1.0;  // cover the reflection seam
        const double scale = std::pow(10.0, rng.uniform(-3.0, std::log10(0.5)));
        const Vec b = a + rng.unit_vector(d) * scale;
        const double dist = (a - b).norm();
        if (dist < 1e-14) continue;
        const double q = (field.evaluate(a) - field.evaluate(b)).frobenius() /
                         std::pow(dist, mu);
        tau_hat = std::max(tau_hat, q);
    }
    return tau_hat;
}

CoefficientField reflect_even(const CoefficientField& field) {
    if (!field.block_structure())
        throw std::invalid_argument(
            "reflect_even: field must have block-diagonal-in-x_d structure");
    CoefficientField f;
    f.family_ = Family::Reflected;
    f.d_ = field.dim();
    f.lambda_ = field.lambda();
    f.tau_ = 2.0 * field.tau();
    f.mu_ = field.mu();
    f.block_ = true;
    f.base_ = std::make_shared<CoefficientField>(field);
    return f;
}

CoefficientField parse_field_descriptor(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    if (kind == "constant") {
        std::vector<double> entries;
        double v;
        while (is >> v) entries.push_back(v);
        return CoefficientField::constant_diag(entries);
    }
    if (kind == "matrix") {
        int d;
        if (!(is >> d)) throw std::invalid_argument("matrix: expected dimension");
        Mat A(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (!(is >> A(i, j))) throw std::invalid_argument("matrix: expected d*d entries");
        return CoefficientField::constant_matrix(A);
    }
    if (kind == "laminate") {
        double base, amp;
        if (!(is >> base >> amp)) throw std::invalid_argument("laminate: expected base amp");
        return CoefficientField::laminate(base, amp);
    }
    if (kind == "trigonometric") {
        double rho;
        if (!(is >> rho)) throw std::invalid_argument("trigonometric: expected rho");
        return CoefficientField::trigonometric(rho);
    }
    if (kind == "block") {
        double rho;
        if (!(is >> rho)) throw std::invalid_argument("block: expected rho");
        return CoefficientField::block(rho);
    }
    if (kind == "reflected") {
        const size_t open = text.find('{'), close = text.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close <= open)
            throw std::invalid_argument("reflected: expected { base descriptor }");
        return reflect_even(parse_field_descriptor(text.substr(open + 1, close - open - 1)));
    }
    if (kind == "expression") {
        int d = 0, block = 0;
        double lambda = 0, tau = 0, mu = 0;
        std::string tok;
        while (is >> tok && tok != ";") {
            const size_t eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("expression: expected key=value, got " + tok);
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "d") d = std::stoi(val);
            else if (key == "lambda") lambda = std::stod(val);
            else if (key == "tau") tau = std::stod(val);
            else if (key == "mu") mu = std::stod(val);
            else if (key == "block") block = std::stoi(val);
            else throw std::invalid_argument("expression: unknown key " + key);
        }
        std::vector<std::string> entries;
        const size_t first = text.find(';');
        if (first == std::string::npos)
            throw std::invalid_argument("expression: missing entries");
        size_t pos = first + 1;
        while (true) {
            const size_t next = text.find(';', pos);
            entries.push_back(text.substr(pos, next == std::string::npos ? next : next - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return CoefficientField::expression(d, entries, lambda, tau, mu, block != 0);
    }
    throw std::invalid_argument("unknown field family: " + kind);
}

}  // namespace homoglab

#include "homoglab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace homoglab {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        os << content;
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_ufield(const std::string& path, const DiscreteField& u) {
    if (u.lifted())
        throw std::invalid_argument("dump_ufield: lifted fields are not dumped; dump the base");
    std::ostringstream os;
    os << "UFIELD v1\n";
    os << "d 2\n";
    os << "domain " << u.mesh->domain().describe() << "\n";
    os << "nr " << u.mesh->rings() << " nsec " << u.mesh->sectors_full() << "\n";
    os << "h " << fmt(u.mesh->h()) << "\n";
    os << "eps " << fmt(u.meta.eps) << "\n";
    os << "field " << u.meta.field_desc << "\n";
    os << "bc " << u.meta.bc << "\n";
    os << "source " << u.meta.source << "\n";
    os << "lambda_k " << fmt(u.meta.lambda_k) << "\n";
    os << "boundary " << u.meta.boundary_desc << "\n";
    os << "nodes " << u.nodes() << "\n";
    for (int64_t i = 0; i < u.nodes(); ++i) {
        const Vec x = u.mesh->node(i);
        os << fmt(x[0]) << " " << fmt(x[1]) << " " << fmt(u.values[size_t(i)]) << "\n";
    }
    write_file_atomic(path, os.str());
}

namespace {

std::string header_value(std::istream& is, const std::string& key) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("UFIELD: truncated header");
    if (line.rfind(key + " ", 0) != 0 && line != key)
        throw std::runtime_error("UFIELD: expected '" + key + "', got '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : "";
}

}  // namespace

DiscreteField load_ufield(const std::string& path) {
    std::istringstream is(read_file(path));
    std::string line;
    std::getline(is, line);
    if (line != "UFIELD v1") throw std::runtime_error("UFIELD: bad magic in " + path);
    header_value(is, "d");
    const std::string domain_text = header_value(is, "domain");
    std::istringstream grid(header_value(is, "nr"));
    int nr;
    std::string nsec_word;
    int nsec;
    grid >> nr >> nsec_word >> nsec;
    const double h = std::stod(header_value(is, "h"));
    const double eps = std::stod(header_value(is, "eps"));
    const std::string field_desc = header_value(is, "field");
    const std::string bc = header_value(is, "bc");
    const std::string source = header_value(is, "source");
    const double lambda_k = std::stod(header_value(is, "lambda_k"));
    const std::string boundary_desc = header_value(is, "boundary");
    const int64_t n = std::stoll(header_value(is, "nodes"));

    DiscreteField u;
    u.mesh = PolarMesh::build(Domain::parse(domain_text), h);
    if (u.mesh->node_count() != n || u.mesh->rings() != nr || u.mesh->sectors_full() != nsec) {
        std::ostringstream os;
        os << "UFIELD: mesh mismatch in " << path << " (file: nodes=" << n << " nr=" << nr
           << " nsec=" << nsec << "; rebuilt: nodes=" << u.mesh->node_count()
           << " nr=" << u.mesh->rings() << " nsec=" << u.mesh->sectors_full() << ")";
        throw std::runtime_error(os.str());
    }
    u.values.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        double x, y, v;
        if (!(is >> x >> y >> v)) throw std::runtime_error("UFIELD: truncated node table");
        const Vec p = u.mesh->node(i);
        if (std::abs(x - p[0]) > 1e-9 || std::abs(y - p[1]) > 1e-9)
            throw std::runtime_error("UFIELD: node coordinates disagree with the mesh");
        u.values[size_t(i)] = v;
    }
    u.coeff = parse_field_descriptor(field_desc);
    u.meta.eps = eps;
    u.meta.field_desc = field_desc;
    u.meta.bc = bc;
    u.meta.source = source;
    u.meta.lambda_k = lambda_k;
    u.meta.boundary_desc = boundary_desc;
    return u;
}

std::string corrector_text(const Corrector& c, const std::string& field_desc) {
    std::ostringstream os;
    os << "CORRECTOR v1\n";
    os << "d " << c.d << "\n";
    os << "n " << c.n << "\n";
    os << "field " << field_desc << "\n";
    os << "residual " << fmt(c.residual) << "\n";
    for (int j = 0; j < c.d; ++j) {
        os << "chi " << j + 1 << "\n";
        const auto& v = c.chi[size_t(j)];
        for (size_t i = 0; i < v.size(); ++i)
            os << fmt(v[i]) << ((i + 1) % 8 == 0 || i + 1 == v.size() ? "\n" : " ");
    }
    return os.str();
}

void dump_corrector(const std::string& path, const Corrector& c, const std::string& field_desc) {
    write_file_atomic(path, corrector_text(c, field_desc));
}

json tensor_to_json(const HomogenizedTensor& t) {
    json j;
    const int d = t.A.d;
    j["d"] = d;
    for (int i = 0; i < d; ++i) {
        json row_a = json::array(), row_s = json::array();
        for (int k = 0; k < d; ++k) {
            row_a.push_back(t.A(i, k));
            row_s.push_back(t.S(i, k));
        }
        j["A"].push_back(row_a);
        j["S"].push_back(row_s);
    }
    j["eig_min"] = t.eig_min;
    j["eig_max"] = t.eig_max;
    j["det_S"] = t.det_S;
    j["lambda"] = t.lambda;
    return j;
}

json audit_to_json(const AuditReport& rep) {
    json j;
    j["kind"] = rep.kind;
    j["radii"] = {rep.radius_a, rep.radius_b, rep.radius_c};
    j["lambda"] = rep.lambda;
    j["center"] = {rep.center[0], rep.center[1]};
    j["eps"] = rep.eps;
    j["eps_term"] = rep.eps_term;
    j["delta"] = rep.delta;
    j["mid"] = rep.mid;
    j["M"] = rep.M;
    j["counts"] = {rep.count_inner, rep.count_mid, rep.count_outer};
    j["exponent"] = rep.exponent;
    j["m0"] = rep.selection.m0_defined ? json(rep.selection.m0) : json();
    j["m1"] = rep.selection.m1_defined ? json(rep.selection.m1) : json();
    j["case"] = rep.selection.case_id;
    j["term1"] = rep.term1;
    j["term2"] = rep.term2;
    j["c_hat"] = rep.c_hat_defined ? json(rep.c_hat) : json();
    j["case1_consistent"] = rep.case1_consistent;
    j["case2_consistent"] = rep.case2_consistent;
    j["field"] = rep.field_desc;
    j["boundary"] = rep.boundary_desc;
    return j;
}

json sweep_to_json(const SweepResult& s) {
    json j;
    j["tensor"] = tensor_to_json(s.tensor);
    j["rows"] = json::array();
    for (const SweepRow& r : s.rows) {
        json row;
        row["eps"] = r.eps;
        row["ok"] = r.ok;
        row["error"] = r.error;
        row["h"] = r.h;
        row["delta"] = r.delta;
        row["mid"] = r.mid;
        row["M"] = r.M;
        row["term1"] = r.term1;
        row["term2"] = r.term2;
        row["c_hat"] = r.c_hat;
        row["defect"] = r.defect;
        row["m0"] = r.m0;
        row["m1"] = r.m1;
        row["case"] = r.case_id;
        j["rows"].push_back(row);
    }
    j["slope_defined"] = s.slope_defined;
    j["slope"] = s.slope;
    j["floor_limited"] = s.floor_limited;
    j["c_hat_min"] = s.c_hat_min;
    j["c_hat_max"] = s.c_hat_max;
    return j;
}

std::string sweep_to_csv(const SweepResult& s) {
    std::ostringstream os;
    os << "eps,delta,mid,M,term1,term2,c_hat,kernel_defect\n";
    for (const SweepRow& r : s.rows) {
        if (!r.ok) {
            os << fmt(r.eps) << ",failed,,,,,,\n";
            continue;
        }
        os << fmt(r.eps) << "," << fmt(r.delta) << "," << fmt(r.mid) << "," << fmt(r.M) << ","
           << fmt(r.term1) << "," << fmt(r.term2) << "," << fmt(r.c_hat) << "," << fmt(r.defect)
           << "\n";
    }
    return os.str();
}

json chain_to_json(const ChainReport& chain) {
    json j;
    j["m"] = chain.m;
    j["beta"] = chain.beta;
    j["r"] = chain.r;
    j["target"] = {chain.target[0], chain.target[1]};
    j["c_hat_max"] = chain.c_hat_max;
    j["iterated_bound"] = chain.iterated_bound;
    j["closed_form_bound"] = chain.closed_form_bound;
    j["user_C"] = chain.user_C;
    j["steps"] = json::array();
    for (const AuditReport& rep : chain.steps) j["steps"].push_back(audit_to_json(rep));
    return j;
}

std::string chain_to_csv(const ChainReport& chain) {
    std::ostringstream os;
    os << "step,center_x,center_y,delta,mid,M,term1,term2,c_hat\n";
    for (size_t i = 0; i < chain.steps.size(); ++i) {
        const AuditReport& r = chain.steps[i];
        os << i + 1 << "," << fmt(r.center[0]) << "," << fmt(r.center[1]) << "," << fmt(r.delta)
           << "," << fmt(r.mid) << "," << fmt(r.M) << "," << fmt(r.term1) << "," << fmt(r.term2)
           << "," << (r.c_hat_defined ? fmt(r.c_hat) : "undefined") << "\n";
    }
    return os.str();
}

}  // namespace homoglab

#include "homoglab/mesh.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace homoglab {

Domain Domain::disk(double R) {
    if (R <= 0) throw std::invalid_argument("Domain::disk: radius must be positive");
    Domain d;
    d.kind = DomainKind::Disk;
    d.radius = R;
    d.map = Mat::identity(2) * R;
    return d;
}

Domain Domain::half_disk(double R) {
    Domain d = disk(R);
    d.kind = DomainKind::HalfDisk;
    return d;
}

Domain Domain::ellipsoid(const Ellipsoid& E) {
    if (E.dim() != 2)
        throw std::invalid_argument("Domain::ellipsoid: only d = 2 ellipsoid meshes");
    Domain d;
    d.kind = DomainKind::EllipsoidDomain;
    d.radius = E.radius();
    d.map = E.S_inv() * E.radius();
    return d;
}

std::string Domain::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case DomainKind::Disk: os << "disk " << radius; break;
        case DomainKind::HalfDisk: os << "half-disk " << radius; break;
        case DomainKind::EllipsoidDomain:
            os << "ellipsoid " << radius;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) os << " " << map(i, j) / radius;
            break;
        case DomainKind::Box: os << "box"; break;
    }
    return os.str();
}

Domain Domain::parse(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    if (kind == "disk" || kind == "half-disk") {
        double R;
        if (!(is >> R)) throw std::invalid_argument("domain: expected radius");
        return kind == "disk" ? disk(R) : half_disk(R);
    }
    if (kind == "ellipsoid") {
        Domain d;
        d.kind = DomainKind::EllipsoidDomain;
        if (!(is >> d.radius)) throw std::invalid_argument("domain: expected radius");
        d.map = Mat(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                if (!(is >> d.map(i, j))) throw std::invalid_argument("domain: expected map");
                d.map(i, j) *= d.radius;
            }
        return d;
    }
    throw std::invalid_argument("domain: unknown kind " + kind);
}

std::shared_ptr<const PolarMesh> PolarMesh::build(const Domain& dom, double h) {
    if (h <= 0) throw std::invalid_argument("PolarMesh: h must be positive");
    auto mesh = std::make_shared<PolarMesh>();
    mesh->dom_ = dom;
    mesh->h_ = h;
    mesh->half_ = (dom.kind == DomainKind::HalfDisk);

    // largest singular value of the map sets the physical scale
    const SymEig e = sym_eigen(dom.map.transposed() * dom.map);
    const double s_max = std::sqrt(e.values[1]);
    mesh->nr_ = std::max(2, int(std::ceil(s_max / h - 1e-9)));
    mesh->nsec_ = 2 * std::max(4, int(std::ceil(kPi * mesh->nr_)));
    mesh->nsec_eff_ = mesh->half_ ? mesh->nsec_ / 2 : mesh->nsec_;
    mesh->npr_ = mesh->half_ ? mesh->nsec_ / 2 + 1 : mesh->nsec_;
    mesh->map_inv_ = sym_inverse(dom.map * (1.0 / dom.radius)) * (1.0 / dom.radius);

    const int nr = mesh->nr_, npr = mesh->npr_, nsec_eff = mesh->nsec_eff_;
    const int64_t n_nodes = 1 + int64_t(nr) * npr;
    mesh->coords_.assign(size_t(2 * n_nodes), 0.0);
    for (int j = 1; j <= nr; ++j) {
        const double rho = double(j) / double(nr);
        for (int k = 0; k < npr; ++k) {
            const double th = 2.0 * kPi * double(k) / double(mesh->nsec_);
            const Vec ref(rho * std::cos(th), rho * std::sin(th));
            const Vec p = dom.map * ref;
            const int64_t id = mesh->node_index(j, k);
            mesh->coords_[size_t(2 * id)] = p[0];
            mesh->coords_[size_t(2 * id + 1)] = p[1];
        }
    }

    auto ring_node = [&](int j, int k) {
        if (!mesh->half_) k = ((k % mesh->nsec_) + mesh->nsec_) % mesh->nsec_;
        return int32_t(mesh->node_index(j, k));
    };

    mesh->tris_.reserve(size_t(3) * size_t(nsec_eff) * size_t(2 * nr - 1));
    for (int k = 0; k < nsec_eff; ++k) {
        mesh->tris_.push_back(0);
        mesh->tris_.push_back(ring_node(1, k));
        mesh->tris_.push_back(ring_node(1, k + 1));
    }
    for (int j = 1; j < nr; ++j) {
        for (int k = 0; k < nsec_eff; ++k) {
            const int32_t a = ring_node(j, k), b = ring_node(j, k + 1);
            const int32_t c = ring_node(j + 1, k + 1), d0 = ring_node(j + 1, k);
            if (k % 2 == 0) {
                mesh->tris_.insert(mesh->tris_.end(), {a, b, c});
                mesh->tris_.insert(mesh->tris_.end(), {a, c, d0});
            } else {
                mesh->tris_.insert(mesh->tris_.end(), {a, b, d0});
                mesh->tris_.insert(mesh->tris_.end(), {b, c, d0});
            }
        }
    }
    return mesh;
}

bool PolarMesh::on_flat_boundary(int64_t i) const {
    if (!half_) return false;
    if (i == 0) return true;
    const int k = int((i - 1) % npr_);
    return k == 0 || k == npr_ - 1;
}

int64_t PolarMesh::mirror_node(int64_t i) const {
    if (half_) throw std::logic_error("mirror_node: full meshes only");
    if (i == 0) return 0;
    const int64_t j = (i - 1) / npr_ + 1;
    const int k = int((i - 1) % npr_);
    return node_index(int(j), (nsec_ - k) % nsec_);
}

namespace {

void barycentric(const double* pa, const double* pb, const double* pc, const Vec& p,
                 double* out) {
    const double v0x = pb[0] - pa[0], v0y = pb[1] - pa[1];
    const double v1x = pc[0] - pa[0], v1y = pc[1] - pa[1];
    const double det = v0x * v1y - v1x * v0y;
    const double px = p[0] - pa[0], py = p[1] - pa[1];
    const double l1 = (px * v1y - py * v1x) / det;
    const double l2 = (v0x * py - v0y * px) / det;
    out[0] = 1.0 - l1 - l2;
    out[1] = l1;
    out[2] = l2;
}

}  // namespace

LocateResult PolarMesh::locate(const Vec& x) const {
    const Vec ref = map_inv_ * x;
    const double rho = ref.norm();
    double theta = std::atan2(ref[1], ref[0]);
    if (theta < 0) theta += 2.0 * kPi;
    if (half_ && theta > kPi) theta = (theta > 1.5 * kPi) ? 0.0 : kPi;  // clamp onto the half

    const double dth = 2.0 * kPi / double(nsec_);
    const int jf = std::min(nr_ - 1, std::max(0, int(rho * nr_)));
    const int kf = std::min(nsec_eff_ - 1, std::max(0, int(theta / dth)));

    LocateResult best;
    double best_min = -1e300;
    auto consider = [&](int64_t t) {
        const int32_t* tv = tri(t);
        double b[3];
        barycentric(&coords_[size_t(2 * tv[0])], &coords_[size_t(2 * tv[1])],
                    &coords_[size_t(2 * tv[2])], x, b);
        const double mn = std::min(b[0], std::min(b[1], b[2]));
        if (mn > best_min) {
            best_min = mn;
            best.tri = int(t);
            best.bary[0] = b[0];
            best.bary[1] = b[1];
            best.bary[2] = b[2];
        }
    };
    for (int dj = -1; dj <= 1; ++dj) {
        const int j = jf + dj;
        if (j < 0 || j > nr_ - 1) continue;
        for (int dk = -1; dk <= 1; ++dk) {
            int k = kf + dk;
            if (half_) {
                if (k < 0 || k >= nsec_eff_) continue;
            } else {
                k = ((k % nsec_) + nsec_) % nsec_;
            }
            if (j == 0) {
                consider(k);
            } else {
                const int64_t base = nsec_eff_ + int64_t(j - 1) * 2 * nsec_eff_ + 2 * k;
                consider(base);
                consider(base + 1);
            }
        }
    }
    // points marginally past the chord polygon (boundary quadrature nodes sit
    // O(h^2) outside it) evaluate as the clamped boundary trace
    best.inside = best_min >= -0.05;
    if (best_min < 0) {
        double s = 0;
        for (double& b : best.bary) {
            b = std::max(b, 0.0);
            s += b;
        }
        for (double& b : best.bary) b /= s;
    }
    return best;
}

double PolarMesh::interpolate(const LocateResult& loc, const std::vector<double>& values) const {
    if (loc.tri < 0) throw std::invalid_argument("interpolate: point not located");
    const int32_t* tv = tri(loc.tri);
    return loc.bary[0] * values[size_t(tv[0])] + loc.bary[1] * values[size_t(tv[1])] +
           loc.bary[2] * values[size_t(tv[2])];
}

std::string PolarMesh::describe() const {
    std::ostringstream os;
    os << dom_.describe() << " nr=" << nr_ << " nsec=" << nsec_ << (half_ ? " half" : "");
    return os.str();
}

}  // namespace homoglab

#pragma once

// Structured triangulations of disks, ellipsoids and half-disks: a polar
// mesh of the reference unit (half-)disk pushed through an affine map.
// The angular count is even and quad diagonals alternate with sector parity,
// so the full-disk mesh is exactly mirror symmetric about x2 = 0 and the
// half-disk mesh is exactly its upper half. That symmetry is what makes the
// reflection checks exact at the discrete level.

#include <memory>
#include <string>
#include <vector>

#include "homoglab/ellipsoid.hpp"
#include "homoglab/linalg.hpp"

namespace homoglab {

enum class DomainKind { Disk, EllipsoidDomain, HalfDisk, Box };

struct Domain {
    DomainKind kind = DomainKind::Disk;
    double radius = 1.0;            // disk/half-disk radius or the ellipsoid r
    Mat map = Mat::identity(2);     // reference unit disk -> physical

    static Domain disk(double R);
    static Domain half_disk(double R);
    static Domain ellipsoid(const Ellipsoid& E);

    std::string describe() const;
    static Domain parse(const std::string& text);
};

struct LocateResult {
    int tri = -1;
    double bary[3] = {0, 0, 0};
    bool inside = false;  // true if found without clamping beyond 1e-9
};

class PolarMesh {
  public:
    // grid spacing h: radial spacing equals h along the largest semi-axis
    static std::shared_ptr<const PolarMesh> build(const Domain& dom, double h);

    const Domain& domain() const { return dom_; }
    double h() const { return h_; }
    int rings() const { return nr_; }
    int sectors_full() const { return nsec_; }   // angular count of the full disk
    bool half() const { return half_; }
    int nodes_per_ring() const { return npr_; }

    int64_t node_count() const { return int64_t(coords_.size() / 2); }
    int64_t tri_count() const { return int64_t(tris_.size() / 3); }
    Vec node(int64_t i) const { return Vec(coords_[size_t(2 * i)], coords_[size_t(2 * i + 1)]); }
    const int32_t* tri(int64_t t) const { return &tris_[size_t(3 * t)]; }
    const std::vector<int32_t>& tri_data() const { return tris_; }

    int64_t node_index(int ring, int k) const {  // ring >= 1
        return 1 + int64_t(ring - 1) * npr_ + k;
    }

    bool on_curved_boundary(int64_t i) const { return i >= node_index(nr_, 0); }
    bool on_flat_boundary(int64_t i) const;         // half meshes only
    // mirror partner about x2 = 0 in the full mesh
    int64_t mirror_node(int64_t i) const;

    // barycentric point location in reference coordinates; points within
    // 1e-9*radius outside are clamped onto the mesh
    LocateResult locate(const Vec& x) const;
    double interpolate(const LocateResult& loc, const std::vector<double>& values) const;

    std::string describe() const;

  private:
    Domain dom_;
    double h_ = 0;
    int nr_ = 0, nsec_ = 0, npr_ = 0;
    bool half_ = false;
    Mat map_inv_;
    std::vector<double> coords_;   // physical, 2 per node
    std::vector<int32_t> tris_;    // 3 per triangle
    // triangle blocks: centre fan first (nsec_eff), then annuli of 2*nsec_eff
    int nsec_eff_ = 0;
};

}  // namespace homoglab

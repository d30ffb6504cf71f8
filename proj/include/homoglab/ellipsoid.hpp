#pragma once

// The ellipsoid family E_r = { <A^{-1}x, x> <= r^2 }, its inclusion radii,
// and boundary quadrature obtained by pushing a sphere rule through S^{-1}.

#include <utility>
#include <vector>

#include "homoglab/cell.hpp"
#include "homoglab/linalg.hpp"

namespace homoglab {

class Ellipsoid {
  public:
    Ellipsoid(const HomogenizedTensor& tensor, double r);

    int dim() const { return tensor_.A.d; }
    double radius() const { return r_; }
    const HomogenizedTensor& tensor() const { return tensor_; }
    const Mat& S() const { return tensor_.S; }
    const Mat& S_inv() const { return S_inv_; }
    double det_S() const { return tensor_.det_S; }

    // |Sx| (equals sqrt(<A^{-1}x,x>) up to the certified factor consistency)
    double mapped_radius(const Vec& x) const { return (S() * x).norm(); }
    bool contains(const Vec& x) const { return mapped_radius(x) <= r_; }

    // (sqrt(lambda) r, r / sqrt(lambda)): inner/outer inscribed ball radii
    std::pair<double, double> inclusion_radii(double lambda) const;

    Vec boundary_point(const Vec& omega) const { return S_inv_ * (omega * r_); }
    Vec unit_normal(const Vec& y) const;  // Euclidean outer normal on the boundary

  private:
    HomogenizedTensor tensor_;
    double r_;
    Mat S_inv_;
};

struct BoundaryNode {
    Vec y;         // point on the boundary
    double weight; // Euclidean surface-measure weight
    Vec normal;    // unit outer normal at y
};

// d=2: trapezoid rule on the circle pushed through S^{-1} (spectrally
// accurate); d=3: Gauss in the polar cosine x trapezoid in azimuth.
// Sum of weights approximates the surface area of the boundary.
std::vector<BoundaryNode> boundary_nodes(const Ellipsoid& E, int count);

// Gauss-Legendre rule on [-1,1] (used by the d=3 sphere rule and tests).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace homoglab

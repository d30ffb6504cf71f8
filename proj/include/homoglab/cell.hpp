#pragma once

// Periodic cell problem on the unit torus: corrector functions chi_1..chi_d
// and the homogenized tensor with its SA S^T = I factor.

#include <string>
#include <vector>

#include "homoglab/coeff.hpp"
#include "homoglab/linalg.hpp"

namespace homoglab {

struct Corrector {
    int d = 2;
    int n = 0;                             // grid resolution per axis
    std::vector<std::vector<double>> chi;  // d grid functions, n^d values each
    double residual = 0.0;                 // worst relative residual across solves
    std::vector<double> means;             // post-projection means (should be ~0)
};

struct HomogenizedTensor {
    Mat A;                // symmetric
    double eig_min = 0.0;
    double eig_max = 0.0;
    Mat S;                // symmetric positive definite, S A S^T = I
    double det_S = 0.0;
    double lambda = 0.0;  // ellipticity band the tensor was certified against
};

// Q1 conforming elements on the periodic grid, coefficient sampled at cell
// midpoints, Jacobi-preconditioned CG with zero-mean projection.
Corrector solve_corrector(const CoefficientField& field, int n, double tol = 1e-10,
                          long max_iter = -1);

// A_ij = cell average of a_ij + a_ik d_k chi_j, midpoint quadrature; then
// symmetrized. Errors if an eigenvalue leaves the declared band by > 1e-6.
HomogenizedTensor homogenize(const CoefficientField& field, const Corrector& corrector);

inline HomogenizedTensor homogenized_tensor(const CoefficientField& field, int n) {
    return homogenize(field, solve_corrector(field, n));
}

// Tensor for a constant matrix (no cell solve involved).
HomogenizedTensor make_tensor(const Mat& A, double lambda);

// Discrete energy (1/|cell|) int <A (xi + grad chi_xi), (xi + grad chi_xi)>,
// exact Q1 integration of the cell-midpoint coefficient.
double corrector_energy(const CoefficientField& field, const Corrector& corrector,
                        const Vec& xi);

}  // namespace homoglab

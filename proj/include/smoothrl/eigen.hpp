#pragma once

#include "smoothrl/linalg.hpp"

#include <complex>
#include <vector>

namespace smoothrl {

/// All eigenvalues of a real square matrix.
///
/// Balancing, Householder reduction to upper Hessenberg form, then Francis
/// double-shift QR with deflation. Complex eigenvalues come out as exact
/// conjugate pairs. Sorted by real part descending, then imaginary part
/// descending. Sized for n up to a few hundred.
///
/// Throws InvalidParameters for a non-square or non-finite matrix and
/// ConvergenceError after 30 n QR sweeps without full deflation.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Each step of the pipeline, exposed for testing.
namespace eigen_detail {

/// Diagonal similarity scaling by powers of two; returns the scale factors.
std::vector<double> balance(Matrix& a);

/// In-place orthogonal reduction to upper Hessenberg form.
void reduce_to_hessenberg(Matrix& a);

/// Eigenvalues of an upper Hessenberg matrix (destroyed), unsorted.
std::vector<std::complex<double>> hessenberg_qr(Matrix& h);

} // namespace eigen_detail

} // namespace smoothrl

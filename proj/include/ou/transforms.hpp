#pragma once

#include "ou/grid.hpp"

namespace ou {

/// Unnormalized DFT (sign = -1: sum f_j e^{-2 pi i jk/n}; sign = +1 the
/// conjugate sum), in place, on a square array of extent n per axis.
/// Thread-safe for concurrent calls on distinct buffers.
void dft_inplace(std::vector<cplx>& data, int dim, int n, int sign);

/// Discrete approximation of g_hat(xi) = int g(x) e^{-i x.xi} dx on the
/// centered frequency grid (trapezoidal h^N scaling).
SpectralField forward_transform(const Field& f);

/// Exact inverse of forward_transform.
Field inverse_transform(const SpectralField& F);

}  // namespace ou

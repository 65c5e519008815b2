#pragma once

#include <vector>

#include "twhe/grid.hpp"
#include "twhe/linalg.hpp"

namespace twhe {

// In-place complex DFT over all real axes of the grid. backward() includes
// the 1/size normalization, so backward(forward(x)) == x.
void fft_forward(const Grid& g, std::vector<cd>& data);
void fft_backward(const Grid& g, std::vector<cd>& data);

// Signed frequency of a spectral index along an axis, in (-N/2, N/2].
int signed_frequency(const Grid& g, std::size_t idx, int axis);

// Discrete symbol of sqrt(-1) Lambda dbar d for the constant metric `base`
// at the given spectral index (real, non-negative).
double ddbar_symbol(const Grid& g, const CMat& base, std::size_t idx);

}  // namespace twhe

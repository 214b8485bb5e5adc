// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sgdd/sparse.hpp"

namespace sgdd
{

inline constexpr int kMaxDenseDimension = 20000;

/// Singular values of A in descending order (dense SVD).
std::vector<double> singular_values(const CsrMatrix &a);

/// 2-norm condition number sigma_max / sigma_min via dense SVD. Throws
/// std::invalid_argument when the dimension exceeds kMaxDenseDimension.
double condition_number(const CsrMatrix &a);

}  // namespace sgdd

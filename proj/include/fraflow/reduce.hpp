#pragma once

#include <cstddef>
#include <vector>

namespace fraflow {

// Deterministic pairwise summation. All grid reductions go through this so
// results do not depend on evaluation order or thread count.
double pairwise_sum(const double* a, std::size_t n);
double pairwise_sum(const std::vector<double>& a);

// sum_i a_i * b_i, pairwise over the products.
double pairwise_dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fraflow

#include "fraflow/reduce.hpp"

#include <stdexcept>

namespace fraflow {

double pairwise_sum(const double* a, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

double pairwise_sum(const std::vector<double>& a) {
    return pairwise_sum(a.data(), a.size());
}

double pairwise_dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pairwise_dot: size mismatch");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return pairwise_sum(prod);
}

}  // namespace fraflow

#ifndef HADIC_TEST_HELPERS_HPP
#define HADIC_TEST_HELPERS_HPP

#include <vector>

#include "hadic/hseries.hpp"
#include "hadic/kernels.hpp"

namespace hadic::test {

inline HSeries mono(const std::vector<int>& vars, long long c, int h, const std::vector<int>& e, int n) {
    return HSeries::monomial(vars, Rat(c), h, e, n);
}

// iota_{big,small} (big - small + c hbar)^e on a window
inline HSeries iota(const std::vector<int>& vars, int big, int small, const Rat& c, int e, const Window& w) {
    return Kernel::factor(vars, big, small, c, e).expand(w);
}

} // namespace hadic::test

#endif

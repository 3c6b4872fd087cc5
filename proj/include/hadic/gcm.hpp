#ifndef HADIC_GCM_HPP
#define HADIC_GCM_HPP

#include <string>
#include <vector>

#include "hadic/rational.hpp"

namespace hadic {

// Simply-laced generalized Cartan matrix: symmetric, 2 on the diagonal,
// off-diagonal entries in {0, -1}.
struct Gcm {
    std::vector<std::string> labels;
    std::vector<std::vector<int>> a;

    int rank() const { return static_cast<int>(a.size()); }
    int at(int i, int j) const { return a[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

    // throws std::invalid_argument naming the violated invariant
    void validate() const;
    // positive-definite symmetric matrix (leading principal minors > 0)
    bool finite_type() const;

    static Gcm preset(const std::string& name);  // A1, A2, A3, D4
    static Gcm from_json(const std::string& text);
    std::string json() const;
};

} // namespace hadic

#endif

#include "hadic/gcm.hpp"

#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace hadic {

void Gcm::validate() const {
    size_t n = a.size();
    if (n == 0) throw std::invalid_argument("GCM: empty matrix");
    if (labels.size() != n) throw std::invalid_argument("GCM: labels/matrix size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("GCM: matrix not square");
        if (a[i][i] != 2) throw std::invalid_argument("GCM: diagonal entry must be 2");
        for (size_t j = 0; j < n; ++j) {
            if (a[i][j] != a[j][i]) throw std::invalid_argument("GCM: matrix must be symmetric");
            if (i != j && a[i][j] != 0 && a[i][j] != -1)
                throw std::invalid_argument("GCM: off-diagonal entries must be 0 or -1 (simply-laced)");
        }
    }
}

bool Gcm::finite_type() const {
    // leading principal minors of the symmetric matrix, exact arithmetic
    size_t n = a.size();
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) m[i][j] = Rat(a[i][j]);
    for (size_t k = 0; k < n; ++k) {
        // determinant of leading k+1 block by fraction-free elimination on a copy
        std::vector<std::vector<Rat>> b(k + 1, std::vector<Rat>(k + 1));
        for (size_t i = 0; i <= k; ++i)
            for (size_t j = 0; j <= k; ++j) b[i][j] = m[i][j];
        Rat det = 1;
        for (size_t c = 0; c <= k; ++c) {
            size_t p = c;
            while (p <= k && b[p][c] == 0) ++p;
            if (p > k) return false;  // singular minor
            if (p != c) {
                std::swap(b[p], b[c]);
                det = -det;
            }
            det *= b[c][c];
            for (size_t rr = c + 1; rr <= k; ++rr) {
                Rat f = b[rr][c] / b[c][c];
                for (size_t cc = c; cc <= k; ++cc) b[rr][cc] -= f * b[c][cc];
            }
        }
        if (det <= 0) return false;
    }
    return true;
}

Gcm Gcm::preset(const std::string& name) {
    Gcm g;
    if (name == "A1") {
        g.labels = {"1"};
        g.a = {{2}};
    } else if (name == "A2") {
        g.labels = {"1", "2"};
        g.a = {{2, -1}, {-1, 2}};
    } else if (name == "A3") {
        g.labels = {"1", "2", "3"};
        g.a = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
    } else if (name == "D4") {
        g.labels = {"1", "2", "3", "4"};
        g.a = {{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}};
    } else {
        throw std::invalid_argument("unknown GCM preset: " + name);
    }
    g.validate();
    return g;
}

Gcm Gcm::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("GCM: JSON parse error: ") + e.what());
    }
    Gcm g;
    if (!j.contains("matrix") || !j["matrix"].is_array())
        throw std::invalid_argument("GCM: missing \"matrix\" array");
    for (auto& row : j["matrix"]) {
        std::vector<int> r;
        for (auto& v : row) r.push_back(v.get<int>());
        g.a.push_back(std::move(r));
    }
    if (j.contains("labels")) {
        for (auto& l : j["labels"]) g.labels.push_back(l.get<std::string>());
    } else {
        for (size_t i = 0; i < g.a.size(); ++i) g.labels.push_back(std::to_string(i + 1));
    }
    g.validate();
    return g;
}

std::string Gcm::json() const {
    nlohmann::json j;
    j["labels"] = labels;
    j["matrix"] = a;
    return j.dump();
}

} // namespace hadic

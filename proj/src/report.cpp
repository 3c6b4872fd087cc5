#include "hadic/report.hpp"

#include <algorithm>
#include <sstream>

namespace hadic {

std::string status_str(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::PrecondFailed: return "precondition-failed";
        case Status::OutOfWindow: return "out-of-window";
    }
    return "unknown";
}

CheckResult CheckResult::pass(std::string suite, std::string name, std::string anchor, std::string params) {
    CheckResult r;
    r.suite = std::move(suite);
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.params = std::move(params);
    r.status = Status::Pass;
    return r;
}

CheckResult CheckResult::fail(std::string suite, std::string name, std::string anchor, std::string params,
                              std::string witness) {
    CheckResult r = pass(std::move(suite), std::move(name), std::move(anchor), std::move(params));
    r.status = Status::Fail;
    r.witness = std::move(witness);
    return r;
}

bool Report::all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const CheckResult& c) { return c.status == Status::Pass; });
}

void Report::sort_entries() {
    std::stable_sort(entries.begin(), entries.end(), [](const CheckResult& a, const CheckResult& b) {
        if (a.suite != b.suite) return a.suite < b.suite;
        if (a.name != b.name) return a.name < b.name;
        return a.params < b.params;
    });
}

namespace {
std::string jesc(const std::string& s) {
    std::string r;
    r.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': r += "\\\""; break;
            case '\\': r += "\\\\"; break;
            case '\n': r += "\\n"; break;
            case '\t': r += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    r += buf;
                } else {
                    r += c;
                }
        }
    }
    return r;
}
} // namespace

std::string Report::body_json() const {
    std::ostringstream os;
    os << "{\"version\":\"" << jesc(version) << "\",\"config\":" << (config_echo.empty() ? "{}" : config_echo)
       << ",\"entries\":[";
    for (size_t i = 0; i < entries.size(); ++i) {
        const CheckResult& e = entries[i];
        os << (i ? "," : "") << "{\"suite\":\"" << jesc(e.suite) << "\",\"check\":\"" << jesc(e.name)
           << "\",\"anchor\":\"" << jesc(e.anchor) << "\",\"params\":\"" << jesc(e.params)
           << "\",\"status\":\"" << status_str(e.status) << "\"";
        if (!e.witness.empty()) os << ",\"witness\":\"" << jesc(e.witness) << "\"";
        os << "}";
    }
    os << "]}";
    return os.str();
}

std::string Report::full_json() const {
    std::ostringstream os;
    os << "{\"body\":" << body_json() << ",\"meta\":{\"runtime_ms\":[";
    for (size_t i = 0; i < entries.size(); ++i)
        os << (i ? "," : "") << "[\"" << jesc(entries[i].suite + "/" + entries[i].name + "/" + entries[i].params)
           << "\"," << entries[i].runtime_ms << "]";
    os << "]}}";
    return os.str();
}

std::string Report::markdown() const {
    std::ostringstream os;
    os << "# " << version << " report\n\n";
    os << "| suite | check | params | status | witness |\n";
    os << "|---|---|---|---|---|\n";
    for (const CheckResult& e : entries)
        os << "| " << e.suite << " | " << e.name << " | " << e.params << " | " << status_str(e.status)
           << " | " << e.witness << " |\n";
    size_t np = 0;
    for (const CheckResult& e : entries)
        if (e.status == Status::Pass) ++np;
    os << "\n" << np << "/" << entries.size() << " checks passed\n";
    return os.str();
}

const std::vector<std::string>& anchor_table() {
    static const std::vector<std::string> t = {
        "G(\\partial_x) [m]_{q^{\\partial_x}} x^{-1}",
        "-G(\\partial_z)G(\\partial_z)[m]_{q^{\\partial_z}}[\\kappa]_{q^{\\partial_z}}(z-w)^{-2}",
        "Sing_x (x-b hbar)^{-1} F(x,hbar) = (x-b hbar)^{-1} F(b hbar, hbar)",
        "Res_x (x-b hbar)^{-1} F(x,hbar) = F(b hbar, hbar)",
        "-G(x)q^{-x} = -2 hbar L(-2 hbar x)",
        "G(x)q^{-l x} = 2 hbar L(-2 hbar x) q^{(1-l)x}",
        "2 hbar (z2-z1+2 hbar) / ((w-z1-hbar)(w-z2-hbar))",
        "(z2-w+3 hbar)/(w-z2-hbar)",
        "iota_{z,w}(z-w)^{-1-j} - iota_{w,z}(z-w)^{-1-j} = (1/j!) d_w^j delta(w/z)",
        "F(\\partial_z)G(\\partial_z)=1",
        "[h_i(m), h_j(n)] = gamma_{i,j}(m,n), diagonal delta_{m+n,0} mod hbar",
        "[h_i(z),h_j(w)] = [a_{i,j}][kappa]((z-w+kappa hbar)^{-2}-(w-z+kappa hbar)^{-2})",
        "Sing_z Y_E(a(x),z)b(x) = a(x)_0 b(x) (z+mu hbar)^{-1}",
        "a(x1)b(x) - ((x-x1-nu hbar)/(x-x1-mu hbar)) b(x)a(x1) = x1^{-1}delta((x-mu hbar)/x1) a(x)_0 b(x)",
        "exp((alpha+beta)_{-1}) 1_W = exp(E_gamma/2) exp(beta(x)) exp(alpha(x))",
        "E_gamma = Res_z z^{-1} gamma(z)",
        "Y_W(E^-(-a,z)1, x) = exp(z L(z d_x) Y_W^+(a,x)) exp(z L(z d_x) Y_W^-(a,x))",
        "(1+z/x)^{a_0} E^-(-a,x+z) E^-(a,x) E^+(-a,x+z) E^+(a,x)",
        "C_i(x) = exp(-G(d_x)q^{-l d_x} Y^+(h_i,x)) exp(-G(d_x)q^{-l d_x} Y^-(h_i,x))",
        "(x0+x2)^l Y(u,x0+x2)Y(v,x2)w = (x2+x0)^l Y(Y(u,x0)v,x2)w  mod hbar^n",
        "a(x) b_m w in W_hbar((x))",
        "S-Jacobi three-term identity on basis vectors",
        "[h_i(z),h_j(w)] = a_{i,j} d_w delta(w/z) k",
        "[h_i(z),e_j^pm(w)] = pm a_{i,j} e_j^pm(w) delta(w/z)",
        "[e_i^+(z),e_j^-(w)] = delta_{i,j}(h_i(w) delta(w/z) + k d_w delta(w/z))",
        "[e_i^pm(z),e_j^pm(w)] = 0 if a_{i,j} >= 0",
        "(z-w)[e_i^pm(z),e_j^pm(w)] = 0 if a_{i,j} = -1",
        "[e_i^pm(z1),[e_i^pm(z2),e_j^pm(w)]] = 0 if a_{i,j} = -1",
        "graded dimension = colored partition count",
        "(DY1) [H_i^pm(z),H_j^pm(w)] = 0",
        "(DY2) H^+H^- four-factor kernel exchange",
        "(DY3) H^+(z)X^pm(w) kernel exchange",
        "(DY4) H^-(z)X^pm(w) kernel exchange",
        "(DY5) [X_i^+(z),X_j^-(w)] = delta_{ij}(1/2hbar)(H^+ delta - H^- delta)",
        "(DY6) (z-w -+ a hbar)X^pm X^pm = (z-w +- a hbar)X^pm X^pm",
        "(DY7) X_i X_j commute when a_{i,j}=0",
        "(DY8) order-2 Serre relation",
        "[h_{i,Y}(z),h_{j,Y}(w)] kernel relation",
        "[h_{i,Y}(z),x_{j,Y}^pm(w)] = pm x [a]((z-w+kh)^{-1}+(w-z+kh)^{-1})",
        "(z-w-a hbar)x_i^pm(z)x_j^pm(w) = (z-w+a hbar)x_j^pm(w)x_i^pm(z)",
        "x_i^pm x_j^pm commute when a_{i,j}=0",
        "x^+x^- exchange with (1/2hbar)(delta - C_i delta) right side",
        "order-2 Serre relation for new currents",
        "h_{i,Y}^pm(z) = pm F(d_z) log H_i^pm(z pm kappa hbar/2)",
        "x_{i,Y}^-(z) = X_i^-(z-kappa hbar) H_i^+(z-kappa hbar/2)^{-1}",
        "C_i(x) = H_i^-(x-3 kappa hbar/2) H_i^+(x-kappa hbar/2)^{-1}",
        "a(z)a(w)_0b(w) = a(w)_0b(w) a(z) (w-z-3 hbar)/(w-z-hbar)",
        "a(w)_0 a(w)_0 b(w) = 0",
        "nob(a(z)b(w))|_{z=w-nu hbar} = a(w)_0 b(w)",
        "nob(a(z1)a(z2)b(w))|_{z1=w+nu hbar, z2=w-nu hbar} = 0",
        "2 hbar(z2-z1+2 hbar) b(w)a(z1)a(z2) + 2 hbar(z1-z2+2 hbar) b(w)a(z2)a(z1) = 0",
        "determinism: identical config+seed gives identical report bodies",
        "cache transparency and insert-only contract",
        "window soundness / engine properties",
    };
    return t;
}

bool anchor_known(const std::string& a) {
    for (const auto& s : anchor_table())
        if (s == a) return true;
    return false;
}

} // namespace hadic

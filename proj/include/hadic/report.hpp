#ifndef HADIC_REPORT_HPP
#define HADIC_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hadic {

enum class Status { Pass, Fail, PrecondFailed, OutOfWindow };

std::string status_str(Status s);

struct CheckResult {
    std::string suite;
    std::string name;
    std::string anchor;  // paper_ref anchor string, from the static table
    std::string params;
    Status status = Status::Pass;
    std::string witness;  // nonempty iff not Pass
    std::int64_t runtime_ms = 0;

    static CheckResult pass(std::string suite, std::string name, std::string anchor, std::string params);
    static CheckResult fail(std::string suite, std::string name, std::string anchor, std::string params,
                            std::string witness);
};

struct Report {
    std::string version;
    std::string config_echo;  // canonical JSON of the run configuration
    std::vector<CheckResult> entries;

    bool all_pass() const;
    void sort_entries();  // by (suite, name, params)

    // Deterministic body: excludes runtimes and timestamps.
    std::string body_json() const;
    // Full document: body plus runtime metadata.
    std::string full_json() const;
    std::string markdown() const;
};

// The static anchor table; every CheckResult::anchor must appear here.
const std::vector<std::string>& anchor_table();
bool anchor_known(const std::string& a);

} // namespace hadic

#endif

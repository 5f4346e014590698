#ifndef HOPF_REPORT_HPP
#define HOPF_REPORT_HPP

// Named pass/fail checks with measured values, aggregated into a report that
// serializes to JSON with stable key order.

#include <string>
#include <vector>

#include "json.hpp"

#include "hopf/model.hpp"

namespace hopf {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // the quantity the check computed
  double bound = 0.0;      // the threshold it was compared against
  double tolerance = 0.0;  // slack applied to the comparison
  std::string note;
};

struct VerificationReport {
  Params params{0.0, 1.0, 1.0};
  std::vector<CheckResult> checks;
  double runtime_seconds = 0.0;
  bool include_runtime = false;  // timing varies run to run; off keeps output reproducible

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(CheckResult c) { checks.push_back(std::move(c)); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["params"] = {{"k", params.k}, {"k3", params.k3}, {"k5", params.k5}};
    j["pass"] = all_pass();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json cj;
      cj["check_name"] = c.name;
      cj["pass"] = c.pass;
      cj["measured"] = c.measured;
      cj["bound"] = c.bound;
      cj["tolerance"] = c.tolerance;
      if (!c.note.empty()) cj["note"] = c.note;
      arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    if (include_runtime) j["runtime_seconds"] = runtime_seconds;
    return j;
  }
};

}  // namespace hopf

#endif  // HOPF_REPORT_HPP

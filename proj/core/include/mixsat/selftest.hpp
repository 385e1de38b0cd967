#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mixsat {

enum class SelftestBudget { Fast, Full };

struct SelftestOptions {
  SelftestBudget budget = SelftestBudget::Full;
  std::uint64_t seed = 20240601;
  /// 0 = hardware concurrency.
  unsigned workers = 0;
  /// Progress messages; may be empty.
  std::function<void(const std::string&)> log;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Acceptance criteria 1..10. The fast budget shrinks sample counts and
/// skips the sweeps (7 and 8).
inline constexpr int kCriterionCount = 10;
std::vector<int> fast_criteria();

CriterionResult run_criterion(int id, const SelftestOptions& options);

/// "PASS"/"FAIL" line for one result.
std::string format_result(const CriterionResult& r);

}  // namespace mixsat

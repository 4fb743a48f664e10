#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

namespace intmat {

/// Raised when a request exceeds one of the configured work or memory caps.
/// The CLI maps it to exit code 3; the message names the budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::string budget, const std::string& detail)
      : std::runtime_error("budget '" + budget + "' exceeded: " + detail), budget_(std::move(budget)) {}
  const std::string& budget() const noexcept { return budget_; }

 private:
  std::string budget_;
};

struct Budgets {
  std::uint64_t brute_force_matrices = 100'000'000;
  std::int64_t max_k_singular = 10'000;
  std::int64_t max_k_real = 10'000;
  std::int64_t max_k_integer = 1'500;
  std::uint64_t memory_bytes = std::uint64_t{1024} << 20;

  /// Defaults, with memory_bytes overridden by INTMAT_BUDGET_MB when set.
  static Budgets from_environment() {
    Budgets b;
    if (const char* mb = std::getenv("INTMAT_BUDGET_MB"); mb && *mb) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(mb, &end, 10);
      if (end == mb || *end != '\0' || v == 0)
        throw std::invalid_argument("INTMAT_BUDGET_MB must be a positive integer");
      b.memory_bytes = static_cast<std::uint64_t>(v) << 20;
    }
    return b;
  }

  void require_memory(std::uint64_t bytes, const std::string& what) const {
    if (bytes > memory_bytes)
      throw BudgetExceeded("memory", what + " needs " + std::to_string(bytes >> 20) + " MiB, cap is " +
                                         std::to_string(memory_bytes >> 20) + " MiB (INTMAT_BUDGET_MB)");
  }

  static void require_k(std::int64_t k, std::int64_t cap, const std::string& name) {
    if (k > cap)
      throw BudgetExceeded(name, "k = " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
  }
};

}  // namespace intmat

#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "coarselab/presentation.hpp"

namespace coarse {

/// One directed rewrite rule over signed letters; shortlex(lhs) > shortlex(rhs).
struct RewriteRule {
  std::vector<int> lhs;
  std::vector<int> rhs;
  bool operator==(const RewriteRule&) const = default;
};

/// A terminating string-rewriting system over the signed generator alphabet.
/// Systems produced by knuth_bendix are confluent: normal forms are canonical.
class RewriteSystem {
 public:
  explicit RewriteSystem(std::vector<RewriteRule> rules);

  const std::vector<RewriteRule>& rules() const noexcept { return rules_; }

  /// Rewrite to a normal form (leftmost, lowest rule index first).
  std::vector<int> normal_form(std::vector<int> word) const;

  /// Exhaustive critical-pair joinability check.
  bool confluent() const;

 private:
  std::vector<RewriteRule> rules_;
};

struct CompletionLimits {
  std::size_t max_rules = 256;
  std::size_t max_rule_length = 32;
  std::size_t max_steps = 20000;
};

/// Budget exhaustion marker: completion stopped before confluence was reached.
struct Incomplete {
  std::size_t rules_found;
  std::size_t budget_used;
};

using CompletionOutcome = std::variant<RewriteSystem, Incomplete>;

/// Bounded Knuth-Bendix completion under shortlex (letter order
/// a < a^-1 < b < b^-1 < ...). Never returns a non-confluent system.
CompletionOutcome knuth_bendix(const Presentation& P, const CompletionLimits& limits);

}  // namespace coarse

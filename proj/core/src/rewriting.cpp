#include "coarselab/rewriting.hpp"

#include <algorithm>
#include <set>

#include "coarselab/errors.hpp"

namespace coarse {

namespace {

using Letters = std::vector<int>;

bool sl_less(const Letters& a, const Letters& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return letter_rank(a[i]) < letter_rank(b[i]);
  return false;
}

bool is_factor_at(const Letters& pattern, const Letters& w, std::size_t pos) {
  if (pos + pattern.size() > w.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), w.begin() + pos);
}

Letters splice(const Letters& w, std::size_t pos, std::size_t len, const Letters& repl) {
  Letters out;
  out.reserve(w.size() - len + repl.size());
  out.insert(out.end(), w.begin(), w.begin() + pos);
  out.insert(out.end(), repl.begin(), repl.end());
  out.insert(out.end(), w.begin() + pos + len, w.end());
  return out;
}

// An equation stored with the shortlex-larger side first.
using Equation = std::pair<Letters, Letters>;

Equation make_equation(Letters u, Letters v) {
  if (sl_less(u, v)) std::swap(u, v);
  return {std::move(u), std::move(v)};
}

struct EquationLess {
  bool operator()(const Equation& a, const Equation& b) const {
    if (a.first != b.first) return sl_less(a.first, b.first);
    if (a.second != b.second) return sl_less(a.second, b.second);
    return false;
  }
};

// Critical pairs of l1->r1 with l2->r2: proper overlaps (a suffix of l1 is a
// prefix of l2) and containments (l2 a factor of l1).
void critical_pairs(const RewriteRule& r1, const RewriteRule& r2, bool same_rule,
                    std::vector<Equation>& out) {
  const Letters& l1 = r1.lhs;
  const Letters& l2 = r2.lhs;
  for (std::size_t k = 1; k < std::min(l1.size(), l2.size()); ++k) {
    if (!std::equal(l2.begin(), l2.begin() + k, l1.end() - k)) continue;
    // superposition x·o·y with l1 = x·o, l2 = o·y
    Letters left = r1.rhs;  // r1 applied
    left.insert(left.end(), l2.begin() + k, l2.end());
    Letters right(l1.begin(), l1.end() - k);  // r2 applied
    right.insert(right.end(), r2.rhs.begin(), r2.rhs.end());
    out.push_back(make_equation(std::move(left), std::move(right)));
  }
  if (l2.size() <= l1.size()) {
    for (std::size_t p = 0; p + l2.size() <= l1.size(); ++p) {
      if (same_rule && p == 0 && l2.size() == l1.size()) continue;
      if (!is_factor_at(l2, l1, p)) continue;
      out.push_back(make_equation(r1.rhs, splice(l1, p, l2.size(), r2.rhs)));
    }
  }
}

Letters rewrite_once(const Letters& w, const std::vector<RewriteRule>& rules,
                     bool& changed) {
  for (std::size_t pos = 0; pos < w.size(); ++pos) {
    for (const RewriteRule& r : rules) {
      if (is_factor_at(r.lhs, w, pos)) {
        changed = true;
        return splice(w, pos, r.lhs.size(), r.rhs);
      }
    }
  }
  changed = false;
  return w;
}

Letters nf(Letters w, const std::vector<RewriteRule>& rules) {
  bool changed = true;
  while (changed) w = rewrite_once(w, rules, changed);
  return w;
}

}  // namespace

RewriteSystem::RewriteSystem(std::vector<RewriteRule> rules) : rules_(std::move(rules)) {
  for (const RewriteRule& r : rules_)
    if (!sl_less(r.rhs, r.lhs))
      throw InvalidParameter("rewrite rule is not shortlex-decreasing");
}

std::vector<int> RewriteSystem::normal_form(std::vector<int> word) const {
  return nf(std::move(word), rules_);
}

bool RewriteSystem::confluent() const {
  std::vector<Equation> cps;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    for (std::size_t j = 0; j < rules_.size(); ++j)
      critical_pairs(rules_[i], rules_[j], i == j, cps);
  for (const Equation& e : cps)
    if (nf(e.first, rules_) != nf(e.second, rules_)) return false;
  return true;
}

CompletionOutcome knuth_bendix(const Presentation& P, const CompletionLimits& limits) {
  std::vector<RewriteRule> rules;
  std::set<Equation, EquationLess> pending;

  for (std::size_t g = 1; g <= P.generators().size(); ++g) {
    int l = static_cast<int>(g);
    pending.insert(make_equation({l, -l}, {}));
    pending.insert(make_equation({-l, l}, {}));
  }
  for (const Word& r : P.relators()) pending.insert(make_equation(r.letters(), {}));

  std::size_t steps = 0;
  auto incomplete = [&] { return Incomplete{rules.size(), steps}; };

  while (!pending.empty()) {
    if (++steps > limits.max_steps) return incomplete();
    Equation eq = *pending.begin();
    pending.erase(pending.begin());

    Letters u = nf(eq.first, rules);
    Letters v = nf(eq.second, rules);
    if (u == v) continue;
    if (sl_less(u, v)) std::swap(u, v);
    if (u.size() > limits.max_rule_length) return incomplete();

    RewriteRule fresh{std::move(u), std::move(v)};
    // interreduce: rules whose lhs now contains the fresh lhs go back to the
    // equation queue; surviving rhs sides are renormalized.
    std::vector<RewriteRule> kept;
    for (RewriteRule& old : rules) {
      bool reducible = false;
      for (std::size_t p = 0; p + fresh.lhs.size() <= old.lhs.size(); ++p)
        if (is_factor_at(fresh.lhs, old.lhs, p)) {
          reducible = true;
          break;
        }
      if (reducible)
        pending.insert(make_equation(std::move(old.lhs), std::move(old.rhs)));
      else
        kept.push_back(std::move(old));
    }
    rules = std::move(kept);
    rules.push_back(std::move(fresh));
    if (rules.size() > limits.max_rules) return incomplete();
    for (RewriteRule& r : rules) {
      Letters renormed = nf(r.rhs, rules);
      r.rhs = std::move(renormed);
    }

    std::vector<Equation> cps;
    const RewriteRule& added = rules.back();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      bool same = &rules[i] == &added;
      critical_pairs(added, rules[i], same, cps);
      if (!same) critical_pairs(rules[i], added, false, cps);
    }
    for (Equation& cp : cps) pending.insert(std::move(cp));
  }

  RewriteSystem system(std::move(rules));
  if (!system.confluent())
    throw InternalError("completion terminated on a non-confluent system");
  return system;
}

}  // namespace coarse

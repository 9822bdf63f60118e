#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarselab/presentation.hpp"
#include "coarselab/rewriting.hpp"

namespace coarse {

/// Elements are carried as canonical key strings: equal keys iff equal group
/// elements. Every operation consumes and produces canonical keys, so the
/// key doubles as the word-problem oracle.
using Elem = std::string;

/// A marked group: generators plus exact element operations.
class GroupModel {
 public:
  virtual ~GroupModel() = default;

  const std::string& descriptor() const noexcept { return descriptor_; }
  const GeneratorSet& generators() const noexcept { return generators_; }
  bool has_presentation() const noexcept { return presentation_.has_value(); }
  const Presentation& presentation() const;  // NoPresentation if absent

  /// Known finite: true means the order was established at construction.
  bool is_finite() const noexcept { return order_.has_value(); }
  std::optional<std::uint64_t> order() const noexcept { return order_; }

  virtual Elem identity() const = 0;
  virtual Elem apply_generator(const Elem& x, int letter) const = 0;
  virtual Elem multiply(const Elem& x, const Elem& y) const = 0;
  virtual Elem invert(const Elem& x) const = 0;

  /// Exact geodesic word length of x over the marked generators.
  virtual long long exact_length(const Elem& x) const = 0;

  /// Elements are stored canonically, so the key is the element itself.
  const Elem& canonical_key(const Elem& x) const noexcept { return x; }

 protected:
  GroupModel(std::string descriptor, GeneratorSet generators,
             std::optional<Presentation> presentation,
             std::optional<std::uint64_t> order);

  /// Every relator (and its inverse) must evaluate to the identity.
  void check_relators() const;

 private:
  std::string descriptor_;
  GeneratorSet generators_;
  std::optional<Presentation> presentation_;
  std::optional<std::uint64_t> order_;
};

using ModelPtr = std::shared_ptr<const GroupModel>;

/// Left-to-right application of apply_generator starting from the identity.
Elem evaluate_word(const GroupModel& M, const Word& w);

enum class Builtin { FreeAbelian, Free, Lamplighter, InfiniteDihedral, Cyclic };

/// param: rank k for FreeAbelian/Free, modulus n for Cyclic, ignored otherwise.
ModelPtr make_builtin_model(Builtin kind, int param = 0);

/// Descriptor grammar: "z" | "z^k" | "free:k" | "lamplighter" | "dihedral_inf"
/// | "cyclic:n" | "presentation:<...>".
ModelPtr make_model(const std::string& descriptor);

using ModelOrIncomplete = std::variant<ModelPtr, Incomplete>;

/// Bounded completion fallback for presentations without a built-in model.
/// Never yields a model with a wrong equality oracle: budget exhaustion
/// returns Incomplete instead.
ModelOrIncomplete complete_rewriting(const Presentation& P,
                                     const CompletionLimits& limits = {});

// --- Key codecs shared with covers/cli ---------------------------------

/// FreeAbelian keys are comma-joined coordinates, e.g. "3,-4".
std::vector<long long> parse_vector_key(const Elem& key);
Elem vector_key(const std::vector<long long>& v);

/// Lamplighter state: lamp positions (sorted, distinct) and cursor.
struct LamplighterElement {
  std::vector<int> lamps;
  int cursor = 0;
  bool operator==(const LamplighterElement&) const = default;
};

/// Lamplighter keys are "<cursor>|<lamps comma-joined>", e.g. "0|5", "-2|1,3".
LamplighterElement parse_lamplighter_key(const Elem& key);
Elem lamplighter_key(const LamplighterElement& e);

}  // namespace coarse

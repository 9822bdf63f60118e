#include "coarselab/models.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

#include "coarselab/errors.hpp"

namespace coarse {

GroupModel::GroupModel(std::string descriptor, GeneratorSet generators,
                       std::optional<Presentation> presentation,
                       std::optional<std::uint64_t> order)
    : descriptor_(std::move(descriptor)),
      generators_(std::move(generators)),
      presentation_(std::move(presentation)),
      order_(order) {}

const Presentation& GroupModel::presentation() const {
  if (!presentation_) throw NoPresentation(descriptor_);
  return *presentation_;
}

void GroupModel::check_relators() const {
  if (!presentation_) return;
  for (const Word& r : presentation_->relators()) {
    if (evaluate_word(*this, r) != identity() ||
        evaluate_word(*this, r.inverse()) != identity())
      throw InternalError("relator does not evaluate to the identity in '" +
                          descriptor_ + "'");
  }
}

Elem evaluate_word(const GroupModel& M, const Word& w) {
  const int k = static_cast<int>(M.generators().size());
  Elem x = M.identity();
  for (int l : w.letters()) {
    int g = l > 0 ? l : -l;
    if (g < 1 || g > k)
      throw UnknownGenerator("word letter outside the model's generator set");
    x = M.apply_generator(x, l);
  }
  return x;
}

// --- key codecs ---------------------------------------------------------

namespace {

long long parse_ll(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InvalidParameter("malformed integer '" + std::string(s) + "' in key");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

}  // namespace

std::vector<long long> parse_vector_key(const Elem& key) {
  std::vector<long long> out;
  for (std::string_view part : split(key, ',')) out.push_back(parse_ll(part));
  if (out.empty()) throw InvalidParameter("empty coordinate key");
  return out;
}

Elem vector_key(const std::vector<long long>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

LamplighterElement parse_lamplighter_key(const Elem& key) {
  std::size_t bar = key.find('|');
  if (bar == std::string::npos)
    throw InvalidParameter("lamplighter key missing '|': '" + key + "'");
  LamplighterElement e;
  e.cursor = static_cast<int>(parse_ll(std::string_view(key).substr(0, bar)));
  for (std::string_view part : split(std::string_view(key).substr(bar + 1), ','))
    e.lamps.push_back(static_cast<int>(parse_ll(part)));
  for (std::size_t i = 0; i + 1 < e.lamps.size(); ++i)
    if (e.lamps[i] >= e.lamps[i + 1])
      throw InvalidParameter("lamplighter lamps not sorted/distinct: '" + key + "'");
  return e;
}

Elem lamplighter_key(const LamplighterElement& e) {
  std::string out = std::to_string(e.cursor) + "|";
  for (std::size_t i = 0; i < e.lamps.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(e.lamps[i]);
  }
  return out;
}

// --- builtin models -----------------------------------------------------

namespace {

GeneratorSet letter_names(int k) {
  if (k < 1 || k > 26) throw InvalidParameter("rank must be between 1 and 26");
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  return GeneratorSet(std::move(names));
}

Presentation commutator_presentation(int k) {
  std::vector<Word> rels;
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) rels.push_back(Word({i, j, -i, -j}));
  return Presentation(letter_names(k), std::move(rels));
}

int checked_letter(const GeneratorSet& gens, int letter) {
  int g = letter > 0 ? letter : -letter;
  if (g < 1 || g > static_cast<int>(gens.size()))
    throw UnknownGenerator("letter outside the model's generator set");
  return g;
}

class FreeAbelianModel final : public GroupModel {
 public:
  explicit FreeAbelianModel(int k)
      : GroupModel(k == 1 ? "z" : "z^" + std::to_string(k), letter_names(k),
                   commutator_presentation(k), std::nullopt),
        k_(k) {
    check_relators();
  }

  Elem identity() const override {
    return vector_key(std::vector<long long>(static_cast<std::size_t>(k_), 0));
  }
  Elem apply_generator(const Elem& x, int letter) const override {
    std::vector<long long> v = coords(x);
    v[static_cast<std::size_t>(checked_letter(generators(), letter) - 1)] +=
        letter > 0 ? 1 : -1;
    return vector_key(v);
  }
  Elem multiply(const Elem& x, const Elem& y) const override {
    std::vector<long long> a = coords(x), b = coords(y);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return vector_key(a);
  }
  Elem invert(const Elem& x) const override {
    std::vector<long long> v = coords(x);
    for (long long& c : v) c = -c;
    return vector_key(v);
  }
  long long exact_length(const Elem& x) const override {
    long long n = 0;
    for (long long c : coords(x)) n += c < 0 ? -c : c;
    return n;
  }

 private:
  std::vector<long long> coords(const Elem& key) const {
    std::vector<long long> v = parse_vector_key(key);
    if (v.size() != static_cast<std::size_t>(k_))
      throw InvalidParameter("key '" + key + "' has wrong rank");
    return v;
  }
  int k_;
};

class FreeModel final : public GroupModel {
 public:
  explicit FreeModel(int k)
      : GroupModel("free:" + std::to_string(k), letter_names(k),
                   Presentation(letter_names(k), {}), std::nullopt) {}

  Elem identity() const override { return ""; }
  Elem apply_generator(const Elem& x, int letter) const override {
    checked_letter(generators(), letter);
    return render(free_reduce(word(x).appended(letter)));
  }
  Elem multiply(const Elem& x, const Elem& y) const override {
    return render(free_reduce(word(x) * word(y)));
  }
  Elem invert(const Elem& x) const override { return render(word(x).inverse()); }
  long long exact_length(const Elem& x) const override {
    return static_cast<long long>(free_reduce(word(x)).size());
  }

 private:
  Word word(const Elem& key) const { return parse_word(generators(), key); }
  Elem render(const Word& w) const { return render_word(generators(), w); }
};

class CyclicModel final : public GroupModel {
 public:
  explicit CyclicModel(int n)
      : GroupModel("cyclic:" + std::to_string(n), letter_names(1),
                   Presentation(letter_names(1),
                                {Word(std::vector<int>(static_cast<std::size_t>(n), 1))}),
                   static_cast<std::uint64_t>(n)),
        n_(n) {
    check_relators();
  }

  Elem identity() const override { return "0"; }
  Elem apply_generator(const Elem& x, int letter) const override {
    checked_letter(generators(), letter);
    return key((value(x) + (letter > 0 ? 1 : n_ - 1)) % n_);
  }
  Elem multiply(const Elem& x, const Elem& y) const override {
    return key((value(x) + value(y)) % n_);
  }
  Elem invert(const Elem& x) const override { return key((n_ - value(x)) % n_); }
  long long exact_length(const Elem& x) const override {
    long long v = value(x);
    return std::min(v, n_ - v);
  }

 private:
  long long value(const Elem& x) const {
    long long v = parse_ll(x);
    if (v < 0 || v >= n_) throw InvalidParameter("key '" + x + "' out of range");
    return v;
  }
  static Elem key(long long v) { return std::to_string(v); }
  long long n_;
};

class LamplighterModel final : public GroupModel {
 public:
  LamplighterModel()
      : GroupModel("lamplighter", GeneratorSet({"a", "t"}), std::nullopt,
                   std::nullopt) {}

  Elem identity() const override { return "0|"; }

  Elem apply_generator(const Elem& x, int letter) const override {
    int g = checked_letter(generators(), letter);
    LamplighterElement e = parse_lamplighter_key(x);
    if (g == 1) {
      toggle(e.lamps, e.cursor);  // a is an involution, sign irrelevant
    } else {
      e.cursor += letter > 0 ? 1 : -1;
    }
    return lamplighter_key(e);
  }

  Elem multiply(const Elem& x, const Elem& y) const override {
    LamplighterElement a = parse_lamplighter_key(x);
    LamplighterElement b = parse_lamplighter_key(y);
    for (int lamp : b.lamps) toggle(a.lamps, lamp + a.cursor);
    a.cursor += b.cursor;
    return lamplighter_key(a);
  }

  Elem invert(const Elem& x) const override {
    LamplighterElement e = parse_lamplighter_key(x);
    for (int& lamp : e.lamps) lamp -= e.cursor;
    e.cursor = -e.cursor;
    return lamplighter_key(e);
  }

  // Toggle every lamp, then walk a minimal route from 0 to the cursor that
  // visits all lit positions: sweep left first or right first.
  long long exact_length(const Elem& x) const override {
    LamplighterElement e = parse_lamplighter_key(x);
    long long m = e.cursor;
    long long lo = e.lamps.empty() ? 0 : e.lamps.front();
    long long hi = e.lamps.empty() ? 0 : e.lamps.back();
    long long L = std::min({0LL, m, lo});
    long long R = std::max({0LL, m, hi});
    long long left_first = (0 - L) + (R - L) + (R - m);
    long long right_first = (R - 0) + (R - L) + (m - L);
    return static_cast<long long>(e.lamps.size()) + std::min(left_first, right_first);
  }

 private:
  static void toggle(std::vector<int>& lamps, int pos) {
    auto it = std::lower_bound(lamps.begin(), lamps.end(), pos);
    if (it != lamps.end() && *it == pos)
      lamps.erase(it);
    else
      lamps.insert(it, pos);
  }
};

class RewritingModel final : public GroupModel {
 public:
  RewritingModel(std::string descriptor, Presentation P, RewriteSystem system,
                 std::optional<std::uint64_t> order)
      : GroupModel(std::move(descriptor), P.generators(), P, order),
        system_(std::move(system)) {
    check_relators();
  }

  Elem identity() const override { return ""; }
  Elem apply_generator(const Elem& x, int letter) const override {
    checked_letter(generators(), letter);
    std::vector<int> w = letters(x);
    w.push_back(letter);
    return render(system_.normal_form(std::move(w)));
  }
  Elem multiply(const Elem& x, const Elem& y) const override {
    std::vector<int> w = letters(x);
    std::vector<int> v = letters(y);
    w.insert(w.end(), v.begin(), v.end());
    return render(system_.normal_form(std::move(w)));
  }
  Elem invert(const Elem& x) const override {
    std::vector<int> w = letters(x);
    std::reverse(w.begin(), w.end());
    for (int& l : w) l = -l;
    return render(system_.normal_form(std::move(w)));
  }
  long long exact_length(const Elem& x) const override {
    return static_cast<long long>(system_.normal_form(letters(x)).size());
  }

 private:
  std::vector<int> letters(const Elem& key) const {
    return parse_word(generators(), key).letters();
  }
  Elem render(const std::vector<int>& w) const {
    return render_word(generators(), Word(w));
  }
  RewriteSystem system_;
};

// Breadth-first closure of the normal-form language; std::nullopt above cap.
std::optional<std::uint64_t> enumerate_order(const RewriteSystem& system,
                                             std::size_t rank, std::size_t cap) {
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;
  seen.insert({});
  queue.push_back({});
  while (!queue.empty()) {
    std::vector<int> x = queue.front();
    queue.pop_front();
    for (std::size_t g = 1; g <= rank; ++g) {
      for (int letter : {static_cast<int>(g), -static_cast<int>(g)}) {
        std::vector<int> y = x;
        y.push_back(letter);
        y = system.normal_form(std::move(y));
        if (seen.insert(y).second) {
          if (seen.size() > cap) return std::nullopt;
          queue.push_back(std::move(y));
        }
      }
    }
  }
  return seen.size();
}

constexpr std::size_t kOrderEnumerationCap = 8192;

}  // namespace

ModelOrIncomplete complete_rewriting(const Presentation& P,
                                     const CompletionLimits& limits) {
  CompletionOutcome out = knuth_bendix(P, limits);
  if (const Incomplete* inc = std::get_if<Incomplete>(&out)) return *inc;
  RewriteSystem system = std::get<RewriteSystem>(std::move(out));
  std::optional<std::uint64_t> order =
      enumerate_order(system, P.generators().size(), kOrderEnumerationCap);
  return ModelPtr(std::make_shared<RewritingModel>("presentation:" + P.render(), P,
                                                   std::move(system), order));
}

ModelPtr make_builtin_model(Builtin kind, int param) {
  switch (kind) {
    case Builtin::FreeAbelian:
      return std::make_shared<FreeAbelianModel>(param);
    case Builtin::Free:
      return std::make_shared<FreeModel>(param);
    case Builtin::Lamplighter:
      return std::make_shared<LamplighterModel>();
    case Builtin::Cyclic:
      if (param < 1 || param > 1000000)
        throw InvalidParameter("cyclic order must be in [1, 1000000]");
      return std::make_shared<CyclicModel>(param);
    case Builtin::InfiniteDihedral: {
      Presentation P = parse_presentation("<a, b | a^2, b^2>");
      CompletionOutcome out = knuth_bendix(P, {});
      if (std::holds_alternative<Incomplete>(out))
        throw InternalError("dihedral completion did not terminate");
      return std::make_shared<RewritingModel>(
          "dihedral_inf", P, std::get<RewriteSystem>(std::move(out)), std::nullopt);
    }
  }
  throw InvalidParameter("unknown builtin model kind");
}

ModelPtr make_model(const std::string& descriptor) {
  auto tail_int = [&](std::size_t prefix_len) {
    return static_cast<int>(parse_ll(std::string_view(descriptor).substr(prefix_len)));
  };
  if (descriptor == "z") return make_builtin_model(Builtin::FreeAbelian, 1);
  if (descriptor.starts_with("z^"))
    return make_builtin_model(Builtin::FreeAbelian, tail_int(2));
  if (descriptor.starts_with("free:"))
    return make_builtin_model(Builtin::Free, tail_int(5));
  if (descriptor == "lamplighter") return make_builtin_model(Builtin::Lamplighter);
  if (descriptor == "dihedral_inf")
    return make_builtin_model(Builtin::InfiniteDihedral);
  if (descriptor.starts_with("cyclic:"))
    return make_builtin_model(Builtin::Cyclic, tail_int(7));
  if (descriptor.starts_with("presentation:")) {
    Presentation P = parse_presentation(descriptor.substr(13));
    ModelOrIncomplete out = complete_rewriting(P, {});
    if (const Incomplete* inc = std::get_if<Incomplete>(&out))
      throw BudgetExceeded("rewriting completion for '" + descriptor +
                               "' exhausted its budget; use a builtin model "
                               "or raise completion limits",
                           static_cast<long long>(inc->rules_found));
    return std::get<ModelPtr>(out);
  }
  throw InvalidParameter("unknown model descriptor '" + descriptor + "'");
}

}  // namespace coarse

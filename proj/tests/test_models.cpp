#include "coarselab/models.hpp"

#include <random>
#include <set>

#include "doctest.h"

using namespace coarse;

namespace {

// Oracle: abelianized coordinates of a word (letter counting).
std::vector<long long> abelian_eval(const Word& w, std::size_t rank) {
  std::vector<long long> v(rank, 0);
  for (int l : w.letters()) v[static_cast<std::size_t>((l > 0 ? l : -l) - 1)] +=
      l > 0 ? 1 : -1;
  return v;
}

// Oracle: lamplighter state machine simulated with a plain set.
struct LampSim {
  std::set<int> lamps;
  int cursor = 0;
  void apply(int letter) {
    if (letter == 1 || letter == -1) {
      if (!lamps.erase(cursor)) lamps.insert(cursor);
    } else {
      cursor += letter > 0 ? 1 : -1;
    }
  }
  Elem key() const {
    std::string out = std::to_string(cursor) + "|";
    bool first = true;
    for (int l : lamps) {
      if (!first) out += ',';
      first = false;
      out += std::to_string(l);
    }
    return out;
  }
};

// Oracle: naive leftmost rewriting with an explicit rule scan, independent
// of RewriteSystem::normal_form.
std::vector<int> naive_rewrite(std::vector<int> w, const std::vector<RewriteRule>& rules) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t pos = 0; pos < w.size() && !changed; ++pos) {
      for (const RewriteRule& r : rules) {
        if (pos + r.lhs.size() > w.size()) continue;
        if (!std::equal(r.lhs.begin(), r.lhs.end(), w.begin() + pos)) continue;
        std::vector<int> next(w.begin(), w.begin() + pos);
        next.insert(next.end(), r.rhs.begin(), r.rhs.end());
        next.insert(next.end(), w.begin() + pos + r.lhs.size(), w.end());
        w = std::move(next);
        changed = true;
        break;
      }
    }
  }
  return w;
}

// Oracle: enumerate all critical pairs of a rule set and check joinability
// under naive_rewrite.
bool confluence_oracle(const std::vector<RewriteRule>& rules) {
  for (const RewriteRule& r1 : rules) {
    for (const RewriteRule& r2 : rules) {
      // overlaps: suffix of l1 = prefix of l2
      for (std::size_t k = 1; k < std::min(r1.lhs.size(), r2.lhs.size()); ++k) {
        if (!std::equal(r2.lhs.begin(), r2.lhs.begin() + k, r1.lhs.end() - k))
          continue;
        std::vector<int> left = r1.rhs;
        left.insert(left.end(), r2.lhs.begin() + k, r2.lhs.end());
        std::vector<int> right(r1.lhs.begin(), r1.lhs.end() - k);
        right.insert(right.end(), r2.rhs.begin(), r2.rhs.end());
        if (naive_rewrite(left, rules) != naive_rewrite(right, rules)) return false;
      }
      // containments: l2 inside l1
      if (r2.lhs.size() > r1.lhs.size()) continue;
      for (std::size_t p = 0; p + r2.lhs.size() <= r1.lhs.size(); ++p) {
        if (&r1 == &r2 && p == 0 && r1.lhs.size() == r2.lhs.size()) continue;
        if (!std::equal(r2.lhs.begin(), r2.lhs.end(), r1.lhs.begin() + p)) continue;
        std::vector<int> right(r1.lhs.begin(), r1.lhs.begin() + p);
        right.insert(right.end(), r2.rhs.begin(), r2.rhs.end());
        right.insert(right.end(), r1.lhs.begin() + p + r2.lhs.size(), r1.lhs.end());
        if (naive_rewrite(r1.rhs, rules) != naive_rewrite(right, rules)) return false;
      }
    }
  }
  return true;
}

Word random_word(std::mt19937& rng, std::size_t max_len, int rank) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> g(1, rank);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<int> out;
  std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    int l = g(rng);
    out.push_back(sign(rng) ? l : -l);
  }
  return Word(std::move(out));
}

std::vector<ModelPtr> all_builtin_models() {
  return {make_builtin_model(Builtin::FreeAbelian, 1),
          make_builtin_model(Builtin::FreeAbelian, 2),
          make_builtin_model(Builtin::Free, 2),
          make_builtin_model(Builtin::Lamplighter),
          make_builtin_model(Builtin::InfiniteDihedral),
          make_builtin_model(Builtin::Cyclic, 12)};
}

}  // namespace

TEST_CASE("builtin models satisfy the documented examples") {
  ModelPtr z = make_builtin_model(Builtin::FreeAbelian, 1);
  CHECK(evaluate_word(*z, parse_word(z->generators(), "a a a a^-1")) == "2");

  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  const GeneratorSet& lg = lamp->generators();
  CHECK(evaluate_word(*lamp, parse_word(lg, "a t a t^-1")) == "0|0,1");
  CHECK(evaluate_word(*lamp, parse_word(lg, "t^5 a t^-5")) == "0|5");

  // a is torsion: a.a = identity
  Elem a = lamp->apply_generator(lamp->identity(), 1);
  CHECK(lamp->multiply(a, a) == lamp->identity());

  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  CHECK(evaluate_word(*z2, parse_word(z2->generators(), "a b a^-1 b^-1")) ==
        z2->identity());

  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  CHECK(evaluate_word(*f2, parse_word(f2->generators(), "a b")) == "a b");
  CHECK(evaluate_word(*f2, parse_word(f2->generators(), "a b b^-1 a^-1")) == "");
}

TEST_CASE("random words times their inverses evaluate to identity") {
  std::mt19937 rng(42);
  for (const ModelPtr& m : all_builtin_models()) {
    CAPTURE(m->descriptor());
    int rank = static_cast<int>(m->generators().size());
    for (int trial = 0; trial < 1000; ++trial) {
      Word w = random_word(rng, 20, rank);
      CHECK(evaluate_word(*m, w * w.inverse()) == m->identity());
    }
  }
}

TEST_CASE("relators and their cyclic conjugates evaluate to identity") {
  for (const ModelPtr& m : all_builtin_models()) {
    if (!m->has_presentation()) continue;
    CAPTURE(m->descriptor());
    for (const Word& r : m->presentation().relators()) {
      for (const Word& c : cyclic_conjugates(r)) {
        CHECK(evaluate_word(*m, c) == m->identity());
      }
    }
  }
}

TEST_CASE("apply_generator agrees with multiply by the generator element") {
  std::mt19937 rng(5);
  for (const ModelPtr& m : all_builtin_models()) {
    CAPTURE(m->descriptor());
    int rank = static_cast<int>(m->generators().size());
    for (int trial = 0; trial < 50; ++trial) {
      Elem x = evaluate_word(*m, random_word(rng, 12, rank));
      for (int l : m->generators().alphabet()) {
        Elem gen = m->apply_generator(m->identity(), l);
        CHECK(m->apply_generator(x, l) == m->multiply(x, gen));
      }
    }
  }
}

TEST_CASE("canonical keys are injective: z^2 against coordinate oracle") {
  std::mt19937 rng(11);
  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  for (int trial = 0; trial < 300; ++trial) {
    Word w1 = random_word(rng, 14, 2);
    Word w2 = random_word(rng, 14, 2);
    bool same_key = evaluate_word(*z2, w1) == evaluate_word(*z2, w2);
    bool same_oracle = abelian_eval(w1, 2) == abelian_eval(w2, 2);
    CHECK(same_key == same_oracle);
  }
}

TEST_CASE("canonical keys are injective: free(2) against reduction oracle") {
  std::mt19937 rng(12);
  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  for (int trial = 0; trial < 300; ++trial) {
    Word w1 = random_word(rng, 14, 2);
    Word w2 = random_word(rng, 14, 2);
    bool same_key = evaluate_word(*f2, w1) == evaluate_word(*f2, w2);
    bool same_oracle = free_reduce(w1) == free_reduce(w2);
    CHECK(same_key == same_oracle);
  }
}

TEST_CASE("lamplighter matches the set-based simulator") {
  std::mt19937 rng(13);
  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  for (int trial = 0; trial < 300; ++trial) {
    Word w = random_word(rng, 24, 2);
    LampSim sim;
    for (int l : w.letters()) sim.apply(l);
    CHECK(evaluate_word(*lamp, w) == sim.key());
  }
}

TEST_CASE("lamplighter cursor-zero elements form an infinite torsion family") {
  std::mt19937 rng(14);
  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  std::uniform_int_distribution<int> pos(-8, 8);
  for (int trial = 0; trial < 100; ++trial) {
    std::set<int> lamps;
    for (int i = 0, n = trial % 6 + 1; i < n; ++i) lamps.insert(pos(rng));
    LamplighterElement e{std::vector<int>(lamps.begin(), lamps.end()), 0};
    Elem x = lamplighter_key(e);
    CHECK(lamp->multiply(x, x) == lamp->identity());
    CHECK(x != lamp->identity());
  }
}

TEST_CASE("exact_length spot values") {
  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  CHECK(z2->exact_length("3,-4") == 7);
  CHECK(z2->exact_length(z2->identity()) == 0);

  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  CHECK(lamp->exact_length("0|5") == 11);  // walk to 5, toggle, walk back
  CHECK(lamp->exact_length("5|") == 5);
  CHECK(lamp->exact_length("0|") == 0);
  CHECK(lamp->exact_length("0|0") == 1);
  CHECK(lamp->exact_length("1|") == 1);
  CHECK(lamp->exact_length("0|-1,2") == 2 + (1 + 3 + 2));  // left sweep first

  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  CHECK(f2->exact_length("a b^-1 a") == 3);

  ModelPtr c12 = make_builtin_model(Builtin::Cyclic, 12);
  CHECK(c12->exact_length("7") == 5);
  CHECK(c12->exact_length("5") == 5);

  ModelPtr dih = make_builtin_model(Builtin::InfiniteDihedral);
  Elem ab5 = evaluate_word(*dih, parse_word(dih->generators(), "a b a b a b a b a b"));
  CHECK(dih->exact_length(ab5) == 10);
}

TEST_CASE("orders: known finite models report them") {
  CHECK(make_builtin_model(Builtin::Cyclic, 12)->order() == 12u);
  CHECK_FALSE(make_builtin_model(Builtin::FreeAbelian, 2)->is_finite());
  CHECK_FALSE(make_builtin_model(Builtin::Lamplighter)->is_finite());
  CHECK_FALSE(make_builtin_model(Builtin::InfiniteDihedral)->is_finite());
}

TEST_CASE("infinite dihedral generators are involutions with ab of infinite order") {
  ModelPtr dih = make_builtin_model(Builtin::InfiniteDihedral);
  Elem a = dih->apply_generator(dih->identity(), 1);
  Elem b = dih->apply_generator(dih->identity(), 2);
  CHECK(dih->multiply(a, a) == dih->identity());
  CHECK(dih->multiply(b, b) == dih->identity());
  Elem ab = dih->multiply(a, b);
  std::set<Elem> powers;
  Elem x = dih->identity();
  for (int i = 0; i < 20; ++i) {
    x = dih->multiply(x, ab);
    CHECK(powers.insert(x).second);
  }
}

TEST_CASE("completion of the rank-1 squared presentation gives the 2-element model") {
  Presentation P = parse_presentation("<a | a^2>");
  ModelOrIncomplete out = complete_rewriting(P);
  REQUIRE(std::holds_alternative<ModelPtr>(out));
  ModelPtr m = std::get<ModelPtr>(out);
  CHECK(m->order() == 2u);
  Elem a = m->apply_generator(m->identity(), 1);
  CHECK(a == "a");
  CHECK(m->multiply(a, a) == m->identity());
  CHECK(m->apply_generator(m->identity(), -1) == a);  // a^-1 rewrites to a
}

TEST_CASE("completion of the commutator presentation is confluent with a^m b^n forms") {
  Presentation P = parse_presentation("<a,b | a b a^-1 b^-1>");
  CompletionOutcome out = knuth_bendix(P, {});
  REQUIRE(std::holds_alternative<RewriteSystem>(out));
  const RewriteSystem& sys = std::get<RewriteSystem>(out);
  CHECK(confluence_oracle(sys.rules()));
  CHECK(sys.confluent());

  // normal forms are a-powers followed by b-powers
  std::mt19937 rng(21);
  ModelOrIncomplete model_out = complete_rewriting(P);
  ModelPtr m = std::get<ModelPtr>(model_out);
  for (int trial = 0; trial < 200; ++trial) {
    Word w = random_word(rng, 16, 2);
    std::vector<long long> v = abelian_eval(w, 2);
    std::vector<int> expected;
    for (long long i = 0; i < std::abs(v[0]); ++i) expected.push_back(v[0] > 0 ? 1 : -1);
    for (long long i = 0; i < std::abs(v[1]); ++i) expected.push_back(v[1] > 0 ? 2 : -2);
    CHECK(evaluate_word(*m, w) == render_word(m->generators(), Word(expected)));
    CHECK(m->exact_length(evaluate_word(*m, w)) == std::abs(v[0]) + std::abs(v[1]));
  }
}

TEST_CASE("completion with a starved budget reports Incomplete") {
  Presentation klein = parse_presentation("<a,b | a b a b^-1>");
  ModelOrIncomplete out = complete_rewriting(klein, {.max_rules = 1});
  REQUIRE(std::holds_alternative<Incomplete>(out));
  CHECK(std::get<Incomplete>(out).rules_found >= 1);
  CHECK(std::get<Incomplete>(out).budget_used >= 1);

  ModelOrIncomplete starved =
      complete_rewriting(parse_presentation("<a,b | a b a^-1 b^-1>"), {.max_steps = 2});
  CHECK(std::holds_alternative<Incomplete>(starved));
}

TEST_CASE("model descriptors parse") {
  CHECK(make_model("z")->descriptor() == "z");
  CHECK(make_model("z^2")->descriptor() == "z^2");
  CHECK(make_model("free:2")->descriptor() == "free:2");
  CHECK(make_model("lamplighter")->descriptor() == "lamplighter");
  CHECK(make_model("dihedral_inf")->descriptor() == "dihedral_inf");
  CHECK(make_model("cyclic:12")->descriptor() == "cyclic:12");

  ModelPtr pres = make_model("presentation:<a | a^2>");
  CHECK(pres->order() == 2u);
  CHECK(pres->descriptor() == "presentation:<a | a^2>");

  CHECK_THROWS_AS(make_model("q^2"), InvalidParameter);
  CHECK_THROWS_AS(make_model("free:0"), InvalidParameter);
  CHECK_THROWS_AS(make_model("cyclic:0"), InvalidParameter);
  CHECK_THROWS_AS(make_model("presentation:<a,b | a b a b^-1"), SyntaxError);
}

TEST_CASE("models without a presentation refuse to hand one out") {
  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  CHECK_FALSE(lamp->has_presentation());
  CHECK_THROWS_AS(lamp->presentation(), NoPresentation);
}

TEST_CASE("evaluate_word rejects letters outside the generator set") {
  ModelPtr z = make_builtin_model(Builtin::FreeAbelian, 1);
  CHECK_THROWS_AS(evaluate_word(*z, Word({2})), UnknownGenerator);
}

#include "coarselab/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace coarse {

Word::Word(std::vector<int> letters) : letters_(std::move(letters)) {
  for (int l : letters_)
    if (l == 0) throw InvalidParameter("word letter must be nonzero");
}

bool Word::is_freely_reduced() const noexcept {
  for (std::size_t i = 0; i + 1 < letters_.size(); ++i)
    if (letters_[i] == -letters_[i + 1]) return false;
  return true;
}

bool Word::is_cyclically_reduced() const noexcept {
  if (!is_freely_reduced()) return false;
  if (letters_.size() >= 2 && letters_.front() == -letters_.back()) return false;
  return true;
}

Word Word::inverse() const {
  std::vector<int> out(letters_.rbegin(), letters_.rend());
  for (int& l : out) l = -l;
  return Word(std::move(out));
}

Word Word::prefix(std::size_t len) const {
  if (len > letters_.size()) throw InvalidParameter("prefix longer than word");
  return Word(std::vector<int>(letters_.begin(), letters_.begin() + len));
}

Word Word::appended(int letter) const {
  std::vector<int> out = letters_;
  out.push_back(letter);
  return Word(std::move(out));
}

Word operator*(const Word& a, const Word& b) {
  std::vector<int> out = a.letters();
  out.insert(out.end(), b.letters().begin(), b.letters().end());
  return Word(std::move(out));
}

bool lex_less(const Word& a, const Word& b) {
  const auto& x = a.letters();
  const auto& y = b.letters();
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] != y[i]) return letter_rank(x[i]) < letter_rank(y[i]);
  }
  return x.size() < y.size();
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return lex_less(a, b);
}

Word free_reduce(const Word& w) {
  std::vector<int> stack;
  stack.reserve(w.size());
  for (int l : w.letters()) {
    if (!stack.empty() && stack.back() == -l)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  auto ls = r.letters();
  std::size_t lo = 0, hi = ls.size();
  while (hi - lo >= 2 && ls[lo] == -ls[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(std::vector<int>(ls.begin() + lo, ls.begin() + hi));
}

std::vector<Word> cyclic_conjugates(const Word& r) {
  if (r.empty()) throw EmptyWord("cyclic_conjugates");
  std::set<std::vector<int>> seen;
  std::vector<Word> out;
  auto add_rotations = [&](const Word& w) {
    const auto& ls = w.letters();
    for (std::size_t s = 0; s < ls.size(); ++s) {
      std::vector<int> rot;
      rot.reserve(ls.size());
      rot.insert(rot.end(), ls.begin() + s, ls.end());
      rot.insert(rot.end(), ls.begin(), ls.begin() + s);
      if (seen.insert(rot).second) out.emplace_back(std::move(rot));
    }
  };
  add_rotations(r);
  add_rotations(r.inverse());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

GeneratorSet::GeneratorSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw EmptyGeneratorSet();
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty() || !ident_start(n[0]) ||
        !std::all_of(n.begin(), n.end(), ident_char))
      throw InvalidParameter("invalid generator name '" + n + "'");
    if (!seen.insert(n).second)
      throw InvalidParameter("duplicate generator name '" + n + "'");
  }
}

std::optional<std::size_t> GeneratorSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::string GeneratorSet::letter_text(int letter) const {
  int g = letter > 0 ? letter : -letter;
  const std::string& n = names_.at(static_cast<std::size_t>(g - 1));
  return letter > 0 ? n : n + "^-1";
}

std::vector<int> GeneratorSet::alphabet() const {
  std::vector<int> out;
  out.reserve(2 * names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out.push_back(static_cast<int>(i) + 1);
    out.push_back(-(static_cast<int>(i) + 1));
  }
  return out;
}

Presentation::Presentation(GeneratorSet generators, std::vector<Word> relators)
    : generators_(std::move(generators)) {
  relators_.reserve(relators.size());
  for (const Word& r : relators) {
    for (int l : r.letters()) {
      std::size_t g = static_cast<std::size_t>(l > 0 ? l : -l);
      if (g == 0 || g > generators_.size())
        throw UnknownGenerator("relator uses letter outside the generator set");
    }
    Word cr = cyclic_reduce(r);
    if (cr.empty())
      throw InvalidParameter("relator '" + render_word(generators_, r) +
                             "' reduces to the empty word");
    relators_.push_back(std::move(cr));
  }
}

std::size_t max_relator_length(const Presentation& p) {
  if (p.relators().empty()) throw NoRelators();
  std::size_t m = 0;
  for (const Word& r : p.relators()) m = std::max(m, r.size());
  return m;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class Scanner {
 public:
  explicit Scanner(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::size_t pos() {
    skip_ws();
    return pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    if (!consume(c)) throw SyntaxError(pos(), what);
  }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_]))
      throw SyntaxError(pos_, "identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  long integer() {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      neg = text_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw SyntaxError(pos_, "integer");
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) throw SyntaxError(start, "exponent of reasonable size");
      ++pos_;
    }
    return neg ? -v : v;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

// word := atom+ ; atom := ident ('^' int)?
Word scan_word(Scanner& sc, const GeneratorSet& gens) {
  std::vector<int> letters;
  bool any = false;
  while (ident_start(sc.peek())) {
    any = true;
    std::size_t at = sc.pos();
    std::string name = sc.identifier();
    auto idx = gens.index_of(name);
    if (!idx) throw SyntaxError(at, "generator name (got '" + name + "')");
    long exp = 1;
    if (sc.consume('^')) {
      exp = sc.integer();
      if (exp == 0) throw SyntaxError(at, "nonzero exponent");
    }
    int letter = static_cast<int>(*idx) + 1;
    if (exp < 0) {
      letter = -letter;
      exp = -exp;
    }
    for (long i = 0; i < exp; ++i) letters.push_back(letter);
  }
  if (!any) throw SyntaxError(sc.pos(), "word");
  return Word(std::move(letters));
}

}  // namespace

Presentation parse_presentation(const std::string& text) {
  Scanner sc(text);
  sc.expect('<', "'<'");
  if (sc.peek() == '|') throw EmptyGeneratorSet();
  std::vector<std::string> names;
  names.push_back(sc.identifier());
  while (sc.consume(',')) names.push_back(sc.identifier());
  GeneratorSet gens(std::move(names));
  sc.expect('|', "'|'");
  std::vector<Word> relators;
  if (sc.peek() != '>') {
    relators.push_back(scan_word(sc, gens));
    while (sc.consume(',')) relators.push_back(scan_word(sc, gens));
  }
  sc.expect('>', "'>'");
  if (!sc.at_end()) throw SyntaxError(sc.pos(), "end of input");
  return Presentation(std::move(gens), std::move(relators));
}

Word parse_word(const GeneratorSet& gens, const std::string& text) {
  Scanner sc(text);
  if (sc.at_end()) return Word();
  Word w = scan_word(sc, gens);
  if (!sc.at_end()) throw SyntaxError(sc.pos(), "end of input");
  return w;
}

std::string render_word(const GeneratorSet& gens, const Word& w) {
  std::ostringstream os;
  const auto& ls = w.letters();
  std::size_t i = 0;
  bool first = true;
  while (i < ls.size()) {
    std::size_t j = i;
    while (j < ls.size() && ls[j] == ls[i]) ++j;
    long run = static_cast<long>(j - i);
    long exp = ls[i] > 0 ? run : -run;
    int g = ls[i] > 0 ? ls[i] : -ls[i];
    if (!first) os << ' ';
    first = false;
    os << gens.name(static_cast<std::size_t>(g - 1));
    if (exp != 1) os << '^' << exp;
    i = j;
  }
  return os.str();
}

std::string Presentation::render() const {
  std::ostringstream os;
  os << '<';
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (i) os << ", ";
    os << generators_.name(i);
  }
  os << " |";
  for (std::size_t i = 0; i < relators_.size(); ++i) {
    os << (i ? ", " : " ") << render_word(generators_, relators_[i]);
  }
  os << '>';
  return os.str();
}

}  // namespace coarse

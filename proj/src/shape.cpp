#include "sigcum/shape.hpp"

#include "sigcum/errors.hpp"

#include <atomic>
#include <limits>

namespace sigcum {

namespace {
std::atomic<std::size_t> g_max_coefficients{10'000'000};
}

std::size_t max_coefficients() { return g_max_coefficients.load(); }
void set_max_coefficients(std::size_t limit) { g_max_coefficients.store(limit); }

AlgebraShape::AlgebraShape(int d, int depth) : d_(d), n_(depth) {
  if (d < 1) throw ShapeError("alphabet size d must be >= 1");
  if (depth < 0) throw ShapeError("truncation level N must be >= 0");
  const std::size_t limit = max_coefficients();
  auto powers = std::make_shared<std::vector<std::size_t>>();
  auto offsets = std::make_shared<std::vector<std::size_t>>();
  powers->reserve(static_cast<std::size_t>(depth) + 1);
  offsets->reserve(static_cast<std::size_t>(depth) + 2);
  std::size_t p = 1;
  std::size_t total = 0;
  for (int k = 0; k <= depth; ++k) {
    if (k > 0) {
      if (p > limit / static_cast<std::size_t>(d))
        throw ResourceError("tensor shape (d=" + std::to_string(d) + ", N=" +
                            std::to_string(depth) + ") exceeds the memory guard of " +
                            std::to_string(limit) + " coefficients");
      p *= static_cast<std::size_t>(d);
    }
    powers->push_back(p);
    offsets->push_back(total);
    total += p;
    if (total > limit)
      throw ResourceError("tensor shape (d=" + std::to_string(d) + ", N=" +
                          std::to_string(depth) + ") exceeds the memory guard of " +
                          std::to_string(limit) + " coefficients");
  }
  offsets->push_back(total);
  powers_ = std::move(powers);
  offsets_ = std::move(offsets);
}

std::size_t word_index(const Word& w, int d) {
  std::size_t idx = 0;
  for (int letter : w) {
    if (letter < 1 || letter > d)
      throw ShapeError("letter " + std::to_string(letter) + " outside 1.." + std::to_string(d));
    idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(letter - 1);
  }
  return idx;
}

Word word_from_index(std::size_t index, int level, int d) {
  Word w(static_cast<std::size_t>(level));
  for (int j = level - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(d)) + 1;
    index /= static_cast<std::size_t>(d);
  }
  return w;
}

std::string word_label(const Word& w, int d) {
  if (w.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (d > 9 && i > 0) s += ',';
    s += std::to_string(w[i]);
  }
  return s;
}

Word parse_word(const std::string& text, int d) {
  Word w;
  if (text == "()" || text.empty()) return w;
  if (d <= 9 && text.find(',') == std::string::npos) {
    for (char c : text) {
      if (c < '1' || c > '9') throw InputError("bad word label '" + text + "'");
      w.push_back(c - '0');
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find(',', pos);
      if (next == std::string::npos) next = text.size();
      try {
        w.push_back(std::stoi(text.substr(pos, next - pos)));
      } catch (const std::exception&) {
        throw InputError("bad word label '" + text + "'");
      }
      pos = next + 1;
    }
  }
  for (int letter : w)
    if (letter < 1 || letter > d) throw InputError("word '" + text + "' has a letter outside 1..d");
  return w;
}

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* what) {
  if (a != b)
    throw ShapeError(std::string(what) + ": shape mismatch (d=" + std::to_string(a.dim()) +
                     ", N=" + std::to_string(a.depth()) + ") vs (d=" + std::to_string(b.dim()) +
                     ", N=" + std::to_string(b.depth()) + ")");
}

}  // namespace sigcum

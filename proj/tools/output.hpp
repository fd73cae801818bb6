#pragma once

#include "sigcum/json_io.hpp"
#include "sigcum/sym_tensor.hpp"
#include "sigcum/tensor.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace sigcum::cli {

enum class Format { Text, Json, Csv };

Format parse_format(const std::string& name);

// A coefficient table keyed by word, plus run metadata (seed, residuals, solver counters).
struct Report {
  std::vector<std::string> columns{"value"};
  struct Row {
    std::string word;
    std::vector<json> cells;
  };
  std::vector<Row> rows;
  json meta = json::object();
  // When set, JSON output is this object (a tensor in the library's format) merged with `meta`.
  json payload;
  // Text output drops rows whose cells are all zero.
  bool sparse_text = true;

  void add_row(std::string word, std::vector<json> cells) { rows.push_back({std::move(word), std::move(cells)}); }
};

// Rows in word order: by level, then lexicographic in the letters.
template <class S>
Report tensor_report(const Tensor<S>& x) {
  Report r;
  for (int k = 0; k <= x.depth(); ++k) {
    auto lv = x.level(k);
    for (std::size_t i = 0; i < lv.size(); ++i)
      r.add_row(word_label(word_from_index(i, k, x.dim()), x.dim()), {scalar_to_json(lv[i])});
  }
  r.payload = to_json(x);
  return r;
}

template <class S>
Report sym_tensor_report(const SymTensor<S>& x) {
  Report r;
  for (int k = 0; k <= x.depth(); ++k) {
    auto lv = x.level(k);
    for (std::size_t i = 0; i < lv.size(); ++i)
      r.add_row(word_label(x.shape().word(k, i), x.dim()), {scalar_to_json(lv[i])});
  }
  r.payload = to_json(x);
  return r;
}

void write_report(std::ostream& out, const Report& r, Format f);

// Writes to `path`, or stdout when it is empty.
void emit(const Report& r, Format f, const std::string& path);

}  // namespace sigcum::cli

#include "output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace sigcum::cli {

namespace {

// Shortest round-trip form for doubles, exact p/q strings for rationals.
std::string cell_text(const json& c) {
  if (c.is_string()) return c.get<std::string>();
  if (c.is_number_float()) return fmt::format("{}", c.get<double>());
  if (c.is_null()) return "";
  return c.dump();
}

bool is_zero_cell(const json& c) {
  if (c.is_number()) return c.get<double>() == 0.0;
  return c.is_string() && c.get<std::string>() == "0";
}

void write_meta_comments(std::ostream& out, const json& meta) {
  for (const auto& [k, v] : meta.items()) out << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "text") return Format::Text;
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw InputError("unknown output format '" + name + "'");
}

void write_report(std::ostream& out, const Report& r, Format f) {
  switch (f) {
    case Format::Json: {
      json j;
      if (!r.payload.is_null()) {
        j = r.payload;
      } else {
        j = json::object();
        j["columns"] = r.columns;
        json rows = json::array();
        for (const auto& row : r.rows) {
          json o{{"word", row.word}};
          for (std::size_t i = 0; i < row.cells.size() && i < r.columns.size(); ++i) o[r.columns[i]] = row.cells[i];
          rows.push_back(std::move(o));
        }
        j["rows"] = std::move(rows);
      }
      for (const auto& [k, v] : r.meta.items()) j[k] = v;
      out << j.dump(2) << '\n';
      return;
    }
    case Format::Csv: {
      write_meta_comments(out, r.meta);
      out << "word";
      for (const auto& c : r.columns) out << ',' << c;
      out << '\n';
      for (const auto& row : r.rows) {
        out << row.word;
        for (const auto& c : row.cells) out << ',' << cell_text(c);
        out << '\n';
      }
      return;
    }
    case Format::Text: {
      write_meta_comments(out, r.meta);
      std::size_t width = 0;
      for (const auto& row : r.rows) width = std::max(width, row.word.size());
      const bool header = r.columns.size() > 1;
      if (header) {
        out << fmt::format("{:<{}}", "word", width);
        for (const auto& c : r.columns) out << "  " << fmt::format("{:>24}", c);
        out << '\n';
      }
      bool any = false;
      for (const auto& row : r.rows) {
        if (r.sparse_text && std::all_of(row.cells.begin(), row.cells.end(), is_zero_cell)) continue;
        any = true;
        if (header) {
          out << fmt::format("{:<{}}", row.word, width);
          for (const auto& c : row.cells) out << "  " << fmt::format("{:>24}", cell_text(c));
        } else {
          // The empty word is the scalar: "1" alone for the unit.
          if (row.word != "()") out << row.word << ' ';
          out << cell_text(row.cells.front());
        }
        out << '\n';
      }
      if (!any && !header) out << "0\n";
      return;
    }
  }
}

void emit(const Report& r, Format f, const std::string& path) {
  if (path.empty()) {
    write_report(std::cout, r, f);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  write_report(out, r, f);
}

}  // namespace sigcum::cli

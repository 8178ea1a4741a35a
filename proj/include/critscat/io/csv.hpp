#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "critscat/io/format.hpp"

namespace critscat::io {

/// Metadata lines written as "# key: value" before the header row.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using Cell = std::variant<double, long long, std::string>;

/**
 * RFC-4180 table (CRLF line ends, quoted fields where needed) built in memory and written
 * in one go, so a file is either complete or absent.
 */
class CsvTable {
 public:
  CsvTable(std::vector<std::string> columns, Metadata meta = {})
      : columns_(std::move(columns)), meta_(std::move(meta)) {}

  void add(std::vector<Cell> row) {
    require(row.size() == columns_.size(), ErrorCode::InvalidArgument, "csv row width mismatch");
    rows_.push_back(std::move(row));
  }

  std::size_t rows() const noexcept { return rows_.size(); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\r\n";
    std::vector<std::string> head;
    for (const auto& c : columns_) head.push_back(csv_escape(c));
    line(out, head);
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : r) cells.push_back(cell(c));
      line(out, cells);
    }
    return out;
  }

  void write(const std::filesystem::path& path) const { write_text(path, str()); }

  static void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      require(static_cast<bool>(f), ErrorCode::IoError, "cannot write " + tmp);
      f << text;
      require(static_cast<bool>(f.flush()), ErrorCode::IoError, "write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  static std::string cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return csv_escape(std::get<std::string>(c));
  }
  static void line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += "\r\n";
  }

  std::vector<std::string> columns_;
  Metadata meta_;
  std::vector<std::vector<Cell>> rows_;
};

/// Minimal reader for tables written by CsvTable (quoted fields, "#" metadata skipped).
inline std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, at_start = true, comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (comment) {
      if (c == '\n') comment = false, at_start = true;
      continue;
    }
    if (at_start && c == '#') {
      comment = true;
      continue;
    }
    at_start = false;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
      else if (c == '"') quoted = false;
      else field += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      at_start = true;
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace critscat::io

#include "levyfluct/table_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace levyfluct {

namespace {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const OutTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw std::runtime_error("table row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      switch (row[i].kind) {
        case Cell::Kind::Number:
          out += format_number(row[i].number);
          break;
        case Cell::Kind::Text:
          out += csv_escape(row[i].text);
          break;
        case Cell::Kind::Flag:
          out += row[i].flag ? "true" : "false";
          break;
      }
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const OutTable& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw std::runtime_error("table row width does not match header");
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      switch (row[i].kind) {
        case Cell::Kind::Number:
          obj[t.columns[i]] = row[i].number;
          break;
        case Cell::Kind::Text:
          obj[t.columns[i]] = row[i].text;
          break;
        case Cell::Kind::Flag:
          obj[t.columns[i]] = row[i].flag;
          break;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace levyfluct

#pragma once

#include <string>
#include <vector>

namespace levyfluct {

// Column-named result table every command emits. Numbers are written in
// shortest round-trip form with '.' as the decimal separator regardless
// of locale, so a re-parse reproduces the doubles bitwise.

struct Cell {
  enum class Kind { Number, Text, Flag };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  bool flag = false;

  Cell(double v) : number(v) {}
  Cell(int v) : number(v) {}
  Cell(std::size_t v) : number(static_cast<double>(v)) {}
  Cell(const char* s) : kind(Kind::Text), text(s) {}
  Cell(std::string s) : kind(Kind::Text), text(std::move(s)) {}
  Cell(bool b) : kind(Kind::Flag), flag(b) {}
};

struct OutTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const OutTable& t);
std::string to_json(const OutTable& t);

// path empty = stdout
void write_text(const std::string& text, const std::string& path);

}  // namespace levyfluct

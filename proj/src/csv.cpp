#include "svlift/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace svlift::csv {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
void write_escaped(std::ostream& os, std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}
}  // namespace

void Writer::header(std::initializer_list<std::string_view> cols) {
  for (auto c : cols) field(c);
  end_row();
}

void Writer::header(const std::vector<std::string>& cols) {
  for (const auto& c : cols) field(std::string_view(c));
  end_row();
}

Writer& Writer::field(std::string_view s) {
  if (!first_) os_ << ',';
  write_escaped(os_, s);
  first_ = false;
  return *this;
}

Writer& Writer::field(double v) { return field(std::string_view(fmt(v))); }
Writer& Writer::field(long long v) { return field(std::string_view(std::to_string(v))); }
Writer& Writer::field(unsigned long long v) { return field(std::string_view(std::to_string(v))); }

void Writer::end_row() {
  os_ << '\n';
  first_ = true;
}

Table read(std::istream& is) {
  Table out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    row.push_back(std::move(cur));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace svlift::csv

#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace svlift::csv {

// Shortest round-trip representation is not used on purpose: fixed
// 17 significant digits keeps files byte-stable across platforms.
std::string fmt(double v);

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> cols);
  void header(const std::vector<std::string>& cols);

  Writer& field(std::string_view s);
  Writer& field(double v);
  Writer& field(long long v);
  Writer& field(unsigned long long v);
  Writer& field(std::size_t v) { return field(static_cast<unsigned long long>(v)); }
  Writer& field(int v) { return field(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ostream& os_;
  bool first_ = true;
};

using Table = std::vector<std::vector<std::string>>;

// Minimal RFC-4180 reader (quoted fields allowed). Lines starting with '#'
// are skipped so snapshot headers can carry metadata.
Table read(std::istream& is);

}  // namespace svlift::csv

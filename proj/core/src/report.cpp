#include "eoflab/report.hpp"

#include <cstdio>

namespace eoflab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RunReport::add(const std::string& key, const std::string& value) {
  fields_.emplace_back(key, value);
}

void RunReport::add(const std::string& key, double value) {
  fields_.emplace_back(key, format_double(value));
}

void RunReport::add(const std::string& key, long value) {
  fields_.emplace_back(key, std::to_string(value));
}

void RunReport::add(const std::string& key, int value) {
  fields_.emplace_back(key, std::to_string(value));
}

void RunReport::add(const std::string& key, bool value) {
  fields_.emplace_back(key, value ? "true" : "false");
}

void RunReport::add(const std::string& key, Cplx value) {
  fields_.emplace_back(key, format_double(value.real()) + (value.imag() < 0 ? "" : "+") +
                                format_double(value.imag()) + "i");
}

std::string RunReport::to_text() const {
  std::string out;
  for (const auto& [key, value] : fields_) {
    out += key;
    out += ": ";
    out += value;
    out += "\n";
  }
  return out;
}

}  // namespace eoflab

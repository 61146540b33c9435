#pragma once

#include <string>
#include <vector>

#include "eoflab/linalg.hpp"

namespace eoflab {

using la::Cplx;

/// Structured-text report with a stable field order. Values print with 17
/// significant digits so identical runs serialize byte-identically; the
/// timing field is volatile by nature and is excluded from determinism
/// comparisons.
class RunReport {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long value);
  void add(const std::string& key, int value);
  void add(const std::string& key, bool value);
  void add(const std::string& key, Cplx value);

  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string format_double(double v);

}  // namespace eoflab

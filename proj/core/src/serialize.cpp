#include "msll/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "msll/errors.hpp"

namespace msll {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v(i));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  const char* p = s.c_str();
  char* end = nullptr;
  const double x = std::strtod(p, &end);
  if (end == p || *end != '\0') {
    throw FormatError(context + ": cannot parse number '" + s + "'");
  }
  return x;
}

Vector parse_vector(const std::string& s, const std::string& context) {
  std::vector<double> vals;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    vals.push_back(parse_double(item, context));
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = vals[i];
  }
  return v;
}

}  // namespace msll

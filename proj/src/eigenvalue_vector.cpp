#include "symcurv/eigenvalue_vector.hpp"

#include <sstream>

namespace symcurv {

std::string to_string(const EigenvalueVector& v) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  out << ')';
  return out.str();
}

}  // namespace symcurv

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "commands.hpp"

namespace adiabatic::lab {

std::vector<double> EpsGrid::values() const {
  std::vector<double> out;
  out.reserve(count);
  double v = start;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(v);
    v *= factor;
  }
  return out;
}

EpsGrid parse_eps_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) {
    throw DomainError("--eps-grid: expected start:factor:count, got '" + text + "'");
  }
  auto number = [&](std::size_t begin, std::size_t end, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data() + begin, text.data() + end, v);
    if (res.ec != std::errc{} || res.ptr != text.data() + end) {
      throw DomainError(std::string("--eps-grid: bad ") + what + " in '" + text + "'");
    }
    return v;
  };
  EpsGrid g;
  g.start = number(0, first, "start");
  g.factor = number(first + 1, second, "factor");
  const double count = number(second + 1, text.size(), "count");
  if (!(g.start > 0.0) || !(g.factor > 0.0) || !(count >= 1.0) || count != std::floor(count)) {
    throw DomainError("--eps-grid: need start > 0, factor > 0 and an integer count >= 1");
  }
  g.count = static_cast<std::size_t>(count);
  return g;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DegeneracyError*>(&e)) return kExitDegeneracy;
  if (dynamic_cast<const ContinuationError*>(&e)) return kExitContinuation;
  if (dynamic_cast<const IntegrationError*>(&e)) return kExitIntegration;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitIntegration;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitDomain;
}

}  // namespace adiabatic::lab

#include "lsvr/map_params.hpp"

#include <cmath>
#include <sstream>

namespace lsvr {

std::vector<std::string> MapParams::violations() const {
  std::vector<std::string> out;
  auto bad = [](double v) { return !std::isfinite(v) || v <= 0.0; };
  if (bad(alpha)) out.emplace_back("alpha must be finite and > 0");
  if (bad(gamma)) out.emplace_back("gamma must be finite and > 0");
  if (bad(newton_tol)) out.emplace_back("newton_tol must be > 0");
  if (bad(branch_tail_tol)) out.emplace_back("tail_tol must be > 0");
  if (max_branches < 1) out.emplace_back("max_branches must be >= 1");
  return out;
}

std::vector<std::string> MapParams::weight_violations() const {
  std::vector<std::string> out;
  if (!(gamma > alpha)) {
    std::ostringstream os;
    os << "gamma (" << gamma << ") must exceed alpha (" << alpha
       << "): the weighted norm of the density is infinite otherwise";
    out.push_back(os.str());
  }
  if (l1_reporting && alpha < 1.0 && !(gamma < 1.0))
    out.emplace_back("L1 reporting requires gamma < 1");
  return out;
}

void MapParams::validate(bool require_weight) const {
  auto v = violations();
  if (require_weight) {
    auto w = weight_violations();
    v.insert(v.end(), w.begin(), w.end());
  }
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += s + "\n";
  msg.pop_back();
  throw ConfigError(msg);
}

double default_gamma(double alpha) {
  return alpha < 0.75 ? alpha + 0.25 : alpha + 0.1;
}

}  // namespace lsvr

#include "arl/learner.hpp"

#include <stdexcept>

namespace arl {

void LearnerConfig::validate() const {
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0,1]");
}

}  // namespace arl

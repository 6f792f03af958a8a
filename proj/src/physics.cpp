#include "nsch/physics.hpp"

#include <sstream>

namespace nsch {

namespace {

std::string floor_message(double c, double denominator) {
  std::ostringstream os;
  os << "density denominator " << denominator << " below floor " << kDensityFloor
     << " at c = " << c;
  return os.str();
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("PhysParams: ") + what);
}

}  // namespace

DensityFloorError::DensityFloorError(double c, double denominator)
    : std::domain_error(floor_message(c, denominator)), c_(c) {}

PhysParams::PhysParams(const PhysConstants& k) : k_(k) {
  require(k.rho1 > 0, "rho1 must be positive");
  require(k.rho2 > 0, "rho2 must be positive");
  require(k.Re > 0, "Re must be positive");
  require(k.Pe > 0, "Pe must be positive");
  require(k.M > 0, "M must be positive");
  require(k.C > 0, "C must be positive");
  require(k.invFr2 >= 0, "1/Fr^2 must be non-negative");
  require(k.eps > 0, "eps must be positive");
  alpha_ = (k.rho2 - k.rho1) / (k.rho1 * k.rho2);
}

}  // namespace nsch

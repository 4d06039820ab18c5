#include "bagcv/kernel.hpp"

#include "bagcv/calibrated_constants.hpp"

namespace bagcv {

KernelConstants gaussian_constants() noexcept { return gaussian_constants(calibrated::gaussian_r_v); }

KernelConstants gaussian_constants(double r_v) noexcept {
  return KernelConstants{
      .r_k = 0.5 * std::numbers::inv_sqrtpi,
      .mu2 = 1.0,
      .mu4 = 3.0,
      .int_vw = 0.1431285,
      .r_v = r_v,
  };
}

}  // namespace bagcv

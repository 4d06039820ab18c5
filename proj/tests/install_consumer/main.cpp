#include <bagcv/bagcv.hpp>
#include <cstdio>

int main() {
  const auto x = bagcv::mixture_sample(bagcv::preset(bagcv::Preset::std_normal), 200, 1);
  const auto r = bagcv::cv_minimize(x);
  std::printf("h=%.6f\n", r.h_opt);
  return r.h_opt > 0.0 ? 0 : 1;
}

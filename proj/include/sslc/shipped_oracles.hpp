#pragma once

// Oracle definitions shipped with the library, in the same JSON form
// accepted by `--config` files. Margins on the level set lambda_star:
//   two_bump    2-D, delta ≈ (0.3, 0.2), s0 = 0.3, gamma = 1
//   one_bump_1d 1-D, single component
//   three_bump  2-D, one component with eta = 1/2 (delta_j = 0)

#include <string_view>
#include <vector>

namespace sslc {

struct OracleSource {
  std::string_view name;
  std::string_view json;
};

inline const std::vector<OracleSource>& shipped_oracle_sources() {
  static const std::vector<OracleSource> sources{
      {"two_bump", R"({
  "name": "two_bump",
  "dim": 2, "lower": [0, 0], "upper": [1, 1],
  "background": {"weight": 0.1, "eta": 0.3},
  "components": [
    {"center": [0.22, 0.5], "radius": 0.2, "weight": 0.45, "eta": 0.92068},
    {"center": [0.78, 0.5], "radius": 0.2, "weight": 0.45, "eta": 0.21955}
  ],
  "lambda_star": 4.0,
  "r0": 0.05, "r0_c0": 1.0, "s0": 0.3,
  "gamma": 1.0, "gamma_c0": 0.1,
  "L": 10.85,
  "lma": {"C0": 1.2, "alpha": 1.0}
})"},
      {"one_bump_1d", R"({
  "name": "one_bump_1d",
  "dim": 1, "lower": [0], "upper": [1],
  "background": {"weight": 0.2, "eta": 0.4},
  "components": [
    {"center": [0.5], "radius": 0.3, "weight": 0.8, "eta": 0.85}
  ],
  "lambda_star": 1.2,
  "r0": 0.05, "r0_c0": 1.0, "s0": 0.0,
  "gamma": 1.0, "gamma_c0": 0.1,
  "L": 2.7,
  "lma": {"C0": 1.5, "alpha": 1.0}
})"},
      {"three_bump", R"({
  "name": "three_bump",
  "dim": 2, "lower": [0, 0], "upper": [1, 1],
  "background": {"weight": 0.1, "eta": 0.35},
  "components": [
    {"center": [0.25, 0.3], "radius": 0.17, "weight": 0.3, "eta": 0.9},
    {"center": [0.75, 0.3], "radius": 0.17, "weight": 0.3, "eta": 0.15},
    {"center": [0.5, 0.75], "radius": 0.17, "weight": 0.3, "eta": 0.5}
  ],
  "lambda_star": 4.0,
  "r0": 0.04, "r0_c0": 1.0, "s0": 0.25,
  "gamma": 1.0, "gamma_c0": 0.1,
  "L": 10.02,
  "lma": {"C0": 1.1, "alpha": 1.0}
})"},
  };
  return sources;
}

}  // namespace sslc

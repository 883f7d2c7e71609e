#pragma once

#include <array>
#include <string_view>

namespace esaloha::presets {

// CC2420 radio power modes. Reference data only; the model ignores
// switching costs.
struct PowerMode {
  std::string_view name;
  double switching_time_ms;
  double switching_energy_uj;
  double current_ua;
};

inline constexpr std::array<PowerMode, 4> kCc2420{{
    {"tx", 0.0, 0.0, 10000.0},
    {"idle", 0.1, 1.035, 426.0},
    {"power_down", 1.2, 42.3, 40.0},
    {"deep_sleep", 2.4, 85.7, 0.02},
}};

}  // namespace esaloha::presets

#pragma once

namespace g2node {

// Energy/time bridge: zeta axes are in µeV, interferometer delays in ps.
inline constexpr double kHbarMicroEvPs = 658.2119569;

}  // namespace g2node

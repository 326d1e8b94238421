#pragma once

#include <cstdint>

#include "policybound/panel.hpp"

namespace policybound {

// Seed pinned so the committed CSV under data/ can always be regenerated
// byte-for-byte.
inline constexpr std::uint64_t kAppPanelSeed = 20140101;

// Synthetic stand-in for the private application data: 50 states over
// 2009-2014 with the published expansion, PDMP-history, and rurality
// indicators but simulated outcomes (high-volume prescribers per 100k
// scale). Two states carry deliberately large effects of opposite sign so
// the bound and robustness pipelines have something to find.
Panel build_application_panel(std::uint64_t seed = kAppPanelSeed);

}  // namespace policybound

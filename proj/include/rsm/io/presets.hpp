#pragma once

#include <optional>
#include <string_view>

#include "rsm_presets_data.hpp"

namespace rsm::io {

inline std::optional<std::string_view> find_preset(std::string_view name) {
  for (const auto& p : kPresetTexts)
    if (p.name == name) return p.text;
  return std::nullopt;
}

}  // namespace rsm::io

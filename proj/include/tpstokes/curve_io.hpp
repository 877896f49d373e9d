#pragma once

// Plain-text interface records:
//   center cx cy
//   coeffs a0 a1 b1 a2 b2 ...
// one block per component, blocks separated by a blank line.

#include <filesystem>
#include <string>

#include "tpstokes/geometry.hpp"

namespace tpstokes {

std::string write_curves(const Interfaced& iface);

/// Node count for K modes when none is given: the smallest power of two
/// that is ≥ max(64, 4K + 4).
int default_node_count(int K);

/// `node_count` ≤ 0 uses default_node_count per component.
/// Throws GeometryError on malformed text or invalid curves.
Interfaced read_curves(const std::string& text, int node_count = 0);

void save_curves(const std::filesystem::path& path, const Interfaced& iface);
Interfaced load_curves(const std::filesystem::path& path, int node_count = 0);

}  // namespace tpstokes

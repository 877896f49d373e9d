#pragma once

// Deterministic, locale-independent text output.

#include <string>
#include <string_view>
#include <vector>

#include "tpstokes/evolution.hpp"
#include "tpstokes/geometry.hpp"
#include "tpstokes/spectra.hpp"

namespace tpstokes {

/// Shortest form with 17 significant digits; round-trips bit-exactly.
std::string format_double(double v);

/// Strict parse of a whole token; throws std::invalid_argument.
double parse_double(std::string_view token);

std::string ledger_header(std::size_t components);
std::string ledger_line(const LedgerRow& row);
std::string ledger_csv(const std::vector<LedgerRow>& rows);

/// One closed path per component in a viewBox scaled to the unit square.
std::string interface_svg(const Interfaced& iface, int samples_per_component = 256);

std::string spectrum_report_text(const SpectrumReport& report);

}  // namespace tpstokes

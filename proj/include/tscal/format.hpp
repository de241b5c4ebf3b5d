#pragma once

#include <string>

namespace tscal {

/// Shortest text that reads back to the same double (at most 17 significant digits).
std::string format_real(double value);

/// Fixed 17 significant digits, for tabular output.
std::string format_real_full(double value);

} // namespace tscal

#pragma once

#include <iosfwd>
#include <string>

namespace igo {

/// Writes a CSV table for `spec`:
///   critical_dt[:q_min=;q_max=;points=]   columns q, j1, j2, j2_ladder
///   linear_constants[:d=;q_min=;q_max=;points=]   columns q0, alpha, beta
/// The grid is uniform and includes both ends.
void write_table(std::ostream& out, const std::string& spec);

}  // namespace igo

#pragma once

#include <string>

#include "tractscope/field.hpp"

namespace tractscope {

// Binary PPM (P6) tract image: white where u > 0, dark gray where u < 0,
// black on level-crossing cells and masked points. Row 0 is y_max.
std::string render_ppm_bytes(const ScalarField& field);

void write_ppm(const ScalarField& field, const std::string& path);

} // namespace tractscope

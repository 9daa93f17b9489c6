#pragma once

#include <string>

#include "besic/rotation.hpp"

namespace besic {

enum class RenderTarget { arc_diagram, level_set, tube_stage, gamma_theta };

RenderTarget parse_render_target(const std::string& text);
const char* to_string(RenderTarget t);

struct RenderParams {
    int level = 1;
    Real theta = 0;   // gamma_theta only
    Real C = 16;      // tube_stage only
    std::size_t cap = 20'000;
};

// SVG 1.1 document in unit-square coordinates (y up), viewBox padded 5%.
// Layers: rectangles, arc, anchors, labels.
std::string render_svg(const TranslationField& v, RenderTarget target, const RenderParams& params);

} // namespace besic

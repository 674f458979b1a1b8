#pragma once

#include <string_view>

#include "chartbench/image.hpp"

namespace chartbench::detail {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kGlyphAdvance = 6;  // one blank column between glyphs

// Pixel width of a rendered string.
int text_width(std::string_view text, int scale = 1);

// Draws `text` with its top-left corner at (x, y). Bytes outside printable
// ASCII render as '?'.
void draw_text(Image& image, int x, int y, std::string_view text, Rgb color, int scale = 1);

}  // namespace chartbench::detail

#ifndef BCIWALL_CHART_HPP
#define BCIWALL_CHART_HPP

#include <filesystem>
#include <vector>

#include "bciwall/pipeline.hpp"

namespace bciwall {

// Standalone SVG: one panel per scenario, one row per task, paired markers
// for mean SNR (filled circle) and mean SNR-wall (open diamond) on a fixed
// -15..+15 dB axis. Values beyond the axis are clamped and drawn as arrow
// glyphs. Stored results are never clamped, only the drawing.
void render_chart(const std::vector<TaskSummary>& summaries,
                  const std::filesystem::path& path);

}  // namespace bciwall

#endif

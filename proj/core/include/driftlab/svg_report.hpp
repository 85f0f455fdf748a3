#ifndef DRIFTLAB_SVG_REPORT_HPP
#define DRIFTLAB_SVG_REPORT_HPP

#include <string>

#include "driftlab/datamodel.hpp"

namespace driftlab {

/// Renders the tensor as a standalone SVG 1.1 document: one panel per
/// metric, one polyline per classifier, x = evaluated chunk index, y fixed
/// to [0,1], with a shared legend.
std::string render_score_svg(const ScoreTensor& tensor);

/// Renders and writes the SVG to a file. Throws std::runtime_error when the
/// file cannot be written.
void write_score_svg(const ScoreTensor& tensor, const std::string& path);

}  // namespace driftlab

#endif  // DRIFTLAB_SVG_REPORT_HPP

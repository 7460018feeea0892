#pragma once

// Key strings naming a combination of algorithm settings, e.g.
// "LP_100_0.1_50_FKM": lbest PSO, plain map, SNR 100, lambda 0.1,
// 50 iterations, Fixed end knots, Keep end B-splines, Merge knots.

#include <string>
#include <string_view>

#include "shapes/model_search.hpp"

namespace shapes {

struct Label {
  char pso = 'L';
  KnotMapKind map = KnotMapKind::plain;
  double snr = 100.0;
  double lambda = 0.1;
  int iterations = 100;
  EndKnots end_knots = EndKnots::fixed;
  EndBsplines end_bsplines = EndBsplines::keep;
  KnotAdjust adjust = KnotAdjust::merge;

  friend bool operator==(const Label&, const Label&) = default;
};

/// Throws LabelError naming the offending field.
Label parse_label(std::string_view text);

/// Shortest round-trip representation of the numeric fields.
std::string format_label(const Label& label);

/// Applies the label's settings to `base` (SNR is not part of a fit config).
ShapesConfig apply_label(const Label& label, ShapesConfig base = {});

/// Label describing `config` at the given SNR.
Label label_of(const ShapesConfig& config, double snr);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace shapes

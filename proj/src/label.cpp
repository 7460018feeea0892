#include "shapes/label.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "shapes/errors.hpp"

namespace shapes {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double parse_number(std::string_view field, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw LabelError(std::string("label field ") + what + ": '" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

Label parse_label(std::string_view text) {
  const auto parts = split(text, '_');
  if (parts.size() != 5) {
    throw LabelError("label '" + std::string(text) + "' must have 5 underscore-separated fields");
  }
  Label label;
  const std::string_view head = parts[0];
  if (head.size() != 2) throw LabelError("label field PSO/map: expected two letters, got '" + std::string(head) + "'");
  if (head[0] != 'L') throw LabelError("label field PSO: unknown variant '" + std::string(1, head[0]) + "'");
  label.pso = head[0];
  if (head[1] == 'P') {
    label.map = KnotMapKind::plain;
  } else if (head[1] == 'C') {
    label.map = KnotMapKind::centered_monotonic;
  } else {
    throw LabelError("label field map: expected P or C, got '" + std::string(1, head[1]) + "'");
  }

  label.snr = parse_number(parts[1], "SNR");
  if (!(label.snr > 0.0)) throw LabelError("label field SNR: must be positive");
  label.lambda = parse_number(parts[2], "lambda");
  if (!(label.lambda >= 0.0)) throw LabelError("label field lambda: must be nonnegative");
  const double iterations = parse_number(parts[3], "N_iter");
  if (iterations < 1.0 || iterations != std::floor(iterations) || iterations > 1e9) {
    throw LabelError("label field N_iter: must be a positive integer");
  }
  label.iterations = static_cast<int>(iterations);

  const std::string_view tail = parts[4];
  if (tail.size() != 3) throw LabelError("label field options: expected three letters, got '" + std::string(tail) + "'");
  switch (tail[0]) {
    case 'F': label.end_knots = EndKnots::fixed; break;
    case 'V': label.end_knots = EndKnots::variable; break;
    default: throw LabelError("label field end knots: expected F or V, got '" + std::string(1, tail[0]) + "'");
  }
  switch (tail[1]) {
    case 'K': label.end_bsplines = EndBsplines::keep; break;
    case 'D': label.end_bsplines = EndBsplines::drop; break;
    default: throw LabelError("label field end B-splines: expected K or D, got '" + std::string(1, tail[1]) + "'");
  }
  switch (tail[2]) {
    case 'M': label.adjust = KnotAdjust::merge; break;
    case 'H': label.adjust = KnotAdjust::heal; break;
    default: throw LabelError("label field knot merging: expected M or H, got '" + std::string(1, tail[2]) + "'");
  }
  return label;
}

std::string format_label(const Label& label) {
  std::string out;
  out += label.pso;
  out += label.map == KnotMapKind::plain ? 'P' : 'C';
  out += '_' + format_number(label.snr);
  out += '_' + format_number(label.lambda);
  out += '_' + std::to_string(label.iterations);
  out += '_';
  out += label.end_knots == EndKnots::fixed ? 'F' : 'V';
  out += label.end_bsplines == EndBsplines::keep ? 'K' : 'D';
  out += label.adjust == KnotAdjust::merge ? 'M' : 'H';
  return out;
}

ShapesConfig apply_label(const Label& label, ShapesConfig base) {
  base.knots.map = label.map;
  base.knots.end_knots = label.end_knots;
  base.knots.adjust = label.adjust;
  base.end_bsplines = label.end_bsplines;
  base.lambda = label.lambda;
  base.swarm.num_iterations = label.iterations;
  return base;
}

Label label_of(const ShapesConfig& config, double snr) {
  Label label;
  label.map = config.knots.map;
  label.snr = snr;
  label.lambda = config.lambda;
  label.iterations = config.swarm.num_iterations;
  label.end_knots = config.knots.end_knots;
  label.end_bsplines = config.end_bsplines;
  label.adjust = config.knots.adjust;
  return label;
}

}  // namespace shapes

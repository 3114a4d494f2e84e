#include "gdl/grid.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "gdl/format.hpp"
#include "gdl/parallel.hpp"

namespace gdl {

GridSpec GridSpec::square(const Window& window, std::size_t resolution) {
  return {window, resolution, resolution};
}

void GridSpec::validate() const {
  if (!(window.re_max > window.re_min) || !(window.im_max > window.im_min)) {
    throw ConfigError("grid window is empty");
  }
  if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2 nodes per axis");
  const double hx = (window.re_max - window.re_min) / static_cast<double>(nx - 1);
  const double hy = (window.im_max - window.im_min) / static_cast<double>(ny - 1);
  if (std::abs(hx - hy) > 1e-12 * std::max(1.0, hx)) {
    throw ConfigError("grid cells must be square: step " + std::to_string(hx) + " along re, " +
                      std::to_string(hy) + " along im");
  }
}

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Predicted: return "predicted";
    case FieldKind::PredictedEps: return "predicted_eps";
    case FieldKind::Empirical: return "empirical";
  }
  return "unknown";
}

bool DensityField::has_value(std::size_t index) const {
  return index < values.size() && std::isfinite(values[index]);
}

double DensityField::mass() const {
  const double h = grid.step();
  CompensatedSum sum;
  for (double v : values)
    if (std::isfinite(v)) sum.add(v);
  return sum.value() * h * h;
}

std::string field_csv(const DensityField& field) {
  std::ostringstream out;
  out << "re,im,rho\n";
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    const cplx z = field.grid.node(k);
    out << format_double(z.real()) << ',' << format_double(z.imag()) << ','
        << format_double(field.values[k]) << '\n';
  }
  return out.str();
}

}  // namespace gdl

#include "gdl/ensembles.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gdl/format.hpp"
#include "gdl/rng.hpp"

namespace gdl {

namespace {

// Streams reserved for random deformations; noise samples use small stream indices.
constexpr std::uint64_t kWignerStream = 0xA5A5'0000'0000'0001ull;
constexpr std::uint64_t kGinibreDeformationStream = 0xA5A5'0000'0000'0002ull;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::string_view context) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidSpec("cannot parse real number '" + std::string(text) + "' in " +
                      std::string(context));
  }
  return value;
}

ComplexMatrix ginibre_matrix(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  const GaussianStream gauss(seed, stream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix h(n);
  for (std::size_t k = 0; k < n * n; ++k) h.data()[k] = scale * gauss.complex_normal(k);
  return h;
}

}  // namespace

cplx parse_complex_cell(std::string_view cell) {
  cell = trim(cell);
  const auto colon = cell.find(':');
  if (colon == std::string_view::npos) return {parse_real(cell, "complex cell"), 0.0};
  return {parse_real(cell.substr(0, colon), "complex cell"),
          parse_real(cell.substr(colon + 1), "complex cell")};
}

std::string EnsembleSpec::family() const {
  return std::visit(overloaded{[](const ensemble::Zero&) { return "zero"; },
                               [](const ensemble::Diagonal&) { return "diagonal"; },
                               [](const ensemble::JordanBlock&) { return "jordan"; },
                               [](const ensemble::HermitianWigner&) { return "wigner"; },
                               [](const ensemble::GinibreDeformation&) { return "ginibre"; },
                               [](const ensemble::FromFile&) { return "file"; }},
                    kind);
}

EnsembleSpec EnsembleSpec::resized(std::size_t new_n) const {
  EnsembleSpec out = *this;
  out.n = new_n;
  if (const auto* diag = std::get_if<ensemble::Diagonal>(&kind)) {
    ensemble::Diagonal scaled;
    for (const auto& atom : diag->atoms) {
      const std::size_t num = atom.count * new_n;
      if (num % n != 0) {
        throw InvalidSpec("diagonal atom multiplicity " + std::to_string(atom.count) + "/" +
                          std::to_string(n) + " does not scale to n=" + std::to_string(new_n));
      }
      scaled.atoms.push_back({atom.value, num / n});
    }
    out.kind = scaled;
  } else if (std::holds_alternative<ensemble::FromFile>(kind) && new_n != n) {
    throw InvalidSpec("a matrix read from file cannot be resized");
  }
  return out;
}

EnsembleSpec diagonal_from_weights(std::size_t n,
                                   const std::vector<std::pair<cplx, double>>& weighted) {
  ensemble::Diagonal diag;
  for (const auto& [value, weight] : weighted) {
    const double count = weight * static_cast<double>(n);
    const double rounded = std::round(count);
    if (!(weight > 0.0) || std::abs(count - rounded) > 1e-9) {
      throw InvalidSpec("diagonal atom weight " + std::to_string(weight) +
                        " does not give an integer multiplicity at n=" + std::to_string(n));
    }
    diag.atoms.push_back({value, static_cast<std::size_t>(rounded)});
  }
  return {diag, n};
}

ComplexMatrix build_deformation(const EnsembleSpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw InvalidSpec("ensemble dimension must be positive");
  return std::visit(
      overloaded{
          [&](const ensemble::Zero&) { return ComplexMatrix(n); },
          [&](const ensemble::Diagonal& d) {
            std::size_t total = 0;
            for (const auto& atom : d.atoms) total += atom.count;
            if (total != n) {
              throw InvalidSpec("diagonal multiplicities sum to " + std::to_string(total) +
                                ", expected n=" + std::to_string(n));
            }
            ComplexMatrix a(n);
            std::size_t i = 0;
            for (const auto& atom : d.atoms)
              for (std::size_t c = 0; c < atom.count; ++c, ++i) a(i, i) = atom.value;
            return a;
          },
          [&](const ensemble::JordanBlock& j) {
            if (j.block == 0 || n % j.block != 0) {
              throw InvalidSpec("Jordan block size " + std::to_string(j.block) +
                                " does not divide n=" + std::to_string(n));
            }
            ComplexMatrix a(n);
            for (std::size_t i = 0; i < n; ++i) {
              a(i, i) = j.eigenvalue;
              if ((i + 1) % j.block != 0) a(i, i + 1) = 1.0;
            }
            return a;
          },
          [&](const ensemble::HermitianWigner& w) {
            const ComplexMatrix g = ginibre_matrix(n, w.seed, kWignerStream);
            ComplexMatrix a(n);
            const double s = 1.0 / std::sqrt(2.0);
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j) a(i, j) = s * (g(i, j) + std::conj(g(j, i)));
            return a;
          },
          [&](const ensemble::GinibreDeformation& g) {
            return ginibre_matrix(n, g.seed, kGinibreDeformationStream);
          },
          [&](const ensemble::FromFile& f) {
            ComplexMatrix a = read_matrix_file(f.path);
            if (a.size() != n) {
              throw InvalidSpec("matrix file " + f.path.string() + " has n=" +
                                std::to_string(a.size()) + ", expected " + std::to_string(n));
            }
            return a;
          }},
      spec.kind);
}

NoiseSample sample_ginibre(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  return {ginibre_matrix(n, seed, stream), seed, stream};
}

Hermitization hermitize(const ComplexMatrix& a, cplx z) {
  ComplexMatrix m = a;
  m.shift_diagonal(-z);
  ComplexMatrix y0 = multiply_adjoint(m, m);
  const ComplexMatrix mh = m.adjoint();
  ComplexMatrix y0t = multiply_adjoint(mh, mh);
  return {std::move(y0), std::move(y0t)};
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open matrix file " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.substr(0, 2) != "n=") {
      throw InvalidSpec("matrix file " + path.string() + ": first line must be n=<integer>");
    }
    const auto digits = trim(t.substr(2));
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
      throw InvalidSpec("matrix file " + path.string() + ": bad dimension '" +
                        std::string(digits) + "'");
    }
    break;
  }
  if (n == 0) throw InvalidSpec("matrix file " + path.string() + " is empty");
  std::vector<cplx> entries;
  entries.reserve(n * n);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    std::size_t cells = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      entries.push_back(parse_complex_cell(t.substr(start, comma - start)));
      ++cells;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells != n) {
      throw InvalidSpec("matrix file " + path.string() + ": row " + std::to_string(rows + 1) +
                        " has " + std::to_string(cells) + " cells, expected " +
                        std::to_string(n));
    }
    ++rows;
  }
  if (rows != n) {
    throw InvalidSpec("matrix file " + path.string() + ": " + std::to_string(rows) +
                      " rows, expected " + std::to_string(n));
  }
  return ComplexMatrix(n, std::move(entries));
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::ostringstream out;
  out << "n=" << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j).real()) << ':' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
  write_file_atomically(path, out.str());
}

}  // namespace gdl

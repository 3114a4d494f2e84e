#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "gdl/linalg.hpp"

namespace gdl {

namespace ensemble {

struct Zero {};

/// Diagonal matrix; each atom appears `count` times, counts summing to n.
struct Diagonal {
  struct Atom {
    cplx value;
    std::size_t count;
  };
  std::vector<Atom> atoms;
};

/// eigenvalue * I plus a direct sum of nilpotent Jordan cells of size `block`
/// (block = 2 gives the block-Jordan family). Requires block | n.
struct JordanBlock {
  cplx eigenvalue = 0.0;
  std::size_t block = 2;
};

/// GUE matrix scaled so its spectrum fills [-2, 2] as n grows.
struct HermitianWigner {
  std::uint64_t seed = 0;
};

/// An independent Ginibre matrix with E|a_ij|^2 = 1/n.
struct GinibreDeformation {
  std::uint64_t seed = 0;
};

struct FromFile {
  std::filesystem::path path;
};

}  // namespace ensemble

struct EnsembleSpec {
  using Kind = std::variant<ensemble::Zero, ensemble::Diagonal, ensemble::JordanBlock,
                            ensemble::HermitianWigner, ensemble::GinibreDeformation,
                            ensemble::FromFile>;
  Kind kind = ensemble::Zero{};
  std::size_t n = 1;

  /// Same family at another size. Diagonal atom counts are rescaled proportionally and
  /// must stay integral; FromFile cannot be resized.
  EnsembleSpec resized(std::size_t new_n) const;
  /// Short stable name of the family ("zero", "diagonal", ...).
  std::string family() const;
};

/// Diagonal spec from atoms with fractional weights (weights * n must be integers).
EnsembleSpec diagonal_from_weights(std::size_t n,
                                   const std::vector<std::pair<cplx, double>>& weighted);

struct NoiseSample {
  ComplexMatrix matrix;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

struct Hermitization {
  ComplexMatrix y0;        ///< (A - z)(A - z)^*
  ComplexMatrix y0_tilde;  ///< (A - z)^*(A - z)
};

/// Builds A_n. Deterministic for a fixed spec. Throws InvalidSpec.
ComplexMatrix build_deformation(const EnsembleSpec& spec);

/// Ginibre noise with i.i.d. entries, real and imaginary parts N(0, 1/(2n)).
/// Entry (i, j) depends only on (seed, stream, i * n + j).
NoiseSample sample_ginibre(std::size_t n, std::uint64_t seed, std::uint64_t stream);

Hermitization hermitize(const ComplexMatrix& a, cplx z);

/// Dense matrix file: first line "n=<int>", then n rows of n comma separated "re:im" cells.
ComplexMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m);

/// Parses "re:im" (also accepts a bare real). Throws InvalidSpec.
cplx parse_complex_cell(std::string_view cell);

}  // namespace gdl

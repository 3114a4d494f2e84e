#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "gdl/ensembles.hpp"
#include "gdl/spectral_curve.hpp"
#include "test_support.hpp"

using namespace gdl;

namespace {

double distance_to_points(cplx p, const std::vector<cplx>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (const cplx& q : pts) d = std::min(d, std::abs(p - q));
  return d;
}

std::vector<cplx> all_points(const BoundaryPolyline& b) {
  std::vector<cplx> out;
  for (const auto& loop : b.loops) out.insert(out.end(), loop.points.begin(), loop.points.end());
  return out;
}

double signed_area(const BoundaryLoop& loop) {
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.points.size(); ++i) {
    const cplx p = loop.points[i], q = loop.points[(i + 1) % loop.points.size()];
    twice += p.real() * q.imag() - q.real() * p.imag();
  }
  return twice / 2.0;
}

}  // namespace

TEST_CASE("circular law boundary") {
  const Window w{-2.0, 2.0, -2.0, 2.0};
  const BoundaryPolyline b = trace_boundary(ComplexMatrix(4), w, 128);
  REQUIRE(b.loops.size() == 1);
  const BoundaryLoop& loop = b.loops.front();
  CHECK(loop.closed);
  const double cell = 4.0 / 127.0;
  for (const cplx& p : loop.points) CHECK(std::abs(std::abs(p) - 1.0) <= 2.0 * cell);
  for (int k = 0; k < 360; ++k) {
    const cplx c = std::polar(1.0, k * M_PI / 180.0);
    CHECK(distance_to_points(c, loop.points) <= 2.0 * cell);
  }
  // D on the left: the unit disk is traversed counterclockwise
  CHECK(signed_area(loop) == doctest::Approx(M_PI).epsilon(0.01));
  CHECK(b.resolution == 128);
  CHECK(b.boundary_tol == 1e-8);
}

TEST_CASE("boundary vertices are refined to the level set") {
  const ComplexMatrix a = build_deformation({ensemble::JordanBlock{}, 4});
  const BoundaryPolyline b = trace_boundary(a, {-2.0, 2.0, -2.0, 2.0}, 64);
  REQUIRE(!b.loops.empty());
  for (const cplx& p : all_points(b)) CHECK(std::abs(domain_verdict(a, p).inv_trace - 1.0) <= 1e-8);
}

TEST_CASE("two separated components") {
  const ComplexMatrix a = build_deformation(diagonal_from_weights(4, {{2.0, 0.5}, {-2.0, 0.5}}));
  const Window w{-3.5, 3.5, -3.5, 3.5};
  const BoundaryPolyline b = trace_boundary(a, w, 128);
  REQUIRE(b.loops.size() == 2);
  for (const auto& loop : b.loops) {
    CHECK(loop.closed);
    CHECK(signed_area(loop) > 0.0);
  }
  const double centre0 = b.loops[0].points.front().real(), centre1 = b.loops[1].points.front().real();
  CHECK(centre0 * centre1 < 0.0);

  // dense sign-change scan as an independent oracle
  const DeformationModel model(a);
  const std::size_t fine = 512;
  const double h = 7.0 / (fine - 1);
  auto f = [&](std::size_t i, std::size_t j) {
    return model.verdict({w.re_min + i * h, w.im_min + j * h}).inv_trace - 1.0;
  };
  std::vector<double> grid(fine * fine);
  for (std::size_t j = 0; j < fine; ++j)
    for (std::size_t i = 0; i < fine; ++i) grid[j * fine + i] = f(i, j);
  const std::vector<cplx> pts = all_points(b);
  const double coarse = 7.0 / 127.0;
  std::vector<cplx> crossings;
  for (std::size_t j = 0; j < fine; ++j) {
    for (std::size_t i = 0; i + 1 < fine; ++i) {
      const double v0 = grid[j * fine + i], v1 = grid[j * fine + i + 1];
      if ((v0 > 0.0) != (v1 > 0.0)) {
        const double t = v0 / (v0 - v1);
        crossings.emplace_back(w.re_min + (i + t) * h, w.im_min + j * h);
      }
      const double u0 = grid[i * fine + j], u1 = grid[(i + 1) * fine + j];
      if ((u0 > 0.0) != (u1 > 0.0)) {
        const double t = u0 / (u0 - u1);
        crossings.emplace_back(w.re_min + j * h, w.im_min + (i + t) * h);
      }
    }
  }
  REQUIRE(crossings.size() > 100);
  for (const cplx& c : crossings) CHECK(distance_to_points(c, pts) <= 2.0 * coarse);
  for (const cplx& p : pts) CHECK(distance_to_points(p, crossings) <= 2.0 * coarse);
}

TEST_CASE("boundary translates with the deformation") {
  const ComplexMatrix a = build_deformation({ensemble::JordanBlock{}, 4});
  const cplx c{0.5, -0.25};
  const BoundaryPolyline b0 = trace_boundary(a, {-2.0, 2.0, -2.0, 2.0}, 64);
  const BoundaryPolyline b1 =
      trace_boundary(gdl::testing::translated(a, c), {-1.5, 2.5, -2.25, 1.75}, 64);
  REQUIRE(b0.loops.size() == b1.loops.size());
  for (std::size_t l = 0; l < b0.loops.size(); ++l) {
    REQUIRE(b0.loops[l].points.size() == b1.loops[l].points.size());
    for (std::size_t i = 0; i < b0.loops[l].points.size(); ++i)
      CHECK(std::abs(b0.loops[l].points[i] + c - b1.loops[l].points[i]) < 1e-6);
  }
}

TEST_CASE("boundary errors") {
  CHECK_THROWS_AS(trace_boundary(ComplexMatrix(2), {5.0, 6.0, 5.0, 6.0}, 32), EmptyBoundary);
  CHECK_THROWS_AS(trace_boundary(ComplexMatrix(2), {-2.0, 2.0, -2.0, 2.0}, 8), ConfigError);
  CHECK_THROWS_AS(trace_boundary(ComplexMatrix(2), {2.0, -2.0, -2.0, 2.0}, 32), ConfigError);
}

TEST_CASE("boundary exports") {
  const BoundaryPolyline b = trace_boundary(ComplexMatrix(2), {-2.0, 2.0, -2.0, 2.0}, 32);
  const std::string csv = boundary_csv(b);
  CHECK(csv.rfind("loop_id,re,im\n", 0) == 0);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(static_cast<std::size_t>(lines) == 1 + b.loops.front().points.size());

  const auto j = nlohmann::json::parse(boundary_metadata_json(b));
  CHECK(j["resolution"] == 32);
  CHECK(j["boundary_tol"] == 1e-8);
  CHECK(j["window"].size() == 4);
  CHECK(j["loops"].size() == 1);
  CHECK(j["loops"][0]["closed"] == true);
}

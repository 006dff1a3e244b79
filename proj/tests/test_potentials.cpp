#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cyclegas/cycle.hpp"
#include "cyclegas/potential.hpp"
#include "doctest.h"

using namespace cyclegas;

TEST_CASE("gaussian potential is the squared norm") {
  auto v = gaussian_potential(2, 1.0);
  CHECK(v(Site{0, 0}) == 0.0);
  CHECK(v(Site{1, 0}) == 1.0);
  CHECK(v(Site{2, -1}) == 5.0);
  auto scaled = gaussian_potential(2, 2.5);
  CHECK(scaled(Site{2, -1}) == doctest::Approx(12.5));
  CHECK_THROWS(gaussian_potential(0));
  CHECK_THROWS(gaussian_potential(2, 0.0));
}

TEST_CASE("power law potential is the even norm power") {
  auto v = power_law_potential(2, 4);
  CHECK(v(Site{0, 0}) == 0.0);
  CHECK(v(Site{1, 0}) == doctest::Approx(1.0));
  CHECK(v(Site{1, 1}) == doctest::Approx(4.0));
  CHECK(v(Site{2, 0}) == doctest::Approx(16.0));
  CHECK_THROWS(power_law_potential(2, 3));
  CHECK_THROWS(power_law_potential(2, 1));
}

TEST_CASE("nearest neighbor potential forbids long jumps") {
  auto v = nearest_neighbor_potential(2);
  CHECK(v(Site{0, 0}) == 0.0);
  CHECK(v(Site{0, 1}) == 1.0);
  CHECK(v(Site{-1, 0}) == 1.0);
  CHECK(v(Site{1, 1}) == kInfiniteEnergy);
  CHECK(v(Site{2, 0}) == kInfiniteEnergy);
}

TEST_CASE("table potential validates convexity and nonnegativity") {
  std::map<Site, double> good{{Site{1}, 1.0}, {Site{-1}, 1.0}, {Site{2}, 4.0}, {Site{-2}, 4.0}};
  auto v = table_potential(1, good);
  CHECK(v(Site{1}) == 1.0);
  CHECK(v(Site{3}) == kInfiniteEnergy);
  CHECK(v(Site{0}) == 0.0);

  // Origin value is implicit and must not be overridden.
  CHECK_THROWS(table_potential(1, {{Site{0}, 1.0}, {Site{1}, 1.0}}));
  // Negative values are out.
  CHECK_THROWS(table_potential(1, {{Site{1}, -0.5}, {Site{-1}, 0.5}}));
  // Flat pair violates strict midpoint convexity against V(0) = 0.
  CHECK_THROWS(table_potential(1, {{Site{1}, 1.0}, {Site{2}, 1.0}}));
}

TEST_CASE("table potential loads from text rows") {
  auto path = std::filesystem::temp_directory_path() / "cyclegas_table_test.txt";
  {
    std::ofstream out(path);
    out << "# one dimensional quadratic on {-2..2}\n";
    out << "1 1.0\n-1 1.0\n\n2 4.0\n-2 4.0\n";
  }
  auto v = load_table_potential(path.string(), 1);
  CHECK(v(Site{-2}) == 4.0);
  CHECK(v(Site{2}) == 4.0);
  std::filesystem::remove(path);
  CHECK_THROWS(load_table_potential(path.string(), 1));
}

TEST_CASE("shifting tilts values but keeps cycle energies") {
  auto v = gaussian_potential(2, 1.0);
  Site e1{1, 0};
  auto vshift = shifted(v, e1);
  CHECK(vshift.is_shifted());
  // V_v(y) = V(y+v) - V(v); single values may go negative.
  CHECK(vshift(Site{-1, 0}) == -1.0);
  CHECK(vshift(Site{1, 0}) == 3.0);
  CHECK(vshift(Site{0, 0}) == 0.0);
  // Shifting twice accumulates the vectors.
  auto twice = shifted(vshift, Site{0, 2});
  CHECK(twice.shift == Site{1, 2});

  // Around a closed cycle the jump displacements sum to zero, so the cross
  // terms telescope away and the shifted energy equals the plain one. With
  // unit scale both sides are exact integer sums, hence bit equal.
  std::vector<Cycle> cycles = {
      canonicalize({Site{0, 0}, Site{1, 0}}),
      canonicalize({Site{0, 0}, Site{1, 0}, Site{1, 1}}),
      canonicalize({Site{0, 0}, Site{2, 1}, Site{1, 2}, Site{-1, 1}, Site{-2, 0}, Site{-1, -1}}),
  };
  for (const Site& shift_vec :
       {Site{1, 0}, Site{1, 1}, Site{3, 0}, Site{-2, 5}}) {
    for (const Cycle& c : cycles) {
      CHECK(cycle_energy(shifted(v, shift_vec), c) == cycle_energy(v, c));
      CHECK(weight_v(v, 1.0, c, shift_vec) == weight(v, 1.0, c));
    }
  }

  // Non-integer scales round per term; equality then holds to roundoff.
  auto vs = gaussian_potential(2, 0.7);
  for (const Cycle& c : cycles) {
    double a = cycle_energy(shifted(vs, Site{1, 1}), c);
    double b = cycle_energy(vs, c);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("cycle energy and weights") {
  auto v = gaussian_potential(2, 1.0);
  Cycle t = canonicalize({Site{0, 0}, Site{1, 0}});
  CHECK(cycle_energy(v, t) == 2.0);
  CHECK(weight(v, 1.0, t) == doctest::Approx(std::exp(-2.0)));
  CHECK(weight(v, 2.5, t) == doctest::Approx(std::exp(-5.0)));
  CHECK_THROWS(weight(v, 0.0, t));
  CHECK_THROWS(weight(v, -1.0, t));

  // Translation leaves every jump unchanged, so the energy is bit equal.
  Cycle far = translate(t, Site{137, -29});
  CHECK(cycle_energy(v, far) == cycle_energy(v, t));

  // Forbidden jumps give weight exactly zero.
  auto nn = nearest_neighbor_potential(2);
  Cycle diag = canonicalize({Site{0, 0}, Site{1, 1}});
  CHECK(cycle_energy(nn, diag) == kInfiniteEnergy);
  CHECK(weight(nn, 1.0, diag) == 0.0);
}

TEST_CASE("potential identifiers are stable and distinct") {
  CHECK(potential_id(gaussian_potential(2)) == potential_id(gaussian_potential(2)));
  CHECK(potential_id(gaussian_potential(2)) != potential_id(gaussian_potential(3)));
  CHECK(potential_id(gaussian_potential(2, 1.0)) != potential_id(gaussian_potential(2, 2.0)));
  CHECK(potential_id(nearest_neighbor_potential(2)) != potential_id(gaussian_potential(2)));
  auto v = gaussian_potential(2);
  CHECK(potential_id(shifted(v, Site{1, 0})) != potential_id(v));
  std::map<Site, double> rows{{Site{1}, 1.0}, {Site{-1}, 1.0}};
  CHECK(potential_id(table_potential(1, rows)) == potential_id(table_potential(1, rows)));
}

TEST_CASE("strong convexity modulus is structural") {
  CHECK(strong_convexity_modulus(gaussian_potential(2, 2.0)) == 2.0);
  CHECK(strong_convexity_modulus(gaussian_potential(3, 0.5)) == 0.5);
  CHECK_FALSE(strong_convexity_modulus(nearest_neighbor_potential(2)).has_value());
  CHECK_FALSE(strong_convexity_modulus(power_law_potential(2, 4)).has_value());
}

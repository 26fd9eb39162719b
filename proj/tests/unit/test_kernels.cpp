#include <doctest.h>

#include <cmath>
#include <fstream>

#include "droplab/errors.hpp"
#include "droplab/kernels.hpp"
#include "droplab/sampling.hpp"

using namespace droplab;

TEST_SUITE("kernels") {
  TEST_CASE("fractional kernel is the pure power") {
    KernelSpec ks;
    ks.dimension = 3;
    ks.s = 0.3;
    const Kernel k(ks);
    CHECK(k(Vec(2.0, 0.0, 0.0)) == doctest::Approx(std::pow(2.0, -3.3)).epsilon(1e-14));
    CHECK(k(Vec(0.0, 0.0, 0.5)) == doctest::Approx(std::pow(0.5, -3.3)).epsilon(1e-14));
    CHECK(k.homogeneous());
    CHECK(k.singularity_order() == doctest::Approx(3.3));
    CHECK_THROWS_AS(k(Vec()), DomainError);
  }

  TEST_CASE("truncated kernel caps the singularity") {
    KernelSpec ks;
    ks.kind = KernelKind::truncated_fractional;
    ks.cap = 10.0;
    const Kernel k(ks);
    CHECK(k.radial(0.01) == doctest::Approx(10.0));
    CHECK(k.radial(2.0) == doctest::Approx(std::pow(2.0, -2.5)));
    CHECK_FALSE(k.homogeneous());
  }

  TEST_CASE("tabulated kernel reproduces its samples") {
    KernelSpec ks;
    ks.kind = KernelKind::tabulated;
    for (double r : {0.1, 0.5, 1.0, 2.0, 8.0}) ks.table.emplace_back(r, std::pow(r, -2.5));
    const Kernel k(ks);
    for (const auto& [r, v] : ks.table) CHECK(k.radial(r) == doctest::Approx(v).epsilon(1e-12));
    // log-log interpolation is exact for a power law
    CHECK(k.radial(0.7) == doctest::Approx(std::pow(0.7, -2.5)).epsilon(1e-12));
  }

  TEST_CASE("parameter validation") {
    KernelSpec ks;
    ks.s = 1.0;
    CHECK_THROWS_AS(Kernel{ks}, ParameterError);
    ks.s = 0.5;
    ks.lambda = 0.5;
    CHECK_THROWS_AS(Kernel{ks}, ParameterError);
    ks.lambda = 1.0;
    ks.epsilon = 0.5 * epsilon_min(2, 0.5);
    CHECK_THROWS_AS(Kernel{ks}, ParameterError);
    KernelSpec tab;
    tab.kind = KernelKind::tabulated;
    tab.table = {{1.0, 1.0}, {0.5, 2.0}};
    CHECK_THROWS_AS(Kernel{tab}, ParameterError);
    CHECK_THROWS_AS(kernel_kind_from_string("gaussian"), ConfigError);
  }

  TEST_CASE("epsilon_min closed form") {
    CHECK(epsilon_min(2, 0.5) == doctest::Approx(std::pow(2.0, 1.0 / 1.5) - 1.0).epsilon(1e-15));
    CHECK(epsilon_min(3, 0.5) == doctest::Approx(std::pow(2.0, 1.0 / 2.5) - 1.0).epsilon(1e-15));
  }

  TEST_CASE("kernel table file") {
    CHECK_THROWS_AS(load_kernel_table("/nonexistent/kernel.csv"), PathError);
    const std::string path = "kernels_table_test.csv";
    {
      std::ofstream out(path);
      out << "radius,value\n0.5,5.6\n1,1\n2,0.17\n";
    }
    const auto t = load_kernel_table(path);
    REQUIRE(t.size() == 3);
    CHECK(t[1].first == 1.0);
    CHECK(t[2].second == doctest::Approx(0.17));
  }

  TEST_CASE("condition audit passes for the fractional kernel") {
    for (int n : {2, 3}) {
      KernelSpec ks;
      ks.dimension = n;
      const auto rep = validate_conditions(Kernel(ks));
      REQUIRE(rep.conditions.size() == 5);
      for (const auto& c : rep.conditions) {
        INFO(c.name << " " << to_string(c.verdict) << " " << c.note);
        CHECK(c.verdict == Verdict::pass);
      }
    }
  }

  TEST_CASE("truncation breaks only the lower sandwich bound") {
    KernelSpec ks;
    ks.kind = KernelKind::truncated_fractional;
    ks.cap = 4.0;
    const auto rep = validate_conditions(Kernel(ks));
    for (const char* name : {"K1", "K2", "K3", "K4"}) CHECK(rep.at(name).verdict == Verdict::pass);
    const auto& k4p = rep.at("K4'");
    CHECK(k4p.verdict == Verdict::fail);
    REQUIRE(k4p.witness.has_value());
    CHECK(norm(*k4p.witness) < std::pow(4.0, -1.0 / 2.5));
  }

  TEST_CASE("doubled fractional kernel breaks the upper sandwich bound") {
    KernelSpec ks;
    ks.kind = KernelKind::tabulated;
    for (double r : {0.01, 0.1, 1.0, 10.0, 100.0}) ks.table.emplace_back(r, 2.0 * std::pow(r, -2.5));
    const auto rep = validate_conditions(Kernel(ks));
    CHECK(rep.at("K4'").verdict == Verdict::fail);
    CHECK(rep.at("K4'").witness.has_value());
  }

  TEST_CASE("condition audit flags a table with a non-integrable tail") {
    // Past r = 1 the table decays like r^{-2}, so the radial density is 1/r.
    KernelSpec ks;
    ks.kind = KernelKind::tabulated;
    ks.table = {{0.1, std::pow(0.1, -2.5)}, {1.0, 1.0}, {10.0, 1e-2}, {100.0, 1e-4}};
    const auto rep = validate_conditions(Kernel(ks));
    CHECK(rep.at("K2").verdict == Verdict::fail);
    CHECK(rep.at("K2").witness.has_value());
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("worked evaluations and symmetry") {
    const Kernel k(KernelSpec{});
    CHECK(k(Vec(1.0, 0.0)) == 1.0);
    CHECK(k(Vec(2.0, 0.0)) == doctest::Approx(0.1767767).epsilon(1e-7));
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const Vec x(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
      CHECK(k(x) == k(-x));
    }
  }

  TEST_CASE("epsilon_min worked values") {
    CHECK(epsilon_min(3, 0.5) == doctest::Approx(0.319508).epsilon(1e-6));
    CHECK(epsilon_min(2, 0.5) == doctest::Approx(0.587401).epsilon(1e-6));
    CHECK(epsilon_min(2, 1.0 - 1e-9) == doctest::Approx(0.414214).epsilon(1e-6));
  }

  TEST_CASE("tail bound of the fractional kernel") {
    KernelSpec ks;
    ks.epsilon = 0.8;
    const Kernel k(ks);
    const double bound = std::pow(1.8, -(2.5 - 1.0));
    for (double r = 1.8; r < 1e4; r *= 1.7) CHECK(r * k.radial(r) <= bound * (1 + 1e-14));
  }

  TEST_CASE("audit is deterministic for a fixed plan") {
    KernelSpec ks;
    ks.kind = KernelKind::truncated_fractional;
    ks.cap = 3.0;
    const auto a = validate_conditions(Kernel(ks));
    const auto b = validate_conditions(Kernel(ks));
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
      CHECK(a.conditions[i].margin == b.conditions[i].margin);
      CHECK(a.conditions[i].verdict == b.conditions[i].verdict);
    }
  }
}

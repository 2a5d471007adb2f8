#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crbt/csr.hpp"
#include "crbt/rng.hpp"
#include "crbt/text_io.hpp"
#include "crbt/tomography.hpp"
#include "crbt/vector.hpp"
#include "oracles.hpp"

using crbt::CsrMatrix;
using crbt::Triplet;
using crbt::Vector;

namespace {

// random sparse matrix with ~density nnz, entries in [-1, 1]
CsrMatrix random_csr(int rows, int cols, double density, std::uint64_t seed) {
  std::vector<Triplet> trips;
  std::uint64_t ctr = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double u = crbt::counter_uniform(seed, ctr++);
      if (u < density)
        trips.push_back(
            {i, j, 2.0 * crbt::counter_uniform(seed, ctr++) - 1.0});
    }
  return crbt::csr_from_triplets(rows, cols, std::move(trips));
}

Vector random_vector(int n, std::uint64_t seed) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = crbt::counter_gaussian(seed, i);
  return v;
}

std::string temp_file(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("csr_from_triplets sorts, merges duplicates, validates") {
  const CsrMatrix a = crbt::csr_from_triplets(
      2, 3, {{1, 2, 4.0}, {0, 1, 1.0}, {0, 1, 2.0}, {1, 0, -1.0}});
  CHECK(a.is_valid());
  CHECK(a.n_rows == 2);
  CHECK(a.n_cols == 3);
  CHECK(a.nnz() == 3);
  CHECK(a.row_offsets == std::vector<int>{0, 1, 3});
  CHECK(a.col_indices == std::vector<int>{1, 0, 2});
  CHECK(a.values == std::vector<double>{3.0, -1.0, 4.0});

  CHECK_THROWS_AS(crbt::csr_from_triplets(2, 2, {{2, 0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(crbt::csr_from_triplets(2, 2, {{0, -1, 1.0}}),
                  std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(crbt::csr_from_triplets(1, 1, {{0, 0, inf}}),
                  std::invalid_argument);
}

TEST_CASE("csr_from_dense round-trips through the dense oracle") {
  const std::vector<std::vector<double>> rows = {
      {1.0, 0.0, -2.5}, {0.0, 0.0, 0.0}, {3.0, 4.0, 0.0}};
  const CsrMatrix a = crbt::csr_from_dense(rows);
  CHECK(a.is_valid());
  CHECK(a.nnz() == 4);
  const oracle::Dense d = oracle::dense_from_csr(a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(d.at(i, j) == rows[i][j]);
}

TEST_CASE("transpose is an involution and flips indices") {
  const CsrMatrix a = random_csr(7, 5, 0.4, 11);
  const CsrMatrix at = crbt::transpose(a);
  CHECK(at.n_rows == a.n_cols);
  CHECK(at.is_valid());
  const CsrMatrix back = crbt::transpose(at);
  CHECK(back.row_offsets == a.row_offsets);
  CHECK(back.col_indices == a.col_indices);
  CHECK(back.values == a.values);

  const oracle::Dense d = oracle::dense_from_csr(a);
  const oracle::Dense dt = oracle::dense_from_csr(at);
  for (int i = 0; i < a.n_rows; ++i)
    for (int j = 0; j < a.n_cols; ++j) CHECK(d.at(i, j) == dt.at(j, i));
}

TEST_CASE("matvec agrees with the dense oracle") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const CsrMatrix a = random_csr(13, 9, 0.5, seed);
    const Vector x = random_vector(9, seed + 100);
    const Vector got = crbt::matvec(a, x);
    const Vector want = oracle::dense_matvec(oracle::dense_from_csr(a), x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(crbt::matvec(random_csr(3, 4, 0.5, 1), Vector(3, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("matvec_transpose matches matvec on the transpose bitwise") {
  const CsrMatrix a = random_csr(17, 12, 0.3, 5);
  const CsrMatrix at = crbt::transpose(a);
  const Vector x = random_vector(17, 42);
  const Vector scatter = crbt::matvec_transpose(a, x);
  const Vector rowwise = crbt::matvec(at, x);
  CHECK(oracle::bits_equal(scatter, rowwise));
  const Vector dense = oracle::dense_matvec_t(oracle::dense_from_csr(a), x);
  for (std::size_t i = 0; i < dense.size(); ++i)
    CHECK(scatter[i] == doctest::Approx(dense[i]).epsilon(1e-14));
}

TEST_CASE("operator norm estimate brackets the Jacobi spectral norm") {
  SUBCASE("identity and zero") {
    CHECK(crbt::operator_norm_estimate(crbt::csr_identity(5)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    const CsrMatrix z = crbt::csr_from_triplets(4, 4, {});
    CHECK(crbt::operator_norm_estimate(z) == 0.0);
  }
  SUBCASE("random matrices") {
    for (const std::uint64_t seed : {3u, 8u, 21u}) {
      const CsrMatrix a = random_csr(10, 8, 0.6, seed);
      const double truth = oracle::spectral_norm(oracle::dense_from_csr(a));
      const double est = crbt::operator_norm_estimate(a, 200, seed);
      CHECK(est <= truth * (1.0 + 1e-10));
      CHECK(est >= truth * (1.0 - 1e-8));
    }
  }
  SUBCASE("projector matrix") {
    const CsrMatrix a =
        crbt::build_projector(12, 12, {{0.0, 30.0, 60.0, 90.0, 120.0}, 18});
    const double truth = oracle::spectral_norm(oracle::dense_from_csr(a));
    const double est = crbt::operator_norm_estimate(a, 300);
    CHECK(est <= truth * (1.0 + 1e-10));
    CHECK(est >= truth * (1.0 - 1e-6));
  }
}

TEST_CASE("matrix market io round-trips bitwise") {
  const CsrMatrix a = random_csr(9, 14, 0.35, 77);
  const std::string path = temp_file("crbt_test_mm.mtx");
  crbt::write_matrix_market(a, path);
  const CsrMatrix b = crbt::read_matrix_market(path);
  CHECK(b.n_rows == a.n_rows);
  CHECK(b.n_cols == a.n_cols);
  CHECK(b.row_offsets == a.row_offsets);
  CHECK(b.col_indices == a.col_indices);
  CHECK(b.values == a.values);
  std::remove(path.c_str());

  const std::string bad = temp_file("crbt_test_mm_bad.mtx");
  std::ofstream(bad) << "%%MatrixMarket matrix coordinate real general\n"
                     << "2 2 1\n"
                     << "3 1 1.0\n";  // row index out of range
  CHECK_THROWS(crbt::read_matrix_market(bad));
  std::remove(bad.c_str());
  CHECK_THROWS(crbt::read_matrix_market(temp_file("crbt_no_such_file.mtx")));
}

TEST_CASE("format_g17 and parse_double_strict round-trip exactly") {
  const double cases[] = {0.0,        1.0 / 3.0, 0.1,    -2.5e-300,
                          3.14159e17, 6.12e-17,  2.0 / 3.0, 1e308};
  for (const double v : cases) {
    const double back = crbt::parse_double_strict(crbt::format_g17(v));
    CHECK(back == v);
  }
  CHECK_THROWS(crbt::parse_double_strict(""));
  CHECK_THROWS(crbt::parse_double_strict("1.0x"));
  CHECK_THROWS(crbt::parse_double_strict("nan"));
  CHECK_THROWS(crbt::parse_double_strict("inf"));
  CHECK_THROWS(crbt::parse_double_strict("1e999"));
  CHECK(crbt::parse_double_strict("  42 ") == 42.0);
}

TEST_CASE("split handles empty fields") {
  const auto parts = crbt::split("a,,b,", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "a");
  CHECK(parts[1].empty());
  CHECK(parts[2] == "b");
  CHECK(parts[3].empty());
  CHECK(crbt::split("", ',').size() == 1);
}

TEST_CASE("counter rng is a pure function with sane moments") {
  CHECK(crbt::counter_uniform(9, 1234) == crbt::counter_uniform(9, 1234));
  CHECK(crbt::counter_uniform(9, 1234) != crbt::counter_uniform(10, 1234));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = crbt::counter_uniform(5, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  double mean = 0.0, var = 0.0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const double g = crbt::counter_gaussian(12345, i);
    mean += g;
    var += g * g;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("hash_bits fingerprints vectors") {
  const Vector a = {1.0, 2.0, 3.0};
  Vector b = a;
  CHECK(crbt::hash_bits(a) == crbt::hash_bits(b));
  b[1] = 2.0000000000000004;
  CHECK(crbt::hash_bits(a) != crbt::hash_bits(b));
}

TEST_CASE("lsqr matches the dense normal-equations oracle") {
  SUBCASE("overdetermined system") {
    const CsrMatrix a = random_csr(20, 8, 0.7, 31);
    const Vector y = random_vector(20, 99);
    const Vector got = crbt::lsqr_solve(a, y, 200);
    const Vector want = oracle::least_squares(oracle::dense_from_csr(a), y);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
  }
  SUBCASE("consistent square system solves exactly") {
    const CsrMatrix a = random_csr(10, 10, 0.8, 17);
    const Vector x_true = random_vector(10, 55);
    const Vector y = crbt::matvec(a, x_true);
    const Vector got = crbt::lsqr_solve(a, y, 300);
    const Vector r = crbt::sub(crbt::matvec(a, got), y);
    CHECK(crbt::norm2(r) < 1e-8 * crbt::norm2(y));
  }
  SUBCASE("zero rhs returns zero immediately") {
    const CsrMatrix a = random_csr(6, 4, 0.5, 3);
    const Vector got = crbt::lsqr_solve(a, Vector(6, 0.0), 50);
    CHECK(got == Vector(4, 0.0));
  }
}

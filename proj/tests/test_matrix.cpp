#include <limits>

#include "doctest.h"
#include "reloc/format.hpp"
#include "reloc/matrix.hpp"

using namespace reloc;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("benchmark matrix validates as irreducible, aperiodic, positive") {
  const auto s = validate_substochastic(benchmark_sigma());
  CHECK(s.size() == 2);
  CHECK(s.flags().irreducible);
  CHECK(s.flags().aperiodic);
  CHECK(s.flags().strictly_positive);
  CHECK_FALSE(s.proportional_to_stochastic());
  CHECK(s.space().label(0) == "1");
  CHECK(s.space().index_of("2") == 1);
  const auto sums = s.row_sums();
  CHECK(sums[0] == doctest::Approx(0.80).epsilon(1e-15));
  CHECK(sums[1] == doctest::Approx(0.76).epsilon(1e-15));
}

TEST_CASE("validation errors") {
  CHECK(code_of([] { validate_substochastic(Matrix(2, 3)); }) == ErrorCode::NotSquare);
  CHECK(code_of([] { validate_substochastic(Matrix{{0.5, -0.1}, {0.2, 0.2}}); }) == ErrorCode::NegativeEntry);
  CHECK(code_of([] { validate_substochastic(Matrix{{0.7, 0.4}, {0.2, 0.2}}); }) == ErrorCode::RowSumExceedsOne);
  CHECK(code_of([] { validate_substochastic(Matrix{{0.5, 0.0}, {0.2, 0.2}}); }) == ErrorCode::Reducible);
  CHECK(code_of([] { validate_substochastic(Matrix{{0.0, 0.9}, {0.9, 0.0}}); }) == ErrorCode::Periodic);
}

TEST_CASE("row sums within tolerance above one are clamped") {
  const auto s = validate_substochastic(Matrix{{0.5, 0.5 + 5e-13}, {0.3, 0.3}});
  CHECK(s(0, 0) + s(0, 1) <= 1.0);
}

TEST_CASE("constant row sums raise the proportional warning") {
  const auto s = validate_substochastic(Matrix{{0.6, 0.2}, {0.3, 0.5}});
  CHECK(s.proportional_to_stochastic());
  CHECK_FALSE(s.warnings().empty());
}

TEST_CASE("digraph structure") {
  // 0 -> 1 -> 2 -> 0: strongly connected, period 3.
  const std::vector<std::size_t> off{0, 1, 2, 3};
  const std::vector<std::size_t> tgt{1, 2, 0};
  const auto g = analyze_digraph(off, tgt);
  CHECK(g.strongly_connected);
  CHECK(g.period == 3);
  // Adding a self-loop makes it aperiodic.
  const std::vector<std::size_t> off2{0, 2, 3, 4};
  const std::vector<std::size_t> tgt2{0, 1, 2, 0};
  CHECK(analyze_digraph(off2, tgt2).period == 1);
  // 0 -> 1 only.
  const std::vector<std::size_t> off3{0, 1, 1};
  const std::vector<std::size_t> tgt3{1};
  CHECK_FALSE(analyze_digraph(off3, tgt3).strongly_connected);
}

TEST_CASE("matrix text round trip and parse errors") {
  const Matrix m = parse_matrix_text("# sigma\n2\n0.72 0.08\n0.18 0.58 # row two\n");
  CHECK(m == benchmark_sigma());
  CHECK(parse_matrix_text(format_matrix_text(m)) == m);
  CHECK(code_of([] { parse_matrix_text("2\n0.1 0.2\n0.3"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_matrix_text("2\n0.1 0.2\n0.3 x"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_matrix_file("/nonexistent/sigma.txt"); }) == ErrorCode::Io);
}

TEST_CASE("multiply and left_multiply") {
  const Matrix m = benchmark_sigma();
  const std::vector<double> x{1.0, 2.0};
  std::vector<double> y(2);
  m.multiply(x, y);
  CHECK(y[0] == doctest::Approx(0.88));
  CHECK(y[1] == doctest::Approx(1.34));
  m.left_multiply(x, y);
  CHECK(y[0] == doctest::Approx(1.08));
  CHECK(y[1] == doctest::Approx(1.24));
  CHECK(m.transpose()(0, 1) == 0.18);
}

TEST_CASE("real formatting is locale independent with 12 significant digits") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(parse_real_list("0.3, 0.1,0.03") == std::vector<double>{0.3, 0.1, 0.03});
  CHECK_THROWS_AS(parse_real_list("0.3,abc"), Error);
}

#include <doctest.h>

#include "test_support.hpp"

using namespace siddmd;
using testing::Mat;
using testing::Vec;

namespace {

HankelPair<double> noisy_pair(std::uint64_t seed, Index s) {
  const auto d = testing::exact_data(3, 2, s, 40, seed, 0.1);
  return hankel_embed(d.seq, s);
}

}  // namespace

TEST_CASE("row projections") {
  std::mt19937_64 rng(1);
  const Mat a = testing::random_matrix(3, 5, rng);
  CHECK((project_rows(a, Mat(Mat::Identity(5, 5))) - a).norm() < 1e-13);
  CHECK(project_rows(a, Mat(Mat::Zero(2, 5))).isZero());
  for (int k = 0; k < 20; ++k) {
    const Mat b = testing::random_rank_matrix(4, 5, 1 + k % 4, rng);
    const Mat pr = project_rows(a, b);
    CHECK(((pr + project_complement(a, b)) - a).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((project_rows(pr, b) - pr).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((project_complement(a, b) * b.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK_THROWS_AS(project_rows(a, Mat(Mat::Ones(2, 4))), DimensionMismatch);
}

TEST_CASE("UPC on noiseless data fits exactly") {
  const auto d = testing::exact_data(3, 2, 4, 40, 12);
  const auto h = hankel_embed(d.seq, 4);
  const auto upc = upc_identify(h, 3);
  CHECK(sid_objective(upc.gamma, upc.x, h) <= 1e-8 * h.y_future.norm());
}

TEST_CASE("UPC and the closed form attain the same SID objective") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto h = noisy_pair(seed, 3 + static_cast<Index>(seed % 3));
    const Index n = 1 + static_cast<Index>(seed % 3);
    const auto upc = upc_identify(h, n);
    const auto map = solve_rank_constrained(h, n);
    const double ours = sid_objective(map.p, estimate_states(map, h), h);
    const double theirs = sid_objective(upc.gamma, upc.x, h);
    CHECK(std::abs(theirs - ours) <= 1e-8 * ours);
    CHECK(std::abs(ours - map.residual_frobenius) <= 1e-8 * ours);
  }
}

TEST_CASE("UPC without truncation reproduces the oblique projection") {
  const auto h = noisy_pair(3, 3);
  const Mat oblique = project_rows(h.y_future, h.y_past);
  const auto upc = upc_identify(h, matrix_rank(oblique));
  CHECK(testing::rel_diff(Mat(upc.gamma * upc.x.leftCols(h.ell)), oblique) <= 1e-8);
  CHECK_THROWS_AS(upc_identify(h, 0), InvalidInput);
}

TEST_CASE("truncated DMD without truncation is the full least-squares map") {
  const auto h = noisy_pair(4, 3);
  const auto dmd = truncated_dmd(h, 6);
  CHECK(testing::rel_diff(dmd.theta(), solve_full_rank(h)) <= 1e-8);
  CHECK(matrix_rank(truncated_dmd(h, 2).theta()) <= 2);
  const auto reduced = truncated_dmd(h, 2);
  CHECK((reduced.projected() - reduced.basis.transpose() * reduced.theta() * reduced.basis).norm() < 1e-10);
}

TEST_CASE("truncated DMD never beats the closed form") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Index ms = 3 + k % 5, ell = 4 + k % 9, n = 1 + k % 3;
    const auto h = HankelPair<double>::from_regression(testing::random_matrix(ms, ell, rng),
                                                       testing::random_matrix(ms, ell, rng));
    CHECK(truncated_dmd(h, n).objective(h) >= solve_rank_constrained(h, n).residual_frobenius - 1e-10);
  }
}

TEST_CASE("adversarial instance separates truncated DMD from the optimum") {
  const auto inst = datagen::find_tdmd_gap_instance(20, 1);
  const double optimum = solve_rank_constrained(inst.h, inst.n).residual_frobenius;
  const double dmd = truncated_dmd(inst.h, inst.n).objective(inst.h);
  CHECK(dmd - optimum == doctest::Approx(inst.gap));
  CHECK(inst.gap >= 1e-3);
  MESSAGE("truncated DMD gap: " << inst.gap);
}

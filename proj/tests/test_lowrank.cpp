#include <doctest.h>

#include "test_support.hpp"

using namespace siddmd;
using testing::Mat;
using testing::Vec;

namespace {

HankelPair<double> geometric_pair() {
  Mat y(1, 5);
  y << 1, 2, 4, 8, 16;
  return hankel_embed(OutputSequence<double>(y), 1);
}

HankelPair<double> diagonal_pair() {
  Mat future = Mat::Zero(2, 2);
  future.diagonal() << 2, 3;
  return HankelPair<double>::from_regression(Mat(Mat::Identity(2, 2)), future);
}

// Random instance: y_past ms x ell with given row rank, y_future arbitrary.
HankelPair<double> random_pair(Index ms, Index ell, Index past_rank, std::mt19937_64& rng) {
  const Mat past = past_rank >= std::min(ms, ell) ? testing::random_matrix(ms, ell, rng)
                                                  : testing::random_rank_matrix(ms, ell, past_rank, rng);
  return HankelPair<double>::from_regression(past, testing::random_matrix(ms, ell, rng));
}

Mat orthogonal_complement(const Mat& basis, Index ambient) {
  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeFullU);
  const Index r = basis.cols();
  return svd.matrixU().rightCols(ambient - r);
}

}  // namespace

TEST_CASE("geometric sequence gives the exact shift") {
  const auto h = geometric_pair();
  const auto map = solve_rank_constrained(h, 1);
  REQUIRE(map.r == 1);
  CHECK(map.theta()(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(map.residual_frobenius == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(map.p(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(map.q(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("diagonal instance truncates to the larger gain") {
  const auto map = solve_rank_constrained(diagonal_pair(), 1);
  Mat expected = Mat::Zero(2, 2);
  expected(1, 1) = 3;
  CHECK((map.theta() - expected).norm() < 1e-14);
  CHECK(map.residual_frobenius == doctest::Approx(2.0));
}

TEST_CASE("exact low-rank model is recovered") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat past = testing::random_matrix(6, 12, rng);
    const Mat m_true = testing::random_rank_matrix(6, 6, 2, rng);
    const Mat future = m_true * past;
    const auto map = solve_rank_constrained(past, future, 2);
    CHECK(map.residual_frobenius <= 1e-8 * future.norm());
    CHECK((map.apply(past) - future).norm() <= 1e-8 * future.norm());
    CHECK(map.r == 2);
  }
}

TEST_CASE("closed form beats random rank-2 maps") {
  std::mt19937_64 rng(202);
  const auto h = random_pair(6, 12, 6, rng);
  const auto map = solve_rank_constrained(h, 2);
  for (int k = 0; k < 1000; ++k) {
    const Mat theta = testing::random_matrix(6, 2, rng) * testing::random_matrix(6, 2, rng).transpose();
    CHECK(map.residual_frobenius <= regression_objective(theta, h.y_past, h.y_future));
  }
}

TEST_CASE("global optimality against the brute-force oracle") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 6; ++trial) {
    std::uniform_int_distribution<Index> msd(2, 8), elld(3, 16), nd(1, 3);
    const Index ms = msd(rng), ell = elld(rng), n = std::min(nd(rng), ms);
    const auto h = random_pair(ms, ell, ms, rng);
    const auto map = solve_rank_constrained(h, n);
    const auto oracle = testing::brute_force_rank_constrained(h.y_past, h.y_future, n, 1000 + trial);
    CHECK(oracle.best_objective >= map.residual_frobenius - 1e-6);
  }
}

TEST_CASE("LowRankMap invariants") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<Index> msd(2, 7), elld(2, 12), nd(1, 4), rd(1, 7);
    const Index ms = msd(rng), ell = elld(rng), n = nd(rng);
    const auto h = random_pair(ms, ell, rd(rng), rng);
    const auto map = solve_rank_constrained(h, n);
    const Mat theta = map.theta();
    CHECK(matrix_rank(theta) <= n);

    const auto past = svd_econ(h.y_past);
    const Mat u2 = past.u.leftCols(past.rank);
    CHECK((theta * u2 * u2.transpose() - theta).norm() <= 1e-8 * std::max(theta.norm(), 1e-300));

    const double direct = (h.y_future - theta * h.y_past).norm();
    CHECK(std::abs(map.residual_frobenius - direct) <= 1e-8 * direct + 1e-12 * h.y_future.norm());

    // Objective decomposition: ||Y_f V2perp||^2 + tail of sigma(Z)^2.
    const Mat v2 = past.v.leftCols(past.rank);
    const Mat z = h.y_future * v2;
    const double outside = (h.y_future * (Mat::Identity(ell, ell) - v2 * v2.transpose())).squaredNorm();
    const Vec sz = svd_econ(z).s;
    const double tail = n < sz.size() ? sz.tail(sz.size() - n).squaredNorm() : 0.0;
    const double predicted = std::sqrt(outside + tail);
    CHECK(std::abs(map.residual_frobenius - predicted) <=
          1e-8 * predicted + 1e-12 * h.y_future.norm());
    CHECK(std::abs(optimal_objective(h, n) - predicted) <= 1e-8 * predicted + 1e-12 * h.y_future.norm());
  }
}

TEST_CASE("residual is nonincreasing in n") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = random_pair(6, 10, 6, rng);
    double previous = std::numeric_limits<double>::infinity();
    for (Index n = 1; n <= 6; ++n) {
      const double r = solve_rank_constrained(h, n).residual_frobenius;
      CHECK(r <= previous + 1e-12);
      previous = r;
    }
  }
}

TEST_CASE("effective rank saturates at rank(Z)") {
  std::mt19937_64 rng(606);
  const Mat past = testing::random_matrix(5, 10, rng);
  const Mat future = testing::random_rank_matrix(5, 5, 2, rng) * past;
  const auto map = solve_rank_constrained(past, future, 4);
  CHECK(map.requested_n == 4);
  CHECK(map.r == 2);
}

TEST_CASE("zero data gives the zero map") {
  const auto h = HankelPair<double>::from_regression(Mat(Mat::Zero(3, 4)), Mat(Mat::Zero(3, 4)));
  const auto map = solve_rank_constrained(h, 2);
  CHECK(map.r == 0);
  CHECK(map.theta().isZero());
  CHECK(map.residual_frobenius == 0.0);
  CHECK_THROWS_AS(solve_rank_constrained(h, 0), InvalidInput);
}

TEST_CASE("degenerate truncation is flagged") {
  const auto h = HankelPair<double>::from_regression(Mat(Mat::Identity(2, 2)), Mat(Mat::Identity(2, 2)));
  CHECK(solve_rank_constrained(h, 1).degenerate_truncation);
  CHECK_FALSE(is_unique(h, 1));
  CHECK_FALSE(solve_rank_constrained(diagonal_pair(), 1).degenerate_truncation);
}

TEST_CASE("solve_full_rank") {
  std::mt19937_64 rng(707);
  const Mat past = testing::random_matrix(4, 4, rng) + 4 * Mat::Identity(4, 4);
  const Mat future = testing::random_matrix(4, 4, rng);
  CHECK(testing::rel_diff(solve_full_rank(past, future), Mat(future * past.inverse())) < 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    const auto h = random_pair(5, 9, 5, rng);
    const Mat full = solve_full_rank(h);
    CHECK(testing::rel_diff(full, solve_rank_constrained(h, 5).theta()) <= 1e-8);
    const double full_obj = regression_objective(full, h.y_past, h.y_future);
    for (Index n = 1; n < 5; ++n) CHECK(full_obj <= solve_rank_constrained(h, n).residual_frobenius + 1e-12);
  }
}

TEST_CASE("residual_gap identity") {
  std::mt19937_64 rng(808);
  // No truncation: the gap vanishes.
  const auto h = random_pair(4, 8, 4, rng);
  const auto none = residual_gap(h, 4);
  CHECK(none.direct <= 1e-10 * h.y_future.norm());
  CHECK(none.spectral == 0.0);
  CHECK(none.consistent);

  // Exact rank-n data.
  const Mat past = testing::random_matrix(4, 8, rng);
  const auto exact = residual_gap(past, Mat(testing::random_rank_matrix(4, 4, 2, rng) * past), 2);
  CHECK(exact.direct <= 1e-10 * past.norm());
  CHECK(exact.consistent);

  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_pair(5, 9, 1 + trial % 5, rng);
    for (Index n = 1; n <= 4; ++n) {
      const auto gap = residual_gap(g, n);
      CHECK(gap.consistent);
      CHECK(std::abs(gap.direct - gap.spectral) <= 1e-8 * gap.spectral + 1e-12 * g.y_future.norm());
    }
  }
}

TEST_CASE("is_solution recognises optimal and alternate maps") {
  std::mt19937_64 rng(909);
  const auto full_rank = random_pair(5, 10, 5, rng);
  const auto map = solve_rank_constrained(full_rank, 2);
  CHECK(is_solution(map.theta(), full_rank, 2).is_solution);
  const auto zero = is_solution(Mat(Mat::Zero(5, 5)), full_rank, 2);
  CHECK_FALSE(zero.is_solution);
  CHECK(zero.objective_gap > 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    // Rank-deficient y_past: an alternate solution exists along the null space.
    const auto h = random_pair(6, 10, 3, rng);
    const auto m2 = solve_rank_constrained(h, 2);
    const auto past = svd_econ(h.y_past);
    const Mat perp = orthogonal_complement(past.u.leftCols(past.rank), 6);
    const Mat alt = m2.theta() + m2.p.col(0) * perp.col(0).transpose();
    const auto check = is_solution(alt, h, 2);
    CHECK(check.is_solution);
    CHECK(check.rank <= 2);
    CHECK((alt - m2.theta()).norm() > 0.1);
    if (!m2.degenerate_truncation) CHECK(m2.theta().norm() <= alt.norm() + 1e-10);
    CHECK_FALSE(is_unique(h, 2));
    // Increasing the rank breaks feasibility.
    const Mat too_big = alt + m2.p.col(0) * perp.col(1).transpose() +
                        testing::random_matrix(6, 1, rng) * perp.col(2).transpose();
    CHECK_FALSE(is_solution(too_big, h, 2).is_solution);
  }
}

TEST_CASE("is_unique") {
  const auto identity = HankelPair<double>::from_regression(Mat(Mat::Identity(3, 3)), Mat(Vec(Vec::LinSpaced(3, 1, 3)).asDiagonal()));
  CHECK(is_unique(identity, 1));
  Mat past = Mat::Identity(3, 3);
  past(1, 1) = 0;
  CHECK_FALSE(is_unique(HankelPair<double>::from_regression(past, Mat(Mat::Identity(3, 3))), 1));
  std::mt19937_64 rng(111);
  CHECK_FALSE(is_unique(random_pair(6, 4, 6, rng), 1));
}

TEST_CASE("sid_objective") {
  std::mt19937_64 rng(222);
  const auto d = testing::exact_data(3, 2, 4, 30, 5, 0.05);
  const auto h = hankel_embed(d.seq, 4);
  const auto map = solve_rank_constrained(h, 2);
  const Mat x = map.q.transpose() * h.y_full;
  CHECK(testing::rel_diff(sid_objective(map.p, x, h), map.residual_frobenius) <= 1e-8);

  const Mat gamma = testing::random_matrix(8, 2, rng);
  CHECK(sid_objective(gamma, Mat(Mat::Zero(2, h.ell + 1)), h) == doctest::Approx(h.y_future.norm()));

  // A row outside row(Y): Y here has full row rank 8 < ell+1, so pick a
  // vector orthogonal to every row of Y.
  const Mat outside = orthogonal_complement(h.y_full.transpose(), h.ell + 1).col(0).transpose();
  CHECK_THROWS_AS(sid_objective(Mat(gamma.leftCols(1)), outside, h), Infeasible);
  CHECK_THROWS_AS(sid_objective(gamma, Mat(Mat::Zero(2, h.ell)), h), DimensionMismatch);
}

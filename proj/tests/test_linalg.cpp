#include <catch2/catch_amalgamated.hpp>

#include "dpp/linalg.hpp"
#include "oracles.hpp"

using dpp::LogDet;
using dpp::Matrix;
using dpp::Sample;
using dpp::SymMatrix;
using dpp::Vector;

namespace {

double rel_err(double got, double want) {
  double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  return std::abs(got - want) / scale;
}

}  // namespace

TEST_CASE("sym_eig on small fixed matrices", "[linalg]") {
  auto sp = dpp::sym_eig(SymMatrix(Matrix::Identity(2, 2)));
  REQUIRE(sp.eigenvalues(0) == Catch::Approx(1.0));
  REQUIRE(sp.eigenvalues(1) == Catch::Approx(1.0));

  Matrix d(2, 2);
  d << 3, 0, 0, 1;
  sp = dpp::sym_eig(SymMatrix(d));
  REQUIRE(sp.eigenvalues(0) == Catch::Approx(3.0));
  REQUIRE(sp.eigenvalues(1) == Catch::Approx(1.0));
  REQUIRE(std::abs(sp.eigenvectors(0, 0)) == Catch::Approx(1.0));
  REQUIRE(std::abs(sp.eigenvectors(1, 1)) == Catch::Approx(1.0));

  Matrix ones2 = Matrix::Ones(2, 2);
  sp = dpp::sym_eig(SymMatrix(ones2));
  REQUIRE(sp.eigenvalues(0) == Catch::Approx(2.0));
  REQUIRE(sp.eigenvalues(1) == Catch::Approx(0.0).margin(1e-12));
  double s = 1.0 / std::sqrt(2.0);
  REQUIRE(sp.eigenvectors(0, 0) == Catch::Approx(s));
  REQUIRE(sp.eigenvectors(1, 0) == Catch::Approx(s));
  // sign convention: first entry positive on ties
  REQUIRE(sp.eigenvectors(0, 1) == Catch::Approx(s));
  REQUIRE(sp.eigenvectors(1, 1) == Catch::Approx(-s));
}

TEST_CASE("sym_eig reconstruction and orthonormality", "[linalg]") {
  oracle::Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    int n = rng.integer(1, 7);
    SymMatrix s(oracle::random_symmetric(rng, n));
    auto sp = dpp::sym_eig(s);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      REQUIRE(sp.eigenvalues(i) >= sp.eigenvalues(i + 1));
    Matrix rec = sp.eigenvectors * sp.eigenvalues.asDiagonal() *
                 sp.eigenvectors.transpose();
    REQUIRE((rec - s.mat()).norm() <= 1e-10 * std::max(1.0, s.mat().norm()));
    Matrix gram = sp.eigenvectors.transpose() * sp.eigenvectors;
    REQUIRE((gram - Matrix::Identity(n, n)).norm() <= 1e-10);
  }
}

TEST_CASE("orthonormal_basis known cases and projector identity", "[linalg]") {
  Matrix v(2, 1);
  v << 1, 1;
  Matrix q = dpp::orthonormal_basis(v);
  REQUIRE(q(0, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(q(1, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));

  Matrix q3 = dpp::orthonormal_basis(Matrix::Identity(3, 3));
  REQUIRE((q3 - Matrix::Identity(3, 3)).norm() < 1e-12);

  oracle::Rng rng(5);
  Matrix w = oracle::random_matrix(rng, 3, 2);
  Matrix qw = dpp::orthonormal_basis(w);
  REQUIRE((qw.transpose() * qw - Matrix::Identity(2, 2)).norm() < 1e-12);
  Matrix proj = w * (w.transpose() * w).inverse() * w.transpose();
  REQUIRE((qw * qw.transpose() - proj).norm() < 1e-10);

  Matrix rank1(3, 2);
  rank1 << 1, 2, 1, 2, 1, 2;
  REQUIRE_THROWS_AS(dpp::orthonormal_basis(rank1), dpp::ValidationError);

  Matrix empty = dpp::orthonormal_basis(Matrix(4, 0));
  REQUIRE(empty.cols() == 0);
  REQUIRE(empty.rows() == 4);
}

TEST_CASE("log_det and det_minor against cofactor expansion", "[linalg]") {
  REQUIRE(dpp::det_minor(SymMatrix(Matrix::Ones(3, 3)), {}).value() ==
          Catch::Approx(1.0));

  Matrix d23(2, 2);
  d23 << 2, 0, 0, 3;
  REQUIRE(dpp::log_det(SymMatrix(d23)).value() == Catch::Approx(6.0));

  Matrix f(3, 3);
  f << 1, 0, 1, 0, 1, 1, 1, 1, 0;
  LogDet ld = dpp::log_det(SymMatrix(f));
  REQUIRE(ld.sign == -1);
  REQUIRE(ld.value() == Catch::Approx(-2.0));

  oracle::Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    int n = rng.integer(1, 6);
    Matrix a = oracle::random_symmetric(rng, n);
    double want = static_cast<double>(oracle::det_cofactor(a));
    REQUIRE(rel_err(dpp::log_det(SymMatrix(a)).value(), want) < 1e-9);

    int msz = rng.integer(1, n);
    auto subs = oracle::subsets_of_size(n, msz);
    const auto& x = subs[rng.integer(0, static_cast<int>(subs.size()) - 1)];
    Matrix sub(msz, msz);
    for (int i = 0; i < msz; ++i)
      for (int j = 0; j < msz; ++j) sub(i, j) = a(x[i], x[j]);
    double want_minor = static_cast<double>(oracle::det_cofactor(sub));
    REQUIRE(rel_err(dpp::det_minor(SymMatrix(a), x).value(), want_minor) < 1e-9);
  }

  REQUIRE(dpp::log_det(Matrix(0, 0)).value() == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(dpp::det_minor(SymMatrix(Matrix::Ones(2, 2)), Sample{5}),
                    dpp::ValidationError);
}

TEST_CASE("saddle_point_det fixed values", "[linalg]") {
  Matrix v11(2, 1);
  v11 << 1, 1;
  LogDet s = dpp::saddle_point_det(SymMatrix(Matrix::Identity(2, 2)), v11);
  REQUIRE(s.value() == Catch::Approx(-2.0));

  // zero L, square V: the signed value (-1)^p det equals det(V)^2
  oracle::Rng rng(31);
  Matrix vsq = oracle::random_matrix(rng, 3, 3);
  LogDet z = dpp::saddle_point_det(SymMatrix(Matrix::Zero(3, 3)), vsq);
  double signed_val = (3 % 2 == 0 ? 1.0 : -1.0) * z.value();
  double dv = vsq.determinant();
  REQUIRE(rel_err(signed_val, dv * dv) < 1e-9);

  // -D^(1) on {0, 1} with the ones vector
  Matrix l(2, 2);
  l << 0, -1, -1, 0;
  LogDet e = dpp::saddle_point_det(SymMatrix(l), Matrix::Ones(2, 1));
  REQUIRE(e.value() == Catch::Approx(-2.0));

  REQUIRE_THROWS_AS(dpp::saddle_point_det(SymMatrix(Matrix::Identity(1, 1)),
                                          Matrix::Ones(1, 2)),
                    dpp::ValidationError);

  // structurally rank-deficient V gives an exact zero
  Matrix vdef(2, 2);
  vdef << 1, 2, 1, 2;
  LogDet zero = dpp::saddle_point_det(SymMatrix(Matrix::Identity(2, 2)), vdef);
  REQUIRE(zero.is_zero());
}

TEST_CASE("saddle_point_det equals the orthogonal-complement form", "[linalg]") {
  oracle::Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    int n = rng.integer(1, 8);
    int p = rng.integer(0, std::min(3, n));
    Matrix l = oracle::random_symmetric(rng, n);
    Matrix v = oracle::random_matrix(rng, n, p);
    double got = dpp::saddle_point_det(SymMatrix(l), v).value();
    double want = oracle::saddle_complement_form(l, v);
    REQUIRE(rel_err(got, want) < 1e-9);
    // and the block determinant evaluated by cofactor expansion
    if (n + p <= 8) {
      double block = static_cast<double>(oracle::saddle_block_det(l, v));
      REQUIRE(rel_err(got, block) < 1e-9);
    }
  }
}

TEST_CASE("coeff_tp_det fixed values and interpolation oracle", "[linalg]") {
  Matrix v10(2, 1);
  v10 << 1, 0;
  REQUIRE(dpp::coeff_tp_det(SymMatrix(Matrix::Zero(2, 2)), v10).is_zero());

  Matrix v11(2, 1);
  v11 << 1, 1;
  REQUIRE(dpp::coeff_tp_det(SymMatrix(Matrix::Identity(2, 2)), v11).value() ==
          Catch::Approx(2.0));

  Matrix d12(2, 2);
  d12 << 1, 0, 0, 2;
  REQUIRE(dpp::coeff_tp_det(SymMatrix(d12), Matrix::Identity(2, 2)).value() ==
          Catch::Approx(1.0));

  oracle::Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    int n = rng.integer(1, 6);
    int p = rng.integer(0, n);
    Matrix l = oracle::random_symmetric(rng, n);
    Matrix v = oracle::random_matrix(rng, n, p);
    double got = dpp::coeff_tp_det(SymMatrix(l), v).value();
    double want = oracle::poly_leading_coeff(l, v);
    if (std::abs(want) < 1e-8) {
      REQUIRE(std::abs(got) < 1e-6);
    } else {
      REQUIRE(rel_err(got, want) < 1e-6);
    }
    // sign relation to the saddle determinant
    LogDet s = dpp::saddle_point_det(SymMatrix(l), v);
    double flip = (p % 2 == 0) ? 1.0 : -1.0;
    REQUIRE(rel_err(got, flip * s.value()) < 1e-12);
  }
}

TEST_CASE("det_update matches direct determinants", "[linalg]") {
  SymMatrix a(Matrix::Identity(2, 2));
  Matrix u(2, 1);
  u << 1, 1;
  SymMatrix w(Matrix::Ones(1, 1));
  REQUIRE(dpp::det_update(a, u, w).value() == Catch::Approx(3.0));

  REQUIRE(dpp::det_update(a, Matrix::Zero(2, 1), w).value() == Catch::Approx(1.0));

  oracle::Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    Matrix aa = oracle::random_spd(rng, 4);
    Matrix uu = oracle::random_matrix(rng, 4, 2);
    Matrix ww = oracle::random_spd(rng, 2);
    double want = (aa + uu * ww * uu.transpose()).determinant();
    double got = dpp::det_update(SymMatrix(aa), uu, SymMatrix(ww)).value();
    REQUIRE(rel_err(got, want) < 1e-9);
  }

  REQUIRE_THROWS_AS(dpp::det_update(SymMatrix(Matrix::Zero(2, 2)), u, w),
                    dpp::NumericalError);
}

TEST_CASE("schur_conditional equals the minor ratio", "[linalg]") {
  SymMatrix eye(Matrix::Identity(4, 4));
  REQUIRE(dpp::schur_conditional(eye, {1, 3}, 0) == Catch::Approx(1.0));

  oracle::Rng rng(47);
  Matrix l = oracle::random_spd(rng, 5);
  SymMatrix sl(l);
  REQUIRE(dpp::schur_conditional(sl, {}, 2) == Catch::Approx(l(2, 2)));

  for (int t = 0; t < 20; ++t) {
    Matrix m = oracle::random_spd(rng, 5);
    SymMatrix sm(m);
    Sample y = {0, 2, 4};
    int x = 1;
    double got = dpp::schur_conditional(sm, y, x);
    Sample yx = {0, 1, 2, 4};
    double want =
        dpp::det_minor(sm, yx).value() / dpp::det_minor(sm, y).value();
    REQUIRE(rel_err(got, want) < 1e-10);
  }

  REQUIRE_THROWS_AS(dpp::schur_conditional(eye, {0, 1}, 1), dpp::ValidationError);
}

TEST_CASE("elementary symmetric polynomials", "[linalg]") {
  Vector lam(3);
  lam << 1, 2, 3;
  REQUIRE(dpp::elementary_symmetric(lam, 2) == Catch::Approx(11.0));
  REQUIRE(dpp::elementary_symmetric(lam, 0) == Catch::Approx(1.0));
  REQUIRE(dpp::elementary_symmetric(lam, 5) == 0.0);

  Vector proj(6);
  proj << 1, 1, 1, 0, 0, 0;
  REQUIRE(dpp::elementary_symmetric(proj, 3) == Catch::Approx(1.0));

  oracle::Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    int n = rng.integer(1, 8);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    int m = rng.integer(0, n);
    double want = static_cast<double>(oracle::esp_bruteforce(v, m));
    REQUIRE(rel_err(dpp::elementary_symmetric(v, m), want) < 1e-10);
    Vector all = dpp::elementary_symmetric_all(v);
    REQUIRE(rel_err(all(m), want) < 1e-10);
  }
}

TEST_CASE("esp of a spectrum equals the sum of principal minors", "[linalg]") {
  oracle::Rng rng(59);
  Matrix l = oracle::random_spd(rng, 6);
  SymMatrix sl(l);
  auto sp = dpp::sym_eig(sl);
  for (int m = 0; m <= 6; ++m) {
    double esp = dpp::elementary_symmetric(sp.eigenvalues, m);
    double total = 0.0;
    for (auto& x : oracle::subsets_of_size(6, m))
      total += dpp::det_minor(sl, x).value();
    REQUIRE(rel_err(esp, total) < 1e-9);
  }
}

TEST_CASE("Cauchy-Binet over column subsets", "[linalg]") {
  oracle::Rng rng(61);
  Matrix a = oracle::random_matrix(rng, 4, 6);
  Matrix b = oracle::random_matrix(rng, 6, 4);
  double want = (a * b).determinant();
  double acc = 0.0;
  for (auto& y : oracle::subsets_of_size(6, 4)) {
    Matrix ay(4, 4), by(4, 4);
    for (int j = 0; j < 4; ++j) {
      ay.col(j) = a.col(y[j]);
      by.row(j) = b.row(y[j]);
    }
    acc += ay.determinant() * by.determinant();
  }
  REQUIRE(rel_err(acc, want) < 1e-9);
}

TEST_CASE("pencil_limit_basis known case and perturbation check", "[linalg]") {
  Matrix a1(2, 2);
  a1 << 1, 0, 0, 0.5;
  auto pb = dpp::pencil_limit_basis(SymMatrix(Matrix::Ones(2, 2)), SymMatrix(a1));
  REQUIRE(pb.u0.cols() == 1);
  double s = 1.0 / std::sqrt(2.0);
  REQUIRE(pb.u0(0, 0) == Catch::Approx(s));
  REQUIRE(pb.u0(1, 0) == Catch::Approx(s));
  REQUIRE(std::abs(pb.u1tilde(0, 0)) == Catch::Approx(s));
  REQUIRE(std::abs(pb.u1tilde(1, 0)) == Catch::Approx(s));
  REQUIRE(pb.u1tilde(0, 0) * pb.u1tilde(1, 0) < 0.0);
  REQUIRE(pb.lambda1(0) == Catch::Approx(0.75));

  // full-rank A0: no first-order part
  auto pf = dpp::pencil_limit_basis(SymMatrix(a1), SymMatrix(Matrix::Identity(2, 2)));
  REQUIRE(pf.u0.cols() == 2);
  REQUIRE(pf.u1tilde.cols() == 0);

  // random rank-2 A0 on n=5: eigenvalues of A0 + eps A1 split as
  // (lambda0_i, eps * lambda1_j) to first order
  oracle::Rng rng(67);
  Matrix b = oracle::random_matrix(rng, 5, 2);
  Matrix a0 = b * b.transpose();
  Matrix spd = oracle::random_spd(rng, 5);
  auto pr = dpp::pencil_limit_basis(SymMatrix(a0), SymMatrix(spd));
  REQUIRE(pr.u0.cols() == 2);
  Matrix joint(5, 5);
  joint << pr.u0, pr.u1tilde;
  REQUIRE((joint.transpose() * joint - Matrix::Identity(5, 5)).norm() < 1e-10);

  double eps = 1e-6;
  auto sp = dpp::sym_eig(SymMatrix(Matrix(a0 + eps * spd)));
  auto sp0 = dpp::sym_eig(SymMatrix(a0));
  for (int i = 0; i < 2; ++i)
    REQUIRE(rel_err(sp.eigenvalues(i), sp0.eigenvalues(i)) < 1e-4);
  for (int i = 0; i < 3; ++i)
    REQUIRE(rel_err(sp.eigenvalues(2 + i), eps * pr.lambda1(i)) < 1e-3);

  REQUIRE_THROWS_AS(
      dpp::pencil_limit_basis(SymMatrix(Matrix(-Matrix::Identity(2, 2))),
                              SymMatrix(Matrix::Identity(2, 2))),
      dpp::ValidationError);

  Matrix ambiguous = Matrix::Zero(2, 2);
  ambiguous(0, 0) = 1.0;
  ambiguous(1, 1) = 2e-10;
  REQUIRE_THROWS_AS(dpp::pencil_limit_basis(SymMatrix(ambiguous),
                                            SymMatrix(Matrix::Identity(2, 2))),
                    dpp::NumericalError);
}

TEST_CASE("LogDet arithmetic", "[linalg]") {
  LogDet z = LogDet::zero();
  REQUIRE(z.is_zero());
  REQUIRE(z.value() == 0.0);
  LogDet one = LogDet::one();
  REQUIRE(one.value() == Catch::Approx(1.0));
  LogDet a{-1, std::log(2.0)};
  LogDet b{-1, std::log(3.0)};
  REQUIRE((a * b).value() == Catch::Approx(6.0));
  REQUIRE((a * z).is_zero());
}

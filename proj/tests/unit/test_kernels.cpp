#include "ulab/errors.hpp"
#include "ulab/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ulab;

namespace {

const Potential gaussian({0.0, 0.5});
const Potential quartic({0.0, 0.0, 1.0 / 12.0});

double direct_K2(const OrthoBasis& b, double x, double y) {
  return b.evaluate(x, b.n()).dot(b.evaluate(y, b.n()));
}

}  // namespace

TEST(MomentMatrix, SkewAndParity) {
  for (const auto* v : {&gaussian, &quartic}) {
    const auto b = build_basis(*v, 32);
    const auto m = moment_matrix(b);
    EXPECT_LE((m.full() + m.full().transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(m.raw_skew_defect(), 1e-10);
    // psi_j eps psi_l vanishes unless j + l is odd.
    EXPECT_LE(m.parity_defect(), 1e-12);
  }
}

TEST(MomentMatrix, SminPositiveEvenZeroOdd) {
  const auto b = build_basis(quartic, 32);
  const auto m = moment_matrix(b);
  EXPECT_NEAR(m.smin(), smallest_singular_value(m.section(32)), 1e-14);
  EXPECT_GT(m.smin(), 0.5);
  EXPECT_LT(smallest_singular_value(m.section(33)), 1e-10);
}

TEST(SingularValue, KnownMatrix) {
  Eigen::MatrixXd a(2, 2);
  a << 3.0, 0.0, 0.0, 0.25;
  EXPECT_DOUBLE_EQ(smallest_singular_value(a), 0.25);
}

TEST(K2, ChristoffelDarbouxAgreesWithSum) {
  const auto b = build_basis(quartic, 40);
  for (auto [x, y] : {std::pair{0.1, 0.35}, std::pair{-1.2, 0.9}, std::pair{0.5, 0.5 + 1e-6}})
    EXPECT_NEAR(kernel_K2(b, x, y), direct_K2(b, x, y), 1e-9);
  EXPECT_NEAR(kernel_K2(b, 0.3, 0.3), direct_K2(b, 0.3, 0.3), 1e-12);
}

TEST(K2, ReproducingProperty) {
  const auto b = build_basis(gaussian, 24);
  const auto& x = b.grid().nodes();
  const auto& w = b.grid().weights();
  const double a = 0.2, c = -0.7;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += w[i] * direct_K2(b, a, x[i]) * direct_K2(b, x[i], c);
  EXPECT_NEAR(sum, direct_K2(b, a, c), 1e-10);
}

TEST(MvIdentity, DefectConfinedToLastColumns) {
  for (const auto* v : {&gaussian, &quartic}) {
    const auto b = build_basis(*v, 32);
    const auto r = mv_identity_check(b, moment_matrix(b));
    EXPECT_LE(r.leading_defect, 1e-10);
    EXPECT_TRUE(r.confined);
  }
}

TEST(MomentConstants, GaussianValues) {
  const auto eq = compute_P(gaussian);
  const auto r = r_coefficients(eq);
  EXPECT_NEAR(moment_constant_limit(eq), 2.0, 1e-15);
  EXPECT_NEAR(moment_constant(r, 0), 2.0, 1e-15);
  EXPECT_EQ(moment_constant(r, 1), 0.0);
  EXPECT_EQ(moment_constant(r, 2), 0.0);
}

TEST(MomentConstants, QuarticLimitMatchesSum) {
  const auto eq = compute_P(quartic);
  const auto r = r_coefficients(eq);
  // M_{-inf} = 2 sum_k R_k over all k, and sum_k R_k = 1/P(2).
  double total = r.r[0];
  for (std::size_t k = 1; k < r.r.size(); ++k) total += 2 * r.r[k];
  EXPECT_NEAR(moment_constant_limit(eq), 2.0 / eq.P(2.0), 1e-15);
  EXPECT_NEAR(moment_constant_limit(eq), 2 * total, 1e-12);
}

TEST(DMRelation, ResidualShrinks) {
  for (const auto* v : {&gaussian, &quartic}) {
    const auto eq = compute_P(*v);
    const auto r = r_coefficients(eq);
    const double a = dM_relation_check(moment_matrix(build_basis(*v, 40)), r, 3);
    const double b = dM_relation_check(moment_matrix(build_basis(*v, 80)), r, 3);
    EXPECT_LT(b, a);
  }
}

TEST(ClosedForm, AnchorReadingChosen) {
  const auto eq = compute_P(quartic);
  const auto r = r_coefficients(eq);
  const auto m = moment_matrix(build_basis(quartic, 64));
  const auto cf = moment_closed_form(m, eq, r, 3);
  EXPECT_EQ(cf.chosen, 'b');
  EXPECT_NEAR(cf.c, c_of_n(m, r), 1e-15);
  EXPECT_LT(std::abs(cf.c), 1e-3);
}

TEST(EpsilonSign, HalfSign) {
  EXPECT_EQ(epsilon_sign(0.0), 0.0);
  EXPECT_EQ(epsilon_sign(3.0), 0.5);
  EXPECT_EQ(epsilon_sign(-1e-300), -0.5);
}

class KernelFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    basis_ = new OrthoBasis(build_basis(quartic, 32));
    moments_ = new MomentMatrix(moment_matrix(*basis_));
    kernel_ = new TracyWidomKernel(*basis_, *moments_);
  }
  static void TearDownTestSuite() {
    delete kernel_;
    delete moments_;
    delete basis_;
  }
  static OrthoBasis* basis_;
  static MomentMatrix* moments_;
  static TracyWidomKernel* kernel_;
};
OrthoBasis* KernelFixture::basis_ = nullptr;
MomentMatrix* KernelFixture::moments_ = nullptr;
TracyWidomKernel* KernelFixture::kernel_ = nullptr;

TEST_F(KernelFixture, InverseIsSkew) {
  const auto& inv = kernel_->inverse();
  EXPECT_LE((inv + inv.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((inv * moments_->section(32) - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_F(KernelFixture, SdIsScaledDerivativeOfS) {
  for (auto [l, m] : {std::pair{0.1, 0.13}, std::pair{-0.6, 0.4}})
    EXPECT_NEAR(kernel_->Sd(l, m), kernel_->Sd_fd(l, m, 1e-5), 1e-6);
}

TEST_F(KernelFixture, ISVanishesOnDiagonal) {
  EXPECT_NEAR(kernel_->IS(0.4, 0.4), 0.0, 1e-12);
  EXPECT_NEAR(kernel_->IS(0.4, -0.2), -kernel_->IS(-0.2, 0.4), 1e-12);
  const auto k = kernel_->K1(0.4, 0.4);
  EXPECT_NEAR(k.a21, 0.0, 1e-12);
  EXPECT_NEAR(k.a11, k.a22, 1e-12);
}

TEST_F(KernelFixture, SIntegratesToTraceOnDiagonal) {
  // Int S(x, x) dx = n for the Tracy-Widom kernel.
  const auto& x = basis_->grid().nodes();
  const auto& w = basis_->grid().weights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    TracyWidomKernel::Point p{x[i], basis_->psi().row(i).head(32).transpose(), basis_->eps_psi().row(i).head(32).transpose()};
    sum += w[i] * kernel_->S(p, p);
  }
  EXPECT_NEAR(sum, 32.0, 1e-8);
}

TEST_F(KernelFixture, S1ProjectionSmallAwayFromEdge) {
  const auto r = s1_projection_check(*kernel_, {0.0, 0.37, 1.1});
  EXPECT_LE(r.far, 1e-10);
}

TEST_F(KernelFixture, InverseStructure) {
  const auto eq = compute_P(quartic);
  const auto r = inverse_structure_check(*basis_, *kernel_, eq, r_coefficients(eq));
  EXPECT_GT(r.window, 0);
  EXPECT_LT(r.away_deviation, 1e-8);
}

TEST(TranslationDerivative, ShrinksWithN) {
  const double a = translation_derivative_bound(build_basis(gaussian, 32), 0.0, 11);
  const double b = translation_derivative_bound(build_basis(gaussian, 64), 0.0, 11);
  EXPECT_LT(b, a);
}

#include "hjb/features.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "hjb/errors.hpp"

namespace hjb {

double kappa(int omega, double t, double T) {
  const double w = omega;
  return std::sin(w * std::numbers::pi / 2.0 * (t - T) / T) / w;
}

double kappa_dt(int omega, double t, double T) {
  const double w = omega;
  return std::numbers::pi / (2.0 * T) *
         std::cos(w * std::numbers::pi / 2.0 * (t - T) / T);
}

Vec phi(const Vec& x) {
  if (x.size() != 2) throw DomainError("phi: expects a 2-dimensional state");
  return QuadraticMonomials(2).value(x);
}

Mat phi_grad(const Vec& x) {
  if (x.size() != 2) throw DomainError("phi: expects a 2-dimensional state");
  return QuadraticMonomials(2).jacobian(x);
}

Vec phi_laplacian(const Vec& x) {
  if (x.size() != 2) throw DomainError("phi: expects a 2-dimensional state");
  return QuadraticMonomials(2).laplacian(x);
}

SineTemporalBasis::SineTemporalBasis(int m_t, double T) : m_t_(m_t), T_(T) {
  if (m_t < 1) throw ParameterError("temporal basis: m_t must be >= 1");
  if (!(T > 0.0)) throw ParameterError("temporal basis: T must be positive");
}

double SineTemporalBasis::value(int j, double t) const {
  return kappa(j + 1, t, T_);
}

double SineTemporalBasis::dt(int j, double t) const {
  return kappa_dt(j + 1, t, T_);
}

LinearDecayTemporalBasis::LinearDecayTemporalBasis(double T) : T_(T) {
  if (!(T > 0.0)) throw ParameterError("temporal basis: T must be positive");
}

QuadraticMonomials::QuadraticMonomials(int d) : d_(d) {
  if (d < 1) throw ParameterError("monomial basis: d must be >= 1");
}

int QuadraticMonomials::size() const {
  return 1 + d_ + d_ * (d_ - 1) / 2 + d_;
}

Vec QuadraticMonomials::value(const Vec& x) const {
  if (x.size() != d_) throw DomainError("monomial basis: dimension mismatch");
  Vec out(size());
  int k = 0;
  out(k++) = 1.0;
  for (int i = 0; i < d_; ++i) out(k++) = x(i);
  for (int i = 0; i < d_; ++i)
    for (int j = i + 1; j < d_; ++j) out(k++) = x(i) * x(j);
  for (int i = 0; i < d_; ++i) out(k++) = x(i) * x(i);
  return out;
}

Mat QuadraticMonomials::jacobian(const Vec& x) const {
  if (x.size() != d_) throw DomainError("monomial basis: dimension mismatch");
  Mat J = Mat::Zero(size(), d_);
  int k = 1;
  for (int i = 0; i < d_; ++i) J(k++, i) = 1.0;
  for (int i = 0; i < d_; ++i)
    for (int j = i + 1; j < d_; ++j) {
      J(k, i) = x(j);
      J(k, j) = x(i);
      ++k;
    }
  for (int i = 0; i < d_; ++i) J(k++, i) = 2.0 * x(i);
  return J;
}

Vec QuadraticMonomials::laplacian(const Vec& x) const {
  if (x.size() != d_) throw DomainError("monomial basis: dimension mismatch");
  Vec out = Vec::Zero(size());
  out.tail(d_).setConstant(2.0);
  return out;
}

FeatureBasis::FeatureBasis(std::shared_ptr<const TemporalBasis> time,
                           std::shared_ptr<const SpatialBasis> space)
    : time_(std::move(time)), space_(std::move(space)) {
  if (!time_ || !space_) throw ParameterError("feature basis: null component");
}

FeatureBasis FeatureBasis::sine_quadratic(int m_t, double T, int d) {
  return FeatureBasis(std::make_shared<SineTemporalBasis>(m_t, T),
                      std::make_shared<QuadraticMonomials>(d));
}

FeatureBasis FeatureBasis::linear_decay(double T, int d) {
  return FeatureBasis(std::make_shared<LinearDecayTemporalBasis>(T),
                      std::make_shared<ConstantSpatialBasis>(d));
}

Vec FeatureBasis::psi(double t, const Vec& x) const {
  const Vec ph = space_->value(x);
  const int pd = phi_dim();
  Vec out(m());
  for (int j = 0; j < m_t(); ++j)
    out.segment(pd * j, pd) = time_->value(j, t) * ph;
  return out;
}

Vec FeatureBasis::psi_dt(double t, const Vec& x) const {
  const Vec ph = space_->value(x);
  const int pd = phi_dim();
  Vec out(m());
  for (int j = 0; j < m_t(); ++j)
    out.segment(pd * j, pd) = time_->dt(j, t) * ph;
  return out;
}

Mat FeatureBasis::psi_jac_x(double t, const Vec& x) const {
  const Mat J = space_->jacobian(x);
  const int pd = phi_dim();
  Mat out(m(), dim());
  for (int j = 0; j < m_t(); ++j)
    out.middleRows(pd * j, pd) = time_->value(j, t) * J;
  return out;
}

Vec FeatureBasis::psi_laplacian(double t, const Vec& x) const {
  const Vec lap = space_->laplacian(x);
  const int pd = phi_dim();
  Vec out(m());
  for (int j = 0; j < m_t(); ++j)
    out.segment(pd * j, pd) = time_->value(j, t) * lap;
  return out;
}

double ValueModel::value(double t, const Vec& x) const {
  return theta.dot(basis.psi(t, x)) + terminal.value(x);
}

Vec ValueModel::grad_x(double t, const Vec& x) const {
  return basis.psi_jac_x(t, x).transpose() * theta + terminal.grad(x);
}

double ValueModel::dt(double t, const Vec& x) const {
  return theta.dot(basis.psi_dt(t, x));
}

double ValueModel::laplacian(double t, const Vec& x) const {
  return theta.dot(basis.psi_laplacian(t, x)) + terminal.laplacian(x);
}

ValueFunction ValueModel::handle() const {
  auto self = std::make_shared<const ValueModel>(*this);
  ValueFunction V;
  V.value = [self](double t, const Vec& x) { return self->value(t, x); };
  V.dt = [self](double t, const Vec& x) { return self->dt(t, x); };
  V.grad = [self](double t, const Vec& x) -> Vec {
    return self->grad_x(t, x);
  };
  return V;
}

}  // namespace hjb

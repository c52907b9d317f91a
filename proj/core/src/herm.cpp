#include "gpt/herm.hpp"

#include <cmath>
#include <stdexcept>

namespace gpt {

namespace {
constexpr double kHermTol = 1e-12;
}

HermMat::HermMat(Eigen::MatrixXcd m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("HermMat: matrix must be square");
  }
  if (!mat_.allFinite()) {
    throw std::invalid_argument("HermMat: entries must be finite");
  }
  const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermTol) {
    throw std::invalid_argument("HermMat: matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

HermMat HermMat::zero(int dim) { return HermMat(Eigen::MatrixXcd::Zero(dim, dim)); }

HermMat HermMat::identity(int dim) { return HermMat(Eigen::MatrixXcd::Identity(dim, dim)); }

HermMat HermMat::projector(const Eigen::VectorXcd& v) {
  const double n2 = v.squaredNorm();
  if (n2 <= 0.0) {
    throw std::invalid_argument("HermMat::projector: zero vector");
  }
  return HermMat(v * v.adjoint() / n2);
}

HermMat HermMat::scaled(double factor) const { return HermMat(mat_ * factor); }

HermMat HermMat::plus(const HermMat& other, double factor) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("HermMat::plus: dimension mismatch");
  }
  return HermMat(mat_ + factor * other.mat_);
}

double hs_inner_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  const std::complex<double> t = (a * b).trace();
  if (std::abs(t.imag()) > kHermTol) {
    throw std::runtime_error("hs_inner: imaginary residue " + std::to_string(t.imag()));
  }
  return t.real();
}

double hs_inner(const HermMat& a, const HermMat& b) { return hs_inner_raw(a.mat(), b.mat()); }

HermMat kron(const HermMat& a, const HermMat& b) {
  const int da = a.dim(), db = b.dim();
  Eigen::MatrixXcd out(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.mat()(i, j) * b.mat();
    }
  }
  return HermMat(std::move(out));
}

EigResult eig_herm(const HermMat& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_herm: eigensolver did not converge");
  }
  const int d = a.dim();
  EigResult res;
  res.eigenvalues.resize(d);
  res.eigenvectors.resize(d, d);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < d; ++i) {
    res.eigenvalues(i) = solver.eigenvalues()(d - 1 - i);
    res.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return res;
}

HermitianBasis::HermitianBasis(int d) : d_(d) {
  if (d < 1) {
    throw std::invalid_argument("HermitianBasis: dimension must be positive");
  }
  elements_.reserve(static_cast<std::size_t>(d) * d);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  elements_.push_back(HermMat(Eigen::MatrixXcd::Identity(d, d) * inv_sqrt_d));
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
      x(j, k) = s;
      x(k, j) = s;
      elements_.push_back(HermMat(std::move(x)));
      Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(d, d);
      y(j, k) = std::complex<double>(0.0, -s);
      y(k, j) = std::complex<double>(0.0, s);
      elements_.push_back(HermMat(std::move(y)));
    }
  }
  for (int l = 1; l < d; ++l) {
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int i = 0; i < l; ++i) {
      z(i, i) = norm;
    }
    z(l, l) = -static_cast<double>(l) * norm;
    elements_.push_back(HermMat(std::move(z)));
  }
}

Eigen::VectorXd HermitianBasis::coords(const HermMat& rho) const {
  if (rho.dim() != d_) {
    throw std::invalid_argument("HermitianBasis::coords: dimension mismatch");
  }
  Eigen::VectorXd x(size());
  for (int i = 0; i < size(); ++i) {
    x(i) = hs_inner(elements_[static_cast<std::size_t>(i)], rho);
  }
  return x;
}

HermMat HermitianBasis::matrix(const Eigen::VectorXd& coords) const {
  if (coords.size() != size()) {
    throw std::invalid_argument("HermitianBasis::matrix: coordinate length mismatch");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d_, d_);
  for (int i = 0; i < size(); ++i) {
    m += coords(i) * elements_[static_cast<std::size_t>(i)].mat();
  }
  return HermMat(std::move(m));
}

}  // namespace gpt

/*
 Copyright 2026 The aniso authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <numeric>

#include "aniso/lmi.hpp"

namespace aniso::lmi {

namespace {

void same_shape(const AffineMatrix& a, const AffineMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string("affine ") + op + ": " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
}

}  // namespace

AffineMatrix AffineMatrix::coordinate(int coord, const MatrixXd& coef) {
  AffineMatrix m(static_cast<int>(coef.rows()), static_cast<int>(coef.cols()));
  m.add_term(coord, coef);
  return m;
}

void AffineMatrix::add_term(int coord, const MatrixXd& coef) {
  if (coef.rows() != c_.rows() || coef.cols() != c_.cols()) throw DimensionMismatch("affine term shape mismatch");
  auto it = t_.find(coord);
  if (it == t_.end()) {
    if (!coef.isZero(0.0)) t_.emplace(coord, coef);
  } else {
    it->second += coef;
    if (it->second.isZero(0.0)) t_.erase(it);
  }
}

MatrixXd AffineMatrix::evaluate(const VectorXd& x) const {
  MatrixXd v = c_;
  for (const auto& [i, M] : t_) {
    if (i >= x.size()) throw DimensionMismatch("assignment shorter than coordinate " + std::to_string(i));
    v += x(i) * M;
  }
  return v;
}

double AffineMatrix::value(const VectorXd& x) const {
  if (rows() != 1 || cols() != 1) throw DimensionMismatch("value() needs a 1x1 expression");
  return evaluate(x)(0, 0);
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix r(c_.transpose());
  for (const auto& [i, M] : t_) r.t_.emplace(i, M.transpose());
  return r;
}

AffineMatrix AffineMatrix::block(int r, int c, int nr, int nc) const {
  AffineMatrix out(MatrixXd(c_.block(r, c, nr, nc)));
  for (const auto& [i, M] : t_) out.add_term(i, M.block(r, c, nr, nc));
  return out;
}

AffineMatrix AffineMatrix::symmetrized() const {
  AffineMatrix s = *this;
  s += transpose();
  return 0.5 * s;
}

bool AffineMatrix::is_symmetric(double tol) const {
  if (rows() != cols()) return false;
  if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  for (const auto& [i, M] : t_)
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

double AffineMatrix::data_norm() const { return c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0; }

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& o) {
  same_shape(*this, o, "sum");
  c_ += o.c_;
  for (const auto& [i, M] : o.t_) add_term(i, M);
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& o) {
  same_shape(*this, o, "difference");
  c_ -= o.c_;
  for (const auto& [i, M] : o.t_) add_term(i, -M);
  return *this;
}

AffineMatrix& AffineMatrix::operator*=(double s) {
  c_ *= s;
  if (s == 0.0) {
    t_.clear();
  } else {
    for (auto& [i, M] : t_) M *= s;
  }
  return *this;
}

AffineMatrix operator*(const MatrixXd& L, const AffineMatrix& a) {
  if (L.cols() != a.rows())
    throw DimensionMismatch("left product: " + std::to_string(L.rows()) + "x" + std::to_string(L.cols()) +
                            " times " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  AffineMatrix r(MatrixXd(L * a.constant()));
  for (const auto& [i, M] : a.terms()) r.add_term(i, L * M);
  return r;
}

AffineMatrix operator*(const AffineMatrix& a, const MatrixXd& R) {
  if (a.cols() != R.rows())
    throw DimensionMismatch("right product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " times " + std::to_string(R.rows()) + "x" + std::to_string(R.cols()));
  AffineMatrix r(MatrixXd(a.constant() * R));
  for (const auto& [i, M] : a.terms()) r.add_term(i, M * R);
  return r;
}

AffineMatrix hstack(const std::vector<AffineMatrix>& parts) {
  if (parts.empty()) return AffineMatrix(0, 0);
  const int r = parts.front().rows();
  int c = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw DimensionMismatch("hstack: row counts differ");
    c += p.cols();
  }
  AffineMatrix out(r, c);
  int off = 0;
  for (const auto& p : parts) {
    MatrixXd pad = MatrixXd::Zero(r, c);
    pad.middleCols(off, p.cols()) = p.constant();
    AffineMatrix piece(pad);
    for (const auto& [i, M] : p.terms()) {
      MatrixXd t = MatrixXd::Zero(r, c);
      t.middleCols(off, p.cols()) = M;
      piece.add_term(i, t);
    }
    out += piece;
    off += p.cols();
  }
  return out;
}

AffineMatrix vstack(const std::vector<AffineMatrix>& parts) {
  std::vector<AffineMatrix> tr;
  tr.reserve(parts.size());
  for (const auto& p : parts) tr.push_back(p.transpose());
  return hstack(tr).transpose();
}

SymmetricBlocks::SymmetricBlocks(std::vector<int> sizes) : sizes_(std::move(sizes)) {}

void SymmetricBlocks::set(int i, int j, const AffineMatrix& m) {
  if (i < j) throw std::invalid_argument("SymmetricBlocks::set expects the lower triangle");
  if (i >= static_cast<int>(sizes_.size())) throw std::out_of_range("block index");
  if (m.rows() != sizes_[i] || m.cols() != sizes_[j])
    throw DimensionMismatch("block (" + std::to_string(i) + "," + std::to_string(j) + ") should be " +
                            std::to_string(sizes_[i]) + "x" + std::to_string(sizes_[j]) + ", got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (i == j && !m.is_symmetric(1e-12 * std::max(1.0, m.data_norm())))
    throw std::invalid_argument("diagonal block (" + std::to_string(i) + ") is not symmetric");
  lower_[{i, j}] = (i == j) ? m.symmetrized() : m;
}

AffineMatrix SymmetricBlocks::build() const {
  const int n = std::accumulate(sizes_.begin(), sizes_.end(), 0);
  std::vector<int> off(sizes_.size(), 0);
  for (size_t k = 1; k < sizes_.size(); ++k) off[k] = off[k - 1] + sizes_[k - 1];
  MatrixXd c = MatrixXd::Zero(n, n);
  std::map<int, MatrixXd> terms;
  auto place = [&](int i, int j, const MatrixXd& M, MatrixXd& dst) {
    dst.block(off[i], off[j], sizes_[i], sizes_[j]) = M;
    if (i != j) dst.block(off[j], off[i], sizes_[j], sizes_[i]) = M.transpose();
  };
  for (const auto& [ij, m] : lower_) {
    place(ij.first, ij.second, m.constant(), c);
    for (const auto& [k, M] : m.terms()) {
      auto it = terms.find(k);
      if (it == terms.end()) it = terms.emplace(k, MatrixXd::Zero(n, n)).first;
      place(ij.first, ij.second, M, it->second);
    }
  }
  AffineMatrix out(c);
  for (const auto& [k, M] : terms) out.add_term(k, M);
  return out;
}

}  // namespace aniso::lmi

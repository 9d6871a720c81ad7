#include "lrvp/htensor.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace lrvp {

namespace {

using Eigen::Index;
using Eigen::Map;

Map<const MatrixXd> slice_of(const MatrixXd& Bmat, Index rows, Index cols, Index l) {
  return Map<const MatrixXd>(Bmat.col(l).data(), rows, cols);
}

// Thin QR: M = Q R with Q (N x k), R (k x r), k = min(N, r).
void thin_qr(const MatrixXd& M, MatrixXd& Q, MatrixXd& R) {
  const Index k = std::min(M.rows(), M.cols());
  if (M.cols() == 0) {
    Q = MatrixXd(M.rows(), 0);
    R = MatrixXd(0, 0);
    return;
  }
  Eigen::HouseholderQR<MatrixXd> qr(M);
  R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Q = qr.householderQ() * MatrixXd::Identity(M.rows(), k);
}

// Mode products on a matricized transfer tensor:
// slices' = L * slice * Rm^T for every parent index.
MatrixXd mode_product(const MatrixXd& Bmat, Index rl, Index rr, const MatrixXd& L,
                      const MatrixXd& Rm) {
  const Index rp = Bmat.cols();
  MatrixXd out(L.rows() * Rm.rows(), rp);
  for (Index l = 0; l < rp; ++l) {
    MatrixXd s = L * slice_of(Bmat, rl, rr, l) * Rm.transpose();
    out.col(l) = Map<const VectorXd>(s.data(), s.size());
  }
  return out;
}

// Retained rank under a tail-energy budget on eigenvalues sorted ascending.
int keep_rank(const VectorXd& eig_ascending, double budget) {
  const int n = static_cast<int>(eig_ascending.size());
  double tail = 0.0;
  int discard = 0;
  for (int i = 0; i < n - 1; ++i) {  // keep at least rank 1
    tail += std::max(0.0, eig_ascending[i]);
    if (tail <= budget)
      discard = i + 1;
    else
      break;
  }
  return n - discard;
}

// Leading eigenvectors (descending eigenvalue order) of a symmetric PSD matrix.
MatrixXd leading_eigvecs(const MatrixXd& G, double budget, int& keep) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  keep = keep_rank(es.eigenvalues(), budget);
  const Index n = G.rows();
  MatrixXd P(n, keep);
  for (int j = 0; j < keep; ++j) P.col(j) = es.eigenvectors().col(n - 1 - j);
  return P;
}

}  // namespace

int RankTuple::max() const { return std::max({r1, r2, r3, r4, r12, r34}); }

HTensor::HTensor(MatrixXd U1, MatrixXd U2, MatrixXd U3, MatrixXd U4, MatrixXd B12mat,
                 MatrixXd B34mat, MatrixXd Broot, bool orthogonal)
    : U1_(std::move(U1)),
      U2_(std::move(U2)),
      U3_(std::move(U3)),
      U4_(std::move(U4)),
      B12_(std::move(B12mat)),
      B34_(std::move(B34mat)),
      Broot_(std::move(Broot)),
      orthogonal_(orthogonal) {
  if (B12_.rows() != U1_.cols() * U2_.cols() || B34_.rows() != U3_.cols() * U4_.cols() ||
      Broot_.rows() != B12_.cols() || Broot_.cols() != B34_.cols())
    throw std::invalid_argument("HTensor: inconsistent transfer tensor shapes");
}

HTensor HTensor::from_separable(
    const std::vector<std::tuple<VectorXd, VectorXd, VectorXd, VectorXd, double>>& terms) {
  if (terms.empty()) throw std::invalid_argument("HTensor::from_separable: empty term list");

  // Deduplicate identical leaf vectors and identical child-index pairs so
  // that shared factors (typical for initial data) do not inflate ranks.
  auto dedupe = [](std::vector<VectorXd>& pool, const VectorXd& v) -> int {
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].size() == v.size() && pool[i] == v) return static_cast<int>(i);
    pool.push_back(v);
    return static_cast<int>(pool.size() - 1);
  };
  std::vector<VectorXd> p1, p2, p3, p4;
  std::vector<std::pair<int, int>> pairs12, pairs34;
  auto pair_id = [](std::vector<std::pair<int, int>>& pool, std::pair<int, int> p) -> int {
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i] == p) return static_cast<int>(i);
    pool.push_back(p);
    return static_cast<int>(pool.size() - 1);
  };
  struct TermIdx {
    int i12, i34;
    double coeff;
  };
  std::vector<TermIdx> tidx;
  for (const auto& [u1, u2, u3, u4, a] : terms) {
    const int i1 = dedupe(p1, u1), i2 = dedupe(p2, u2);
    const int i3 = dedupe(p3, u3), i4 = dedupe(p4, u4);
    tidx.push_back({pair_id(pairs12, {i1, i2}), pair_id(pairs34, {i3, i4}), a});
  }
  auto frame = [](const std::vector<VectorXd>& pool) {
    MatrixXd U(pool.front().size(), pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) U.col(static_cast<Index>(i)) = pool[i];
    return U;
  };
  const int r1 = static_cast<int>(p1.size()), r2 = static_cast<int>(p2.size());
  const int r3 = static_cast<int>(p3.size()), r4 = static_cast<int>(p4.size());
  const int r12 = static_cast<int>(pairs12.size()), r34 = static_cast<int>(pairs34.size());
  MatrixXd B12 = MatrixXd::Zero(static_cast<Index>(r1) * r2, r12);
  MatrixXd B34 = MatrixXd::Zero(static_cast<Index>(r3) * r4, r34);
  for (int l = 0; l < r12; ++l) B12(pairs12[l].first + r1 * pairs12[l].second, l) = 1.0;
  for (int l = 0; l < r34; ++l) B34(pairs34[l].first + r3 * pairs34[l].second, l) = 1.0;
  MatrixXd Broot = MatrixXd::Zero(r12, r34);
  for (const auto& t : tidx) Broot(t.i12, t.i34) += t.coeff;
  return HTensor(frame(p1), frame(p2), frame(p3), frame(p4), std::move(B12), std::move(B34),
                 std::move(Broot), false);
}

RankTuple HTensor::ranks() const {
  return RankTuple{static_cast<int>(U1_.cols()), static_cast<int>(U2_.cols()),
                   static_cast<int>(U3_.cols()), static_cast<int>(U4_.cols()),
                   static_cast<int>(Broot_.rows()), static_cast<int>(Broot_.cols())};
}

int HTensor::dim_size(int leaf) const { return static_cast<int>(U(leaf).rows()); }

const MatrixXd& HTensor::U(int leaf) const {
  switch (leaf) {
    case 1: return U1_;
    case 2: return U2_;
    case 3: return U3_;
    case 4: return U4_;
  }
  throw std::invalid_argument("HTensor::U: leaf must be 1..4");
}

MatrixXd HTensor::dense_matrix() const {
  const Index N1 = U1_.rows(), N2 = U2_.rows(), N3 = U3_.rows(), N4 = U4_.rows();
  if (N1 * N2 * N3 * N4 > (Index{1} << 24))
    throw std::length_error("HTensor::dense_matrix: tensor too large for dense evaluation");
  const Index r12 = Broot_.rows(), r34 = Broot_.cols();
  const Index r1 = U1_.cols(), r2 = U2_.cols(), r3 = U3_.cols(), r4 = U4_.cols();
  MatrixXd F12(N1 * N2, r12), F34(N3 * N4, r34);
  for (Index l = 0; l < r12; ++l) {
    MatrixXd s = U1_ * slice_of(B12_, r1, r2, l) * U2_.transpose();
    F12.col(l) = Map<const VectorXd>(s.data(), s.size());
  }
  for (Index l = 0; l < r34; ++l) {
    MatrixXd s = U3_ * slice_of(B34_, r3, r4, l) * U4_.transpose();
    F34.col(l) = Map<const VectorXd>(s.data(), s.size());
  }
  return F12 * Broot_ * F34.transpose();
}

HTensor HTensor::add(const HTensor& other) const {
  for (int leaf = 1; leaf <= 4; ++leaf)
    if (dim_size(leaf) != other.dim_size(leaf))
      throw std::invalid_argument("HTensor::add: grid size mismatch");
  const RankTuple a = ranks(), b = other.ranks();
  auto cat = [](const MatrixXd& x, const MatrixXd& y) {
    MatrixXd out(x.rows(), x.cols() + y.cols());
    out.leftCols(x.cols()) = x;
    out.rightCols(y.cols()) = y;
    return out;
  };
  auto embed = [](const MatrixXd& Bmat, Index rl, Index rr, Index Rl, Index Rr, Index off_l,
                  Index off_r) {
    MatrixXd out = MatrixXd::Zero(Rl * Rr, Bmat.cols());
    for (Index l = 0; l < Bmat.cols(); ++l) {
      Map<MatrixXd> dst(out.col(l).data(), Rl, Rr);
      dst.block(off_l, off_r, rl, rr) = slice_of(Bmat, rl, rr, l);
    }
    return out;
  };
  const Index R1 = a.r1 + b.r1, R2 = a.r2 + b.r2, R3 = a.r3 + b.r3, R4 = a.r4 + b.r4;
  MatrixXd B12 = cat(embed(B12_, a.r1, a.r2, R1, R2, 0, 0),
                     embed(other.B12_, b.r1, b.r2, R1, R2, a.r1, a.r2));
  MatrixXd B34 = cat(embed(B34_, a.r3, a.r4, R3, R4, 0, 0),
                     embed(other.B34_, b.r3, b.r4, R3, R4, a.r3, a.r4));
  MatrixXd Broot = MatrixXd::Zero(a.r12 + b.r12, a.r34 + b.r34);
  Broot.topLeftCorner(a.r12, a.r34) = Broot_;
  Broot.bottomRightCorner(b.r12, b.r34) = other.Broot_;
  return HTensor(cat(U1_, other.U1_), cat(U2_, other.U2_), cat(U3_, other.U3_),
                 cat(U4_, other.U4_), std::move(B12), std::move(B34), std::move(Broot), false);
}

HTensor HTensor::scale_const(double a) const {
  HTensor out = *this;
  out.Broot_ *= a;
  return out;
}

HTensor HTensor::leaf_apply(int leaf, const MatrixXd& op) const {
  HTensor out = *this;
  MatrixXd& U = (leaf == 1) ? out.U1_ : (leaf == 2) ? out.U2_ : (leaf == 3) ? out.U3_ : out.U4_;
  if (leaf < 1 || leaf > 4 || op.cols() != U.rows())
    throw std::invalid_argument("HTensor::leaf_apply: shape mismatch");
  U = op * U;
  out.orthogonal_ = false;
  return out;
}

HTensor HTensor::leaf_scale(int leaf, const VectorXd& vec) const {
  HTensor out = *this;
  MatrixXd& U = (leaf == 1) ? out.U1_ : (leaf == 2) ? out.U2_ : (leaf == 3) ? out.U3_ : out.U4_;
  if (leaf < 1 || leaf > 4 || vec.size() != U.rows())
    throw std::invalid_argument("HTensor::leaf_scale: length mismatch");
  U = vec.asDiagonal() * U;
  out.orthogonal_ = false;
  return out;
}

HTensor HTensor::leaf_apply(int leaf, const UpwindOperator& op) const {
  HTensor out = *this;
  MatrixXd& U = (leaf == 1) ? out.U1_ : (leaf == 2) ? out.U2_ : (leaf == 3) ? out.U3_ : out.U4_;
  U = op.apply_cols(U);
  out.orthogonal_ = false;
  return out;
}

HTensor HTensor::orthogonalize() const {
  const RankTuple r = ranks();
  MatrixXd Q1, R1, Q2, R2, Q3, R3, Q4, R4;
  thin_qr(U1_, Q1, R1);
  thin_qr(U2_, Q2, R2);
  thin_qr(U3_, Q3, R3);
  thin_qr(U4_, Q4, R4);
  MatrixXd B12 = mode_product(B12_, r.r1, r.r2, R1, R2);
  MatrixXd B34 = mode_product(B34_, r.r3, r.r4, R3, R4);
  MatrixXd Q12, R12, Q34, R34;
  thin_qr(B12, Q12, R12);
  thin_qr(B34, Q34, R34);
  MatrixXd Broot = R12 * Broot_ * R34.transpose();
  return HTensor(std::move(Q1), std::move(Q2), std::move(Q3), std::move(Q4), std::move(Q12),
                 std::move(Q34), std::move(Broot), true);
}

double HTensor::frobenius_norm() const {
  if (orthogonal_) return Broot_.norm();
  return orthogonalize().Broot_.norm();
}

HTensor HTensor::truncate(double eps) const {
  HTensor h = orthogonalize();
  const double budget = eps * eps;

  // Pair nodes from the root Gram matrices.
  int k12 = 0, k34 = 0;
  MatrixXd P12 = leading_eigvecs(h.Broot_ * h.Broot_.transpose(), budget, k12);
  h.Broot_ = P12.transpose() * h.Broot_;
  h.B12_ = h.B12_ * P12;
  MatrixXd P34 = leading_eigvecs(h.Broot_.transpose() * h.Broot_, budget, k34);
  h.Broot_ = h.Broot_ * P34;
  h.B34_ = h.B34_ * P34;

  // Leaves, with the (already truncated) environment folded in.
  auto leaf_grams = [](const MatrixXd& Bmat, Index rl, Index rr, const MatrixXd& W) {
    // W: (rl*rr) x r_env coefficient matrix; returns Gram over rl and rr.
    std::pair<MatrixXd, MatrixXd> g{MatrixXd::Zero(rl, rl), MatrixXd::Zero(rr, rr)};
    for (Index l = 0; l < W.cols(); ++l) {
      Map<const MatrixXd> s(W.col(l).data(), rl, rr);
      g.first += s * s.transpose();
      g.second += s.transpose() * s;
    }
    (void)Bmat;
    return g;
  };

  {
    const RankTuple r = h.ranks();
    MatrixXd W12 = h.B12_ * h.Broot_;  // (r1*r2) x r34
    auto [G1, G2] = leaf_grams(h.B12_, r.r1, r.r2, W12);
    int kk = 0;
    MatrixXd Q1 = leading_eigvecs(G1, budget, kk);
    h.U1_ = h.U1_ * Q1;
    h.B12_ = mode_product(h.B12_, r.r1, r.r2, Q1.transpose(), MatrixXd::Identity(r.r2, r.r2));
    // recompute leaf-2 Gram with the updated node
    MatrixXd W12b = h.B12_ * h.Broot_;
    auto [G1b, G2b] = leaf_grams(h.B12_, kk, r.r2, W12b);
    int kk2 = 0;
    MatrixXd Q2 = leading_eigvecs(G2b, budget, kk2);
    h.U2_ = h.U2_ * Q2;
    h.B12_ = mode_product(h.B12_, kk, r.r2, MatrixXd::Identity(kk, kk), Q2.transpose());
  }
  {
    const RankTuple r = h.ranks();
    MatrixXd W34 = h.B34_ * h.Broot_.transpose();  // (r3*r4) x r12
    auto [G3, G4] = leaf_grams(h.B34_, r.r3, r.r4, W34);
    int kk = 0;
    MatrixXd Q3 = leading_eigvecs(G3, budget, kk);
    h.U3_ = h.U3_ * Q3;
    h.B34_ = mode_product(h.B34_, r.r3, r.r4, Q3.transpose(), MatrixXd::Identity(r.r4, r.r4));
    MatrixXd W34b = h.B34_ * h.Broot_.transpose();
    auto [G3b, G4b] = leaf_grams(h.B34_, kk, r.r4, W34b);
    int kk2 = 0;
    MatrixXd Q4 = leading_eigvecs(G4b, budget, kk2);
    h.U4_ = h.U4_ * Q4;
    h.B34_ = mode_product(h.B34_, kk, r.r4, MatrixXd::Identity(kk, kk), Q4.transpose());
  }
  // Leaf projections de-orthonormalize the pair-node transfer tensors.
  h.orthogonal_ = false;
  return h;
}

HTensor HTensor::scale_v(bool leaf3, bool leaf4, const VectorXd& w3, const VectorXd& w4) const {
  HTensor out = *this;
  if (leaf3) out = out.leaf_scale(3, w3);
  if (leaf4) out = out.leaf_scale(4, w4);
  return out;
}

std::size_t HTensor::storage_count() const {
  return static_cast<std::size_t>(U1_.size() + U2_.size() + U3_.size() + U4_.size() +
                                  B12_.size() + B34_.size() + Broot_.size());
}

HTMoments ht_moments(const HTensor& f, const AxisGrid& vgrid1, const AxisGrid& vgrid2) {
  const RankTuple r = f.ranks();
  if (f.dim_size(3) != vgrid1.n || f.dim_size(4) != vgrid2.n)
    throw std::invalid_argument("ht_moments: velocity grid mismatch");
  const VectorXd ones3 = VectorXd::Ones(vgrid1.n), ones4 = VectorXd::Ones(vgrid2.n);
  const VectorXd& v1 = vgrid1.points;
  const VectorXd& v2 = vgrid2.points;
  const VectorXd v1sq = v1.array().square().matrix();
  const VectorXd v2sq = v2.array().square().matrix();
  const double hh = vgrid1.h * vgrid2.h;

  // leaf contractions
  const VectorXd a3_1 = f.U(3).transpose() * ones3, a3_v = f.U(3).transpose() * v1,
                 a3_v2 = f.U(3).transpose() * v1sq;
  const VectorXd a4_1 = f.U(4).transpose() * ones4, a4_v = f.U(4).transpose() * v2,
                 a4_v2 = f.U(4).transpose() * v2sq;

  // s_q(l34) = <U34_l34, q> for the four moment test functions
  MatrixXd s(4, r.r34);
  for (int l = 0; l < r.r34; ++l) {
    Map<const MatrixXd> S(f.B34().col(l).data(), r.r3, r.r4);
    s(0, l) = hh * a3_1.dot(S * a4_1);
    s(1, l) = hh * a3_v.dot(S * a4_1);
    s(2, l) = hh * a3_1.dot(S * a4_v);
    s(3, l) = 0.5 * hh * (a3_v2.dot(S * a4_1) + a3_1.dot(S * a4_v2));
  }
  MatrixXd q = f.Broot() * s.transpose();  // r12 x 4
  HTMoments m;
  auto core_of = [&](int col) {
    VectorXd t = f.B12() * q.col(col);  // (r1*r2)
    return MatrixXd(Map<const MatrixXd>(t.data(), r.r1, r.r2));
  };
  m.rho = LowRankMatrix::from_core(f.U(1), core_of(0), f.U(2));
  m.J1 = LowRankMatrix::from_core(f.U(1), core_of(1), f.U(2));
  m.J2 = LowRankMatrix::from_core(f.U(1), core_of(2), f.U(2));
  m.kappa = LowRankMatrix::from_core(f.U(1), core_of(3), f.U(2));
  return m;
}

namespace {

constexpr std::uint32_t kMagic = 0x4C524854;  // "LRHT"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void put_mat(std::ofstream& os, const MatrixXd& m) {
  put_u32(os, static_cast<std::uint32_t>(m.rows()));
  put_u32(os, static_cast<std::uint32_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * m.size()));
}

MatrixXd get_mat(std::ifstream& is) {
  const std::uint32_t rows = get_u32(is), cols = get_u32(is);
  MatrixXd m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return m;
}

}  // namespace

void write_htensor(const HTensor& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_htensor: cannot open " + path);
  put_u32(os, kMagic);
  put_u32(os, kVersion);
  put_mat(os, f.U(1));
  put_mat(os, f.U(2));
  put_mat(os, f.U(3));
  put_mat(os, f.U(4));
  put_mat(os, f.B12());
  put_mat(os, f.B34());
  put_mat(os, f.Broot());
  if (!os) throw std::runtime_error("write_htensor: write failed for " + path);
}

HTensor read_htensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_htensor: cannot open " + path);
  if (get_u32(is) != kMagic) throw std::runtime_error("read_htensor: bad magic in " + path);
  if (get_u32(is) != kVersion) throw std::runtime_error("read_htensor: bad version in " + path);
  MatrixXd U1 = get_mat(is), U2 = get_mat(is), U3 = get_mat(is), U4 = get_mat(is);
  MatrixXd B12 = get_mat(is), B34 = get_mat(is), Broot = get_mat(is);
  if (!is) throw std::runtime_error("read_htensor: truncated file " + path);
  return HTensor(std::move(U1), std::move(U2), std::move(U3), std::move(U4), std::move(B12),
                 std::move(B34), std::move(Broot), false);
}

}  // namespace lrvp

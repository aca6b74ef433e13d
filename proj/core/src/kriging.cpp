#include "sivae/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sivae {

std::string to_string(KrigingKind k) { return k == KrigingKind::ordinary ? "ordinary" : "universal"; }

KrigingKind kriging_kind_from_string(const std::string& name) {
  if (name == "ordinary") return KrigingKind::ordinary;
  if (name == "universal") return KrigingKind::universal;
  throw std::invalid_argument("unknown kriging kind '" + name + "'");
}

namespace {

std::vector<Eigen::Index> nearest(const Matrix& locations, const Point& target, int count) {
  const auto n = locations.rows();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = (locations.row(i).transpose() - target).squaredNorm();
  }
  const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(count, n));
  auto closer = [&](Eigen::Index a, Eigen::Index b) {
    const double da = dist[static_cast<std::size_t>(a)];
    const double db = dist[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  idx.resize(k);
  return idx;
}

}  // namespace

KrigingSystem kriging_weights(const Matrix& train_locations, const Point& target, const VariogramModel& vgm,
                              KrigingKind kind, int neighbours) {
  vgm.validate();
  const auto n = train_locations.rows();
  if (neighbours < 1) throw std::invalid_argument("kriging: neighbours must be >= 1");
  if (neighbours > n) throw std::invalid_argument("kriging: more neighbours requested than training points");
  const int drift = kind == KrigingKind::ordinary ? 1 : 3;
  if (neighbours < drift) throw std::invalid_argument("kriging: too few neighbours for the drift basis");

  KrigingSystem sys;
  sys.neighbours = nearest(train_locations, target, neighbours);
  const auto k = static_cast<Eigen::Index>(sys.neighbours.size());
  Matrix pts(k, 2);
  for (Eigen::Index i = 0; i < k; ++i) pts.row(i) = train_locations.row(sys.neighbours[static_cast<std::size_t>(i)]);

  // Drift coordinates centred on the target keep the system well scaled.
  const double scale = std::max(1e-12, (pts.rowwise() - target.transpose()).cwiseAbs().maxCoeff());
  Matrix a = Matrix::Zero(k + drift, k + drift);
  Vector rhs = Vector::Zero(k + drift);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      const double c = vgm.covariance((pts.row(i) - pts.row(j)).norm());
      a(i, j) = c;
      a(j, i) = c;
    }
    rhs[i] = vgm.covariance((pts.row(i).transpose() - target).norm());
    a(i, k) = a(k, i) = 1.0;
    if (drift == 3) {
      const double dx = (pts(i, 0) - target.x()) / scale;
      const double dy = (pts(i, 1) - target.y()) / scale;
      a(i, k + 1) = a(k + 1, i) = dx;
      a(i, k + 2) = a(k + 2, i) = dy;
    }
  }
  rhs[k] = 1.0;  // drift at the target: (1, 0, 0) in centred coordinates

  const double base = vgm.sill + vgm.nugget;
  for (double rel : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
    Matrix work = a;
    work.topLeftCorner(k, k).diagonal().array() += rel * base;
    Eigen::FullPivLU<Matrix> lu(work);
    if (!lu.isInvertible()) continue;
    const Vector sol = lu.solve(rhs);
    if (!sol.allFinite()) continue;
    const double resid = (work * sol - rhs).norm();
    if (resid > 1e-6 * std::max(1.0, rhs.norm())) continue;
    sys.weights = sol.head(k);
    sys.multipliers = sol.tail(drift);
    return sys;
  }
  throw std::runtime_error("kriging: singular kriging system after jitter (duplicate or collinear sites?)");
}

Vector krige(const Matrix& train_locations, const Vector& train_values, const Matrix& targets,
             const VariogramModel& vgm, KrigingKind kind, int neighbours) {
  if (train_values.size() != train_locations.rows()) throw std::invalid_argument("krige: value count mismatch");
  if (targets.cols() != 2) throw std::invalid_argument("krige: targets must be m x 2");
  Vector out(targets.rows());
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    const KrigingSystem sys = kriging_weights(train_locations, targets.row(t).transpose(), vgm, kind, neighbours);
    double v = 0.0;
    for (std::size_t i = 0; i < sys.neighbours.size(); ++i) {
      v += sys.weights[static_cast<Eigen::Index>(i)] * train_values[sys.neighbours[i]];
    }
    out[t] = v;
  }
  return out;
}

}  // namespace sivae

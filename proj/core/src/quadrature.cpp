#include "sft/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <Eigen/Dense>

#include "sft/errors.hpp"

#ifndef SFT_BUILTIN_DATA_DIR
#define SFT_BUILTIN_DATA_DIR ""
#endif
#ifndef SFT_INSTALL_DATA_DIR
#define SFT_INSTALL_DATA_DIR ""
#endif

namespace sft {
namespace {

constexpr double kGramTolerance = 1e-10;
constexpr double kWeightSumTolerance = 1e-9;

CMatrix basis_matrix(const QuadratureGrid& grid, int max_order) {
  CMatrix y(static_cast<Eigen::Index>(grid.size()), HarmonicIndex::count(max_order));
  for (std::size_t q = 0; q < grid.size(); ++q) {
    y.row(static_cast<Eigen::Index>(q)) = sph_harm_all(max_order, grid.nodes()[q]).transpose();
  }
  return y;
}

int fit_order(std::size_t size) {
  int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(size)))) - 1;
  while (n >= 0 && static_cast<std::size_t>(HarmonicIndex::count(n)) > size) --n;
  return n;
}

}  // namespace

QuadratureGrid::QuadratureGrid(std::string name, std::vector<Direction> nodes, std::vector<double> weights,
                               std::optional<int> known_exact_degree)
    : name_(std::move(name)), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty()) throw ValidationError(name_ + ": grid has no nodes");
  if (nodes_.size() != weights_.size()) {
    throw ValidationError(name_ + ": node count " + std::to_string(nodes_.size()) + " != weight count " +
                          std::to_string(weights_.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0)) throw ValidationError(name_ + ": weight " + std::to_string(i) + " is not positive");
    sum += weights_[i];
  }
  if (std::abs(sum - kFourPi) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name_ << ": weights sum to " << sum << ", expected 4*pi";
    throw ValidationError(msg.str());
  }
  for (auto& n : nodes_) n = n.normalized();

  if (known_exact_degree) {
    max_exact_degree_ = *known_exact_degree;
    return;
  }
  const int limit = fit_order(nodes_.size());
  const CMatrix y = basis_matrix(*this, limit);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(size()));
  const CMatrix deviation = y.adjoint() * w.asDiagonal() * y - CMatrix::Identity(y.cols(), y.cols());
  max_exact_degree_ = -1;
  for (int d = 0; d <= limit; ++d) {
    const Eigen::Index n = HarmonicIndex::count(d);
    if (deviation.topLeftCorner(n, n).cwiseAbs().maxCoeff() >= kGramTolerance) break;
    max_exact_degree_ = d;
  }
}

int QuadratureGrid::max_fit_order() const { return fit_order(nodes_.size()); }

double QuadratureGrid::max_spacing() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Vec3 a = nodes_[i].unit_vector();
    double best = kPi;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (i == j) continue;
      best = std::min(best, std::acos(std::clamp(a.dot(nodes_[j].unit_vector()), -1.0, 1.0)));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

QuadratureGrid QuadratureGrid::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open grid file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
  if (line != "theta,phi,weight") throw ParseError(path.string() + ": header must be 'theta,phi,weight'");
  std::vector<Direction> nodes;
  std::vector<double> weights;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string a, b, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c)) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": expected 3 columns");
    }
    try {
      nodes.push_back({std::stod(a), std::stod(b)});
      weights.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": non-numeric value");
    }
  }
  return {path.stem().string(), std::move(nodes), std::move(weights)};
}

void QuadratureGrid::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << "theta,phi,weight\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out << nodes_[i].theta << ',' << nodes_[i].phi << ',' << weights_[i] << '\n';
  }
}

double gram_error(const QuadratureGrid& grid, int degree) {
  const CMatrix y = basis_matrix(grid, degree);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights().data(),
                                                              static_cast<Eigen::Index>(grid.size()));
  const CMatrix gram = y.adjoint() * w.asDiagonal() * y;
  return (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

const std::vector<int>& shipped_grid_counts() {
  static const std::vector<int> counts{16, 25, 36, 49, 64, 100};
  return counts;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("SFT_DATA_DIR"); env != nullptr && *env != '\0') return env;
  const std::filesystem::path builtin{SFT_BUILTIN_DATA_DIR};
  if (!builtin.empty() && std::filesystem::exists(builtin)) return builtin;
  return std::filesystem::path{SFT_INSTALL_DATA_DIR};
}

std::shared_ptr<const QuadratureGrid> fliege_grid(int point_count) {
  const auto& counts = shipped_grid_counts();
  if (std::find(counts.begin(), counts.end(), point_count) == counts.end()) {
    throw UnsupportedGridError("no bundled grid with " + std::to_string(point_count) + " nodes");
  }
  static std::mutex mutex;
  static std::map<std::pair<std::string, int>, std::shared_ptr<const QuadratureGrid>> cache;
  const auto dir = data_directory();
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(dir.string(), point_count);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const std::string file = "fliege_" + std::to_string(point_count) + ".csv";
  std::filesystem::path path = dir / "grids" / file;
  if (!std::filesystem::exists(path)) path = dir / file;
  if (!std::filesystem::exists(path)) {
    throw UnsupportedGridError("grid file " + file + " not found under " + dir.string());
  }
  auto grid = std::make_shared<const QuadratureGrid>(QuadratureGrid::load_csv(path));
  cache.emplace(key, grid);
  return grid;
}

QuadratureGrid gauss_product_grid(int degree) {
  if (degree < 0) throw ArgumentError("gauss_product_grid: degree must be >= 0");
  const int n_theta = degree / 2 + 1;
  const int n_phi = degree + 1;
  // Gauss-Legendre nodes by Newton iteration on P_n.
  std::vector<double> x(static_cast<std::size_t>(n_theta));
  std::vector<double> wx(static_cast<std::size_t>(n_theta));
  for (int i = 0; i < n_theta; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n_theta + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double pn = z;
      double pm = 1.0;
      for (int k = 2; k <= n_theta; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * pn - (k - 1.0) * pm) / k;
        pm = pn;
        pn = pk;
      }
      dp = n_theta * (z * pn - pm) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    wx[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  std::vector<Direction> nodes;
  std::vector<double> weights;
  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      nodes.push_back({std::acos(x[i]), 2.0 * kPi * j / n_phi});
      weights.push_back(wx[i] * 2.0 * kPi / n_phi);
    }
  }
  // Renormalise the last ulp so the weight sum check is exact.
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w *= kFourPi / sum;
  return {"gauss_product_" + std::to_string(degree), std::move(nodes), std::move(weights), degree / 2};
}

HarmonicTransform::HarmonicTransform(std::shared_ptr<const QuadratureGrid> grid, int max_order)
    : grid_(std::move(grid)), max_order_(max_order) {
  if (max_order < 0) throw ArgumentError("HarmonicTransform: max_order must be >= 0");
  if (max_order > grid_->max_fit_order()) {
    throw AliasingError("order " + std::to_string(max_order) + " exceeds what grid " + grid_->name() + " (" +
                        std::to_string(grid_->size()) + " nodes) can resolve");
  }
  quadrature_ = max_order <= grid_->max_exact_degree();
  basis_ = basis_matrix(*grid_, max_order);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid_->weights().data(),
                                                              static_cast<Eigen::Index>(grid_->size()));
  if (quadrature_) {
    analysis_ = basis_.adjoint() * w.asDiagonal();
  } else {
    // Weighted least squares: (Y^H W Y)^-1 Y^H W, via QR of W^1/2 Y.
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const CMatrix scaled = sw.asDiagonal() * basis_;
    Eigen::ColPivHouseholderQR<CMatrix> qr(scaled);
    if (qr.rank() < scaled.cols()) {
      throw AliasingError("grid " + grid_->name() + " cannot resolve order " + std::to_string(max_order));
    }
    const CMatrix identity = CMatrix::Identity(scaled.rows(), scaled.rows());
    analysis_ = qr.solve(identity) * sw.asDiagonal();
  }
}

CVector HarmonicTransform::analyze(const CVector& values) const {
  if (values.size() != static_cast<Eigen::Index>(grid_->size())) {
    throw ArgumentError("analyze: expected " + std::to_string(grid_->size()) + " values, got " +
                        std::to_string(values.size()));
  }
  return analysis_ * values;
}

CVector HarmonicTransform::synthesize(const CVector& coefficients) const {
  if (coefficients.size() != basis_.cols()) throw ArgumentError("synthesize: coefficient count mismatch");
  return basis_ * coefficients;
}

CVector project_to_harmonics(const CVector& values, const QuadratureGrid& grid, int max_order) {
  const HarmonicTransform transform(std::make_shared<const QuadratureGrid>(grid), max_order);
  return transform.analyze(values);
}

}  // namespace sft

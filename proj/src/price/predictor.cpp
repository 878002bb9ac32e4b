#include "gridstudy/price/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace gridstudy::price {

namespace {

constexpr const char* kMagic = "gridstudy-price-predictor";

const char* kind_name(PredictorKind k) {
  return k == PredictorKind::Ridge ? "ridge" : "nearest_neighbor";
}

std::vector<double> normalized(const TrainedPredictor& m, const std::vector<double>& row) {
  std::vector<double> z(m.used.size());
  for (std::size_t k = 0; k < m.used.size(); ++k) z[k] = (row[m.used[k]] - m.mean[k]) / m.stddev[k];
  return z;
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument("predictor file: bad number '" + token + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> TrainedPredictor::dropped_columns() const {
  std::vector<std::string> out;
  std::size_t k = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (k < used.size() && used[k] == c) {
      ++k;
    } else {
      out.push_back(columns[c]);
    }
  }
  return out;
}

double TrainedPredictor::raw_slope(const std::string& name) const {
  if (kind != PredictorKind::Ridge) throw std::logic_error("raw_slope requires a ridge model");
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (columns[used[k]] == name) return coef[k] / stddev[k];
  }
  return 0.0;
}

TrainedPredictor train(const TrainingSet& data, PredictorKind kind, std::uint64_t seed,
                       std::size_t max_exemplars) {
  const auto& samples = data.samples;
  if (samples.empty()) throw TrainingError("training set is empty");
  if (kind == PredictorKind::Ridge && samples.size() < kRidgeMinSamples) {
    throw TrainingError(fmt::format("ridge needs at least {} samples, got {}", kRidgeMinSamples,
                                    samples.size()));
  }

  TrainedPredictor m;
  m.kind = kind;
  m.columns = FeatureVector::column_names(data.line_names);

  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    if (!std::isfinite(s.price)) throw TrainingError("non-finite training price");
    s.features.validate();
    rows.push_back(s.features.to_row());
    if (rows.back().size() != m.columns.size()) {
      throw TrainingError("feature vector does not match the training line layout");
    }
  }

  const double n = static_cast<double>(rows.size());
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    double mu = 0.0;
    for (const auto& r : rows) mu += r[c];
    mu /= n;
    double var = 0.0;
    for (const auto& r : rows) var += (r[c] - mu) * (r[c] - mu);
    const double sd = std::sqrt(var / n);
    if (sd > 1e-12 * (1.0 + std::abs(mu))) {
      m.used.push_back(c);
      m.mean.push_back(mu);
      m.stddev.push_back(sd);
    }
  }
  // A single exemplar has no spread at all; it still defines a valid
  // nearest-neighbour model that returns its price everywhere.
  if (m.used.empty() && !(kind == PredictorKind::NearestNeighbor && rows.size() == 1)) {
    throw TrainingError("degenerate training set: every feature is constant");
  }

  const std::size_t k = m.used.size();
  if (kind == PredictorKind::Ridge) {
    Eigen::MatrixXd Z(rows.size(), k);
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto z = normalized(m, rows[i]);
      for (std::size_t j = 0; j < k; ++j) Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[j];
      y(static_cast<Eigen::Index>(i)) = samples[i].price;
    }
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;
    Eigen::MatrixXd normal = Z.transpose() * Z;
    normal.diagonal().array() += kRidgeLambda;
    const Eigen::VectorXd w = normal.ldlt().solve(Z.transpose() * yc);
    // Training z-scores have zero mean, so the intercept is the target mean.
    m.intercept = y_mean;
    m.coef.assign(w.data(), w.data() + w.size());
  } else {
    std::vector<std::size_t> keep(rows.size());
    std::iota(keep.begin(), keep.end(), 0);
    if (max_exemplars > 0 && rows.size() > max_exemplars) {
      std::mt19937_64 rng(seed);
      for (std::size_t i = 0; i < max_exemplars; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (keep.size() - i));
        std::swap(keep[i], keep[j]);
      }
      keep.resize(max_exemplars);
      std::sort(keep.begin(), keep.end());
    }
    m.exemplars.reserve(keep.size() * k);
    for (std::size_t i : keep) {
      const auto z = normalized(m, rows[i]);
      m.exemplars.insert(m.exemplars.end(), z.begin(), z.end());
      m.targets.push_back(samples[i].price);
    }
  }
  return m;
}

double predict(const TrainedPredictor& m, const FeatureVector& features) {
  const auto row = features.to_row();
  if (row.size() != m.columns.size()) {
    throw std::invalid_argument(fmt::format("feature dimension {} does not match model dimension {}",
                                            row.size(), m.columns.size()));
  }
  const auto z = normalized(m, row);
  if (m.kind == PredictorKind::Ridge) {
    double v = m.intercept;
    for (std::size_t j = 0; j < z.size(); ++j) v += m.coef[j] * z[j];
    return v;
  }
  const std::size_t k = z.size();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < m.targets.size(); ++e) {
    const double* ex = m.exemplars.data() + e * k;
    double d = 0.0;
    for (std::size_t j = 0; j < k && d < best_d; ++j) {
      const double diff = ex[j] - z[j];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  return m.targets[best];
}

std::vector<double> predict_day(const TrainedPredictor& m, std::span<const FeatureVector> features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(predict(m, f));
  return out;
}

void write_predictor(const TrainedPredictor& m, std::ostream& out) {
  out << kMagic << " 1\n";
  out << "kind " << kind_name(m.kind) << '\n';
  out << "columns " << m.columns.size() << '\n';
  std::size_t k = 0;
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    const bool used = k < m.used.size() && m.used[k] == c;
    if (used) {
      out << m.columns[c] << " 1 " << format_exact(m.mean[k]) << ' ' << format_exact(m.stddev[k])
          << '\n';
      ++k;
    } else {
      out << m.columns[c] << " 0 0 0\n";
    }
  }
  if (m.kind == PredictorKind::Ridge) {
    out << "intercept " << format_exact(m.intercept) << '\n';
    out << "coef";
    for (double c : m.coef) out << ' ' << format_exact(c);
    out << '\n';
  } else {
    out << "exemplars " << m.targets.size() << '\n';
    const std::size_t dim = m.used.size();
    for (std::size_t e = 0; e < m.targets.size(); ++e) {
      out << format_exact(m.targets[e]);
      for (std::size_t j = 0; j < dim; ++j) out << ' ' << format_exact(m.exemplars[e * dim + j]);
      out << '\n';
    }
  }
}

TrainedPredictor read_predictor(std::istream& in) {
  auto expect = [&](const std::string& word) {
    std::string tok;
    if (!(in >> tok) || tok != word) {
      throw std::invalid_argument("predictor file: expected '" + word + "'");
    }
  };
  auto next = [&]() {
    std::string tok;
    if (!(in >> tok)) throw std::invalid_argument("predictor file: unexpected end of input");
    return tok;
  };

  expect(kMagic);
  if (next() != "1") throw std::invalid_argument("predictor file: unsupported version");
  TrainedPredictor m;
  expect("kind");
  const std::string kind = next();
  if (kind == "ridge") {
    m.kind = PredictorKind::Ridge;
  } else if (kind == "nearest_neighbor") {
    m.kind = PredictorKind::NearestNeighbor;
  } else {
    throw std::invalid_argument("predictor file: unknown kind '" + kind + "'");
  }
  expect("columns");
  const auto ncols = static_cast<std::size_t>(parse_double(next()));
  for (std::size_t c = 0; c < ncols; ++c) {
    m.columns.push_back(next());
    const bool used = next() == "1";
    const double mu = parse_double(next());
    const double sd = parse_double(next());
    if (used) {
      m.used.push_back(c);
      m.mean.push_back(mu);
      m.stddev.push_back(sd);
    }
  }
  if (m.kind == PredictorKind::Ridge) {
    expect("intercept");
    m.intercept = parse_double(next());
    expect("coef");
    for (std::size_t j = 0; j < m.used.size(); ++j) m.coef.push_back(parse_double(next()));
  } else {
    expect("exemplars");
    const auto count = static_cast<std::size_t>(parse_double(next()));
    for (std::size_t e = 0; e < count; ++e) {
      m.targets.push_back(parse_double(next()));
      for (std::size_t j = 0; j < m.used.size(); ++j) m.exemplars.push_back(parse_double(next()));
    }
  }
  return m;
}

}  // namespace gridstudy::price

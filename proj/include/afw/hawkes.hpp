#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "afw/simplex_log.hpp"

namespace afw {

struct MhpEvent {
  double time;
  int dim;  // 0-based dimension index
};

// Time-stamped marked point data over [0, horizon).
struct MhpArrivals {
  double horizon = 0.0;
  int dimensions = 0;
  std::vector<MhpEvent> events;  // sorted by time

  // Checks timestamps, sortedness, and that every dimension has an event.
  void validate() const;
};

// Simulates a multivariate Hawkes process with kernel exp(-(t - t_i)) by
// Ogata thinning. `infectivity(h, k)` excites dimension k after an event on
// dimension h; its spectral radius must be below one.
MhpArrivals hawkes_simulate(const Eigen::VectorXd& base_intensity,
                            const Eigen::MatrixXd& infectivity, double horizon,
                            std::uint64_t seed,
                            std::size_t max_events = 4000000);

// Per-dimension data of the rescaled MLE problem on the simplex.
struct MhpDimensionData {
  int dim = 0;           // the dimension k this instance estimates
  double horizon = 0.0;
  double lambda = 0.0;   // l1 regularization weight
  // Row i: the exponentially-discounted event counts seen by event i of
  // dimension k (one entry per source dimension), before rescaling.
  Eigen::MatrixXd raw_weights;
  Eigen::VectorXd v;     // integrated kernel mass per source dimension

  // Rows (1/horizon, w_i) with w_i = raw_i / (v + lambda).
  Eigen::MatrixXd instance_rows() const;
  SimplexLogInstance make_instance() const;

  // Negative log-likelihood (with the l1 term) at original-scale
  // parameters, for cross-checking the rescaled objective.
  double negative_log_likelihood(double base, const Eigen::VectorXd& row) const;
};

// Builds the per-dimension instances. Events at the same timestamp exclude
// each other from their discounted counts (strictly-earlier convention).
std::vector<MhpDimensionData> mhp_ingest(const MhpArrivals& arrivals,
                                         double lambda);

// Maps a simplex solution (mu, a) back to the original parameters
// (mu / horizon, a / (v + lambda)).
std::pair<double, Eigen::VectorXd> mhp_map_back(double mu,
                                                const Eigen::VectorXd& a,
                                                double horizon,
                                                const Eigen::VectorXd& v,
                                                double lambda);

// CSV with header time,dim; dimensions are 1-based on disk. The file does
// not carry the horizon; pass it explicitly, or <= 0 to use the last event
// time.
MhpArrivals load_arrivals_csv(const std::string& path, double horizon = 0.0);
void save_arrivals_csv(const std::string& path, const MhpArrivals& arrivals);

}  // namespace afw

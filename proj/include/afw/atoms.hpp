#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace afw {

// Weights at or below this value are treated as zero and their atom removed
// during away updates (cancellation in (1+a)b - a near a drop step).
inline constexpr double kWeightDropThreshold = 1e-14;

// Finite ordered set of points whose convex hull is the feasible polytope.
// The row index in the backing matrix is the stable atom id.
class AtomSet {
 public:
  // Atoms are the columns of `points` (ambient dimension x atom count).
  static AtomSet from_points(Eigen::MatrixXd points);
  // Unit vectors e_0 .. e_{m-1} of R^m.
  static AtomSet standard_simplex(int m);
  // One row per atom, columns = coordinates; row index = atom id.
  static AtomSet load_csv(const std::string& path);
  void save_csv(const std::string& path) const;

  int size() const { return static_cast<int>(points_.cols()); }
  int dimension() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd atom(int id) const { return points_.col(id); }
  bool is_standard_simplex() const { return standard_simplex_; }

 private:
  AtomSet(Eigen::MatrixXd points, bool standard_simplex);

  Eigen::MatrixXd points_;
  bool standard_simplex_ = false;
};

// Convex-combination representation of the iterate: support atom ids with
// strictly positive weights summing to one, plus the cached point.
// Single-writer; reads are safe to share.
class ActiveSet {
 public:
  // Empty placeholder; every other constructor establishes the invariants.
  ActiveSet() = default;
  ActiveSet(const AtomSet* atoms, std::vector<int> support,
            std::vector<double> weights);
  static ActiveSet uniform(const AtomSet& atoms);
  static ActiveSet single(const AtomSet& atoms, int id);
  // Keeps entries of `weights` above `floor`, renormalizes.
  static ActiveSet from_dense(const AtomSet& atoms,
                              const Eigen::VectorXd& weights,
                              double floor = kWeightDropThreshold);

  const AtomSet& atom_set() const { return *atoms_; }
  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  int support_size() const { return static_cast<int>(support_.size()); }
  bool contains(int id) const;
  double weight_of(int id) const;  // 0 when id is not in the support
  double weight_sum() const;
  const Eigen::VectorXd& iterate() const { return x_; }
  Eigen::VectorXd dense_weights() const;  // length = atom count

  // Largest deviation between the cached iterate and the recomputed
  // weighted atom sum, relative to the iterate scale.
  double cache_error() const;

 private:
  const AtomSet* atoms_;
  std::vector<int> support_;  // sorted by id
  std::vector<double> weights_;
  Eigen::VectorXd x_;
};

enum class StepKind { FW, Away };

// A candidate movement direction d = atom - x (FW) or x - atom (Away),
// with the largest admissible step along it.
struct Direction {
  StepKind kind;
  int atom;
  double alpha_max;  // 1 for FW, beta/(1-beta) for Away
};

Eigen::VectorXd direction_vector(const ActiveSet& active, const Direction& d);

// argmin_j scores[j], lowest index on ties.
int argmin_lowest(const Eigen::VectorXd& scores);

// Linear minimization oracle: atom id minimizing <grad, a>, ties to the
// lowest id.
int lmo(const AtomSet& atoms, const Eigen::VectorXd& grad);
// Away oracle: support atom id maximizing <grad, a>, ties to the lowest id.
int away_select(const ActiveSet& active, const Eigen::VectorXd& grad);
// Same oracles on precomputed per-atom pairings <grad, a_j>.
int lmo_on_scores(const Eigen::VectorXd& scores);
int away_select_on_scores(const ActiveSet& active,
                          const Eigen::VectorXd& scores);

// beta_v <- (1-alpha) beta_v + alpha, all others scaled by (1-alpha).
// alpha = 1 collapses the support to {v}.
ActiveSet fw_weight_update(const ActiveSet& active, int v, double alpha);

struct AwayUpdateResult {
  ActiveSet active;
  bool dropped;
};

// beta_a <- (1+alpha) beta_a - alpha, all others scaled by (1+alpha); the
// atom is removed when its weight falls to the drop threshold.
AwayUpdateResult away_weight_update(const ActiveSet& active, int atom,
                                    double alpha);

// Removes affinely redundant support atoms until |support| <= dim + 1,
// preserving the iterate. No-op when already small enough.
ActiveSet caratheodory_reduce(const ActiveSet& active);

}  // namespace afw

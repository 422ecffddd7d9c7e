#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "sfd/measures.hpp"
#include "sfd/point_set.hpp"
#include "sfd/smooth.hpp"

namespace sfd {

// One block's feasible set: a finite point list or a sparse smooth epigraph
// block. For SMOOTH_SPARSE the block cost is f(x) + <c, x>.
struct BlockSet {
  std::variant<PointSet, SmoothBlock> kind;

  bool finite() const { return std::holds_alternative<PointSet>(kind); }
  const PointSet& points() const { return std::get<PointSet>(kind); }
  const SmoothBlock& smooth() const { return std::get<SmoothBlock>(kind); }
  int dim() const;
};

// min sum_i <c_i, x_i>  s.t.  sum_i B_i x_i <= b,  x_i in block i.
struct BlockProblem {
  int k = 0, n = 0, m = 0;
  std::vector<Eigen::VectorXd> c;
  std::vector<Eigen::MatrixXd> B;
  Eigen::VectorXd b;
  std::vector<BlockSet> blocks;

  void validate() const;
  bool all_finite() const;
};

struct OracleResult {
  Point point;
  double value = 0.0;
};

// argmin of <price, x> (plus f(x) for smooth blocks) over the block. Finite
// blocks scan in order, lowest index winning ties. Smooth blocks enumerate
// size-s supports and minimize exactly on each: box-face enumeration for
// quadratics, per-coordinate polynomial critical points otherwise.
OracleResult block_oracle(const BlockSet& block, const Eigen::VectorXd& price);

struct DualEvaluation {
  double value = 0.0;
  Eigen::VectorXd subgradient;
  std::vector<Point> minimizers;
};

// L(lambda) = sum_i min <c_i + B_i^T lambda, x> - <lambda, b>, blocks in parallel.
DualEvaluation dual_value(const BlockProblem& p, const Eigen::VectorXd& lambda);

enum class StepSchedule { kConstant, kDiminishing, kPolyak };
std::string schedule_name(StepSchedule s);
StepSchedule parse_schedule(const std::string& name);

struct DualOptions {
  StepSchedule schedule = StepSchedule::kDiminishing;
  double eta = 1.0;  // constant step, or eta0 for eta0 / sqrt(t)
  // Polyak level. NaN selects the adaptive level rule.
  double polyak_target = std::numeric_limits<double>::quiet_NaN();
  int max_iter = 5000;
  int window = 50;
  double stop_tol = 1e-6;
  bool record_trace = true;
};

struct DualState {
  Eigen::VectorXd lambda;  // last iterate
  double value = 0.0;      // L(lambda)
  Eigen::VectorXd subgradient;
  int iterate = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_lambda;
  double window_improvement = 0.0;  // best-value gain over the last window
  bool converged = false;            // stopped by the window rule
  std::vector<double> trace;         // best value per iteration
};

DualState solve_dual(const BlockProblem& p, const DualOptions& opts = {});
nlohmann::json to_json(const DualState& s, bool with_trace = false);

// Candidate grid for a smooth block: points with at most s nonzeros whose
// coordinates lie on `grid` equally spaced box values (0 always included).
std::vector<Point> smooth_candidates(const SmoothBlock& block, int grid);

struct BruteforceOptions {
  int smooth_grid = 9;
  std::size_t node_cap = 10'000'000;
};

// Exact OPT(b_shift) over the candidate lists by depth-first search with
// dominance filtering, feasibility pruning and a Lagrangian bound.
// +infinity when infeasible; CapExceeded past node_cap.
double primal_bruteforce(const BlockProblem& p, const Eigen::VectorXd& b_shift, const BruteforceOptions& opts = {});

struct CharacterizationResult {
  double value = 0.0;
  Eigen::VectorXd lambda;  // coupling prices of the optimal basis
};

// OPT over the block hulls as one LP in the convex weights; finite blocks
// only. Throws Infeasible.
CharacterizationResult primal_characterization(const BlockProblem& p);
inline double primal_characterization_lp(const BlockProblem& p) { return primal_characterization(p).value; }

// Images x -> (<c_i, x>, B_i x) of the finite blocks.
std::vector<PointSet> image_sets(const BlockProblem& p);

struct GapCertificate {
  double e = 0.0;
  std::string e_method;
  double opt_b = 0.0;
  double opt_b_shift = 0.0;
  double dual = 0.0;             // exact LP value of the dual
  double dual_subgradient = 0.0;  // best value reached by solve_dual
  double delta = 0.0;
  double tol = 1e-6;
  bool lower_ok = false;  // OPT(b + E 1) - E <= DUAL(b)
  bool upper_ok = false;  // DUAL(b) <= OPT(b)
  bool delta_ok = false;  // delta <= E + OPT(b) - OPT(b + E 1)
  bool ok() const { return lower_ok && upper_ok && delta_ok; }
};

struct CertificateOptions {
  MeasureMethod phi_method = MeasureMethod::kExact2D;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  DualOptions dual;
  bool run_subgradient = true;
};

// Finite blocks only. E is exact when the image sum is planar and the
// method is EXACT_2D, otherwise the sampled upper bound.
GapCertificate gap_certificate(const BlockProblem& p, const CertificateOptions& opts = {});
nlohmann::json to_json(const GapCertificate& g);

nlohmann::json to_json(const BlockProblem& p);
BlockProblem block_problem_from_json(const nlohmann::json& j);

// Smooth blocks replaced by finite epigraph samples (f(x), x) over the
// candidate grid, with c' = (1, c) and B' = [0, B]. Finite blocks are
// lifted as (0, x). A problem with only finite blocks is returned as is.
BlockProblem discretize(const BlockProblem& p, int grid);

struct GeneratedInstance {
  BlockProblem problem;
  double omega = 0.0;  // min over blocks of the geometric projection factor
  double beta = 0.0;   // max over blocks of the enclosing radius of the discretized image
  double lipschitz = 0.0;
  int attempts = 0;
};

struct GeneratorOptions {
  double half_width = 0.25;     // box [-h, h]^n
  double min_factor = 1e-3;     // resample B_i until its projection factor exceeds this
  double omega_floor = 0.0;     // and until its geometric factor reaches this
  double pull = 1.0;            // objective pull towards violating the coupling
  double tightness = 0.3;
  int grid = 7;                 // discretization used for beta
  int max_attempts = 100;
};

// Seeded sparse smooth instance: Gaussian B_i (resampled below the floor),
// per-block f from the family, b from a random feasible point.
GeneratedInstance generate_sparse_smooth_instance(int k, int n, int m, int s, SmoothFamily family,
                                                  std::uint64_t seed, const GeneratorOptions& opts = {});

// Seeded finite instance with k blocks of `size` points in R^n, m coupling
// rows and a right-hand side met by a random selection plus slack.
BlockProblem generate_finite_instance(int k, int n, int m, int size, std::uint64_t seed, double tightness = 0.3);

}  // namespace sfd

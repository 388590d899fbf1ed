#pragma once

#include <optional>
#include <vector>

#include "coeffs.hpp"
#include "measure.hpp"
#include "rng.hpp"

namespace jumpwass {

// Discretized compensator at one grid node with sampling tables.
struct NodeMeasure {
    DiscreteMeasure measure;
    double mass = 0.0;          // total rate of the truncated measure
    double first_moment = 0.0;  // sum y_i w_i; compensator drift = factor * this
    std::vector<double> cdf;    // cumulative weights for mark sampling

    static NodeMeasure from(DiscreteMeasure m);
};

// Per-node discretizations, collapsed to one entry for time-constant specs.
class LevyGrid {
public:
    LevyGrid(const LevyMeasureSpec& spec, const GridConfig& grid,
             std::optional<DiscretizationLayout> layout = {});
    const NodeMeasure& at(int step) const {
        return nodes_[time_constant_ ? 0 : static_cast<size_t>(step)];
    }
    bool time_constant() const { return time_constant_; }

private:
    bool time_constant_;
    std::vector<NodeMeasure> nodes_;
};

// Union-support envelope of two compensators: arrivals are drawn from the
// atom-wise max measure and thinned to each side with one shared uniform,
// which maximally couples the two jump streams.
struct CoupledNode {
    std::vector<double> loc, wx, wxs, wmax;
    std::vector<double> cdf_max;
    double mass_max = 0.0;
    double m1_x = 0.0, m1_xs = 0.0;
    double mass_x = 0.0, mass_xs = 0.0;
};

class CoupledLevyGrid {
public:
    CoupledLevyGrid(const ProcessSpec& specX, const ProcessSpec& specXstar,
                    const GridConfig& grid);
    const CoupledNode& at(int step) const {
        return nodes_[time_constant_ ? 0 : static_cast<size_t>(step)];
    }

private:
    bool time_constant_;
    std::vector<CoupledNode> nodes_;
};

// First three derivatives of the flow map along a path, with running sups
// over grid nodes.
struct VariationTrack {
    double y1 = 1.0, y2 = 0.0, y3 = 0.0;
    double sup_abs_y1 = 1.0, sup_abs_y2 = 0.0, sup_abs_y3 = 0.0;
    double sup_y1_sq = 1.0, sup_abs_y1_cu = 1.0, sup_abs_y1y2 = 0.0, sup_y2_sq = 0.0;

    void observe();
};

struct JumpEvent {
    double t;
    double y;
    bool on_x;
    bool on_xstar;
};

struct CoupledPathSample {
    std::vector<double> times, x_path, xstar_path;
    std::vector<JumpEvent> jump_log;
    double terminal_x = 0.0, terminal_xstar = 0.0;
    bool aborted = false;
};

struct CharRecord {
    double t, x, xstar, du, dsig2, dfm;
};

constexpr double kExplosionGuard = 1e12;

// Single-process Euler path with thinned jumps; optional variation
// tracking and start-time/state override (flow simulation). Returns the
// terminal state; sets *aborted when the explosion guard trips.
double euler_jump_path(const ProcessSpec& spec, const GridConfig& grid, const LevyGrid& levy,
                       uint64_t path_index, int start_step, double x_start, VariationTrack* var,
                       bool* aborted, std::vector<double>* record = nullptr);

// Convenience overload building its own LevyGrid (tests, one-off paths).
double euler_jump_path(const ProcessSpec& spec, const GridConfig& grid, uint64_t path_index,
                       bool* aborted, std::vector<double>* record = nullptr);

// Time-grid subsample indices and left-Riemann weights covering [0, T].
struct Subsample {
    std::vector<int> idx;
    std::vector<double> weight;
};
Subsample make_subsample(const GridConfig& grid, int n_nodes);

struct CoupledRunResult {
    std::vector<double> terminal_x, terminal_xstar;  // non-aborted paths, path order
    int aborted = 0;
    // per-path characteristic integrals over the fm subsample (theta_paths entries)
    std::vector<double> int_u, int_sig, int_nu;
    std::vector<double> int_char_bound;  // characteristic-bound integral, same subsample
    int fm_failed_nodes = 0;
    std::vector<CoupledPathSample> recorded;
};

CoupledRunResult simulate_coupled(const ProcessSpec& specX, const ProcessSpec& specXstar,
                                  const GridConfig& grid, int threads, int record_paths = 0,
                                  bool want_characteristics = true);

// Characteristic gaps at one (t, x): |u*-u|, |sigma*^2-sigma^2|, and the
// Fortet-Mourier distance between the tilted image measures.
CharRecord characteristic_gaps(const ProcessSpec& specX, const ProcessSpec& specXstar,
                               const NodeMeasure& nmX, const NodeMeasure& nmXstar, double t,
                               double x);

// Per-node records along a stored path (fm subsample resolution).
std::vector<CharRecord> characteristics_along_path(const ProcessSpec& specX,
                                                   const ProcessSpec& specXstar,
                                                   const GridConfig& grid,
                                                   const CoupledPathSample& path);

}  // namespace jumpwass

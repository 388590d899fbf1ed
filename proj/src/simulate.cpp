#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "bounds.hpp"
#include "distance.hpp"

namespace jumpwass {

NodeMeasure NodeMeasure::from(DiscreteMeasure m) {
    NodeMeasure nm;
    nm.measure = std::move(m);
    nm.cdf.reserve(nm.measure.size());
    double c = 0.0;
    for (const auto& a : nm.measure.atoms()) {
        c += a.weight;
        nm.cdf.push_back(c);
        nm.first_moment += a.location * a.weight;
    }
    nm.mass = c;
    return nm;
}

namespace {

bool spec_time_constant(const LevyMeasureSpec& spec) {
    if (const auto* p = std::get_if<PointMassLevy>(&spec.v)) return p->rate.constant();
    if (const auto* g = std::get_if<GammaLevy>(&spec.v)) return g->shape_rate.constant();
    if (std::holds_alternative<FiniteDiscreteLevy>(spec.v)) return true;
    return false;  // truncated densities are rebuilt per node
}

int sample_mark_index(const NodeMeasure& nm, double u) {
    const double target = u * nm.mass;
    const auto it = std::lower_bound(nm.cdf.begin(), nm.cdf.end(), target);
    return static_cast<int>(std::min<size_t>(nm.cdf.size() - 1, it - nm.cdf.begin()));
}

std::optional<DiscretizationLayout> shared_gamma_layout(const ProcessSpec& a,
                                                        const ProcessSpec& b,
                                                        const GridConfig& grid) {
    const auto* ga = std::get_if<GammaLevy>(&a.levy.v);
    const auto* gb = std::get_if<GammaLevy>(&b.levy.v);
    if (!ga || !gb) return {};
    double amin = std::min(ga->shape_rate(0.0), ga->shape_rate(grid.horizon));
    amin = std::min({amin, gb->shape_rate(0.0), gb->shape_rate(grid.horizon)});
    return gamma_layout(amin, grid.epsilon, grid.n_nodes);
}

}  // namespace

LevyGrid::LevyGrid(const LevyMeasureSpec& spec, const GridConfig& grid,
                   std::optional<DiscretizationLayout> layout) {
    time_constant_ = spec_time_constant(spec);
    const int n = time_constant_ ? 1 : grid.n_steps;
    nodes_.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double t = k * grid.dt();
        DiscreteMeasure m = layout ? discretize_on_layout(spec, t, *layout)
                                   : discretize(spec, t, grid.epsilon, grid.n_nodes);
        nodes_.push_back(NodeMeasure::from(std::move(m)));
    }
}

CoupledLevyGrid::CoupledLevyGrid(const ProcessSpec& specX, const ProcessSpec& specXstar,
                                 const GridConfig& grid) {
    auto layout = shared_gamma_layout(specX, specXstar, grid);
    LevyGrid gx(specX.levy, grid, layout);
    LevyGrid gxs(specXstar.levy, grid, layout);
    time_constant_ = gx.time_constant() && gxs.time_constant();
    const int n = time_constant_ ? 1 : grid.n_steps;
    nodes_.reserve(n);
    for (int k = 0; k < n; ++k) {
        const auto& ax = gx.at(k).measure.atoms();
        const auto& axs = gxs.at(k).measure.atoms();
        CoupledNode cn;
        size_t i = 0, j = 0;
        while (i < ax.size() || j < axs.size()) {
            const bool ha = i < ax.size(), hb = j < axs.size();
            double loc, vx = 0.0, vxs = 0.0;
            if (ha && hb && locations_equal(ax[i].location, axs[j].location)) {
                loc = ax[i].location;
                vx = ax[i++].weight;
                vxs = axs[j++].weight;
            } else if (ha && (!hb || ax[i].location < axs[j].location)) {
                loc = ax[i].location;
                vx = ax[i++].weight;
            } else {
                loc = axs[j].location;
                vxs = axs[j++].weight;
            }
            cn.loc.push_back(loc);
            cn.wx.push_back(vx);
            cn.wxs.push_back(vxs);
            cn.wmax.push_back(std::max(vx, vxs));
        }
        double c = 0.0;
        for (size_t q = 0; q < cn.loc.size(); ++q) {
            c += cn.wmax[q];
            cn.cdf_max.push_back(c);
            cn.m1_x += cn.loc[q] * cn.wx[q];
            cn.m1_xs += cn.loc[q] * cn.wxs[q];
            cn.mass_x += cn.wx[q];
            cn.mass_xs += cn.wxs[q];
        }
        cn.mass_max = c;
        nodes_.push_back(std::move(cn));
    }
}

void VariationTrack::observe() {
    sup_abs_y1 = std::max(sup_abs_y1, std::abs(y1));
    sup_abs_y2 = std::max(sup_abs_y2, std::abs(y2));
    sup_abs_y3 = std::max(sup_abs_y3, std::abs(y3));
    sup_y1_sq = std::max(sup_y1_sq, y1 * y1);
    sup_abs_y1_cu = std::max(sup_abs_y1_cu, std::abs(y1 * y1 * y1));
    sup_abs_y1y2 = std::max(sup_abs_y1y2, std::abs(y1 * y2));
    sup_y2_sq = std::max(sup_y2_sq, y2 * y2);
}

namespace {

// One Euler step of a single process; evaluates everything at the left state.
inline double step_process(const ProcessSpec& s, const NodeMeasure& nm, double t, double dt,
                           double sqdt, double x, double z, double jump_sum_y,
                           VariationTrack* var) {
    const double fac = s.jump.factor(t, x);
    const double dxv = s.drift.value(t, x) * dt + s.sigma.value(t, x) * sqdt * z +
                       fac * (jump_sum_y - nm.first_moment * dt);
    if (var) {
        const double f1 = s.jump.factor_dx(t, 1);
        const double phi1 = 1.0 + s.drift.dx(t, x, 1) * dt + s.sigma.dx(t, x, 1) * sqdt * z +
                            f1 * (jump_sum_y - nm.first_moment * dt);
        const double phi2 = s.drift.dx(t, x, 2) * dt + s.sigma.dx(t, x, 2) * sqdt * z;
        const double phi3 = s.drift.dx(t, x, 3) * dt + s.sigma.dx(t, x, 3) * sqdt * z;
        const double y1 = var->y1, y2 = var->y2, y3 = var->y3;
        var->y1 = phi1 * y1;
        var->y2 = phi1 * y2 + phi2 * y1 * y1;
        var->y3 = phi1 * y3 + 3.0 * phi2 * y1 * y2 + phi3 * y1 * y1 * y1;
        var->observe();
    }
    return x + dxv;
}

}  // namespace

double euler_jump_path(const ProcessSpec& spec, const GridConfig& grid, const LevyGrid& levy,
                       uint64_t path_index, int start_step, double x_start, VariationTrack* var,
                       bool* aborted, std::vector<double>* record) {
    PathRng brownian(grid.seed, path_index, RngStream::Brownian);
    PathRng counts(grid.seed, path_index, RngStream::JumpCount);
    PathRng marks(grid.seed, path_index, RngStream::JumpMark);
    const double dt = grid.dt(), sqdt = std::sqrt(dt);
    double x = x_start;
    if (aborted) *aborted = false;
    if (record) {
        record->clear();
        record->push_back(x);
    }
    for (int k = start_step; k < grid.n_steps; ++k) {
        const double t = k * dt;
        const NodeMeasure& nm = levy.at(k);
        const double z = brownian.normal();
        double jump_sum_y = 0.0;
        const uint64_t n_jumps = counts.poisson(nm.mass * dt);
        for (uint64_t j = 0; j < n_jumps; ++j)
            jump_sum_y += nm.measure.atoms()[sample_mark_index(nm, marks.uniform())].location;
        x = step_process(spec, nm, t, dt, sqdt, x, z, jump_sum_y, var);
        if (!std::isfinite(x) || std::abs(x) > kExplosionGuard) {
            if (aborted) *aborted = true;
            return x;
        }
        if (record) record->push_back(x);
    }
    return x;
}

double euler_jump_path(const ProcessSpec& spec, const GridConfig& grid, uint64_t path_index,
                       bool* aborted, std::vector<double>* record) {
    LevyGrid levy(spec.levy, grid);
    return euler_jump_path(spec, grid, levy, path_index, 0, spec.x0, nullptr, aborted, record);
}

Subsample make_subsample(const GridConfig& grid, int n_nodes) {
    Subsample s;
    n_nodes = std::min(n_nodes, grid.n_steps);
    s.idx.reserve(n_nodes);
    s.weight.reserve(n_nodes);
    for (int j = 0; j < n_nodes; ++j) {
        const int k0 = static_cast<int>(static_cast<int64_t>(j) * grid.n_steps / n_nodes);
        const int k1 = static_cast<int>(static_cast<int64_t>(j + 1) * grid.n_steps / n_nodes);
        s.idx.push_back(k0);
        s.weight.push_back((k1 - k0) * grid.dt());
    }
    return s;
}

CharRecord characteristic_gaps(const ProcessSpec& specX, const ProcessSpec& specXstar,
                               const NodeMeasure& nmX, const NodeMeasure& nmXstar, double t,
                               double x) {
    CharRecord r{};
    r.t = t;
    r.x = x;
    r.du = std::abs(specXstar.drift.value(t, x) - specX.drift.value(t, x));
    const double sx = specX.sigma.value(t, x), sxs = specXstar.sigma.value(t, x);
    r.dsig2 = std::abs(sxs * sxs - sx * sx);
    const double fx = specX.jump.factor(t, x), fxs = specXstar.jump.factor(t, x);
    std::vector<Atom> ta, tb;
    ta.reserve(nmX.measure.size());
    tb.reserve(nmXstar.measure.size());
    for (const auto& a : nmX.measure.atoms()) {
        const double y = fx * a.location;
        const double w = y * y * a.weight;
        if (w != 0.0) ta.push_back({y, w});
    }
    for (const auto& a : nmXstar.measure.atoms()) {
        const double y = fxs * a.location;
        const double w = y * y * a.weight;
        if (w != 0.0) tb.push_back({y, w});
    }
    r.dfm = fm_discrete(DiscreteMeasure(std::move(ta)), DiscreteMeasure(std::move(tb)));
    return r;
}

CoupledRunResult simulate_coupled(const ProcessSpec& specX, const ProcessSpec& specXstar,
                                  const GridConfig& grid, int threads, int record_paths,
                                  bool want_characteristics) {
    grid.validate();
    if (specX.x0 != specXstar.x0)
        throw std::invalid_argument("coupled pair must share the initial value");
    CoupledLevyGrid coupled(specX, specXstar, grid);
    // per-process truncated compensators for the characteristic integrands;
    // a shared gamma layout keeps the union support small
    const auto layout = shared_gamma_layout(specX, specXstar, grid);
    LevyGrid levyX(specX.levy, grid, layout);
    LevyGrid levyXstar(specXstar.levy, grid, layout);

    const Subsample sub = make_subsample(grid, grid.fm_nodes);
    const int n_theta = std::min(grid.theta_paths, grid.n_paths);
    const double dt = grid.dt(), sqdt = std::sqrt(dt);

    // The FM integrand is state-free when neither jump map depends on x;
    // evaluate it once per subsample node up front.
    const bool state_free_fm =
        want_characteristics && !specX.jump.depends_on_x() && !specXstar.jump.depends_on_x();
    // with time-constant compensators and jump factors the cached values are
    // identical across nodes; evaluate once
    const bool time_free_fm = state_free_fm && levyX.time_constant() &&
                              levyXstar.time_constant() && specX.jump.a.constant() &&
                              specX.jump.b.constant() && specXstar.jump.a.constant() &&
                              specXstar.jump.b.constant();
    std::vector<double> dfm_cache, char_bound_cache;
    int fm_failed_precomputed = 0;
    if (state_free_fm) {
        dfm_cache.resize(sub.idx.size(), 0.0);
        char_bound_cache.resize(sub.idx.size(), 0.0);
        for (size_t j = 0; j < sub.idx.size(); ++j) {
            if (time_free_fm && j > 0) {
                dfm_cache[j] = dfm_cache[0];
                char_bound_cache[j] = char_bound_cache[0];
                if (dfm_cache[j] < 0.0) ++fm_failed_precomputed;
                continue;
            }
            const int k = sub.idx[j];
            const double t = k * dt;
            try {
                dfm_cache[j] = characteristic_gaps(specX, specXstar, levyX.at(k), levyXstar.at(k),
                                                   t, specX.x0)
                                   .dfm;
            } catch (const std::exception&) {
                dfm_cache[j] = -1.0;  // flagged
                ++fm_failed_precomputed;
            }
            char_bound_cache[j] = jump_characteristic_bound(specX.jump, specXstar.jump, levyX.at(k).measure,
                                        levyXstar.at(k).measure, t, specX.x0);
        }
    }

    CoupledRunResult out;
    std::vector<double> term_x(grid.n_paths), term_xs(grid.n_paths);
    std::vector<uint8_t> aborted(grid.n_paths, 0);
    out.int_u.assign(n_theta, 0.0);
    out.int_sig.assign(n_theta, 0.0);
    out.int_nu.assign(n_theta, 0.0);
    out.int_char_bound.assign(n_theta, 0.0);
    std::vector<int> fm_failures_per_thread(std::max(1, threads), 0);
    out.recorded.resize(std::min(record_paths, grid.n_paths));

    auto worker = [&](int tid, int begin, int end) {
        std::vector<double> xs_at_sub(sub.idx.size());
        for (int p = begin; p < end; ++p) {
            PathRng brownian(grid.seed, p, RngStream::Brownian);
            PathRng counts(grid.seed, p, RngStream::JumpCount);
            PathRng marks(grid.seed, p, RngStream::JumpMark);
            PathRng thin(grid.seed, p, RngStream::JumpThin);
            double x = specX.x0, xs = specXstar.x0;
            bool bad = false;
            CoupledPathSample* rec = p < static_cast<int>(out.recorded.size())
                                         ? &out.recorded[p]
                                         : nullptr;
            if (rec) {
                rec->times.push_back(0.0);
                rec->x_path.push_back(x);
                rec->xstar_path.push_back(xs);
            }
            size_t sub_pos = 0;
            for (int k = 0; k < grid.n_steps && !bad; ++k) {
                const double t = k * dt;
                if (sub_pos < sub.idx.size() && sub.idx[sub_pos] == k)
                    xs_at_sub[sub_pos++] = x;
                const CoupledNode& cn = coupled.at(k);
                const double z = brownian.normal();
                double jx = 0.0, jxs = 0.0;
                const uint64_t n_jumps = counts.poisson(cn.mass_max * dt);
                for (uint64_t j = 0; j < n_jumps; ++j) {
                    const double target = marks.uniform() * cn.mass_max;
                    const auto it =
                        std::lower_bound(cn.cdf_max.begin(), cn.cdf_max.end(), target);
                    const size_t i =
                        std::min(cn.loc.size() - 1,
                                 static_cast<size_t>(it - cn.cdf_max.begin()));
                    const double u2 = thin.uniform() * cn.wmax[i];
                    const bool ax = u2 <= cn.wx[i];
                    const bool axs = u2 <= cn.wxs[i];
                    if (ax) jx += cn.loc[i];
                    if (axs) jxs += cn.loc[i];
                    if (rec && (ax || axs)) rec->jump_log.push_back({t, cn.loc[i], ax, axs});
                }
                const double fx = specX.jump.factor(t, x);
                const double fxs = specXstar.jump.factor(t, xs);
                const double nx = x + specX.drift.value(t, x) * dt +
                                  specX.sigma.value(t, x) * sqdt * z +
                                  fx * (jx - cn.m1_x * dt);
                const double nxs = xs + specXstar.drift.value(t, xs) * dt +
                                   specXstar.sigma.value(t, xs) * sqdt * z +
                                   fxs * (jxs - cn.m1_xs * dt);
                x = nx;
                xs = nxs;
                if (!std::isfinite(x) || !std::isfinite(xs) || std::abs(x) > kExplosionGuard ||
                    std::abs(xs) > kExplosionGuard)
                    bad = true;
                if (rec && !bad) {
                    rec->times.push_back((k + 1) * dt);
                    rec->x_path.push_back(x);
                    rec->xstar_path.push_back(xs);
                }
            }
            aborted[p] = bad ? 1 : 0;
            term_x[p] = x;
            term_xs[p] = xs;
            if (rec) {
                rec->terminal_x = x;
                rec->terminal_xstar = xs;
                rec->aborted = bad;
            }
            if (!bad && want_characteristics && p < n_theta) {
                double iu = 0.0, isg = 0.0, inu = 0.0, icb = 0.0;
                for (size_t j = 0; j < sub_pos; ++j) {
                    const int k = sub.idx[j];
                    const double t = k * dt;
                    const double xv = xs_at_sub[j];
                    const double w = sub.weight[j];
                    if (state_free_fm) {
                        const double du = std::abs(specXstar.drift.value(t, xv) -
                                                   specX.drift.value(t, xv));
                        const double sx = specX.sigma.value(t, xv);
                        const double sxs = specXstar.sigma.value(t, xv);
                        iu += w * du;
                        isg += w * std::abs(sxs * sxs - sx * sx);
                        if (dfm_cache[j] >= 0.0) inu += w * dfm_cache[j];
                        icb += w * char_bound_cache[j];
                    } else {
                        try {
                            CharRecord cr = characteristic_gaps(specX, specXstar, levyX.at(k),
                                                                levyXstar.at(k), t, xv);
                            iu += w * cr.du;
                            isg += w * cr.dsig2;
                            inu += w * cr.dfm;
                            icb += w * jump_characteristic_bound(specX.jump, specXstar.jump,
                                                     levyX.at(k).measure, levyXstar.at(k).measure,
                                                     t, xv);
                        } catch (const std::exception&) {
                            ++fm_failures_per_thread[tid];
                        }
                    }
                }
                out.int_u[p] = iu;
                out.int_sig[p] = isg;
                out.int_nu[p] = inu;
                out.int_char_bound[p] = icb;
            }
        }
    };

    const int nt = std::max(1, threads);
    if (nt == 1) {
        worker(0, 0, grid.n_paths);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (grid.n_paths + nt - 1) / nt;
        for (int w = 0; w < nt; ++w) {
            const int b = w * chunk, e = std::min(grid.n_paths, (w + 1) * chunk);
            if (b < e) pool.emplace_back(worker, w, b, e);
        }
        for (auto& th : pool) th.join();
    }

    out.terminal_x.reserve(grid.n_paths);
    out.terminal_xstar.reserve(grid.n_paths);
    for (int p = 0; p < grid.n_paths; ++p) {
        if (aborted[p]) {
            ++out.aborted;
            continue;
        }
        out.terminal_x.push_back(term_x[p]);
        out.terminal_xstar.push_back(term_xs[p]);
    }
    // drop theta entries of aborted paths (keep path order)
    if (out.aborted > 0) {
        std::vector<double> iu, isg, inu, ip;
        for (int p = 0; p < n_theta; ++p) {
            if (aborted[p]) continue;
            iu.push_back(out.int_u[p]);
            isg.push_back(out.int_sig[p]);
            inu.push_back(out.int_nu[p]);
            ip.push_back(out.int_char_bound[p]);
        }
        out.int_u = std::move(iu);
        out.int_sig = std::move(isg);
        out.int_nu = std::move(inu);
        out.int_char_bound = std::move(ip);
    }
    for (int c : fm_failures_per_thread) out.fm_failed_nodes += c;
    out.fm_failed_nodes += fm_failed_precomputed;
    return out;
}

std::vector<CharRecord> characteristics_along_path(const ProcessSpec& specX,
                                                   const ProcessSpec& specXstar,
                                                   const GridConfig& grid,
                                                   const CoupledPathSample& path) {
    const auto layout = shared_gamma_layout(specX, specXstar, grid);
    LevyGrid levyX(specX.levy, grid, layout);
    LevyGrid levyXstar(specXstar.levy, grid, layout);
    const Subsample sub = make_subsample(grid, grid.fm_nodes);
    std::vector<CharRecord> records;
    records.reserve(sub.idx.size());
    for (size_t j = 0; j < sub.idx.size(); ++j) {
        const int k = sub.idx[j];
        if (static_cast<size_t>(k) >= path.x_path.size()) break;
        CharRecord r = characteristic_gaps(specX, specXstar, levyX.at(k), levyXstar.at(k),
                                           k * grid.dt(), path.x_path[k]);
        r.xstar = path.xstar_path[k];
        records.push_back(r);
    }
    return records;
}

}  // namespace jumpwass

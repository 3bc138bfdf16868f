#include "cogmac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cogmac/channel.hpp"
#include "cogmac/parallel.hpp"
#include "cogmac/rng.hpp"

namespace cogmac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Flat parameter layout: x[0] = omega0, x[1..m] = omega_k, x[m+1..2m] = beta_k.
struct Evaluator {
    std::size_t m = 0;
    double lambda = 0.0;
    double threshold = 0.0;  // required mu_p; meaningless when vacuous
    bool vacuous = false;    // lambda == 0: queue never backs up
    double pp_slot = 0.0;
    std::vector<double> ps_tail;  // ps_tail[k] = secondary success when access starts at instant k
    std::vector<double> pfa, pmd;

    Evaluator(const TrafficParams& traffic, const SensingProfile& profile,
              const SystemParams& params, double delay_cap) {
        m = profile.size();
        lambda = traffic.lambda_p;
        vacuous = lambda == 0.0;
        threshold = vacuous ? 0.0 : lambda + (1.0 - lambda) / delay_cap;
        pp_slot = success_probability(params, LinkId::Primary, params.slot_seconds);
        ps_tail.resize(m + 1);
        pfa.resize(m);
        pmd.resize(m);
        for (std::size_t k = 0; k <= m; ++k)
            ps_tail[k] = success_probability(params, LinkId::Secondary,
                                             transmission_seconds(params, k));
        for (std::size_t k = 1; k <= m; ++k) {
            const RocEntry& e = profile.roc_at(k);
            pfa[k - 1] = e.p_fa;
            pmd[k - 1] = e.p_md;
        }
    }

    // Same association order as primary_service_rate so boundary points land
    // on the same side of the threshold under both evaluations.
    double mu_p(const double* x) const {
        double silent = 1.0 - x[0];
        for (std::size_t j = 0; j < m; ++j)
            silent *= pmd[j] * (1.0 - x[1 + j]) + (1.0 - pmd[j]) * (1.0 - x[1 + m + j]);
        return pp_slot * silent;
    }

    double cond_sum(const double* x) const {
        double sum = 0.0;
        double reach = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            double access = (1.0 - pfa[j]) * x[1 + j] + pfa[j] * x[1 + m + j];
            sum += reach * access * ps_tail[j + 1];
            reach *= (1.0 - pfa[j]) * (1.0 - x[1 + j]) + pfa[j] * (1.0 - x[1 + m + j]);
        }
        return x[0] * ps_tail[0] + (1.0 - x[0]) * sum;
    }

    bool feasible_mu(double mu) const { return vacuous || mu >= threshold; }

    double objective(const double* x) const {
        double a = cond_sum(x);
        if (vacuous) return a;
        double b = mu_p(x);
        if (b < threshold) return kNegInf;
        return a * (1.0 - lambda / b);
    }
};

struct Affine {
    double a0, a1;  // cond_sum along the coordinate
    double b0, b1;  // mu_p along the coordinate
};

// Both forms are exactly affine in any single coordinate, so two evaluations
// recover the coefficients.
Affine line_coeffs(const Evaluator& ev, std::vector<double>& x, std::size_t i) {
    double saved = x[i];
    x[i] = 0.0;
    double a0 = ev.cond_sum(x.data());
    double b0 = ev.mu_p(x.data());
    x[i] = 1.0;
    double a1 = ev.cond_sum(x.data()) - a0;
    double b1 = ev.mu_p(x.data()) - b0;
    x[i] = saved;
    return {a0, a1, b0, b1};
}

// Walk t toward the interior until the point passes the mu_p threshold;
// boundary roots computed from affine coefficients can land a few ulps on the
// wrong side.
double nudge_feasible(const Evaluator& ev, std::vector<double>& x, std::size_t i,
                      double t, double interior) {
    double saved = x[i];
    for (int tries = 0; tries < 8; ++tries) {
        double c = std::clamp(t, 0.0, 1.0);
        x[i] = c;
        if (ev.feasible_mu(ev.mu_p(x.data()))) {
            x[i] = saved;
            return c;
        }
        t = std::nextafter(c, interior);
    }
    x[i] = saved;
    return std::clamp(t, 0.0, 1.0);
}

// Feasible segment of [0,1] along coordinate i, everything else held fixed.
bool feasible_segment(const Evaluator& ev, std::vector<double>& x, std::size_t i,
                      const Affine& af, double& lo, double& hi) {
    lo = 0.0;
    hi = 1.0;
    if (ev.vacuous) return true;
    double scale = std::max({1.0, std::abs(af.b0), std::abs(af.b0 + af.b1)});
    if (std::abs(af.b1) <= 1e-15 * scale)
        return af.b0 >= ev.threshold || af.b0 + af.b1 >= ev.threshold;
    double tc = (ev.threshold - af.b0) / af.b1;
    if (af.b1 < 0.0) {
        if (tc < 0.0) return false;
        hi = std::min(1.0, nudge_feasible(ev, x, i, tc, 0.0));
    } else {
        if (tc > 1.0) return false;
        lo = std::max(0.0, nudge_feasible(ev, x, i, tc, 1.0));
    }
    return lo <= hi;
}

// Exact maximization along one coordinate. The objective restricted to a line
// is (a0 + a1 t)(1 - lambda/(b0 + b1 t)); its derivative is
// a1 + lambda (a0 b1 - a1 b0) / (b0 + b1 t)^2, monotone in t on the feasible
// segment, so the maximum sits at an endpoint or at the single stationary
// point.
bool line_maximize(const Evaluator& ev, std::vector<double>& x, std::size_t i,
                   double& best_t, double& best_f) {
    Affine af = line_coeffs(ev, x, i);
    double lo, hi;
    if (!feasible_segment(ev, x, i, af, lo, hi)) return false;

    double cands[3];
    int n = 0;
    cands[n++] = lo;
    if (hi > lo) cands[n++] = hi;
    if (!ev.vacuous && af.a1 != 0.0 && af.b1 != 0.0) {
        double disc = -ev.lambda * (af.a0 * af.b1 - af.a1 * af.b0) / af.a1;
        if (disc > 0.0) {
            double t = (std::sqrt(disc) - af.b0) / af.b1;
            if (t > lo && t < hi) cands[n++] = t;
        }
    }

    double saved = x[i];
    best_t = saved;
    best_f = kNegInf;
    for (int c = 0; c < n; ++c) {
        x[i] = cands[c];
        double f = ev.objective(x.data());
        if (f > best_f || (f == best_f && cands[c] < best_t)) {
            best_f = f;
            best_t = cands[c];
        }
    }
    x[i] = saved;
    return best_f > kNegInf;
}

double coordinate_ascent(const Evaluator& ev, std::vector<double>& x,
                         const std::vector<std::size_t>& free_idx,
                         const OptimizerSettings& settings) {
    double f = ev.objective(x.data());
    for (int sweep = 0; sweep < settings.max_iterations; ++sweep) {
        double f_before = f;
        for (std::size_t i : free_idx) {
            double t, ft;
            if (!line_maximize(ev, x, i, t, ft)) continue;
            if (ft > f) {
                x[i] = t;
                f = ft;
            }
        }
        if (f - f_before <= settings.tolerance) break;
    }
    return f;
}

std::vector<double> fixed_point(const VariantConstraints& vc) {
    std::vector<double> x(vc.dimension(), 0.0);
    for (std::size_t i = 0; i < vc.dimension(); ++i)
        if (!vc.free_mask[i]) x[i] = vc.fixed_values[i];
    return x;
}

AccessPolicy to_policy(const std::vector<double>& x, std::size_t m) {
    AccessPolicy p;
    p.omega0 = x[0];
    p.omega.assign(x.begin() + 1, x.begin() + 1 + m);
    p.beta.assign(x.begin() + 1 + m, x.begin() + 1 + 2 * m);
    return p;
}

OptimizationResult infeasible_result(std::size_t m, const TrafficParams& traffic,
                                     const SensingProfile& profile,
                                     const SystemParams& params) {
    OptimizationResult r;
    r.policy = AccessPolicy::zeros(m);
    r.mu_s = 0.0;
    r.feasible = false;
    r.metrics = analyze(r.policy, profile, params, traffic);
    r.metrics.mu_s = 0.0;
    return r;
}

OptimizationResult result_at(const std::vector<double>& x, std::size_t m,
                             const TrafficParams& traffic, const SensingProfile& profile,
                             const SystemParams& params) {
    OptimizationResult r;
    r.policy = to_policy(x, m);
    r.metrics = analyze(r.policy, profile, params, traffic);
    r.mu_s = r.metrics.mu_s;
    r.feasible = true;
    return r;
}

OptimizationResult perfect_result(const TrafficParams& traffic,
                                  const SensingProfile& profile,
                                  const SystemParams& params, double delay_cap) {
    std::size_t m = profile.size();
    auto bound = perfect_bound(traffic, params, delay_cap);
    if (!bound) return infeasible_result(m, traffic, profile, params);
    OptimizationResult r;
    r.policy = AccessPolicy::zeros(m);
    r.metrics = analyze(r.policy, profile, params, traffic);
    r.metrics.mu_s = *bound;
    r.mu_s = *bound;
    r.feasible = true;
    return r;
}

// Scale the free coordinates toward zero until the point is feasible. mu_p is
// non-increasing in every coordinate, so feasibility is monotone in the scale.
void project_feasible(const Evaluator& ev, std::vector<double>& x,
                      const std::vector<std::size_t>& free_idx,
                      const std::vector<double>& raw) {
    if (ev.feasible_mu(ev.mu_p(x.data()))) return;
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 48; ++iter) {
        double mid = 0.5 * (lo + hi);
        for (std::size_t i : free_idx) x[i] = mid * raw[i];
        if (ev.feasible_mu(ev.mu_p(x.data())))
            lo = mid;
        else
            hi = mid;
    }
    for (std::size_t i : free_idx) x[i] = lo * raw[i];
}

// Deterministic golden-section polish used by the oracle; independent of the
// derivative-based line step above.
void golden_polish(const Evaluator& ev, std::vector<double>& x,
                   const std::vector<std::size_t>& free_idx) {
    constexpr double kInvPhi = 0.6180339887498949;
    for (std::size_t i : free_idx) {
        Affine af = line_coeffs(ev, x, i);
        double lo, hi;
        if (!feasible_segment(ev, x, i, af, lo, hi)) continue;
        double f_cur = ev.objective(x.data());
        double a = lo, b = hi;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        double saved = x[i];
        auto eval = [&](double t) {
            x[i] = t;
            double f = ev.objective(x.data());
            x[i] = saved;
            return f;
        };
        double fc = eval(c), fd = eval(d);
        for (int iter = 0; iter < 120 && b - a > 1e-14; ++iter) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kInvPhi * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kInvPhi * (b - a);
                fd = eval(d);
            }
        }
        double cands[4] = {lo, hi, c, d};
        double best_t = saved, best_f = f_cur;
        for (double t : cands) {
            double f = eval(t);
            if (f > best_f) {
                best_f = f;
                best_t = t;
            }
        }
        x[i] = best_t;
    }
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

const char* variant_name(ProtocolVariant v) {
    switch (v) {
        case ProtocolVariant::Proposed: return "proposed";
        case ProtocolVariant::SpHatNoBusyAccess: return "sp_hat";
        case ProtocolVariant::S1: return "s1";
        case ProtocolVariant::S2: return "s2";
        case ProtocolVariant::S3: return "s3";
        case ProtocolVariant::S4: return "s4";
        case ProtocolVariant::PerfectBound: return "perfect";
    }
    throw std::logic_error("variant_name: bad enum value");
}

ProtocolVariant variant_from_name(const std::string& name) {
    if (name == "proposed") return ProtocolVariant::Proposed;
    if (name == "sp_hat") return ProtocolVariant::SpHatNoBusyAccess;
    if (name == "s1") return ProtocolVariant::S1;
    if (name == "s2") return ProtocolVariant::S2;
    if (name == "s3") return ProtocolVariant::S3;
    if (name == "s4") return ProtocolVariant::S4;
    if (name == "perfect") return ProtocolVariant::PerfectBound;
    throw std::invalid_argument("unknown protocol variant: " + name);
}

std::size_t VariantConstraints::free_count() const {
    std::size_t n = 0;
    for (bool f : free_mask)
        if (f) ++n;
    return n;
}

VariantConstraints variant_constraints(ProtocolVariant variant, std::size_t m) {
    if (m < 1) throw std::invalid_argument("variant_constraints: m must be >= 1");
    std::size_t dim = 2 * m + 1;
    VariantConstraints vc;
    vc.free_mask.assign(dim, false);
    vc.fixed_values.assign(dim, 0.0);
    switch (variant) {
        case ProtocolVariant::Proposed:
            vc.free_mask.assign(dim, true);
            for (std::size_t k = 0; k <= m; ++k) vc.active_instants.push_back(k);
            break;
        case ProtocolVariant::SpHatNoBusyAccess:
            for (std::size_t i = 0; i <= m; ++i) vc.free_mask[i] = true;
            for (std::size_t k = 0; k <= m; ++k) vc.active_instants.push_back(k);
            break;
        case ProtocolVariant::S1:
            vc.free_mask[1] = true;
            vc.free_mask[1 + m] = true;
            vc.active_instants = {1};
            break;
        case ProtocolVariant::S2:
            vc.fixed_values[1] = 1.0;
            vc.free_mask[1 + m] = true;
            vc.active_instants = {1};
            break;
        case ProtocolVariant::S3:
            vc.fixed_values[1] = 1.0;
            vc.active_instants = {1};
            break;
        case ProtocolVariant::S4:
            vc.free_mask[0] = true;
            vc.active_instants = {0};
            break;
        case ProtocolVariant::PerfectBound:
            break;
    }
    return vc;
}

void OptimizerSettings::validate() const {
    if (multistarts < 1) throw std::invalid_argument("optimizer.multistarts must be >= 1");
    if (grid_points_per_dim < 1)
        throw std::invalid_argument("optimizer.grid_points_per_dim must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("optimizer.tolerance must be > 0");
    if (max_iterations < 1)
        throw std::invalid_argument("optimizer.max_iterations must be >= 1");
}

bool is_feasible(const AccessPolicy& policy, const TrafficParams& traffic,
                 const SensingProfile& profile, const SystemParams& params,
                 double delay_cap) {
    if (policy.omega0 < 0.0 || policy.omega0 > 1.0) return false;
    for (double v : policy.omega)
        if (v < 0.0 || v > 1.0) return false;
    for (double v : policy.beta)
        if (v < 0.0 || v > 1.0) return false;
    if (traffic.lambda_p == 0.0) return true;  // queue empty in every slot
    double mu = primary_service_rate(policy, profile, params);
    return mu >= traffic.lambda_p + (1.0 - traffic.lambda_p) / delay_cap;
}

OptimizationResult optimize(ProtocolVariant variant, const TrafficParams& traffic,
                            const SensingProfile& profile, const SystemParams& params,
                            double delay_cap, const OptimizerSettings& settings,
                            int jobs) {
    settings.validate();
    if (delay_cap <= 1.0) throw std::invalid_argument("delay_cap must be > 1");
    std::size_t m = profile.size();
    if (variant == ProtocolVariant::PerfectBound)
        return perfect_result(traffic, profile, params, delay_cap);

    VariantConstraints vc = variant_constraints(variant, m);
    Evaluator ev(traffic, profile, params, delay_cap);
    std::vector<double> base = fixed_point(vc);

    // Free coordinates at zero maximize mu_p over the variant's box; if even
    // that point misses the threshold, no feasible point exists.
    if (!ev.feasible_mu(ev.mu_p(base.data())))
        return infeasible_result(m, traffic, profile, params);

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < vc.dimension(); ++i)
        if (vc.free_mask[i]) free_idx.push_back(i);

    if (free_idx.empty()) return result_at(base, m, traffic, profile, params);

    // Start set: the protective zero point, each single-coordinate extreme,
    // box corners while cheap, then randomized points projected into the
    // feasible region.
    std::vector<std::vector<double>> starts;
    starts.push_back(base);
    for (std::size_t i : free_idx) {
        std::vector<double> x = base;
        Affine af = line_coeffs(ev, x, i);
        double lo, hi;
        if (feasible_segment(ev, x, i, af, lo, hi)) {
            x[i] = hi;
            starts.push_back(x);
        }
    }
    if (free_idx.size() <= 8) {
        for (std::size_t bits = 1; bits < (std::size_t{1} << free_idx.size()); ++bits) {
            std::vector<double> raw = base;
            for (std::size_t j = 0; j < free_idx.size(); ++j)
                raw[free_idx[j]] = (bits >> j) & 1 ? 1.0 : 0.0;
            std::vector<double> x = raw;
            project_feasible(ev, x, free_idx, raw);
            starts.push_back(x);
        }
    }
    for (int s = 0; s < settings.multistarts; ++s) {
        Rng rng(substream_seed(settings.seed, static_cast<std::uint64_t>(s)));
        std::vector<double> raw = base;
        for (std::size_t i : free_idx) raw[i] = rng.uniform();
        std::vector<double> x = raw;
        project_feasible(ev, x, free_idx, raw);
        starts.push_back(x);
    }

    std::vector<double> scores(starts.size(), kNegInf);
    parallel_for_index(starts.size(), jobs, [&](std::size_t s) {
        scores[s] = coordinate_ascent(ev, starts[s], free_idx, settings);
    });

    double best_f = kNegInf;
    for (double f : scores) best_f = std::max(best_f, f);
    if (best_f == kNegInf)
        return infeasible_result(m, traffic, profile, params);

    // Among runs within tolerance of the best objective, prefer the largest
    // mu_p, then the lexicographically smallest vector.
    std::size_t pick = starts.size();
    double pick_mu = kNegInf;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (scores[s] < best_f - settings.tolerance) continue;
        double mu = ev.mu_p(starts[s].data());
        if (pick == starts.size() || mu > pick_mu ||
            (mu == pick_mu && lex_less(starts[s], starts[pick]))) {
            pick = s;
            pick_mu = mu;
        }
    }
    return result_at(starts[pick], m, traffic, profile, params);
}

OptimizationResult grid_oracle(ProtocolVariant variant, const TrafficParams& traffic,
                               const SensingProfile& profile, const SystemParams& params,
                               double delay_cap, int grid_points_per_dim) {
    if (delay_cap <= 1.0) throw std::invalid_argument("delay_cap must be > 1");
    if (grid_points_per_dim < 2)
        throw std::invalid_argument("grid_points_per_dim must be >= 2");
    std::size_t m = profile.size();
    if (variant == ProtocolVariant::PerfectBound)
        return perfect_result(traffic, profile, params, delay_cap);

    VariantConstraints vc = variant_constraints(variant, m);
    std::size_t d = vc.free_count();
    if (d > 5) throw std::invalid_argument("grid_oracle: more than 5 free parameters");

    Evaluator ev(traffic, profile, params, delay_cap);
    std::vector<double> base = fixed_point(vc);
    if (!ev.feasible_mu(ev.mu_p(base.data())))
        return infeasible_result(m, traffic, profile, params);
    if (d == 0) return result_at(base, m, traffic, profile, params);

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < vc.dimension(); ++i)
        if (vc.free_mask[i]) free_idx.push_back(i);

    std::vector<double> best_x = base;
    double best_f = ev.objective(base.data());
    double best_mu = ev.mu_p(base.data());
    auto consider = [&](const std::vector<double>& x) {
        double f = ev.objective(x.data());
        if (f == kNegInf) return;
        if (f > best_f) {
            best_f = f;
            best_x = x;
            best_mu = ev.mu_p(x.data());
            return;
        }
        if (f == best_f) {
            double mu = ev.mu_p(x.data());
            if (mu > best_mu || (mu == best_mu && lex_less(x, best_x))) {
                best_x = x;
                best_mu = mu;
            }
        }
    };

    // One exhaustive pass over a box, plus, for every line through the
    // sub-grid, the point where mu_p meets the threshold exactly. Refinement
    // rounds shrink the box around the incumbent to kill quantization error.
    auto sweep_box = [&](const std::vector<double>& lo, const std::vector<double>& hi,
                         int n) {
        std::vector<std::vector<double>> levels(d);
        for (std::size_t j = 0; j < d; ++j) {
            levels[j].resize(static_cast<std::size_t>(n));
            for (int g = 0; g < n; ++g)
                levels[j][static_cast<std::size_t>(g)] =
                    lo[j] + (hi[j] - lo[j]) * g / (n - 1);
        }
        std::vector<double> x = base;
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t j = 0; j < d; ++j) x[free_idx[j]] = levels[j][0];
        for (;;) {
            consider(x);
            std::size_t j = 0;
            while (j < d) {
                if (++idx[j] < levels[j].size()) {
                    x[free_idx[j]] = levels[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                x[free_idx[j]] = levels[j][0];
                ++j;
            }
            if (j == d) break;
        }
        if (ev.vacuous) return;
        for (std::size_t line = 0; line < d; ++line) {
            std::vector<std::size_t> others;
            for (std::size_t j = 0; j < d; ++j)
                if (j != line) others.push_back(j);
            std::fill(idx.begin(), idx.end(), 0);
            x = base;
            for (std::size_t j : others) x[free_idx[j]] = levels[j][0];
            for (;;) {
                std::size_t i = free_idx[line];
                Affine af = line_coeffs(ev, x, i);
                double scale = std::max({1.0, std::abs(af.b0), std::abs(af.b0 + af.b1)});
                if (std::abs(af.b1) > 1e-15 * scale) {
                    double tc = (ev.threshold - af.b0) / af.b1;
                    if (tc > 0.0 && tc < 1.0) {
                        x[i] = nudge_feasible(ev, x, i, tc, af.b1 < 0.0 ? 0.0 : 1.0);
                        consider(x);
                        x[i] = 0.0;
                    }
                }
                std::size_t jj = 0;
                while (jj < others.size()) {
                    std::size_t j = others[jj];
                    if (++idx[j] < levels[j].size()) {
                        x[free_idx[j]] = levels[j][idx[j]];
                        break;
                    }
                    idx[j] = 0;
                    x[free_idx[j]] = levels[j][0];
                    ++jj;
                }
                if (jj == others.size()) break;
            }
        }
    };

    int n = std::max(grid_points_per_dim, 2);
    std::vector<double> lo(d, 0.0), hi(d, 1.0);
    sweep_box(lo, hi, n);
    double spacing = 1.0 / (n - 1);
    for (int round = 0; round < 3; ++round) {
        double half = 3.0 * spacing;
        for (std::size_t j = 0; j < d; ++j) {
            double c = best_x[free_idx[j]];
            lo[j] = std::max(0.0, c - half);
            hi[j] = std::min(1.0, c + half);
        }
        sweep_box(lo, hi, n);
        spacing = 2.0 * half / (n - 1);
    }
    golden_polish(ev, best_x, free_idx);

    if (best_f == kNegInf || !ev.feasible_mu(ev.mu_p(best_x.data())))
        return infeasible_result(m, traffic, profile, params);
    return result_at(best_x, m, traffic, profile, params);
}

} // namespace cogmac

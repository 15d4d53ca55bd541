#include "levlim/simulate.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "levlim/rng.hpp"

namespace levlim {

namespace {

struct PathResult {
    double m_hat = 0.0;
    double s2 = 0.0;
    double atc = 0.0;
    double esr = 0.0;
    double buy_turnover = 0.0;
    double sell_turnover = 0.0;
};

struct BandGeometry {
    double x_lo, x_hi;     // log|zeta| range
    double side;           // +1 long-only, -1 leveraged
    bool lower_is_sell;    // leveraged: the low log edge is the sell boundary
    double sell_scale;     // 1/|1+(1-eps) zeta_plus|
    double buy_scale;      // 1/|1+zeta_minus|
    double pi_plus;

    explicit BandGeometry(const Band& band, const MarketParams& p) {
        double xm = std::log(std::fabs(band.zeta_minus));
        double xp = std::log(std::fabs(band.zeta_plus));
        x_lo = std::min(xm, xp);
        x_hi = std::max(xm, xp);
        side = band.zeta_minus > 0.0 ? 1.0 : -1.0;
        lower_is_sell = side < 0.0;
        sell_scale = 1.0 / std::fabs(1.0 + (1.0 - p.epsilon) * band.zeta_plus);
        buy_scale = 1.0 / std::fabs(1.0 + band.zeta_minus);
        pi_plus = band.pi_plus;
    }

    double pi_of_log(double x) const { return 1.0 / (1.0 + side * std::exp(-x)); }
};

void run_path(std::uint64_t path_index, const BandGeometry& geo, const MarketParams& p,
              const Preference& pref, const SimConfig& cfg, std::int64_t burn_in,
              PathResult& out, std::uint64_t* hist) {
    NormalSampler normals(cfg.seed, path_index);
    const double drift_dt = (p.mu - 0.5 * p.sigma * p.sigma) * cfg.dt;
    const double vol_sqdt = p.sigma * std::sqrt(cfg.dt);
    ReflectedWalker walker(geo.x_lo, geo.x_hi, 0.5 * (geo.x_lo + geo.x_hi));

    double plo = 0.0, phi = 0.0;
    for (std::int64_t i = 0; i < burn_in; ++i)
        walker.step(drift_dt + vol_sqdt * normals.next(), plo, phi);

    const std::int64_t n_acc = cfg.n_steps - burn_in;
    const double inv_bin = kHistBins / (geo.x_hi - geo.x_lo);
    double sum_pi = 0.0, sum_pi2 = 0.0, sum_piz = 0.0;
    double sell_push = 0.0, buy_push = 0.0;
    for (std::int64_t i = 0; i < n_acc; ++i) {
        double x = walker.state();
        double pi = geo.pi_of_log(x);
        sum_pi += pi;
        sum_pi2 += pi * pi;
        int b = static_cast<int>((x - geo.x_lo) * inv_bin);
        hist[std::min(b, kHistBins - 1)] += 1;

        double z = normals.next();
        walker.step(drift_dt + vol_sqdt * z, plo, phi);
        sum_piz += pi * z;
        sell_push += geo.lower_is_sell ? plo : phi;
        buy_push += geo.lower_is_sell ? phi : plo;
    }

    const double t_acc = static_cast<double>(n_acc) * cfg.dt;
    const double mean_pi = sum_pi / static_cast<double>(n_acc);
    const double mean_pi2 = sum_pi2 / static_cast<double>(n_acc);
    const double dphi_down = sell_push * geo.sell_scale;
    const double dphi_up = buy_push * geo.buy_scale;

    out.atc = p.epsilon * geo.pi_plus * dphi_down / t_acc;
    out.m_hat = p.r + p.mu * mean_pi + p.sigma * std::sqrt(cfg.dt) * sum_piz / t_acc - out.atc;
    out.s2 = p.sigma * p.sigma * mean_pi2;
    out.esr = p.r + p.mu * mean_pi - 0.5 * pref.gamma * p.sigma * p.sigma * mean_pi2 - out.atc;
    out.buy_turnover = dphi_up / t_acc;
    out.sell_turnover = dphi_down / t_acc;

    if (!(std::isfinite(out.m_hat) && std::isfinite(out.s2) && std::isfinite(out.atc)))
        throw NumericalError("non-finite accumulator in simulated path", 0.0);
}

struct MeanSe {
    double mean, se;
};

MeanSe mean_se(const std::vector<PathResult>& rs, double PathResult::* field) {
    double n = static_cast<double>(rs.size());
    double sum = 0.0;
    for (const auto& r : rs) sum += r.*field;
    double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rs) {
        double d = r.*field - mean;
        ss += d * d;
    }
    double se = rs.size() > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0;
    return {mean, se};
}

} // namespace

double dt_guard(const Band& band, const MarketParams& p) {
    double width = std::fabs(std::log(std::fabs(band.zeta_plus) / std::fabs(band.zeta_minus)));
    return 1e-4 * width / p.sigma;
}

int resolve_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LEVLIM_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(n, 1);
}

SimEstimate simulate_band(const Band& band, const MarketParams& p, const Preference& pref,
                          const SimConfig& config) {
    if (band.is_degenerate()) throw DomainError("simulate_band: degenerate band");
    if (!(config.dt > 0.0)) throw DomainError("simulate_band: dt must be > 0");
    if (config.n_paths < 1) throw DomainError("simulate_band: need at least one path");
    std::int64_t burn_in = config.burn_in >= 0 ? config.burn_in : config.n_steps / 10;
    if (burn_in >= config.n_steps) throw DomainError("simulate_band: burn-in swallows all steps");

    BandGeometry geo(band, p);
    SimEstimate est;
    est.dt = config.dt;
    est.seed = config.seed;
    est.generator = NormalSampler::name();
    est.years_per_path = static_cast<double>(config.n_steps - burn_in) * config.dt;
    double guard = dt_guard(band, p);
    if (config.dt > guard) {
        est.dt_guard_ok = false;
        est.warning = "dt above the recommended guard " + std::to_string(guard) +
                      "; discretization bias may be visible";
    }

    const int n_threads = static_cast<int>(
        std::min<std::int64_t>(resolve_threads(config.threads), config.n_paths));
    std::vector<PathResult> results(static_cast<size_t>(config.n_paths));
    std::vector<std::vector<std::uint64_t>> hists(
        static_cast<size_t>(n_threads), std::vector<std::uint64_t>(kHistBins, 0));
    std::mutex error_mutex;
    std::exception_ptr error;

    auto work = [&](int tid) {
        try {
            for (std::int64_t i = tid; i < config.n_paths; i += n_threads)
                run_path(static_cast<std::uint64_t>(i), geo, p, pref, config, burn_in,
                         results[static_cast<size_t>(i)], hists[static_cast<size_t>(tid)].data());
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    // Reductions run in fixed path order, so totals do not depend on the
    // thread schedule.
    MeanSe m = mean_se(results, &PathResult::m_hat);
    MeanSe s2 = mean_se(results, &PathResult::s2);
    MeanSe atc = mean_se(results, &PathResult::atc);
    MeanSe esr = mean_se(results, &PathResult::esr);
    est.m_hat = m.mean;
    est.m_se = m.se;
    est.s_hat = std::sqrt(s2.mean);
    est.s_se = s2.mean > 0.0 ? s2.se / (2.0 * est.s_hat) : 0.0;
    est.atc = atc.mean;
    est.atc_se = atc.se;
    est.esr = esr.mean;
    est.esr_se = esr.se;
    est.buy_turnover = mean_se(results, &PathResult::buy_turnover).mean;
    est.sell_turnover = mean_se(results, &PathResult::sell_turnover).mean;

    std::vector<std::uint64_t> counts(kHistBins, 0);
    for (const auto& h : hists)
        for (int b = 0; b < kHistBins; ++b) counts[static_cast<size_t>(b)] += h[static_cast<size_t>(b)];
    std::uint64_t total = 0;
    for (auto c : counts) total += c;

    // Bin edges in x are uniform; report them in ascending zeta order.
    est.hist.resize(kHistBins);
    est.hist_edges.resize(kHistBins + 1);
    double w = (geo.x_hi - geo.x_lo) / kHistBins;
    for (int k = 0; k <= kHistBins; ++k) {
        double x = geo.x_lo + w * k;
        est.hist_edges[static_cast<size_t>(k)] = geo.side * std::exp(x);
    }
    for (int b = 0; b < kHistBins; ++b)
        est.hist[static_cast<size_t>(b)] =
            static_cast<double>(counts[static_cast<size_t>(b)]) / static_cast<double>(total);
    if (geo.side < 0.0) {
        // ascending x is descending zeta in the leveraged regime
        std::reverse(est.hist.begin(), est.hist.end());
        std::reverse(est.hist_edges.begin(), est.hist_edges.end());
    }
    return est;
}

std::vector<SweepPoint> policy_sweep(double center, const std::vector<double>& widths,
                                     const MarketParams& p, const Preference& pref,
                                     const SimConfig& config) {
    std::vector<SweepPoint> out;
    out.reserve(widths.size());
    for (double w : widths) {
        double lo = center - 0.5 * w, hi = center + 0.5 * w;
        Band band = Band::from_zetas(zeta_of_pi(lo), zeta_of_pi(hi), p);
        SimEstimate est = simulate_band(band, p, pref, config);
        out.push_back({w, est.esr, est.esr_se, band});
    }
    return out;
}

} // namespace levlim

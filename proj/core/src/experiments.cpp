#include "envelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "envelab/bigtoeplitz.hpp"
#include "envelab/energy.hpp"
#include "envelab/extremal.hpp"
#include "envelab/geometry.hpp"
#include "envelab/norms.hpp"
#include "envelab/parallel.hpp"
#include "envelab/radial.hpp"

namespace envelab::experiments {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using geometry::ArcSet;
using geometry::ChartPoint;
using geometry::RadialSet;
using geometry::WeightPotential;
using radial::RadialProfile;
using radial::RadialSymbol;

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Deterministic CSV emission: fixed formatting, fixed row order, no locale.
class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

void add_check(std::vector<Check>& checks, const std::string& name, double value, double tol,
               const std::string& kind, bool pass, const std::string& note = "") {
    checks.push_back({name, value, tol, kind, pass, note});
}

json checks_to_json(const std::vector<Check>& checks) {
    json j = json::array();
    for (const auto& c : checks)
        j.push_back({{"name", c.name},
                     {"value", c.value},
                     {"tolerance", c.tolerance},
                     {"kind", c.kind},
                     {"pass", c.pass},
                     {"note", c.note}});
    return j;
}

Result finish(const std::string& experiment, std::vector<Check> checks, json extra,
              const std::string& out_dir) {
    Result res;
    res.checks = std::move(checks);
    bool all = true;
    for (const auto& c : res.checks) all = all && c.pass;
    res.exit_code = all ? kPass : kAssertionFailed;
    json j;
    j["experiment"] = experiment;
    j["pass"] = all;
    j["checks"] = checks_to_json(res.checks);
    j["data"] = std::move(extra);
    res.summary_json = j.dump(2);
    if (!out_dir.empty()) {
        std::ofstream f(fs::path(out_dir) / "summary.json");
        f << res.summary_json << "\n";
    }
    return res;
}

RadialProfile fs_profile() { return RadialProfile::fubini_study(); }

RadialProfile halfline_envelope() {
    return radial::radial_envelope(fs_profile(), RadialSet::half_line_geq(0.0));
}

// ---------------------------------------------------------------------------
// arc-decay
// ---------------------------------------------------------------------------

Result exp_arc_decay(const config::Config& cfg, const std::string& out, int threads,
                     long prec_override) {
    std::vector<double> alphas =
        cfg.has("arc-decay", "alphas") ? cfg.get_double_list("arc-decay", "alphas")
                                       : std::vector<double>{kPi / 6, kPi / 3, kPi / 2};
    long k_min = cfg.get_int_or("arc-decay", "k_min", 20);
    long k_max = cfg.get_int_or("arc-decay", "k_max", 80);
    long k_step = cfg.get_int_or("arc-decay", "k_step", 10);
    long min_bits = cfg.get_int_or("arc-decay", "precision_bits", 512);
    long degree = cfg.get_int_or("arc-decay", "chebyshev_degree", 64);
    double rel_tol = cfg.get_double_or("arc-decay", "rel_tolerance", 0.10);
    if (k_min < 4 || k_max <= k_min || k_step <= 0)
        throw config::ConfigError("arc-decay: invalid k schedule");
    if (degree < 2 || degree > 256) throw config::ConfigError("arc-decay: invalid degree");
    if (prec_override > 0) min_bits = std::max(min_bits, prec_override);

    std::vector<Check> checks;
    json data = json::array();
    Csv csv_lambda(fs::path(out) / "arc_decay_lambda.csv", "alpha,k,neg_log_lambda_min");
    Csv csv_summary(fs::path(out) / "arc_decay_summary.csv",
                    "alpha,c_hat,stderr,intercept,c_envelope,envelope_gap,rel_gap,pass");

    WeightPotential fsw = WeightPotential::fubini_study();
    std::vector<double> c_hats;
    for (size_t ia = 0; ia < alphas.size(); ++ia) {
        double alpha = alphas[ia];
        ArcSet K = ArcSet::arc(0.0, alpha);
        bigtoeplitz::PiecewiseSymbol f = bigtoeplitz::PiecewiseSymbol::arc_indicator(K);

        // Pilot fit at small k for the precision policy and search hints.
        std::vector<std::pair<int, double>> pilot;
        for (int k : {8, 10, 12, 14}) {
            auto T = bigtoeplitz::HermitianToeplitzMatrix::from_symbol(f, k, 320);
            pilot.push_back({k, bigtoeplitz::neg_log_lambda_min(T, f.ess_sup(), 40.0, 1e-7)});
        }
        double c_guess = bigtoeplitz::fit_decay_exponent(pilot).c_hat;

        std::vector<std::pair<int, double>> samples;
        std::vector<long> ks;
        for (long k = k_min; k <= k_max; k += k_step) ks.push_back(k);
        std::vector<double> neglog(ks.size());
        parallel_for(ks.size(), [&](size_t i) {
            int k = (int)ks[i];
            mpfr_prec_t prec =
                std::max<mpfr_prec_t>(min_bits, bigtoeplitz::precision_policy(c_guess, k));
            auto T = bigtoeplitz::HermitianToeplitzMatrix::from_symbol(f, k, prec);
            neglog[i] = bigtoeplitz::neg_log_lambda_min(T, f.ess_sup(), c_guess * k + 20.0, 1e-7);
        }, threads);
        for (size_t i = 0; i < ks.size(); ++i) {
            samples.push_back({(int)ks[i], neglog[i]});
            csv_lambda.row({fmt(alpha), std::to_string(ks[i]), fmt(neglog[i])});
        }
        auto fit = bigtoeplitz::fit_decay_exponent(samples);

        extremal::FieldGrid grid;
        grid.n_radial = (int)cfg.get_int_or("arc-decay", "grid_radial", 16);
        grid.n_angular = (int)cfg.get_int_or("arc-decay", "grid_angular", 32);
        extremal::CExponent ce = extremal::c_exponent(K, fsw, (int)degree, grid, {}, threads);

        double rel_gap = std::abs(fit.c_hat - ce.value) / std::max(1e-12, ce.value);
        bool pass = rel_gap <= rel_tol;
        add_check(checks, "arc_decay.alpha_" + std::to_string(ia) + ".cross_pipeline_rel_gap",
                  rel_gap, rel_tol, "rel", pass,
                  "c_hat=" + fmt(fit.c_hat) + " c_env=" + fmt(ce.value));
        csv_summary.row({fmt(alpha), fmt(fit.c_hat), fmt(fit.stderr_c), fmt(fit.intercept),
                         fmt(ce.value), fmt(ce.gap), fmt(rel_gap), pass ? "1" : "0"});
        data.push_back({{"alpha", alpha},
                        {"c_hat", fit.c_hat},
                        {"stderr", fit.stderr_c},
                        {"c_envelope", ce.value},
                        {"envelope_gap", ce.gap},
                        {"rel_gap", rel_gap}});
        c_hats.push_back(fit.c_hat);

        std::ofstream plot(fs::path(out) / ("arc_decay_plot_" + std::to_string(ia) + ".dat"));
        for (size_t i = 0; i < ks.size(); ++i)
            plot << ks[i] << " " << fmt(neglog[i]) << "\n";
    }
    bool decreasing = true;
    for (size_t i = 1; i < c_hats.size(); ++i) decreasing = decreasing && c_hats[i] < c_hats[i - 1];
    add_check(checks, "arc_decay.c_hat_strictly_decreasing_in_alpha", decreasing ? 1.0 : 0.0, 1.0,
              "bool", decreasing);
    return finish("arc-decay", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// radial-distribution (and the moment probe)
// ---------------------------------------------------------------------------

Result exp_radial_distribution(const config::Config& cfg, const std::string& out, int threads,
                               long prec_override) {
    (void)threads;
    long k = cfg.get_int_or("radial-distribution", "k", 200);
    long bits = cfg.get_int_or("radial-distribution", "precision_bits", 320);
    double mom_tol = cfg.get_double_or("radial-distribution", "moment_rel_tolerance", 0.02);
    double ks_tol = cfg.get_double_or("radial-distribution", "kolmogorov_tolerance", 0.05);
    double probe_tol = cfg.get_double_or("radial-distribution", "probe_rel_tolerance", 0.03);
    if (k < 2) throw config::ConfigError("radial-distribution: k must be >= 2");
    if (prec_override > 0) bits = std::max(bits, prec_override);

    RadialProfile fsp = fs_profile();
    RadialProfile env = halfline_envelope();
    SpectralMeasure limit = radial::speed_pushforward(fsp, env);

    RadialSymbol f = RadialSymbol::indicator(RadialSet::half_line_geq(0.0));
    auto spec = radial::diagonal_toeplitz_spectrum(f, (int)k, (mpfr_prec_t)bits);
    SpectralMeasure eta = spec.eta();

    std::vector<Check> checks;
    json data;
    Csv csv_eigs(fs::path(out) / "radial_distribution_spectrum.csv", "j,neg_log_lambda");
    for (size_t j = 0; j < spec.neg_log.size(); ++j)
        csv_eigs.row({std::to_string(j), fmt(spec.neg_log[j])});

    Csv csv_mom(fs::path(out) / "radial_distribution_moments.csv",
                "p,eta_k_moment,limit_moment,rel_err,tolerance,pass");
    for (int p = 1; p <= 3; ++p) {
        double mk = eta.abs_moment(p);
        double ml = limit.abs_moment(p);
        double rel = std::abs(mk - ml) / std::max(1e-300, std::abs(ml));
        bool pass = rel <= mom_tol;
        add_check(checks, "radial_distribution.moment_p" + std::to_string(p), rel, mom_tol, "rel",
                  pass, "eta_k=" + fmt(mk) + " limit=" + fmt(ml));
        csv_mom.row({std::to_string(p), fmt(mk), fmt(ml), fmt(rel), fmt(mom_tol),
                     pass ? "1" : "0"});
    }
    double ksd = eta.kolmogorov_distance(limit);
    add_check(checks, "radial_distribution.kolmogorov", ksd, ks_tol, "abs", ksd <= ks_tol);
    double levy = eta.levy_distance(limit);
    data["levy_distance"] = levy;
    data["k"] = k;

    // Exponentially small fraction at epsilon = 0.02 against the curvature
    // mass of the complement of the support.
    double eps = cfg.get_double_or("radial-distribution", "epsilon", 0.02);
    double frac_tol = cfg.get_double_or("radial-distribution", "fraction_abs_tolerance", 0.03);
    int count = 0;
    for (double nl : spec.neg_log)
        if (nl > eps * k) ++count;
    double frac = (double)count / (k + 1);
    // mass of {t < 0} under the reference curvature = slope at t = 0 = 1/2.
    double complement_mass = 0.5;
    add_check(checks, "radial_distribution.small_eig_fraction",
              std::abs(frac - complement_mass), frac_tol, "abs",
              std::abs(frac - complement_mass) <= frac_tol,
              "fraction=" + fmt(frac) + " complement_mass=" + fmt(complement_mass));
    data["fraction_below_exp_minus_eps_k"] = frac;
    {
        json sweep = json::array();
        for (double e2 : {0.02, 0.01, 0.005, 0.002}) {
            int c2 = 0;
            for (double nl : spec.neg_log)
                if (nl > e2 * k) ++c2;
            sweep.push_back({{"epsilon", e2}, {"fraction", (double)c2 / (k + 1)}});
        }
        data["epsilon_sweep"] = sweep;
    }

    // Moment probe: the limiting measure's p-th moments against d_p and d_p^p.
    {
        Csv csv_probe(fs::path(out) / "moment_probe.csv",
                      "p,limit_moment,d_p,d_p_pow_p,rel_to_dp,rel_to_dp_pow");
        bool dp_all = true, dpp_all = true;
        json probe = json::array();
        for (int p = 1; p <= 3; ++p) {
            double m = limit.abs_moment(p);
            double dp = energy::dp_distance_radial(fsp, env, p);
            double dpp = std::pow(dp, p);
            double rel_dp = std::abs(m - dp) / std::max(1e-300, dp);
            double rel_dpp = std::abs(m - dpp) / std::max(1e-300, dpp);
            dp_all = dp_all && rel_dp <= probe_tol;
            dpp_all = dpp_all && rel_dpp <= probe_tol;
            csv_probe.row({std::to_string(p), fmt(m), fmt(dp), fmt(dpp), fmt(rel_dp),
                           fmt(rel_dpp)});
            probe.push_back({{"p", p},
                             {"moment", m},
                             {"d_p", dp},
                             {"d_p_pow_p", dpp},
                             {"rel_to_d_p", rel_dp},
                             {"rel_to_d_p_pow_p", rel_dpp}});
        }
        bool exactly_one = dp_all != dpp_all;
        std::string which = dpp_all ? "d_p^p" : (dp_all ? "d_p" : "neither");
        add_check(checks, "moment_probe.exactly_one_alternative_matches", exactly_one ? 1.0 : 0.0,
                  1.0, "bool", exactly_one, "matching=" + which);
        data["moment_probe"] = probe;
        data["moment_probe_matching"] = which;
    }

    // Convergence trend of the first moment (diagnostic, not asserted).
    {
        json trend = json::array();
        for (long kk : {k / 4, k / 2, k}) {
            if (kk < 4) continue;
            auto s = radial::diagonal_toeplitz_spectrum(f, (int)kk, (mpfr_prec_t)bits);
            trend.push_back({{"k", kk}, {"m1", s.eta().abs_moment(1)}});
        }
        data["m1_trend"] = trend;
        data["m1_limit"] = limit.abs_moment(1);
    }
    return finish("radial-distribution", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// transfer-identity
// ---------------------------------------------------------------------------

Result exp_transfer_identity(const config::Config& cfg, const std::string& out, int threads,
                             long prec_override) {
    (void)threads;
    (void)prec_override;
    long k = cfg.get_int_or("transfer-identity", "k", 12);
    long n_symbols = cfg.get_int_or("transfer-identity", "symbols", 10);
    double tol = cfg.get_double_or("transfer-identity", "tolerance", 1e-10);
    unsigned long seed = (unsigned long)cfg.get_int_or("experiment", "seed", 20240901);
    if (k < 1 || k > 40) throw config::ConfigError("transfer-identity: k out of range");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-0.15, 0.15);
    WeightPotential fsw = WeightPotential::fubini_study();

    std::vector<Check> checks;
    json data = json::array();
    Csv csv(fs::path(out) / "transfer_identity.csv", "symbol,k,max_deviation,tolerance,pass");
    for (long s = 0; s < n_symbols; ++s) {
        double a1 = coeff(rng), a2 = coeff(rng), a3 = coeff(rng);
        double b1 = coeff(rng), b2 = coeff(rng), b3 = coeff(rng);
        auto f = [=](const ChartPoint& p) {
            ChartPoint q = p.normalized();
            double t = 2.0 * std::log(std::max(1e-300, std::abs(q.z)));
            if (q.chart == geometry::Chart::infinity) t = -t;
            double theta = std::arg(q.z);
            if (q.chart == geometry::Chart::infinity) theta = -theta;
            double bump = 1.0 / std::cosh(t);
            double osc = a1 * std::cos(theta) + a2 * std::cos(2 * theta) +
                         a3 * std::cos(3 * theta) + b1 * std::sin(theta) +
                         b2 * std::sin(2 * theta) + b3 * std::sin(3 * theta);
            return 1.0 + bump * osc;
        };
        auto rep = norms::toeplitz_vs_transfer(f, fsw, (int)k, tol);
        add_check(checks, "transfer_identity.symbol_" + std::to_string(s), rep.max_deviation, tol,
                  "abs", rep.pass);
        csv.row({std::to_string(s), std::to_string(k), fmt(rep.max_deviation), fmt(tol),
                 rep.pass ? "1" : "0"});
        data.push_back({{"symbol", s}, {"max_deviation", rep.max_deviation}});
    }
    return finish("transfer-identity", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// ball-growth
// ---------------------------------------------------------------------------

Result exp_ball_growth(const config::Config& cfg, const std::string& out, int threads,
                       long prec_override) {
    (void)threads;
    std::vector<long> ks = cfg.has("ball-growth", "k_list")
                               ? cfg.get_int_list("ball-growth", "k_list")
                               : std::vector<long>{25, 50, 100};
    long bits = cfg.get_int_or("ball-growth", "precision_bits", 320);
    double tol = cfg.get_double_or("ball-growth", "rel_tolerance", 0.05);
    if (prec_override > 0) bits = std::max(bits, prec_override);

    RadialProfile fsp = fs_profile();
    RadialProfile env = halfline_envelope();
    double e_diff = energy::energy_diff(env, fsp);
    RadialSet A = RadialSet::half_line_geq(0.0);

    std::vector<Check> checks;
    json data = json::array();
    Csv csv(fs::path(out) / "ball_growth.csv",
            "k,ball_growth,energy_diff,rel_err,route_consistency");
    std::vector<double> vals;
    for (long k : ks) {
        auto gX = radial::fs_gram_diagonal((int)k, std::nullopt, (mpfr_prec_t)bits);
        auto gA = radial::fs_gram_diagonal((int)k, A, (mpfr_prec_t)bits);
        // log-volume difference of the two unit balls: real 2(k+1)-dimensional
        // volumes scale with det_C(G)^{-1}, i.e. the full log-det difference
        // (twice the spectral half-sum).
        double logdet_diff = 0.0;
        for (long j = 0; j <= k; ++j) logdet_diff += (log(gX[j]) - log(gA[j])).to_double();
        double ball = logdet_diff / ((double)k * (k + 1));

        // Double-precision pencil route for the two-route consistency check.
        double route_dev = 0.0;
        if (k <= 120) {
            Eigen::MatrixXcd GX = Eigen::MatrixXcd::Zero(k + 1, k + 1);
            Eigen::MatrixXcd GA = GX;
            for (long j = 0; j <= k; ++j) {
                GX((int)j, (int)j) = gX[j].to_double();
                GA((int)j, (int)j) = gA[j].to_double();
            }
            double vr = norms::volume_ratio(GA, GX);
            double vr_ld = norms::volume_ratio_logdet(GA, GX);
            route_dev = std::abs(vr - vr_ld) / std::max(1e-300, std::abs(vr));
            add_check(checks, "ball_growth.k" + std::to_string(k) + ".route_consistency",
                      route_dev, 1e-9, "rel", route_dev <= 1e-9);
        }
        vals.push_back(ball);
        double rel = std::abs(ball - e_diff) / e_diff;
        csv.row({std::to_string(k), fmt(ball), fmt(e_diff), fmt(rel), fmt(route_dev)});
        data.push_back({{"k", k}, {"ball_growth", ball}, {"energy_diff", e_diff}, {"rel", rel}});
    }
    double rel_last = std::abs(vals.back() - e_diff) / e_diff;
    add_check(checks, "ball_growth.final_k_rel_err", rel_last, tol, "rel", rel_last <= tol,
              "k=" + std::to_string(ks.back()));
    bool monotone = true;
    for (size_t i = 1; i < vals.size(); ++i)
        monotone = monotone && std::abs(vals[i] - e_diff) < std::abs(vals[i - 1] - e_diff);
    add_check(checks, "ball_growth.monotone_trend_toward_limit", monotone ? 1.0 : 0.0, 1.0,
              "trend", monotone);
    return finish("ball-growth", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// schatten-convergence
// ---------------------------------------------------------------------------

Result exp_schatten(const config::Config& cfg, const std::string& out, int threads,
                    long prec_override) {
    (void)threads;
    std::vector<long> ks = cfg.has("schatten-convergence", "k_list")
                               ? cfg.get_int_list("schatten-convergence", "k_list")
                               : std::vector<long>{40, 80, 160};
    long bits = cfg.get_int_or("schatten-convergence", "precision_bits", 320);
    if (prec_override > 0) bits = std::max(bits, prec_override);

    RadialProfile fsp = fs_profile();
    RadialProfile env = halfline_envelope();
    radial::GeodesicSpeed sp = radial::geodesic_speed(fsp, env);
    std::vector<double> s_knots = sp.s_knots();
    std::vector<double> phi = sp.values(radial::GeodesicSpeed::Convention::metric_rate);

    RadialSymbol f = RadialSymbol::indicator(RadialSet::half_line_geq(0.0));

    std::vector<Check> checks;
    json data = json::array();
    Csv csv(fs::path(out) / "schatten_convergence.csv", "k,schatten_1_distance");
    std::vector<double> dist(ks.size());
    for (size_t i = 0; i < ks.size(); ++i) {
        long k = ks[i];
        auto spec = radial::diagonal_toeplitz_spectrum(f, (int)k, (mpfr_prec_t)bits);
        std::vector<double> tphi =
            radial::diagonal_toeplitz_averages(s_knots, phi, (int)k, (mpfr_prec_t)bits);
        auto gX = radial::fs_gram_diagonal((int)k, std::nullopt, (mpfr_prec_t)bits);
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(k + 1, k + 1);
        Eigen::MatrixXcd B = A, G = A;
        for (long j = 0; j <= k; ++j) {
            A((int)j, (int)j) = -spec.neg_log[j] / (double)k;
            B((int)j, (int)j) = tphi[j];
            G((int)j, (int)j) = gX[j].to_double();
        }
        dist[i] = norms::schatten_distance(A, B, 1.0, G);
        csv.row({std::to_string(k), fmt(dist[i])});
        data.push_back({{"k", k}, {"schatten_1", dist[i]}});
    }
    bool decreasing = true;
    for (size_t i = 1; i < dist.size(); ++i) decreasing = decreasing && dist[i] < dist[i - 1];
    add_check(checks, "schatten.strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, "trend",
              decreasing);
    double halving = dist.back() / dist.front();
    add_check(checks, "schatten.final_below_half_of_first", halving, 0.5, "abs", halving < 0.5);
    return finish("schatten-convergence", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// subexponential regime (full-support symbol)
// ---------------------------------------------------------------------------

Result exp_subexponential(const config::Config& cfg, const std::string& out, int threads,
                          long prec_override) {
    (void)threads;
    std::vector<long> ks = cfg.has("subexponential", "k_list")
                               ? cfg.get_int_list("subexponential", "k_list")
                               : std::vector<long>{40, 60, 80, 100, 120};
    long bits = cfg.get_int_or("subexponential", "precision_bits", 256);
    double tol = cfg.get_double_or("subexponential", "slope_tolerance", 0.01);
    if (prec_override > 0) bits = std::max(bits, prec_override);

    RadialSymbol f = RadialSymbol::abslog_capped(1.0);
    std::vector<Check> checks;
    json data = json::array();
    Csv csv(fs::path(out) / "subexponential.csv", "k,neg_log_lambda_min");
    std::vector<std::pair<int, double>> samples;
    for (long k : ks) {
        auto spec = radial::diagonal_toeplitz_spectrum(f, (int)k, (mpfr_prec_t)bits);
        double nl = spec.neg_log_min_eig();
        samples.push_back({(int)k, nl});
        csv.row({std::to_string(k), fmt(nl)});
        data.push_back({{"k", k}, {"neg_log_lambda_min", nl}});
    }
    auto fit = bigtoeplitz::fit_decay_exponent(samples);
    add_check(checks, "subexponential.fitted_exponent", fit.c_hat, tol, "abs", fit.c_hat <= tol);
    return finish("subexponential", std::move(checks), std::move(data), out);
}

// ---------------------------------------------------------------------------
// property-suite
// ---------------------------------------------------------------------------

RadialProfile random_profile(std::mt19937_64& rng) {
    // Random convex profile with slopes in [0,1]: integrate a random
    // nondecreasing slope path over a random knot window.
    std::uniform_int_distribution<int> nknots(3, 24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int n = nknots(rng);
    std::vector<double> t(n), v(n);
    double t0 = -8.0 + 6.0 * u(rng);
    double span = 4.0 + 10.0 * u(rng);
    for (int i = 0; i < n; ++i) t[i] = t0 + span * i / (n - 1);
    std::vector<double> slopes(n - 1);
    double s = 0;
    for (int i = 0; i < n - 1; ++i) {
        s = std::min(1.0, s + u(rng) * 0.35);
        slopes[i] = s;
    }
    std::sort(slopes.begin(), slopes.end());
    v[0] = -1.0 + 2.0 * u(rng);
    for (int i = 1; i < n; ++i) v[i] = v[i - 1] + slopes[i - 1] * (t[i] - t[i - 1]);
    return RadialProfile(t, v, 0.0, 1.0);
}

Result exp_property_suite(const config::Config& cfg, const std::string& out, int threads,
                          long prec_override) {
    (void)threads;
    (void)prec_override;
    unsigned long seed = (unsigned long)cfg.get_int_or("experiment", "seed", 7121);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Check> checks;

    // Envelope idempotence and monotonicity.
    {
        double worst_idem = 0.0;
        bool mono_ok = true;
        for (int rep = 0; rep < 24; ++rep) {
            RadialProfile obs = random_profile(rng);
            double a = -6 + 8 * u(rng), b = a + 0.5 + 6 * u(rng);
            double c = b + 0.2 + 3 * u(rng), d = c + 0.5 + 4 * u(rng);
            RadialSet S = RadialSet::from_intervals({{a, b}, {c, d}});
            RadialSet S2 = RadialSet::from_intervals({{a, b}});
            RadialProfile e1 = radial::radial_envelope(obs, S);
            RadialProfile e2 = radial::radial_envelope(e1, S);
            worst_idem = std::max(worst_idem, max_abs_difference(e1, e2));
            // Fewer constraints (smaller set) allow a larger envelope.
            RadialProfile eS2 = radial::radial_envelope(obs, S2);
            for (double t : e1.knots())
                if (e1(t) > eS2(t) + 1e-9) mono_ok = false;
        }
        add_check(checks, "property.envelope_idempotent", worst_idem, 1e-9, "abs",
                  worst_idem <= 1e-9);
        add_check(checks, "property.envelope_monotone_in_constraint_set", mono_ok ? 1.0 : 0.0, 1.0,
                  "bool", mono_ok);
    }
    // Geodesic boundary and convexity in tau.
    {
        double worst_end = 0.0;
        bool convex_ok = true, chord_ok = true;
        for (int rep = 0; rep < 12; ++rep) {
            RadialProfile v0 = random_profile(rng);
            RadialProfile v1 = random_profile(rng);
            worst_end = std::max(worst_end, max_abs_difference(radial::geodesic(v0, v1, 0.0), v0));
            worst_end = std::max(worst_end, max_abs_difference(radial::geodesic(v0, v1, 1.0), v1));
            for (double t : {-5.0, -1.0, 0.0, 1.3, 4.0}) {
                double a = radial::geodesic(v0, v1, 0.25)(t);
                double m = radial::geodesic(v0, v1, 0.5)(t);
                double b = radial::geodesic(v0, v1, 0.75)(t);
                if (m > 0.5 * (a + b) + 1e-9) convex_ok = false;
                if (m > 0.5 * v0(t) + 0.5 * v1(t) + 1e-9) chord_ok = false;
            }
        }
        add_check(checks, "property.geodesic_endpoints", worst_end, 1e-10, "abs",
                  worst_end <= 1e-10);
        add_check(checks, "property.geodesic_convex_in_tau", convex_ok ? 1.0 : 0.0, 1.0, "bool",
                  convex_ok);
        add_check(checks, "property.geodesic_below_chord", chord_ok ? 1.0 : 0.0, 1.0, "bool",
                  chord_ok);
    }
    // Initial-rate sign and contact-set vanishing.
    {
        bool sign_ok = true;
        double worst_contact = 0.0;
        RadialProfile fsp = fs_profile();
        RadialProfile env = halfline_envelope();  // env >= fs, touching on t >= 0
        radial::GeodesicSpeed sp = radial::geodesic_speed(fsp, env);
        for (double t : {0.5, 1.0, 2.5, 6.0})  // contact set of the pair
            worst_contact = std::max(worst_contact, std::abs(sp.at_t(t)));
        for (double s : sp.s_knots())
            if (sp.at_slope(s) < -1e-12) sign_ok = false;  // fs <= env => rate >= 0
        for (int rep = 0; rep < 8; ++rep) {
            RadialProfile v0 = random_profile(rng);
            RadialProfile v1 = v0.shifted(-0.3 - u(rng));  // v1 <= v0
            radial::GeodesicSpeed sp2 = radial::geodesic_speed(v0, v1);
            for (double s : sp2.s_knots())
                if (sp2.at_slope(s) > 1e-12) sign_ok = false;
        }
        add_check(checks, "property.contact_set_rate_vanishes", worst_contact, 1e-8, "abs",
                  worst_contact <= 1e-8);
        add_check(checks, "property.rate_sign_for_ordered_pairs", sign_ok ? 1.0 : 0.0, 1.0, "bool",
                  sign_ok);
    }
    // d_p metric axioms on random Hermitian triples.
    {
        bool ok = true;
        std::normal_distribution<double> g(0.0, 1.0);
        auto rand_gram = [&](int n) {
            Eigen::MatrixXcd B(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) B(i, j) = std::complex<double>(g(rng), g(rng));
            Eigen::MatrixXcd G = B.adjoint() * B + 0.2 * Eigen::MatrixXcd::Identity(n, n);
            return G;
        };
        for (int rep = 0; rep < 16; ++rep) {
            int n = 3 + (int)(u(rng) * 4);
            auto G0 = rand_gram(n), G1 = rand_gram(n), G2 = rand_gram(n);
            for (double p : {1.0, 2.0, 3.0}) {
                double d01 = norms::relative_spectrum(G0, G1).d_p(p);
                double d10 = norms::relative_spectrum(G1, G0).d_p(p);
                double d02 = norms::relative_spectrum(G0, G2).d_p(p);
                double d12 = norms::relative_spectrum(G1, G2).d_p(p);
                if (std::abs(d01 - d10) > 1e-9) ok = false;                    // symmetry
                if (norms::relative_spectrum(G0, G0).d_p(p) > 1e-9) ok = false;  // identity
                if (d02 > d01 + d12 + 1e-9) ok = false;  // triangle inequality
            }
            double d1v = norms::relative_spectrum(G0, G1).d_p(1.0);
            double d2v = norms::relative_spectrum(G0, G1).d_p(2.0);
            double d3v = norms::relative_spectrum(G0, G1).d_p(3.0);
            if (!(d1v <= d2v + 1e-12 && d2v <= d3v + 1e-12)) ok = false;  // nondecreasing in p
        }
        add_check(checks, "property.dp_metric_axioms", ok ? 1.0 : 0.0, 1.0, "bool", ok);
    }
    // Inertia monotonicity and endpoints; trace identity; interlacing.
    {
        bigtoeplitz::PiecewiseSymbol f =
            bigtoeplitz::PiecewiseSymbol::trig_poly(2.0, {1.1, -0.4, 0.15}, {0.3, -0.2, 0.05});
        int k = 9;
        auto T = bigtoeplitz::HermitianToeplitzMatrix::from_symbol(f, k + 1, 256);
        auto Tk = bigtoeplitz::HermitianToeplitzMatrix::from_coeffs(
            std::vector<BigComplex>(T.a.begin(), T.a.end() - 1), 256);
        bool mono = true;
        int prev = 0;
        for (double lam : {1e-8, 0.3, 0.9, 1.7, 2.4, 3.3, 4.5, 6.0}) {
            int c = bigtoeplitz::inertia(Tk, Big(lam, 256));
            if (c < prev) mono = false;
            prev = c;
        }
        bool ends = bigtoeplitz::inertia(Tk, Big(-1.0, 256)) == 0 &&
                    bigtoeplitz::inertia(Tk, Big(f.ess_sup() + 1.0, 256)) == k + 1;
        add_check(checks, "property.inertia_monotone", mono ? 1.0 : 0.0, 1.0, "bool", mono);
        add_check(checks, "property.inertia_endpoints", ends ? 1.0 : 0.0, 1.0, "bool", ends);

        auto spk = bigtoeplitz::log_spectrum(Tk, 1e-12, f.ess_sup(), 30.0);
        auto spk1 = bigtoeplitz::log_spectrum(T, 1e-12, f.ess_sup(), 30.0);
        // Trace identity sum(lambda) = (k+1) a_0.
        double tr = 0;
        for (double m : spk.midpoints()) tr += std::exp(-m);
        double a0 = Tk.a[0].re.to_double();
        double trace_err = std::abs(tr - (k + 1) * a0) / ((k + 1) * std::abs(a0));
        add_check(checks, "property.trace_identity", trace_err, 1e-9, "rel", trace_err <= 1e-9);
        // Cauchy interlacing of principal submatrices (in -log, reversed
        // order): eigenvalues of the smaller matrix sit between consecutive
        // eigenvalues of the larger one.
        auto big_sorted = spk1.midpoints();   // increasing -log
        auto small_sorted = spk.midpoints();  // k+1 values
        bool inter = true;
        for (int i = 0; i <= k; ++i) {
            if (!(small_sorted[i] >= big_sorted[i] - 1e-9 &&
                  small_sorted[i] <= big_sorted[i + 1] + 1e-9))
                inter = false;
        }
        add_check(checks, "property.interlacing", inter ? 1.0 : 0.0, 1.0, "bool", inter);
    }
    // Biconjugation.
    {
        double worst = 0.0;
        for (int rep = 0; rep < 24; ++rep) {
            RadialProfile v = random_profile(rng);
            RadialProfile w = radial::legendre_inverse(radial::legendre(v));
            worst = std::max(worst, max_abs_difference(v, w));
        }
        add_check(checks, "property.biconjugation", worst, 1e-10, "abs", worst <= 1e-10);
    }
    // Closure insensitivity of arc envelopes.
    {
        WeightPotential fsw = WeightPotential::fubini_study();
        ArcSet K = ArcSet::arc(0.4, kPi / 3);
        ArcSet K_shrunk = ArcSet::from_intervals({{0.4 - kPi / 3 + 1e-7, 0.4 + kPi / 3 - 1e-7}});
        ChartPoint p = ChartPoint::from_polar(1.0, 0.4 + kPi);
        auto a = extremal::chebyshev_value(p, K, fsw, 24);
        auto b = extremal::chebyshev_value(p, K_shrunk, fsw, 24);
        double dev = std::abs(a.value - b.value);
        add_check(checks, "property.closure_insensitivity", dev, 5e-3, "abs", dev <= 5e-3);
    }
    json data;
    data["seed"] = seed;
    return finish("property-suite", std::move(checks), std::move(data), out);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "arc-decay",          "radial-distribution", "transfer-identity",
        "ball-growth",        "schatten-convergence", "subexponential",
        "property-suite"};
    return names;
}

std::string default_config(const std::string& experiment) {
    if (experiment == "arc-decay")
        return "[experiment]\nkind = arc-decay\nseed = 20240901\n\n[arc-decay]\nalphas = pi/6, "
               "pi/3, pi/2\nk_min = 20\nk_max = 80\nk_step = 10\nprecision_bits = 512\n"
               "chebyshev_degree = 64\nrel_tolerance = 0.10\n";
    if (experiment == "radial-distribution")
        return "[experiment]\nkind = radial-distribution\nseed = 20240901\n\n"
               "[radial-distribution]\nk = 200\nprecision_bits = 320\nmoment_rel_tolerance = "
               "0.02\nkolmogorov_tolerance = 0.05\nepsilon = 0.02\nfraction_abs_tolerance = "
               "0.03\nprobe_rel_tolerance = 0.03\n";
    if (experiment == "transfer-identity")
        return "[experiment]\nkind = transfer-identity\nseed = 20240901\n\n[transfer-identity]\nk "
               "= 12\nsymbols = 10\ntolerance = 1e-10\n";
    if (experiment == "ball-growth")
        return "[experiment]\nkind = ball-growth\nseed = 20240901\n\n[ball-growth]\nk_list = 25, "
               "50, 100\nprecision_bits = 320\nrel_tolerance = 0.05\n";
    if (experiment == "schatten-convergence")
        return "[experiment]\nkind = schatten-convergence\nseed = 20240901\n\n"
               "[schatten-convergence]\nk_list = 40, 80, 160\nprecision_bits = 320\n";
    if (experiment == "subexponential")
        return "[experiment]\nkind = subexponential\nseed = 20240901\n\n[subexponential]\nk_list "
               "= 40, 60, 80, 100, 120\nprecision_bits = 256\nslope_tolerance = 0.01\n";
    if (experiment == "property-suite")
        return "[experiment]\nkind = property-suite\nseed = 7121\n";
    throw config::ConfigError("unknown experiment: " + experiment);
}

namespace {

const std::map<std::string, std::vector<std::string>>& schema_for(const std::string& experiment) {
    static const std::map<std::string, std::map<std::string, std::vector<std::string>>> schemas = {
        {"arc-decay",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"arc-decay",
           {"alphas", "k_min", "k_max", "k_step", "precision_bits", "chebyshev_degree",
            "rel_tolerance", "grid_radial", "grid_angular"}}}},
        {"radial-distribution",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"radial-distribution",
           {"k", "precision_bits", "moment_rel_tolerance", "kolmogorov_tolerance", "epsilon",
            "fraction_abs_tolerance", "probe_rel_tolerance"}}}},
        {"transfer-identity",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"transfer-identity", {"k", "symbols", "tolerance"}}}},
        {"ball-growth",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"ball-growth", {"k_list", "precision_bits", "rel_tolerance"}}}},
        {"schatten-convergence",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"schatten-convergence", {"k_list", "precision_bits"}}}},
        {"subexponential",
         {{"experiment", {"kind", "seed", "threads", "precision_bits"}},
          {"subexponential", {"k_list", "precision_bits", "slope_tolerance"}}}},
        {"property-suite", {{"experiment", {"kind", "seed", "threads", "precision_bits"}}}},
    };
    auto it = schemas.find(experiment);
    if (it == schemas.end()) throw config::ConfigError("unknown experiment: " + experiment);
    static thread_local std::map<std::string, std::vector<std::string>> current;
    current = it->second;
    return current;
}

}  // namespace

Result run(const std::string& experiment, const config::Config& cfg, const std::string& out_dir,
           int threads, long precision_bits_override) {
    try {
        cfg.validate(schema_for(experiment));
        if (cfg.has("experiment", "kind") && cfg.get("experiment", "kind") != experiment)
            throw config::ConfigError("config kind does not match the requested experiment");
        if (!out_dir.empty()) fs::create_directories(out_dir);
        if (cfg.has("experiment", "threads") && threads <= 0)
            threads = (int)cfg.get_int("experiment", "threads");
        if (experiment == "arc-decay")
            return exp_arc_decay(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "radial-distribution")
            return exp_radial_distribution(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "transfer-identity")
            return exp_transfer_identity(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "ball-growth")
            return exp_ball_growth(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "schatten-convergence")
            return exp_schatten(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "subexponential")
            return exp_subexponential(cfg, out_dir, threads, precision_bits_override);
        if (experiment == "property-suite")
            return exp_property_suite(cfg, out_dir, threads, precision_bits_override);
        throw config::ConfigError("unknown experiment: " + experiment);
    } catch (const config::ConfigError& e) {
        Result r;
        r.exit_code = kConfigError;
        r.summary_json = std::string("{\"error\": \"") + e.what() + "\"}";
        return r;
    } catch (const bigtoeplitz::PrecisionExhausted& e) {
        Result r;
        r.exit_code = kNumericFailure;
        r.summary_json = std::string("{\"error\": \"") + e.what() + "\"}";
        return r;
    }
}

}  // namespace envelab::experiments

#include "blowup/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "blowup/denjoy.hpp"
#include "blowup/errors.hpp"
#include "blowup/gallery.hpp"
#include "blowup/general.hpp"
#include "blowup/measure.hpp"
#include "blowup/qpf.hpp"
#include "blowup/reference.hpp"
#include "blowup/report.hpp"
#include "blowup/rotation.hpp"

namespace blowup {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- configuration --------------------------------------------------------------

double RunConfig::omega_value() const { return omega == 0.0 ? golden_mean : omega; }

json RunConfig::to_json() const {
    return {{"construction", construction}, {"base", base},       {"omega", omega_value()},
            {"omega2", omega2},             {"rho", rho},         {"c", c},
            {"r", r},                       {"N", N},             {"pinch", pinch},
            {"theta_star", theta_star},     {"x0", x0},           {"x_star", x_star},
            {"grid", grid},                 {"depth", depth},     {"samples", samples},
            {"seed", seed}};
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': not a number: '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long n = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "construction") cfg.construction = v;
        else if (k == "base") cfg.base = v;
        else if (k == "omega" || k == "omega1") cfg.omega = parse_double(k, v);
        else if (k == "omega2") cfg.omega2 = parse_double(k, v);
        else if (k == "rho") cfg.rho = parse_double(k, v);
        else if (k == "c") cfg.c = parse_double(k, v);
        else if (k == "r") cfg.r = parse_double(k, v);
        else if (k == "N") cfg.N = parse_long(k, v);
        else if (k == "pinch") cfg.pinch = v;
        else if (k == "theta_star") cfg.theta_star = parse_double(k, v);
        else if (k == "x0") cfg.x0 = parse_double(k, v);
        else if (k == "x_star") cfg.x_star = parse_double(k, v);
        else if (k == "grid") cfg.grid = parse_long(k, v);
        else if (k == "depth") cfg.depth = static_cast<int>(parse_long(k, v));
        else if (k == "samples") cfg.samples = parse_long(k, v);
        else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(k, v));
        else if (k == "out") cfg.out = v;
        else if (k == "verify_only") cfg.verify_only = parse_bool(k, v);
        else throw UsageError("unknown config key '" + k + "'");
    }
}

void validate(const RunConfig& cfg) {
    static const char* constructions[] = {"denjoy", "qpf", "qpf-filled", "general", "sharkovsky", "rees"};
    if (std::find(std::begin(constructions), std::end(constructions), cfg.construction) == std::end(constructions))
        throw UsageError("unknown construction '" + cfg.construction + "'");
    if (cfg.base != "rotation" && cfg.base != "torus2" && cfg.base != "odometer")
        throw UsageError("unknown base '" + cfg.base + "' (rotation, torus2, odometer)");
    if (cfg.base != "rotation" && cfg.construction != "general")
        throw UsageError("base '" + cfg.base + "' is only available with --construction general");
    if (!cfg.pinch.empty() && cfg.pinch != "one-sided" && cfg.pinch != "oscillating")
        throw UsageError("pinch must be one-sided or oscillating");
    if (cfg.construction == "qpf-filled" && cfg.pinch == "one-sided")
        throw UsageError("qpf-filled uses oscillating pinch functions");
    double w = cfg.omega_value();
    if (!(w > 0.0 && w < 1.0)) throw UsageError("omega must lie in (0,1)");
    if (!(cfg.omega2 > 0.0 && cfg.omega2 < 1.0)) throw UsageError("omega2 must lie in (0,1)");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw UsageError("rho must lie in (0,1)");
    if (!(cfg.r > 0.0 && cfg.r < 1.0)) throw UsageError("r must lie in (0,1)");
    if (!(cfg.c > 0.0 && cfg.c * (1.0 + cfg.r) / (1.0 - cfg.r) < 1.0))
        throw UsageError("weights need c > 0 and total mass c (1 + r) / (1 - r) < 1");
    if (cfg.N < -1 || cfg.N > 200) throw UsageError("N must lie in [-1, 200]");
    if (!(cfg.theta_star >= 0.0 && cfg.theta_star < 1.0)) throw UsageError("theta_star must lie in [0,1)");
    if (!(cfg.x0 >= 0.0 && cfg.x0 < 1.0)) throw UsageError("x0 must lie in [0,1)");
    if (!(cfg.x_star >= 0.0 && cfg.x_star < 1.0)) throw UsageError("x_star must lie in [0,1)");
    if (cfg.grid < 10 || cfg.grid > 10000000) throw UsageError("grid must lie in [10, 1e7]");
    if (cfg.depth < 0 || cfg.depth > 200) throw UsageError("depth must lie in [0, 200]");
    if (cfg.samples < 1 || cfg.samples > 10000000) throw UsageError("samples must lie in [1, 1e7]");
    if (cfg.out.empty()) throw UsageError("output directory must not be empty");
}

// ---- plumbing -------------------------------------------------------------------

namespace {

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw UsageError("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format17(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    std::ofstream out_;
};

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    VerificationReport& report;
    json& timings;
    fs::path out;

    void timed(const std::string& phase, const std::function<void()>& body) {
        auto t0 = std::chrono::steady_clock::now();
        log << "  " << phase << " ..." << std::flush;
        body();
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings[phase] = s;
        std::ostringstream t;
        t.precision(2);
        t << std::fixed << s;
        log << " " << t.str() << " s\n";
    }
    bool datasets() const { return !cfg.verify_only; }
    WeightSequence weights() const { return WeightSequence(cfg.c, cfg.r); }
};

double grid_point(long i, long n) { return static_cast<double>(i) / static_cast<double>(n); }

// ---- denjoy -------------------------------------------------------------------------

void measure_checks(Context& ctx, const HybridMeasure& m, const std::string& prefix) {
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = 1e-9;
    std::vector<MassInterval> plateaus;
    for (const Atom& a : m.atoms()) plateaus.push_back(preimage_interval(m, a.position));
    long galois = 0;
    double push = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double x = unit(rng), y = unit(rng);
        double q = quantile(m, x);
        double c = cdf(m, y);
        bool lhs = q <= y, rhs = x <= c;
        if (lhs != rhs && std::fabs(q - y) > tol && std::fabs(x - c) > tol) ++galois;
        double cq = cdf(m, q);
        if (cq < x - tol) push = std::max(push, x - cq);
        bool on_plateau = std::any_of(plateaus.begin(), plateaus.end(),
                                      [x](const MassInterval& p) { return p.lo <= x && x <= p.hi; });
        if (!on_plateau) push = std::max(push, std::fabs(cq - x));
    }
    ctx.report.add(at_most(prefix + "galois", "quantile(x) <= y iff x <= cdf(y)", static_cast<double>(galois), 0.0,
                           "1000 random pairs, tolerance 1e-9"));
    ctx.report.add(at_most(prefix + "pushforward_identity", "cdf(quantile(x)) >= x, with equality off plateaus",
                           push, tol, "1000 random levels"));
    double plateau = 0.0;
    for (const Atom& a : m.atoms()) {
        MassInterval p = preimage_interval(m, a.position);
        plateau = std::max(plateau, std::fabs((p.hi - p.lo) - a.mass));
        double inside = 0.5 * (p.lo + p.hi);
        plateau = std::max(plateau, std::fabs(quantile(m, inside) - a.position));
    }
    ctx.report.add(at_most(prefix + "plateau_width", "plateau of the quantile at each atom has the atom's mass",
                           plateau, 2e-12));
    long inversions = 0;
    double prev = -1.0;
    for (long i = 0; i <= 10000; ++i) {
        double q = quantile(m, grid_point(i, 10000));
        if (q < prev) ++inversions;
        prev = q;
    }
    ctx.report.add(at_most(prefix + "quantile_monotone", "quantile non-decreasing on a 1e4 grid",
                           static_cast<double>(inversions), 0.0));
}

void run_denjoy(Context& ctx) {
    const auto& cfg = ctx.cfg;
    DenjoySystem sys(cfg.omega_value(), cfg.x0, ctx.weights(), cfg.N);
    const double omega = sys.omega();
    if (cfg.N < 0) ctx.report.set_info("trivial_case", "N = -1: no atoms, the measure is Lebesgue and h is the identity");

    ctx.timed("measure", [&] { measure_checks(ctx, sys.nu(), "measure."); });

    ctx.timed("denjoy.maps", [&] {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double semi = 0.0, inv = 0.0;
        for (int i = 0; i < 10000; ++i) {
            double y = unit(rng);
            double fy = sys.forward(y);
            semi = std::max(semi, circle_distance(sys.h(fy), sys.h(y) + omega));
            inv = std::max(inv, circle_distance(sys.inverse(fy), y));
        }
        ctx.report.add(at_most("denjoy.semiconjugacy", "h(f(y)) = h(y) + omega", semi, 1e-9, "1e4 random points"));
        // the truncated map squeezes the last gap I_N to a point, an error of at most a_N
        const double squeeze = cfg.N >= 0 ? sys.weights()(cfg.N) : 0.0;
        ctx.report.add(at_most("denjoy.inverse", "f^-1 o f = id", inv, 1e-9 + squeeze,
                               "1e4 random points; tolerance includes a_N for the squeezed last gap"));

        double rho = rotation_number([&](double y) { return sys.lift(y); }, 10000);
        double rigid = rotation_number([&](double y) { return y + omega; }, 10000);
        ctx.report.add(at_most("denjoy.rotation_number", "rotation number equals omega", std::fabs(rho - omega), 2e-3,
                               "1e4 iterates; rigid rotation estimate " + format17(rigid)));

        long descents = 0;
        auto count = [&](double lo, double hi, long n) {
            double prev = sys.forward(lo);
            for (long i = 1; i <= n; ++i) {
                double v = sys.forward(lo + (hi - lo) * grid_point(i, n));
                double step = circle_offset(v, prev);
                bool squeezed = cfg.N >= 0 && sys.gap_containing(lo + (hi - lo) * grid_point(i, n)) == cfg.N;
                if (!(step > 0.0) && !squeezed) ++descents;
                prev = v;
            }
        };
        count(0.0, 1.0, 10000);
        for (long n = -std::min(cfg.N, 10L); n <= std::min(cfg.N, 10L); ++n) count(sys.gap(n).c, sys.gap(n).d, 10000);
        ctx.report.add(at_most("denjoy.monotone", "f strictly increasing on grids of the circle and of each gap",
                               static_cast<double>(descents), 0.0, "1e4 points each, gaps |n| <= 10, I_N excluded"));
        ctx.report.add(at_least("denjoy.no_periodic_points", "no periodic points with period <= 20",
                                periodic_defect(sys, 20, 1000), 1e-6));
    });

    ctx.timed("denjoy.gaps", [&] {
        if (cfg.N < 0) {
            for (const char* id : {"denjoy.gap_lengths", "denjoy.gap_budget", "denjoy.gap_endpoints", "denjoy.wandering"})
                ctx.report.skip(id, "no gaps (N = -1)");
            return;
        }
        double len = 0.0, total = 0.0, ends = 0.0;
        for (long n = -cfg.N; n <= cfg.N; ++n) {
            const Gap& g = sys.gap(n);
            len = std::max(len, std::fabs(g.length() - sys.weights()(n)));
            total += g.length();
            if (n < cfg.N) {
                ends = std::max(ends, circle_distance(sys.forward(g.c), sys.gap(n + 1).c));
                ends = std::max(ends, circle_distance(sys.forward(g.d), sys.gap(n + 1).d));
            }
        }
        ctx.report.add(at_most("denjoy.gap_lengths", "gap I_n has length a_n", len, 2e-12));
        ctx.report.add(at_most("denjoy.gap_budget", "total gap length is 1 - b - tail(N)",
                               std::fabs(total - sys.weights().partial(cfg.N)), 1e-9));
        ctx.report.add(at_most("denjoy.gap_endpoints", "f maps the endpoints of I_n to those of I_n+1", ends, 1e-9));
        ctx.report.add(at_least("denjoy.wandering", "I_0 is disjoint from f^k(I_0) for 1 <= k <= 100",
                                wandering_margin(sys, 100), sys.weights().tail(cfg.N), "separation margin"));
    });

    ctx.timed("denjoy.minimal_set", [&] {
        auto sample = minimal_set_sample(sys, cfg.samples);
        long inside = 0;
        for (double y : sample)
            if (sys.in_open_gap(y, 1e-12)) ++inside;
        ctx.report.add(at_most("denjoy.minimal_set_off_gaps", "orbit of c_0 avoids the open gaps",
                               static_cast<double>(inside), 0.0,
                               std::to_string(sample.size()) + " points, endpoints resolved to 1e-12"));
        if (cfg.samples >= 100000) {
            ctx.report.add(at_most("denjoy.minimal_set_dense", "orbit of c_0 is 1e-2-dense off the gaps",
                                   covering_radius(sys, sample, 10000), 1e-2));
        } else {
            ctx.report.skip("denjoy.minimal_set_dense", "needs samples >= 1e5");
        }
    });

    if (!ctx.datasets()) return;
    ctx.timed("denjoy.datasets", [&] {
        Csv gaps(ctx.out / "gaps.csv", {"n", "c", "d", "a"});
        for (long n = -cfg.N; n <= cfg.N; ++n) gaps.row(n, sys.gap(n).c, sys.gap(n).d, sys.weights()(n));
        Csv graph(ctx.out / "graph.csv", {"y", "f"});
        Csv c(ctx.out / "cdf.csv", {"y", "cdf", "cdf_left"});
        Csv q(ctx.out / "quantile.csv", {"x", "h"});
        for (long i = 0; i <= cfg.grid; ++i) {
            double t = grid_point(i, cfg.grid);
            if (i < cfg.grid) graph.row(t, sys.forward(t));
            c.row(t, cdf(sys.nu(), t), cdf_left(sys.nu(), t));
            q.row(t, sys.h(t));
        }
    });
}

// ---- qpf --------------------------------------------------------------------------

template <class Sys>
void write_segments(const fs::path& path, const Sys& sys) {
    Csv csv(path, {"n", "lo", "hi", "width", "a"});
    for (long n = -sys.truncation(); n <= sys.truncation(); ++n) {
        MassInterval s = sys.segment(n);
        csv.row(n, s.lo, s.hi, s.hi - s.lo, sys.weights()(n));
    }
}

void run_qpf(Context& ctx) {
    const auto& cfg = ctx.cfg;
    PinchMode mode = cfg.construction == "qpf-filled" ? PinchMode::oscillating
                     : cfg.pinch.empty()               ? PinchMode::one_sided
                                                       : parse_pinch_mode(cfg.pinch);
    QpfSystem sys = make_qpf(mode, cfg.N, ctx.weights(), cfg.omega_value(), cfg.theta_star);
    const long N = cfg.N;
    const double a0 = sys.weights()(0), tail2 = 2.0 * sys.tail();
    const double ts = sys.pinch().theta_star;
    ctx.report.set_info("pinch_mode", to_string(mode));

    ctx.timed("qpf.suite", [&] {
        SuiteOptions opt;
        opt.seed = cfg.seed;
        check_blowup_properties(sys, circle_approach(ts, mode), opt, ctx.report);
    });

    if (N < 0) {
        ctx.report.set_info("trivial_case", "N = -1: nothing blown up, h is the identity on every fibre");
        double worst = 0.0;
        for (double t : sys.base().grid(100))
            for (long i = 0; i <= 1000; ++i) worst = std::max(worst, std::fabs(sys.h_fibre(t, grid_point(i, 1000)) - grid_point(i, 1000)));
        ctx.report.add(at_most("h.identity", "h_theta = id when nothing is blown up", worst, 1e-12));
    }

    ctx.timed("qpf.jump", [&] {
        if (mode != PinchMode::one_sided) {
            ctx.report.skip("curve.jump", "needs one-sided pinch functions");
            return;
        }
        JumpEstimate j = discontinuity_jump(sys);
        double expect = N >= 0 ? a0 : 0.0;
        ctx.report.add(at_most("curve.jump", "left limit of mu[0,gamma) minus right limit of mu[0,gamma] is a_0",
                               std::fabs(j.jump - expect), tail2 + 1e-6,
                               "extrapolated " + format17(j.jump) + (j.converged ? "" : ", not converged")));
        ctx.report.set_info("jump", {{"value", j.jump}, {"converged", j.converged}});
    });

    ctx.timed("qpf.xi", [&] {
        PinchedSetParametrization P(sys);
        const long n = 10000;
        long order = 0;
        double inv = 0.0, on_curve = 0.0;
        std::pair<double, double> prev{-1.0, 0.0};
        for (long i = 0; i < n; ++i) {
            double t = grid_point(i, n);
            auto p = P.xi(t);
            if (i > 0 && !(p.first > prev.first || (p.first == prev.first && p.second < prev.second))) ++order;
            inv = std::max(inv, circle_distance(P.xi_inv(p.first, p.second), t));
            on_curve = std::max(on_curve, std::fabs(sys.h_fibre(p.first, p.second) - sys.gamma(p.first)));
            prev = p;
        }
        ctx.report.add(at_most("xi.monotone", "xi strictly increasing in the cut order", static_cast<double>(order), 0.0,
                               "1e4 grid"));
        ctx.report.add(at_most("xi.bijective", "xi^-1 o xi = id", inv, 1e-9, "1e4 grid"));
        ctx.report.add(at_most("xi.on_curve", "xi lands in h^-1(Gamma)", on_curve, 1e-8, "1e4 grid"));
        double rho = rotation_number([&](double t) { return P.conjugated_lift(t); }, 10000);
        ctx.report.add(at_most("xi.rotation_number", "xi^-1 o f-hat o xi has rotation number omega",
                               std::fabs(rho - sys.base().omega), 2e-3, "1e4 iterates"));
    });

    ctx.timed("qpf.truncation", [&] {
        if (N < 1) {
            ctx.report.skip("h_truncated.convergence", "needs N >= 1");
            ctx.report.skip("h_truncated.monotone_gap", "needs N >= 1");
            return;
        }
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 1000; ++i) pts.push_back({unit(rng), unit(rng)});
        long k6 = 0;
        while (k6 < N && sys.weights().tail(k6) >= 1e-6) ++k6;
        double gap6 = 0.0;
        for (auto [t, x] : pts) gap6 = std::max(gap6, std::fabs(sys.h_truncated(k6, t, x) - sys.h_fibre(t, x)));
        ctx.report.add(at_most("h_truncated.convergence", "h^(k) within 1e-4 of h once tail(k) < 1e-6", gap6, 1e-4,
                               "k = " + std::to_string(k6) + ", 1000 random points"));
        long kmax = std::min(N, 20L);
        std::vector<double> sup(static_cast<std::size_t>(kmax + 1), 0.0);
        for (std::size_t i = 0; i < 200; ++i) {
            auto [t, x] = pts[i];
            double full = sys.h_fibre(t, x);
            for (long k = 0; k <= kmax; ++k)
                sup[static_cast<std::size_t>(k)] = std::max(sup[static_cast<std::size_t>(k)], std::fabs(sys.h_truncated(k, t, x) - full));
        }
        double rise = 0.0;
        for (std::size_t k = 1; k < sup.size(); ++k) rise = std::max(rise, sup[k] - sup[k - 1]);
        ctx.report.add(at_most("h_truncated.monotone_gap", "sup |h^(k) - h| non-increasing in k", rise, 1e-12,
                               "k = 0.." + std::to_string(kmax) + ", 200 points"));
        ctx.report.set_info("h_truncated_sup_gap", sup);
    });

    std::vector<double> thetas;
    QpfSystem::Envelopes env;
    ctx.timed("qpf.attractor", [&] {
        long count = std::max<long>(10, cfg.grid / 10);
        for (long i = 0; i < count; ++i) thetas.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(count));
        thetas.push_back(ts);
        std::sort(thetas.begin(), thetas.end());
        env = sys.global_attractor(thetas, cfg.depth);
        double generic = 0.0, star = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            double w = env.upper.back()[i] - env.lower.back()[i];
            if (sys.base().same(thetas[i], ts)) star = w;
            bool near = false;
            for (long n = -std::max(N, 0L); n <= std::max(N, 0L) && !near; ++n)
                near = circle_distance(thetas[i], sys.blown_fibre(n)) <= 1e-3;
            if (!near) generic = std::max(generic, w);
        }
        std::string d = "depth " + std::to_string(cfg.depth);
        ctx.report.add(at_most("attractor.generic_width", "attractor fibres away from the blown-up orbit shrink",
                               generic, 1e-3, d));
        if (N >= 0)
            ctx.report.add(at_least("attractor.star_width", "attractor fibre over theta* contains S_0", star,
                                    a0 - tail2, d));
        else
            ctx.report.skip("attractor.star_width", "nothing blown up (N = -1)");
    });

    ctx.timed("qpf.minimal_set", [&] {
        auto sample = sys.minimal_set_sample(cfg.samples);
        if (N < 0) {
            double worst = 0.0;
            for (const auto& s : sample) worst = std::max(worst, std::fabs(s.x - sys.gamma(s.theta)));
            ctx.report.add(at_most("fill.trivial", "without blow-up the minimal set is the curve itself", worst, 1e-12));
            return;
        }
        FillEnvelope e = filled_in_envelope(sys, sample);
        ctx.report.set_info("fill_verdict", to_string(e.verdict));
        std::string note = std::string(to_string(e.verdict)) + ", " + std::to_string(e.near_count) +
                           " samples within 1e-3 of theta*";
        if (mode == PinchMode::one_sided)
            ctx.report.add(at_least("fill.non_filled_in", "mid(S_0) stays a_0/4 away from the minimal set",
                                    e.verdict == FillVerdict::non_filled_in ? e.midpoint_margin : -1.0, a0 / 4.0, note));
        else
            ctx.report.add(at_most("fill.filled_in", "the minimal set comes within 1e-2 of every point of S_0",
                                   e.verdict == FillVerdict::filled_in ? e.cover_gap : 1.0, 1e-2, note));
    });

    if (!ctx.datasets()) return;
    ctx.timed("qpf.datasets", [&] {
        Csv ps(ctx.out / "pinched_set.csv", {"kind", "n", "theta", "lower", "upper"});
        for (long i = 0; i < cfg.grid; ++i) {
            double t = grid_point(i, cfg.grid);
            ps.row("grid", "", t, sys.gamma_minus(t), sys.gamma_plus(t));
        }
        for (long n = -N; n <= N; ++n) {
            MassInterval s = sys.segment(n);
            ps.row("segment", n, sys.blown_fibre(n), s.lo, s.hi);
        }
        for (int k = 0; k <= cfg.depth; ++k) {
            if (k % 10 != 0 && k != cfg.depth) continue;
            Csv a(ctx.out / ("attractor_depth_" + std::to_string(k) + ".csv"), {"theta", "lower", "upper"});
            for (std::size_t i = 0; i < thetas.size(); ++i)
                a.row(thetas[i], env.lower[static_cast<std::size_t>(k)][i], env.upper[static_cast<std::size_t>(k)][i]);
        }
    });
}

// ---- general ----------------------------------------------------------------------

template <BaseSystem Base>
void general_suite(Context& ctx, const BlownUpSystem<Base>& sys,
                   const PinchSequences<typename Base::Point>& seq) {
    ctx.timed("general.suite", [&] {
        SuiteOptions opt;
        opt.seed = ctx.cfg.seed;
        check_blowup_properties(sys, sequence_approach(seq), opt, ctx.report);
    });
    ctx.timed("general.cross_check", [&] {
        CrossCheck c = cross_check_direct(sys, 334, ctx.cfg.seed);
        ctx.report.add(at_most("cross.direct_series", "fast evaluation agrees with the direct series",
                               c.worst(), 1e-9, std::to_string(c.evaluations) + " evaluations of mu, h, f-hat"));
    });
    if (ctx.datasets()) {
        ctx.timed("general.datasets", [&] {
            if (sys.truncation() >= 0) write_segments(ctx.out / "general_segments.csv", sys);
        });
    }
}

void run_general(Context& ctx) {
    const auto& cfg = ctx.cfg;
    auto w = ctx.weights();
    ctx.report.set_info("base", cfg.base);
    if (cfg.N < 0) ctx.report.set_info("trivial_case", "N = -1: nothing blown up, h is the identity on every fibre");
    if (cfg.base == "rotation") {
        auto forced = default_qpf_system(cfg.omega_value());
        auto seq = default_sequences(forced.base, cfg.theta_star);
        auto sys = blowup_general(forced.base, forced, make_pinch_general(forced.base, forced.gamma, seq), w, cfg.N);
        general_suite(ctx, sys, seq);
    } else if (cfg.base == "torus2") {
        auto forced = default_torus_system(TorusTranslation{cfg.omega_value(), cfg.omega2});
        auto seq = default_sequences(forced.base, default_torus_star);
        auto sys = blowup_general(forced.base, forced, make_pinch_general(forced.base, forced.gamma, seq), w, cfg.N);
        general_suite(ctx, sys, seq);
        ctx.timed("general.lift_check", [&] {
            auto circle_forced = default_qpf_system(cfg.omega_value());
            auto cseq = default_sequences(circle_forced.base, default_torus_star[0]);
            auto circle = blowup_general(circle_forced.base, circle_forced,
                                         make_pinch_general(circle_forced.base, circle_forced.gamma, cseq), w, cfg.N);
            auto lifted = lift_to_torus(circle, cfg.omega2, default_torus_star[1]);
            CrossCheck c = cross_check_lift(circle, lifted, 334, cfg.seed);
            ctx.report.add(at_most("cross.torus_lift", "torus system lifted from the circle agrees with it",
                                   c.worst(), 1e-9, std::to_string(c.evaluations) + " evaluations of mu, h, f-hat"));
        });
    } else {
        auto forced = default_odometer_system();
        auto seq = default_sequences(forced.base, default_odometer_star);
        auto sys = blowup_general(forced.base, forced, make_pinch_general(forced.base, forced.gamma, seq), w, cfg.N);
        general_suite(ctx, sys, seq);
    }
}

// ---- sharkovsky ---------------------------------------------------------------------

void run_sharkovsky(Context& ctx) {
    const auto& cfg = ctx.cfg;
    PinchMode mode = cfg.pinch.empty() ? PinchMode::one_sided : parse_pinch_mode(cfg.pinch);
    QpfSystem inner = make_qpf(mode, cfg.N, ctx.weights(), cfg.omega_value(), cfg.theta_star);
    const PiecewiseLinearMap g = build_g();
    if (cfg.N < 0)
        ctx.report.set_info("trivial_case",
                            "N = -1: the inner system keeps its invariant curve, so the certificate cannot hold");

    IntervalMapScan scan = scan_interval_map(g);
    ctx.report.add(at_most("g.unique_fixed_point", "g(x) - x changes sign exactly once",
                           std::fabs(scan.sign_changes - 1.0), 0.0, "1e4 grid, x0 = " + format17(scan.fixed_point)));
    ctx.report.add(at_most("g.attracting", "0 < g'(x0) < 1", scan.fixed_slope > 0.0 && scan.fixed_slope < 1.0 ? 0.0 : 1.0,
                           0.0, "slope " + format17(scan.fixed_slope)));
    ctx.report.add(at_most("g.three_cycle", "0 -> 1/2 -> 1 -> 0", scan.cycle_residual, 0.0));

    std::optional<SurgerySystem> s;
    ctx.timed("sharkovsky.build", [&] {
        try {
            s.emplace(build_sharkovsky(inner));
            ctx.report.add(at_most("sharkovsky.boundary_continuity", "both branches agree on the boundary of A0",
                                   s->boundary_residual(10000), 1e-8, "1e4 boundary points"));
        } catch (const ConstructionError& e) {
            ctx.report.add(at_most("sharkovsky.boundary_continuity", "both branches agree on the boundary of A0",
                                   e.max_residual, 1e-8, e.what()));
        }
    });
    if (!s) return;

    ctx.timed("sharkovsky.dynamics", [&] {
        double cycle = three_cycle_residual(*s, 1000);
        ctx.report.add(at_most("sharkovsky.three_cycle", "the curves x = 0, 1/2, 1 form an invariant 3-cycle", cycle,
                               1e-9, "1e3 fibres"));
        // before surgery the cycle is carried by R x g alone
        double before = 0.0;
        for (long i = 0; i < 1000; ++i)
            for (double p : {0.0, 0.5, 1.0}) before = std::max(before, std::fabs(g(g(g(p))) - p));
        ctx.report.add(at_most("sharkovsky.three_cycle_unchanged", "surgery does not move the 3-cycle",
                               std::fabs(cycle - before), 1e-10));
        long inversions = 0;
        double advance = 0.0;
        for (long i = 0; i < 100; ++i) {
            double t = (static_cast<double>(i) + 0.5) / 100.0;
            double prev = -INFINITY;
            for (long k = 0; k <= 1000; ++k) {
                double x = s->a_minus() + (s->a_plus() - s->a_minus()) * grid_point(k, 1000);
                auto p = s->forward(t, x);
                if (!(p.second > prev)) ++inversions;
                prev = p.second;
                advance = std::max(advance, circle_distance(p.first, t + s->omega()));
            }
        }
        ctx.report.add(at_most("sharkovsky.monotone_in_A0", "F-hat fibre maps strictly increasing on A0",
                               static_cast<double>(inversions), 0.0, "100 fibres x 1001 points"));
        ctx.report.add(at_most("sharkovsky.base_advance", "first coordinate advances by omega", advance, 1e-15));
    });

    ctx.timed("sharkovsky.certificate", [&] {
        CurveCertificate c = certify_no_invariant_curve(*s, cfg.depth, 30, 1000, cfg.seed);
        ctx.report.add(at_least("sharkovsky.no_invariant_curve",
                                "upper envelope near theta* oscillates by at least 0.8 a_0 times the gluing scale",
                                c.oscillation, c.required, "gluing scale " + format17(c.scale)));
        ctx.report.add(at_most("sharkovsky.fixed_point_in_A0", "the only fixed point of g lies inside A0",
                               c.fixed_point_inside && c.fixed_points == 1 ? 0.0 : 1.0, 0.0));
        ctx.report.add(at_least("sharkovsky.outer_basin", "sampled orbits outside A0 enter A0",
                                c.basin_fraction, 0.99, "1000 samples, 1000 steps"));
        ctx.report.set_info("sharkovsky_certificate",
                            {{"oscillation", c.oscillation}, {"scale", c.scale}, {"required", c.required},
                             {"centre", c.centre}, {"basin_fraction", c.basin_fraction}});
        QpfSystem bare = make_qpf(mode, -1, ctx.weights(), cfg.omega_value(), cfg.theta_star);
        SurgerySystem control = build_sharkovsky(bare);
        CurveCertificate cc = certify_no_invariant_curve(control, cfg.depth, 30, 0, cfg.seed);
        ctx.report.add(at_most("sharkovsky.control_oscillation", "without blow-up the envelope is continuous",
                               cc.oscillation, 1e-6, "inner system with N = -1"));
    });

    if (!ctx.datasets()) return;
    ctx.timed("sharkovsky.datasets", [&] {
        const double ts = inner.pinch().theta_star;
        std::vector<double> thetas;
        long count = std::max<long>(10, cfg.grid / 10);
        for (long i = 0; i < count; ++i) thetas.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(count));
        for (int j = 4; j < 34; ++j) {
            thetas.push_back(wrap01(ts - std::ldexp(1.0, -j)));
            thetas.push_back(wrap01(ts + std::ldexp(1.0, -j)));
        }
        thetas.push_back(ts);
        std::sort(thetas.begin(), thetas.end());
        auto push = [&](double t, double x) {
            std::pair<double, double> z{wrap01(t - cfg.depth * s->omega()), x};
            for (int k = 0; k < cfg.depth; ++k) z = s->forward(z.first, z.second);
            return z.second;
        };
        Csv a(ctx.out / "sharkovsky_attractor.csv", {"theta", "lower", "upper"});
        for (double t : thetas) a.row(t, push(t, s->a_minus()), push(t, s->a_plus()));
        Csv c(ctx.out / "sharkovsky_3cycle.csv", {"theta", "x", "x1", "x2", "x3"});
        for (long i = 0; i < count; ++i) {
            double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            for (double p : {0.0, 0.5, 1.0}) {
                auto z1 = s->forward(t, p), z2 = s->forward(z1.first, z1.second), z3 = s->forward(z2.first, z2.second);
                c.row(t, p, z1.second, z2.second, z3.second);
            }
        }
    });
}

// ---- rees -------------------------------------------------------------------------

// Smallest distance to an integer of k1 omega + k2 rho over the same range
// the construction checks.
double independence_margin(double omega, double rho) {
    double m = INFINITY;
    for (long k1 = -1000; k1 <= 1000; ++k1)
        for (long k2 = 0; k2 <= 1000; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            m = std::min(m, circle_distance(static_cast<double>(k1) * omega + static_cast<double>(k2) * rho, 0.0));
        }
    return m;
}

void run_rees(Context& ctx) {
    const auto& cfg = ctx.cfg;
    ReesSystem s = build_rees(cfg.omega_value(), cfg.rho, cfg.theta_star, cfg.x_star, ctx.weights(), cfg.N);
    const long N = cfg.N;
    const double tail2 = 2.0 * s.tail();
    const bool defaults = cfg.omega == 0.0 && cfg.rho == RunConfig{}.rho && cfg.c == 0.25 && cfg.r == 1.0 / 3.0 &&
                          cfg.N == 40 && cfg.theta_star == 0.3 && cfg.x_star == 0.25 && cfg.seed == 1;
    if (N < 0) ctx.report.set_info("trivial_case", "N = -1: nothing blown up, f-hat is the torus rotation");

    ctx.timed("rees.structure", [&] {
        ctx.report.add(at_least("rees.rational_independence", "no relation k1 omega + k2 rho in Z with |k| <= 1000",
                                independence_margin(s.omega(), s.rho()), 1e-10));
        double cut = INFINITY;
        for (long n = -N; n <= N; ++n) cut = std::min(cut, circle_distance(s.atom_position(n), 0.0));
        if (N >= 0)
            ctx.report.add(at_least("rees.no_atom_at_cut", "atoms x*_n stay off the cut x = 0", cut, 1e-9));
        ctx.report.add(at_most("rees.glue_continuity", "h and f-hat continuous across x = 0", s.glue_residual(1000),
                               1e-8, "1e3 fibres"));
        if (N >= 0) {
            double width = 0.0, inv = 0.0;
            for (long n = -std::min(N, 10L); n <= std::min(N, 10L); ++n) {
                MassInterval g = s.segment(n);
                width = std::max(width, std::fabs((g.hi - g.lo) - s.weights()(n)));
            }
            for (long n = -N; n < N; ++n) {
                MassInterval a = s.segment(n), b = s.segment(n + 1);
                inv = std::max(inv, circle_distance(s.fhat(s.blown_fibre(n), a.lo).second, b.lo));
                inv = std::max(inv, circle_distance(s.fhat(s.blown_fibre(n), a.hi).second, b.hi));
            }
            ctx.report.add(at_most("rees.segment_width", "segment over theta*_n has length a_n", width, tail2 + 1e-15,
                                   "|n| <= 10"));
            ctx.report.add(at_most("rees.segment_invariance", "f-hat sends the endpoints of S_n to those of S_n+1",
                                   inv, 1e-8));
        } else {
            ctx.report.skip("rees.segment_width", "nothing blown up (N = -1)");
            ctx.report.skip("rees.segment_invariance", "nothing blown up (N = -1)");
        }
    });

    ctx.timed("rees.maps", [&] {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double semi = 0.0, inv = 0.0, advance = 0.0;
        auto probe = [&](double t, double x) {
            auto p = s.fhat(t, x);
            auto fy = s.f(t, s.h(t, x));
            semi = std::max(semi, torus_distance({p.first, s.h(p.first, p.second)}, fy));
            inv = std::max(inv, torus_distance(s.fhat_inv(p.first, p.second), {t, x}));
            advance = std::max(advance, circle_distance(p.first, t + s.omega()));
        };
        for (int i = 0; i < 10000; ++i) {
            double t = unit(rng);
            probe(t, unit(rng));
        }
        for (long n = -std::min(N, 5L); n <= std::min(N, 5L); ++n)
            for (int k = 0; k < 100; ++k) probe(s.blown_fibre(n), unit(rng));
        ctx.report.add(at_most("rees.semiconjugacy", "h o f-hat = f o h", semi, 1e-8, "1e4 random points"));
        ctx.report.add(at_most("rees.inverse", "f-hat^-1 o f-hat = id", inv, 1e-8,
                               "1e4 random points plus blown-up fibres"));
        ctx.report.add(at_most("rees.base_advance", "first coordinate advances by omega", advance, 1e-15));
        long extra = 0;
        for (long i = 0; i < 100; ++i) {
            double t = unit(rng);
            long descents = 0;
            double prev = s.fhat(t, 0.0).second;
            for (long k = 1; k < 1000; ++k) {
                double v = s.fhat(t, grid_point(k, 1000)).second;
                if (!(v > prev)) ++descents;
                prev = v;
            }
            extra += std::max(0L, descents - 1);
        }
        ctx.report.add(at_most("rees.fhat_degree_one", "f-hat fibre maps are increasing circle maps",
                               static_cast<double>(extra), 0.0, "descents beyond the single wrap, 100 fibres x 1000"));
    });

    json distal = json::object();
    ctx.timed("rees.distality", [&] {
        long mismatches = 0;
        // pairs inside one segment
        json same = json::array();
        double excess = -INFINITY;
        if (N >= 0) {
            for (long n : {0L, 5L, -5L}) {
                if (std::labs(n) > N) continue;
                MassInterval g = s.segment(n);
                double t = s.blown_fibre(n);
                auto rec = distality_probe(s, {t, g.lo + (g.hi - g.lo) / 3.0}, {t, g.lo + 2.0 * (g.hi - g.lo) / 3.0}, 40);
                long reach = std::max(0L, 40 - std::labs(n));
                double bound = s.weights()(reach) + tail2;
                excess = std::max(excess, rec.min_two_sided - bound);
                if (!(rec.min_two_sided < 1e-6)) ++mismatches;
                same.push_back({{"segment", n}, {"horizon", 40}, {"min_two_sided", rec.min_two_sided},
                                {"argmin_two_sided", rec.argmin_two_sided}, {"min_forward", rec.min_forward},
                                {"argmin_forward", rec.argmin_forward}, {"bound", bound}});
            }
            ctx.report.add(at_most("rees.same_segment_distance",
                                   "pairs inside S_n come within a_(40-|n|) + 2 tail(N) of each other by horizon 40",
                                   excess, 0.0, "largest excess over the bound, segments 0, 5, -5"));
        } else {
            ctx.report.skip("rees.same_segment_distance", "nothing blown up (N = -1)");
        }
        distal["same_segment"] = same;

        // off-segment control pairs: p on h^-1(curve), q = p + (0, 0.3)
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        json control = json::array();
        double slack = INFINITY, floor = INFINITY;
        for (int i = 0; i < 100; ++i) {
            double t;
            for (;;) {
                t = unit(rng);
                bool ok = true;
                for (long n = -N; n <= N && ok; ++n) ok = circle_distance(t, s.blown_fibre(n)) > 1e-3;
                if (ok) break;
            }
            double xp = s.mu_cdf(t, s.x_star()), xq = wrap01(xp + 0.3);
            auto rec = distality_probe(s, {t, xp}, {t, xq}, 1000);
            double derived = s.lebesgue() * circle_distance(s.h(t, xp), s.h(t, xq));
            slack = std::min(slack, rec.min_two_sided - derived);
            floor = std::min(floor, rec.min_two_sided);
            if (rec.min_two_sided < 1e-6) ++mismatches;
            control.push_back({{"theta", t}, {"x_p", xp}, {"x_q", xq}, {"min_two_sided", rec.min_two_sided},
                               {"argmin_two_sided", rec.argmin_two_sided}, {"min_forward", rec.min_forward},
                               {"argmin_forward", rec.argmin_forward}, {"derived_floor", derived}});
        }
        distal["control_pairs"] = control;
        ctx.report.add(at_least("rees.control_floor", "control pairs stay above b' times their h-distance", slack, 0.0,
                                "100 pairs, horizon 1000 both ways; smallest slack"));
        if (defaults)
            ctx.report.add(at_least("rees.control_recorded_floor", "control pairs stay above the recorded floor", floor,
                                    rees_control_floor, "100 pairs, horizon 1000 both ways"));
        else
            ctx.report.skip("rees.control_recorded_floor", "recorded floor applies to the default configuration");
        ctx.report.add(at_most("rees.nondistal_detection", "probing flags exactly the same-segment pairs",
                               static_cast<double>(mismatches), 0.0, "flag: min distance < 1e-6"));

        double t = cfg.theta_star + 0.5;
        double xp = s.mu_cdf(wrap01(t), s.x_star());
        auto rec = distality_probe(s, {wrap01(t), xp}, {wrap01(t), wrap01(xp + 0.3)}, 10000);
        distal["long_horizon_pair"] = {{"theta", wrap01(t)}, {"x_p", xp}, {"horizon", 10000},
                                       {"min_two_sided", rec.min_two_sided}, {"argmin_two_sided", rec.argmin_two_sided},
                                       {"min_forward", rec.min_forward}, {"argmin_forward", rec.argmin_forward}};
        if (defaults)
            ctx.report.add(at_least("rees.long_horizon_floor", "an off-segment pair stays apart for 1e4 steps both ways",
                                    rec.min_two_sided, rees_long_pair_floor));
        else
            ctx.report.skip("rees.long_horizon_floor", "recorded floor applies to the default configuration");
    });

    if (!ctx.datasets()) return;
    ctx.timed("rees.datasets", [&] {
        Csv csv(ctx.out / "rees_segments.csv", {"n", "theta", "atom", "lo", "hi", "width", "a"});
        for (long n = -N; n <= N; ++n) {
            MassInterval g = s.segment(n);
            csv.row(n, s.blown_fibre(n), s.atom_position(n), g.lo, g.hi, g.hi - g.lo, s.weights()(n));
        }
        std::ofstream(ctx.out / "distality_report.json") << distal.dump(2) << '\n';
    });
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    fs::path out(cfg.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw UsageError("cannot create output directory " + cfg.out + ": " + ec.message());

    VerificationReport report(cfg.construction);
    report.set_config(cfg.to_json());
    json timings = json::object();
    Context ctx{cfg, log, report, timings, out};
    log << "construction " << cfg.construction << (cfg.verify_only ? " (verify only)" : "") << "\n";
    auto t0 = std::chrono::steady_clock::now();

    if (cfg.construction == "denjoy") run_denjoy(ctx);
    else if (cfg.construction == "qpf" || cfg.construction == "qpf-filled") run_qpf(ctx);
    else if (cfg.construction == "general") run_general(ctx);
    else if (cfg.construction == "sharkovsky") run_sharkovsky(ctx);
    else run_rees(ctx);

    timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunResult r{report.to_json(), timings, report.all_pass()};
    std::ofstream(out / "report.json") << r.report.dump(2) << '\n';
    std::ofstream(out / "timings.json") << timings.dump(2) << '\n';
    return r;
}

}  // namespace blowup

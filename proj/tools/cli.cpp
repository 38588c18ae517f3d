#include "cli.hpp"

#include <CLI11.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "o3cp1/actions.hpp"
#include "o3cp1/io.hpp"
#include "o3cp1/lattice.hpp"
#include "o3cp1/mc.hpp"
#include "o3cp1/measure.hpp"
#include "o3cp1/stats.hpp"

namespace o3cp1::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_eps(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(s, &used));
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw UsageError("invalid value for 'eps': '" + s + "' is not a number");
        }
    }
    return out;
}

void set_tolerance(Tolerances& t, const std::string& key, double v) {
    if (key == "polar_identity") t.polar_identity = v;
    else if (key == "jacobian") t.jacobian = v;
    else if (key == "marginalization") t.marginalization = v;
    else if (key == "one_site") t.one_site = v;
    else if (key == "constant") t.constant = v;
    else if (key == "roots") t.roots = v;
    else if (key == "n_sigma") t.n_sigma = v;
    else throw UsageError("unknown tolerance key '" + key + "'");
}

template <typename T>
T json_get(const Json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const std::exception&) {
        throw UsageError("invalid value for '" + key + "' in config file");
    }
}

void apply_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "' (key 'config')");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const Json& v = it.value();
        if (k == "command") {
            if (json_get<std::string>(v, k) != c.command)
                throw UsageError("config key 'command' does not match the subcommand");
        } else if (k == "dims") {
            c.dims = v.is_string() ? parse_dims(v.get<std::string>())
                                   : json_get<std::vector<int>>(v, k);
        } else if (k == "g") {
            c.g = json_get<double>(v, k);
        } else if (k == "model") {
            c.model = json_get<std::string>(v, k);
        } else if (k == "regime") {
            c.regime = json_get<std::string>(v, k);
        } else if (k == "sweeps") {
            c.sweeps = json_get<long>(v, k);
        } else if (k == "thermalization") {
            c.thermalization = json_get<long>(v, k);
        } else if (k == "measure_every") {
            c.measure_every = json_get<long>(v, k);
        } else if (k == "seed") {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                            v.get<long long>() < 0))
                throw UsageError("invalid value for 'seed': must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (k == "eps") {
            c.eps = v.is_string() ? parse_eps(v.get<std::string>())
                                  : json_get<std::vector<double>>(v, k);
        } else if (k == "suite") {
            c.suite = v.is_string() ? split_list(v.get<std::string>())
                                    : json_get<std::vector<std::string>>(v, k);
        } else if (k == "points") {
            c.points = json_get<int>(v, k);
        } else if (k == "bins") {
            c.bins = json_get<int>(v, k);
        } else if (k == "field") {
            c.field = json_get<double>(v, k);
        } else if (k == "threads") {
            c.threads = json_get<int>(v, k);
        } else if (k == "out") {
            c.out = json_get<std::string>(v, k);
        } else if (k == "csv") {
            c.csv = json_get<std::string>(v, k);
        } else if (k == "snapshot") {
            c.snapshot = json_get<std::string>(v, k);
        } else if (k == "tolerances") {
            if (!v.is_object()) throw UsageError("invalid value for 'tolerances': expected object");
            for (auto t = v.begin(); t != v.end(); ++t)
                set_tolerance(c.tol, t.key(), json_get<double>(t.value(), "tolerances." + t.key()));
        } else {
            throw UsageError("unknown config key '" + k + "'");
        }
    }
}

void validate(const RunConfig& c) {
    if (!(c.g > 0.0) || !std::isfinite(c.g))
        throw UsageError("invalid value for 'g': must be positive");
    try {
        build_lattice(c.dims);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("invalid value for 'dims': ") + e.what());
    }
    try {
        parse_model(c.model);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("invalid value for 'model': ") + e.what());
    }
    try {
        parse_regime(c.regime);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("invalid value for 'regime': ") + e.what());
    }
    if (c.sweeps <= 0) throw UsageError("invalid value for 'sweeps': must be positive");
    if (c.measure_every < 1) throw UsageError("invalid value for 'measure_every': must be >= 1");
    const long therm = c.thermalization >= 0 ? c.thermalization : std::max(1000L, c.sweeps / 10);
    if (c.command != "verify" && therm >= c.sweeps)
        throw UsageError("invalid value for 'thermalization': must be smaller than sweeps");
    if ((c.command == "sample" || c.command == "compare") && !c.seed)
        throw UsageError("missing required key 'seed'");
    if (c.eps.empty()) throw UsageError("invalid value for 'eps': ladder is empty");
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
        if (!(c.eps[k] > 0.0)) throw UsageError("invalid value for 'eps': widths must be positive");
        if (k > 0 && !(c.eps[k] < c.eps[k - 1]))
            throw UsageError("invalid value for 'eps': ladder must be strictly decreasing");
    }
    for (const auto& s : c.suite)
        if (s != "all" && std::find(verify_suite_names().begin(), verify_suite_names().end(), s) ==
                              verify_suite_names().end())
            throw UsageError("invalid value for 'suite': unknown check '" + s + "'");
    if (c.points < 1) throw UsageError("invalid value for 'points': must be >= 1");
    if (c.bins < static_cast<int>(kMinBins))
        throw UsageError("invalid value for 'bins': jackknife needs at least 20 bins");
    if (!std::isfinite(c.field)) throw UsageError("invalid value for 'field': must be finite");
    if (c.threads < 1) throw UsageError("invalid value for 'threads': must be >= 1");
    const Json t = c.tol.to_json();
    for (auto it = t.begin(); it != t.end(); ++it)
        if (!(it.value().get<double>() > 0.0))
            throw UsageError("invalid value for 'tolerances." + it.key() + "': must be positive");
}

}  // namespace

Json Tolerances::to_json() const {
    return Json{{"polar_identity", polar_identity}, {"jacobian", jacobian},
                {"marginalization", marginalization}, {"one_site", one_site},
                {"constant", constant}, {"roots", roots}, {"n_sigma", n_sigma}};
}

Json RunConfig::to_json() const {
    Json j;
    j["command"] = command;
    j["dims"] = dims;
    j["g"] = g;
    j["model"] = model;
    j["regime"] = regime;
    j["sweeps"] = sweeps;
    j["thermalization"] = thermalization >= 0 ? thermalization : std::max(1000L, sweeps / 10);
    j["measure_every"] = measure_every;
    j["seed"] = command == "verify" ? Json(seed_or_default()) : (seed ? Json(*seed) : Json());
    j["eps"] = eps;
    j["suite"] = suite;
    j["points"] = points;
    j["bins"] = bins;
    j["field"] = field;
    j["threads"] = threads;
    j["out"] = out;
    j["csv"] = csv;
    j["snapshot"] = snapshot;
    j["tolerances"] = tol.to_json();
    return j;
}

int default_threads() {
    if (const char* env = std::getenv("O3CP1_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    return 1;
}

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = {"polar",    "jacobian", "marginalization",
                                                   "one-site", "constant", "stages",
                                                   "pushforward"};
    return names;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    if (args.size() < 2) throw UsageError("missing subcommand (verify, sample or compare)");
    RunConfig c;
    c.command = args[1];
    if (c.command != "verify" && c.command != "sample" && c.command != "compare")
        throw UsageError("unknown subcommand '" + c.command + "'");
    c.threads = default_threads();

    CLI::App app{"o3cp1 " + c.command};
    std::string config_path, dims, model, regime, eps, suite, out, csv, snapshot;
    std::vector<std::string> tols;
    double g = 0, field = 0;
    long sweeps = 0, therm = 0, every = 0;
    std::uint64_t seed = 0;
    int points = 0, bins = 0, threads = 0;
    auto* o_config = app.add_option("--config", config_path, "JSON config file");
    auto* o_dims = app.add_option("--dims", dims, "lattice extent, e.g. 8x8");
    auto* o_g = app.add_option("--g", g, "coupling g > 0");
    auto* o_model = app.add_option("--model", model, "o3|cp1-pullback|cp1-reduced|cp1-gauged");
    auto* o_regime = app.add_option("--regime", regime, "cp1-gauged target: pullback|reduced");
    auto* o_sweeps = app.add_option("--sweeps", sweeps, "total sweeps");
    auto* o_therm = app.add_option("--thermalization", therm, "discarded sweeps");
    auto* o_every = app.add_option("--measure-every", every, "sweeps between measurements");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_eps = app.add_option("--eps", eps, "mollifier ladder, e.g. 0.1,0.05,0.025");
    auto* o_suite = app.add_option("--suite", suite, "all or a comma list of checks");
    auto* o_points = app.add_option("--points", points, "test points for the measure constant");
    auto* o_bins = app.add_option("--bins", bins, "jackknife bins");
    auto* o_field = app.add_option("--field", field, "external weight field * sum n_z");
    auto* o_threads = app.add_option("--threads", threads, "worker threads");
    auto* o_out = app.add_option("--out", out, "JSON report path");
    auto* o_csv = app.add_option("--csv", csv, "series CSV path");
    auto* o_snap = app.add_option("--snapshot", snapshot, "final field snapshot prefix");
    app.add_option("--tol", tols, "tolerance override key=value");

    std::vector<std::string> rest(args.begin() + 2, args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (o_config->count()) apply_file(c, config_path);
    try {
        if (o_dims->count()) c.dims = parse_dims(dims);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("invalid value for 'dims': ") + e.what());
    }
    if (o_g->count()) c.g = g;
    if (o_model->count()) c.model = model;
    if (o_regime->count()) c.regime = regime;
    if (o_sweeps->count()) c.sweeps = sweeps;
    if (o_therm->count()) c.thermalization = therm;
    if (o_every->count()) c.measure_every = every;
    if (o_seed->count()) c.seed = seed;
    if (o_eps->count()) c.eps = parse_eps(eps);
    if (o_suite->count()) c.suite = split_list(suite);
    if (o_points->count()) c.points = points;
    if (o_bins->count()) c.bins = bins;
    if (o_field->count()) c.field = field;
    if (o_threads->count()) c.threads = threads;
    if (o_out->count()) c.out = out;
    if (o_csv->count()) c.csv = csv;
    if (o_snap->count()) c.snapshot = snapshot;
    for (const auto& t : tols) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw UsageError("invalid value for 'tol': expected key=value");
        const std::string key = t.substr(0, eq);
        double v = 0;
        try {
            v = std::stod(t.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("invalid value for 'tolerances." + key + "'");
        }
        set_tolerance(c.tol, key, v);
    }
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// verify

namespace {

Json make_check(const std::string& name, Json inputs, double value, double reference,
                double tolerance, bool pass, Json diagnostics) {
    Json j;
    j["name"] = name;
    j["inputs"] = std::move(inputs);
    j["value"] = value;
    j["reference"] = reference;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["diagnostics"] = std::move(diagnostics);
    return j;
}

Json check_polar(const RunConfig& c, Rng& rng) {
    const int probes = 1000;
    const int dim = static_cast<int>(c.dims.size());
    const Coupling g(c.g);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < probes; ++k) {
        const auto probe = AnalyticFieldProbe::random_fourier(dim, rng);
        Eigen::VectorXd x(dim);
        for (int mu = 0; mu < dim; ++mu) x(mu) = 8.0 * uniform01(rng);
        const double lhs = o3_density_chain_rule(probe, x, g);
        const double rhs = action_polar_density(probe, x, g);
        worst = std::max(worst, std::abs(lhs - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    const double tol = c.tol.polar_identity;
    return make_check("polar_identity", {{"probes", probes}, {"dimension", dim}, {"g", c.g}}, worst,
                      0.0, tol, worst <= tol, {{"max_density", scale}});
}

Json check_jacobian(const RunConfig& c, Rng& rng) {
    (void)c;
    const int count = 100;
    const double h = 1e-6;
    auto map = [](const Eigen::Vector4d& p) {  // (r, alpha, s, beta) -> R^4
        return Eigen::Vector4d(p(0) * std::cos(p(1)), p(0) * std::sin(p(1)),
                               p(2) * std::cos(p(3)), p(2) * std::sin(p(3)));
    };
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        const double u = 0.05 + (0.5 * kPi - 0.1) * uniform01(rng);
        const Eigen::Vector4d p(std::cos(u), 2 * kPi * uniform01(rng), std::sin(u),
                                2 * kPi * uniform01(rng));
        Eigen::Matrix4d jac;
        for (int i = 0; i < 4; ++i) {
            Eigen::Vector4d a = p, b = p;
            a(i) += h;
            b(i) -= h;
            jac.col(i) = (map(a) - map(b)) / (2 * h);
        }
        worst = std::max(worst, std::abs(jac.determinant() - jacobian_polar(p(0), p(2))));
    }
    return make_check("jacobian", {{"points", count}, {"step", h}}, worst, 0.0, c.tol.jacobian,
                      worst <= c.tol.jacobian, Json::object());
}

Json check_marginalization(const RunConfig& c, Rng& rng) {
    const Lattice lat(c.dims);
    const int links = 100;
    const std::vector<double> couplings = {0.5, 1.0, 2.0};
    const CP1Field z = random_cp1_field(lat, rng);
    double worst = 0.0, worst_tail = 0.0, worst_err = 0.0;
    bool converged = true;
    for (int k = 0; k < links; ++k) {
        const std::size_t l =
            std::min<std::size_t>(lat.n_links() - 1, static_cast<std::size_t>(uniform01(rng) *
                                                                              lat.n_links()));
        for (double g : couplings) {
            const auto r = marginalize_gauge_numeric(z, lat, lat.link(l), Coupling(g));
            worst = std::max(worst, std::abs(r.value - r.closed_form) / r.closed_form);
            worst_tail = std::max(worst_tail, r.tail_bound);
            worst_err = std::max(worst_err, r.error_estimate / r.closed_form);
            converged = converged && r.converged;
        }
    }
    const double tol = c.tol.marginalization;
    return make_check("gauge_marginalization",
                      {{"links", links}, {"g", couplings}, {"truncation_k", QuadControl{}.truncation_k}},
                      worst, 0.0, tol, converged && worst <= tol,
                      {{"all_converged", converged},
                       {"max_tail_bound", worst_tail},
                       {"max_quadrature_error", worst_err}});
}

Json check_one_site(const RunConfig& c) {
    const std::vector<double> lambdas = {0.0, 1.0, 2.5};
    double worst = 0.0;
    Json rows = Json::array();
    for (double l : lambdas) {
        const auto r = one_site_ratio_test(l);
        worst = std::max({worst, r.rel_diff(), std::abs(r.lhs - r.closed_form) / r.closed_form});
        rows.push_back({{"lambda", l}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"closed_form", r.closed_form}});
    }
    return make_check("one_site_ratio", {{"lambda", lambdas}}, worst, 0.0, c.tol.one_site,
                      worst <= c.tol.one_site, {{"values", rows}, {"pi_squared", kPi * kPi}});
}

Json check_constant(const RunConfig& c, Rng& rng) {
    MollifierConfig m;
    m.ladder = c.eps;
    m.eps = c.eps.back();
    const auto points = random_sphere_points(c.points, rng);
    const auto est = verify_constant_c(m, points, c.tol.constant);
    Json pts = Json::array();
    double worst_quad = 0.0;
    for (const auto& p : est.points) {
        pts.push_back({{"n", {p.n.x(), p.n.y(), p.n.z()}},
                       {"ratios", p.ratios},
                       {"naive_ratios", p.naive_ratios},
                       {"extrapolated", p.extrapolated},
                       {"monotone", p.monotone}});
        for (double e : p.quad_errors) worst_quad = std::max(worst_quad, e);
    }
    return make_check("measure_constant", {{"eps", c.eps}, {"points", c.points}}, est.mean,
                      0.5 * kPi, c.tol.constant, est.pass,
                      {{"message", est.message},
                       {"extrapolated", est.extrapolated},
                       {"monotone", est.monotone},
                       {"spread", est.spread},
                       {"max_rel_error", est.max_rel_error},
                       {"max_rel_quadrature_error", worst_quad},
                       {"per_point", pts}});
}

Json check_stages(const RunConfig& c, Rng& rng) {
    const double eps = c.eps.back();
    const int wanted = 5;
    std::vector<Vector3d> points;
    for (int tries = 0; tries < 100000 && static_cast<int>(points.size()) < wanted; ++tries) {
        const Vector3d n = random_unit_vector(rng);
        const double q2 = 1.0 - n.x() * n.x() - n.z() * n.z();
        if (q2 > 0 && std::sqrt(q2) >= 10.0 * eps && std::abs(n.z()) < 1.0) points.push_back(n);
    }
    Json inputs = {{"eps", eps}, {"points", wanted}};
    if (static_cast<int>(points.size()) < wanted)
        return make_check("reduction_stages", inputs, 0.0, 0.0, 1.0, false,
                          {{"message", "no admissible points 10 eps away from the "
                                       "root-coalescence locus at this width"}});

    double worst_ratio = 0.0, worst_root = 0.0;
    Json rows = Json::array();
    for (const Vector3d& n : points) {
        std::vector<QuadValue> vals;
        Json stages = Json::object();
        for (ReductionStage s : all_stages()) {
            vals.push_back(reduction_stage_value(n, eps, s));
            stages[stage_label(s)] = {{"value", vals.back().value}, {"error", vals.back().error}};
        }
        vals.push_back({final_stage_value(n, eps), 0.0});
        stages["closed-form"] = {{"value", vals.back().value}, {"error", 0.0}};
        for (std::size_t a = 0; a < vals.size(); ++a)
            for (std::size_t b = a + 1; b < vals.size(); ++b) {
                const double tol = 2.0 * (vals[a].error + vals[b].error) +
                                   1e-8 * std::abs(vals.back().value);
                worst_ratio = std::max(worst_ratio, std::abs(vals[a].value - vals[b].value) / tol);
            }
        const auto roots = check_phi_roots(n);
        worst_root = std::max(worst_root, roots.max_deviation());
        rows.push_back({{"n", {n.x(), n.y(), n.z()}},
                        {"stages", stages},
                        {"root_closed", roots.root_closed},
                        {"slope_closed", roots.slope_closed},
                        {"root_deviation", roots.max_deviation()}});
    }
    inputs["root_tolerance"] = c.tol.roots;
    // value: worst pairwise difference in units of the combined quadrature tolerance
    return make_check("reduction_stages", inputs, worst_ratio, 0.0, 1.0,
                      worst_ratio <= 1.0 && worst_root <= c.tol.roots,
                      {{"max_root_deviation", worst_root}, {"per_point", rows}});
}

Json check_pushforward(const RunConfig& c, Rng& rng) {
    (void)c;
    const std::size_t n = 100000;
    const auto r = pushforward_uniformity(n, rng);
    return make_check("pushforward_uniformity", {{"samples", n}},
                      std::max(r.ks_nz, r.ks_azimuth), 0.0, r.critical, r.pass(),
                      {{"ks_nz", r.ks_nz},
                       {"ks_azimuth", r.ks_azimuth},
                       {"mean_nz", r.mean_nz},
                       {"max_norm_error", r.max_norm_error}});
}

bool selected(const RunConfig& c, const std::string& name) {
    return std::find(c.suite.begin(), c.suite.end(), "all") != c.suite.end() ||
           std::find(c.suite.begin(), c.suite.end(), name) != c.suite.end();
}

ChainConfig chain_config(const RunConfig& c, Model m, GaugedRegime r, std::uint64_t stream) {
    ChainConfig cc;
    cc.model = m;
    cc.regime = r;
    cc.dims = c.dims;
    cc.g = c.g;
    cc.sweeps = c.sweeps;
    cc.thermalization = c.thermalization;
    cc.measure_every = c.measure_every;
    cc.seed = *c.seed;
    cc.stream = stream;
    cc.field = c.field;
    return cc;
}

Json chain_json(const std::string& label, const ChainResult& r) {
    return {{"label", label},
            {"model", model_name(r.config.model)},
            {"regime", r.config.model == Model::CP1Gauged ? Json(regime_name(r.config.regime))
                                                          : Json()},
            {"seed", r.config.seed},
            {"stream", r.config.stream},
            {"stream_seed", r.stream_seed},
            {"thermalization", r.thermalization},
            {"delta", r.delta},
            {"acceptance", r.acceptance},
            {"measurements", r.series.empty() ? 0 : r.series.front().values.size()}};
}

Json observable_json(const ObservableSeries& s, const JackknifeResult& j, std::size_t bin_size) {
    return {{"name", s.name},     {"mean", j.mean},
            {"error", j.error},   {"bins", j.bins},
            {"bin_size", bin_size}, {"error_doubled_bins", j.error_doubled},
            {"stable", j.stable}};
}

}  // namespace

Outcome run_verify(const RunConfig& c) {
    const std::uint64_t seed = c.seed_or_default();
    Json checks = Json::array();
    const auto& names = verify_suite_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (!selected(c, names[k])) continue;
        Rng rng(split_seed(seed, k));
        Json check;
        try {
            if (names[k] == "polar") check = check_polar(c, rng);
            else if (names[k] == "jacobian") check = check_jacobian(c, rng);
            else if (names[k] == "marginalization") check = check_marginalization(c, rng);
            else if (names[k] == "one-site") check = check_one_site(c);
            else if (names[k] == "constant") check = check_constant(c, rng);
            else if (names[k] == "stages") check = check_stages(c, rng);
            else check = check_pushforward(c, rng);
        } catch (const std::exception& e) {
            check = make_check(names[k], Json::object(), 0.0, 0.0, 0.0, false,
                               {{"error", e.what()}});
        }
        checks.push_back(check);
    }
    bool all = true;
    for (const auto& ch : checks) all = all && ch["pass"].get<bool>();
    Outcome o;
    o.exit_code = all ? 0 : 1;
    o.report = {{"command", "verify"},
                {"config", c.to_json()},
                {"checks", checks},
                {"all_pass", all},
                {"exit_code", o.exit_code}};
    return o;
}

Outcome run_sample(const RunConfig& c, std::string& csv_text) {
    const ChainResult r = run_chain(chain_config(c, parse_model(c.model), parse_regime(c.regime), 0));
    Outcome o;
    o.report = {{"command", "sample"}, {"config", c.to_json()}, {"chain", chain_json(c.model, r)}};
    Json obs = Json::array();
    bool ok = true;
    std::string error;
    for (const auto& s : r.series) {
        const std::size_t bs = bin_size_for(s.values.size(), static_cast<std::size_t>(c.bins));
        try {
            obs.push_back(observable_json(s, jackknife(s.values, bs), bs));
        } catch (const ValidationError& e) {
            ok = false;
            error = e.what();
            break;
        }
    }
    if (ok) o.report["observables"] = obs;
    else o.report["error"] = "insufficient bins, error bars withheld: " + error;
    o.exit_code = ok ? 0 : 1;
    o.report["all_pass"] = ok;
    o.report["exit_code"] = o.exit_code;

    std::ostringstream csv;
    write_series_csv(csv, r.series,
                     {"config " + c.to_json().dump(),
                      "chain " + chain_json(c.model, r).dump()});
    csv_text = csv.str();
    if (!c.snapshot.empty()) {
        const Lattice lat(c.dims);
        std::ofstream nf(c.snapshot + ".spin.csv");
        write_spin_snapshot(nf, r.final_n);
        if (!r.final_z.empty()) {
            std::ofstream zf(c.snapshot + ".cp1.csv");
            write_cp1_snapshot(zf, r.final_z);
        }
        if (r.final_a.size() > 0) {
            std::ofstream af(c.snapshot + ".gauge.csv");
            write_gauge_snapshot(af, r.final_a, lat);
        }
    }
    return o;
}

Outcome run_compare(const RunConfig& c, std::string& csv_text) {
    struct Spec {
        std::string label;
        Model model;
        GaugedRegime regime;
    };
    const std::vector<Spec> specs = {
        {"o3", Model::O3, GaugedRegime::Pullback},
        {"cp1-pullback", Model::CP1Pullback, GaugedRegime::Pullback},
        {"cp1-gauged", Model::CP1Gauged, GaugedRegime::Pullback},
        {"cp1-reduced", Model::CP1Reduced, GaugedRegime::Reduced},
        {"cp1-gauged-reduced", Model::CP1Gauged, GaugedRegime::Reduced}};

    std::vector<ChainResult> results(specs.size());
    std::vector<std::string> failures(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < specs.size();) {
            try {
                results[k] = run_chain(chain_config(c, specs[k].model, specs[k].regime, k));
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
    };
    const int nthreads = std::min<int>(c.threads, static_cast<int>(specs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error("chain failed: " + f);

    Outcome o;
    o.report = {{"command", "compare"}, {"config", c.to_json()}};
    Json chains = Json::array();
    std::vector<std::vector<JackknifeResult>> stats(specs.size());
    std::string bin_error;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        Json cj = chain_json(specs[k].label, results[k]);
        Json obs = Json::array();
        for (const auto& s : results[k].series) {
            const std::size_t bs = bin_size_for(s.values.size(), static_cast<std::size_t>(c.bins));
            try {
                stats[k].push_back(jackknife(s.values, bs));
                obs.push_back(observable_json(s, stats[k].back(), bs));
            } catch (const ValidationError& e) {
                bin_error = e.what();
            }
        }
        if (bin_error.empty()) cj["observables"] = obs;
        chains.push_back(cj);
    }
    o.report["chains"] = chains;

    bool all = bin_error.empty();
    if (!bin_error.empty()) {
        o.report["error"] = "insufficient bins, error bars withheld: " + bin_error;
    } else {
        // exact: same z-marginal by construction; continuum: differs by the O(a^2) lattice gap
        struct Pair {
            std::size_t a, b;
            const char* role;
        };
        const std::vector<Pair> pairs = {{0, 1, "exact"}, {0, 2, "exact"}, {1, 2, "exact"},
                                         {3, 4, "exact"}, {0, 3, "continuum"},
                                         {0, 4, "continuum"}};
        Json table = Json::array();
        const auto& series0 = results[0].series;
        for (std::size_t i = 0; i < series0.size(); ++i) {
            if (series0[i].name == "nz") continue;
            for (const Pair& p : pairs) {
                const auto& ja = stats[p.a][i];
                const auto& jb = stats[p.b][i];
                const double diff = ja.mean - jb.mean;
                const double sigma = std::hypot(ja.error, jb.error);
                const double nsig = sigma > 0 ? std::abs(diff) / sigma : (diff == 0 ? 0.0 : INFINITY);
                const bool gating = std::string(p.role) == "exact";
                const bool pass = nsig <= c.tol.n_sigma;
                if (gating) all = all && pass;
                table.push_back({{"observable", series0[i].name},
                                 {"a", specs[p.a].label},
                                 {"b", specs[p.b].label},
                                 {"role", p.role},
                                 {"gating", gating},
                                 {"mean_a", ja.mean},
                                 {"error_a", ja.error},
                                 {"mean_b", jb.mean},
                                 {"error_b", jb.error},
                                 {"diff", diff},
                                 {"sigma", sigma},
                                 {"n_sigma", nsig},
                                 {"pass", pass}});
            }
        }
        o.report["comparisons"] = table;

        if (c.dims.size() == 1 && c.dims[0] == 2) {
            Json oracle = Json::array();
            for (std::size_t k = 0; k < specs.size(); ++k) {
                std::size_t idx = 0;
                while (results[k].series[idx].name != "corr_1") ++idx;
                const auto& j = stats[k][idx];
                const double q = two_site_correlator_quadrature(specs[k].model, specs[k].regime, c.g);
                const double nsig = j.error > 0 ? std::abs(j.mean - q) / j.error : INFINITY;
                const bool pass = c.field == 0.0 && nsig <= c.tol.n_sigma;
                all = all && pass;
                oracle.push_back({{"chain", specs[k].label},
                                  {"observable", "corr_1"},
                                  {"mean", j.mean},
                                  {"error", j.error},
                                  {"quadrature", q},
                                  {"n_sigma", nsig},
                                  {"pass", pass}});
            }
            o.report["two_site_oracle"] = oracle;
        }
    }
    o.exit_code = all ? 0 : 1;
    o.report["all_pass"] = all;
    o.report["exit_code"] = o.exit_code;

    std::vector<ObservableSeries> merged;
    std::vector<std::string> preamble = {"config " + c.to_json().dump()};
    for (std::size_t k = 0; k < specs.size(); ++k) {
        preamble.push_back("chain " + chain_json(specs[k].label, results[k]).dump());
        for (auto s : results[k].series) {
            s.name = specs[k].label + "/" + s.name;
            merged.push_back(std::move(s));
        }
    }
    std::ostringstream csv;
    write_series_csv(csv, merged, preamble);
    csv_text = csv.str();
    return o;
}

namespace {

std::string csv_path(const RunConfig& c) {
    if (!c.csv.empty()) return c.csv;
    if (c.out.empty()) return "";
    const auto dot = c.out.find_last_of('.');
    const auto slash = c.out.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return c.out + ".csv";
    return c.out.substr(0, dot) + ".csv";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig c;
    try {
        c = parse_config(args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n"
                  << "usage: o3cp1 {verify|sample|compare} [--config file.json] [flags]\n";
        return 2;
    }
    try {
        Outcome o;
        std::string csv;
        if (c.command == "verify") o = run_verify(c);
        else if (c.command == "sample") o = run_sample(c, csv);
        else o = run_compare(c, csv);

        const std::string report = o.report.dump(2) + "\n";
        if (c.out.empty()) std::cout << report;
        else write_text(c.out, report);
        const std::string cpath = csv_path(c);
        if (!csv.empty() && !cpath.empty()) write_text(cpath, csv);

        if (c.command == "verify")
            for (const auto& ch : o.report["checks"])
                std::cerr << (ch["pass"].get<bool>() ? "PASS " : "FAIL ")
                          << ch["name"].get<std::string>() << "\n";
        return o.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace o3cp1::cli

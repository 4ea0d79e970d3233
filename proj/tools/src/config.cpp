#include "config.hpp"

#include "delaylab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <type_traits>

namespace delaylab::tools {

using nlohmann::json;
using Path = std::vector<std::string>;

namespace {

int line_at(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Follows the keys in order through the raw text; good enough to point at
// the offending field without a position-tracking parser.
int line_of_path(const std::string& text, const Path& path) {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& key : path) {
        const auto at = text.find('"' + key + '"', pos);
        if (at == std::string::npos) break;
        pos = at;
        found = true;
    }
    return found ? line_at(text, pos) : 1;
}

class Reader {
public:
    Reader(const std::string& text, std::filesystem::path source) : text_(text), source_(std::move(source)) {
        try {
            root_ = json::parse(text_);
        } catch (const json::parse_error& e) {
            const int line = line_at(text_, e.byte > 0 ? e.byte - 1 : 0);
            throw ConfigError(prefix(line) + "malformed JSON: " + e.what(), line);
        }
        if (!root_.is_object()) throw ConfigError(prefix(1) + "top level must be an object", 1);
    }

    [[nodiscard]] const json& root() const { return root_; }
    [[nodiscard]] const std::filesystem::path& source() const { return source_; }

    [[noreturn]] void fail(const Path& path, const std::string& message) const {
        const int line = line_of_path(text_, path);
        throw ConfigError(prefix(line) + message, line);
    }

    [[nodiscard]] const json* find(const json& obj, const std::string& key) const {
        const auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    [[nodiscard]] const json& need(const json& obj, const Path& path) const {
        if (!obj.is_object()) fail(path, "expected an object");
        const json* v = find(obj, path.back());
        if (!v) fail(Path(path.begin(), path.end() - 1), "missing field \"" + path.back() + "\"");
        return *v;
    }

    template <class T>
    T as(const json& v, const Path& path) const {
        try {
            return v.get<T>();
        } catch (const json::exception& e) {
            fail(path, "field \"" + path.back() + "\": " + e.what());
        }
    }

    template <class T>
    T get(const json& obj, const Path& path) const {
        return as<T>(need(obj, path), path);
    }

    template <class T>
    T get_or(const json& obj, const Path& path, T fallback) const {
        const json* v = find(obj, path.back());
        return v ? as<T>(*v, path) : fallback;
    }

    double positive(const json& obj, const Path& path) const {
        const auto v = get<double>(obj, path);
        if (!(v > 0.0) || !std::isfinite(v)) fail(path, "\"" + path.back() + "\" must be positive");
        return v;
    }

    Matrix matrix(const json& v, const Path& path, std::optional<int> rows = {}, std::optional<int> cols = {}) const {
        if (!v.is_array() || v.empty()) fail(path, "\"" + path.back() + "\" must be a nonempty array of rows");
        // A flat list is a column when rows are known, else a single row.
        if (!v.front().is_array()) {
            const auto flat = as<std::vector<double>>(v, path);
            const int len = static_cast<int>(flat.size());
            const int r = rows ? *rows : (cols ? len / std::max(1, *cols) : 1);
            const int c = cols ? *cols : len / std::max(1, r);
            if (r * c != len) fail(path, "\"" + path.back() + "\" has " + std::to_string(len) + " entries");
            Matrix m(r, c);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) m(i, j) = flat[static_cast<std::size_t>(i * c + j)];
            return m;
        }
        const auto rws = as<std::vector<std::vector<double>>>(v, path);
        const auto width = rws.front().size();
        Matrix m(static_cast<Eigen::Index>(rws.size()), static_cast<Eigen::Index>(width));
        for (std::size_t i = 0; i < rws.size(); ++i) {
            if (rws[i].size() != width) fail(path, "\"" + path.back() + "\" has ragged rows");
            for (std::size_t j = 0; j < width; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rws[i][j];
        }
        if (rows && m.rows() != *rows)
            fail(path, "\"" + path.back() + "\" needs " + std::to_string(*rows) + " rows");
        if (cols && m.cols() != *cols)
            fail(path, "\"" + path.back() + "\" needs " + std::to_string(*cols) + " columns");
        if (!m.allFinite()) fail(path, "\"" + path.back() + "\" has non-finite entries");
        return m;
    }

    Matrix matrix_field(const json& obj, const Path& path, std::optional<int> rows = {},
                        std::optional<int> cols = {}) const {
        return matrix(need(obj, path), path, rows, cols);
    }

    /// Piecewise-constant signal: a constant matrix or {"breakpoints", "values"}.
    StepSignal signal(const json& v, const Path& path, int rows, int cols, double start) const {
        if (v.is_object()) {
            auto bps = get<std::vector<double>>(v, extend(path, "breakpoints"));
            const json& vals = need(v, extend(path, "values"));
            if (!vals.is_array() || vals.size() != bps.size())
                fail(extend(path, "values"), "\"values\" must match \"breakpoints\" in length");
            std::vector<Matrix> out;
            for (const auto& item : vals) out.push_back(matrix(item, extend(path, "values"), rows, cols));
            return wrap(path, [&] { return StepSignal(std::move(bps), std::move(out)); });
        }
        return StepSignal::constant(matrix(v, path, rows, cols), start);
    }

    std::filesystem::path resolve(const std::string& rel) const {
        const std::filesystem::path p(rel);
        return p.is_absolute() ? p : source_.parent_path() / p;
    }

    /// Reads a referenced schedule file and parses it; its own parse errors
    /// are reported against that file.
    template <class F>
    auto referenced(const json& obj, const Path& path, F&& parse) const {
        const auto file = resolve(get<std::string>(obj, path));
        if (!std::filesystem::exists(file)) fail(path, "referenced file " + file.string() + " does not exist");
        const std::string text = read_text_file(file.string());
        try {
            return parse(text);
        } catch (const ParseError& e) {
            throw ConfigError(file.string() + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
        } catch (const std::exception& e) {
            throw ConfigError(file.string() + ":1: " + e.what(), 1);
        }
    }

    template <class F>
    std::invoke_result_t<F> wrap(const Path& path, F&& make) const {
        try {
            return make();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    }

    static Path extend(Path p, const std::string& key) {
        p.push_back(key);
        return p;
    }

private:
    [[nodiscard]] std::string prefix(int line) const { return source_.string() + ":" + std::to_string(line) + ": "; }

    const std::string& text_;
    std::filesystem::path source_;
    json root_;
};

std::vector<Interval> parse_intervals(const Reader& r, const json& model) {
    std::vector<Interval> on;
    if (const json* d = r.find(model, "doubling")) {
        const Path p{"model", "doubling"};
        const int last = r.get<int>(*d, {"model", "doubling", "last_power"});
        const double width = r.get_or<double>(*d, {"model", "doubling", "width"}, 1.0);
        if (last < 0 || last > 20) r.fail(p, "\"last_power\" must lie in [0, 20]");
        if (!(width > 0.0) || width > 1.0) r.fail(p, "\"width\" must lie in (0, 1]");
        for (int k = 0; k <= last; ++k) {
            const double s = std::ldexp(1.0, k);
            on.push_back({s, s + width});
        }
        return on;
    }
    const auto raw = r.get<std::vector<std::array<double, 2>>>(model, {"model", "on"});
    for (const auto& iv : raw) on.push_back({iv[0], iv[1]});
    return on;
}

WeightSchedule random_discrete(const Reader& r, const json& spec, DelaySchedule& delays, bool delays_given) {
    const Path p{"model", "random"};
    const auto seed = r.get<unsigned>(spec, {"model", "random", "seed"});
    const int n = r.get<int>(spec, {"model", "random", "agents"});
    const int steps = r.get<int>(spec, {"model", "random", "steps"});
    const int max_delay = r.get_or<int>(spec, {"model", "random", "max_delay"}, 0);
    const double floor = r.get_or<double>(spec, {"model", "random", "floor"}, 0.2);
    if (n < 1 || n > 64) r.fail(p, "\"agents\" must lie in [1, 64]");
    if (steps < 1 || steps > 100000) r.fail(p, "\"steps\" must lie in [1, 100000]");
    if (max_delay < 0 || max_delay > 16) r.fail(p, "\"max_delay\" must lie in [0, 16]");
    if (!(floor > 0.0) || floor > 1.0) r.fail(p, "\"floor\" must lie in (0, 1]");

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> lag(0, max_delay);
    std::vector<Matrix> b;
    for (int k = 0; k < steps; ++k) {
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double rest = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i && u(rng) < 0.6) rest += m(i, j) = 0.1 + u(rng);
            const double diag = rest > 0.0 ? floor + (1.0 - floor) * u(rng) : 1.0;
            if (rest > 0.0) m.row(i) *= (1.0 - diag) / rest;
            m(i, i) = 1.0 - m.row(i).sum();
        }
        b.push_back(m);
    }
    if (!delays_given) {
        Matrix h = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) h(i, j) = lag(rng);
        delays = DelaySchedule::constant(h, h.maxCoeff());
    }
    return WeightSchedule::discrete(std::move(b));
}

void parse_model(const Reader& r, Scenario& sc, bool& delays_given) {
    const json& model = r.need(r.root(), {"model"});
    const Path gp{"model", "generator"};
    sc.generator = r.get<std::string>(model, gp);
    const auto& g = sc.generator;
    const auto horizon = [&] { return r.positive(model, {"model", "horizon"}); };

    if (g == "constant") {
        const Matrix a = r.matrix_field(model, {"model", "weights"});
        sc.weights = r.wrap({"model", "weights"}, [&] { return WeightSchedule::constant(a, horizon()); });
    } else if (g == "intermittent") {
        const Matrix a = r.matrix_field(model, {"model", "weights"});
        const auto on = parse_intervals(r, model);
        std::optional<double> h;
        if (r.find(model, "horizon")) h = horizon();
        sc.weights = r.wrap({"model", "weights"}, [&] { return make_intermittent(a, on, h); });
    } else if (g == "piecewise") {
        auto bps = r.get<std::vector<double>>(model, {"model", "breakpoints"});
        const json& segs = r.need(model, {"model", "segments"});
        std::vector<Matrix> ms;
        for (const auto& s : segs) ms.push_back(r.matrix(s, {"model", "segments"}));
        sc.weights = r.wrap({"model", "segments"},
                            [&] { return WeightSchedule::continuous(std::move(bps), std::move(ms), horizon()); });
    } else if (g == "file") {
        sc.weights = r.referenced(model, {"model", "weights_file"},
                                  [](const std::string& text) { return weights_from_json(text); });
    } else if (g == "appendix-a") {
        const int steps = r.get<int>(model, {"model", "steps"});
        if (steps < 1 || steps > 400) r.fail({"model", "steps"}, "\"steps\" must lie in [1, 400]");
        std::vector<Matrix> b;
        for (int k = 0; k < steps; ++k) {
            const double a = std::pow(4.0, -(k + 1));
            Matrix m(2, 2);
            m << a, 1.0 - a, 1.0 - a, a;
            b.push_back(m);
        }
        sc.weights = WeightSchedule::discrete(std::move(b));
    } else if (g == "reduction-of-discrete") {
        if (const json* rnd = r.find(model, "random")) {
            sc.weights = random_discrete(r, *rnd, sc.delays, delays_given);
            delays_given = true;
        } else {
            const json& steps = r.need(model, {"model", "steps"});
            std::vector<Matrix> b;
            for (const auto& s : steps) b.push_back(r.matrix(s, {"model", "steps"}));
            sc.weights = r.wrap({"model", "steps"}, [&] { return WeightSchedule::discrete(std::move(b)); });
        }
    } else if (g == "containment") {
        const Matrix a = r.matrix_field(model, {"model", "weights"});
        sc.weights = r.wrap({"model", "weights"}, [&] { return WeightSchedule::constant(a, horizon()); });
        const Matrix pos = r.matrix_field(model, {"model", "leaders"});
        const int n = sc.weights.agents();
        const StepSignal b = r.signal(r.need(model, {"model", "attraction"}), {"model", "attraction"}, n,
                                      static_cast<int>(pos.rows()), -std::numeric_limits<double>::infinity());
        sc.leaders = LeaderConfig{pos, b};
    } else if (g == "aggregation") {
        const Matrix a = r.matrix_field(model, {"model", "weights"});
        sc.weights = r.wrap({"model", "weights"}, [&] { return WeightSchedule::constant(a, horizon()); });
        const int n = sc.weights.agents();
        const json& t = r.need(model, {"model", "target"});
        const auto shape = r.get<std::string>(t, {"model", "target", "shape"});
        const Path sp{"model", "target", "selector"};
        if (shape == "ball") {
            const Matrix c = r.matrix_field(t, {"model", "target", "center"});
            const double rad = r.positive(t, {"model", "target", "radius"});
            const int m = static_cast<int>(c.size());
            const StepSignal sel = r.signal(r.need(t, sp), sp, n, m, 0.0);
            sc.target = TargetSet::ball(Eigen::Map<const Eigen::RowVectorXd>(c.data(), m), rad, sel);
        } else if (shape == "polytope") {
            const Matrix v = r.matrix_field(t, {"model", "target", "vertices"});
            const StepSignal sel = r.signal(r.need(t, sp), sp, n, static_cast<int>(v.cols()), 0.0);
            sc.target = TargetSet::polytope(v, sel);
        } else {
            r.fail({"model", "target", "shape"}, "unknown target shape \"" + shape + "\"");
        }
        sc.damping = r.signal(r.need(model, {"model", "damping"}), {"model", "damping"}, n, 1, 0.0);
    } else {
        r.fail(gp, "unknown generator \"" + g +
                       "\" (expected constant, intermittent, piecewise, file, appendix-a, reduction-of-discrete, "
                       "containment or aggregation)");
    }
}

void parse_delays(const Reader& r, Scenario& sc, bool delays_given) {
    const int n = sc.weights.agents();
    const json* d = r.find(r.root(), "delays");
    if (!d) {
        if (!delays_given) sc.delays = DelaySchedule::none(n);
        return;
    }
    if (r.find(*d, "file")) {
        sc.delays = r.referenced(*d, {"delays", "file"}, [](const std::string& text) { return delays_from_json(text); });
    } else {
        const Path kp{"delays", "kind"};
        const auto kind = r.get<std::string>(*d, kp);
        if (kind == "none") {
            sc.delays = DelaySchedule::none(n);
        } else if (kind == "uniform") {
            const double h = r.get<double>(*d, {"delays", "value"});
            if (!(h >= 0.0) || h > 1e3) r.fail({"delays", "value"}, "delay must lie in [0, 1000]");
            sc.delays = r.wrap(kp, [&] { return DelaySchedule::uniform(n, h); });
        } else if (kind == "matrix") {
            const Matrix h = r.matrix_field(*d, {"delays", "value"}, n, n);
            sc.delays = r.wrap({"delays", "value"}, [&] { return DelaySchedule::constant(h, h.maxCoeff()); });
        } else {
            r.fail(kp, "unknown delay kind \"" + kind + "\" (expected none, uniform, matrix or file)");
        }
    }
    if (sc.delays.agents() != n) r.fail({"delays"}, "delay schedule has the wrong number of agents");
}

void parse_initial(const Reader& r, Scenario& sc) {
    const int n = sc.weights.agents();
    const json& init = r.need(r.root(), {"initial"});
    const double h = sc.delays.bound();
    if (sc.discrete()) {
        if (const json* w = r.find(init, "window")) {
            for (const auto& item : *w) sc.window.push_back(r.matrix(item, {"initial", "window"}, n));
            if (static_cast<double>(sc.window.size()) < h + 1.0)
                r.fail({"initial", "window"}, "window must hold h + 1 states");
        } else {
            const Matrix x = r.matrix_field(init, {"initial", "state"}, n);
            sc.window.assign(static_cast<std::size_t>(std::lround(h)) + 1, x);
        }
        sc.initial = r.wrap({"initial"}, [&] { return InitialCondition::from_window(0.0, sc.window); });
        return;
    }
    const Matrix x = r.matrix_field(init, {"initial", "state"}, n);
    const auto history = r.get_or<std::string>(init, {"initial", "history"}, "constant");
    if (history == "constant") {
        sc.initial = InitialCondition::constant_history(0.0, x, h);
    } else if (history == "zero") {
        sc.initial = InitialCondition::zero_history(0.0, x, h);
    } else if (history == "steps") {
        const StepSignal phi = r.signal(r.need(init, {"initial", "prehistory"}), {"initial", "prehistory"}, n,
                                        static_cast<int>(x.cols()), -h);
        sc.initial = InitialCondition{0.0, x, phi};
    } else {
        r.fail({"initial", "history"}, "unknown history \"" + history + "\" (expected constant, zero or steps)");
    }
}

void parse_disturbance(const Reader& r, Scenario& sc) {
    const json* d = r.find(r.root(), "disturbance");
    if (!d) return;
    const int n = sc.weights.agents();
    const int m = sc.initial.dims();
    const Path kp{"disturbance", "kind"};
    const auto kind = r.get<std::string>(*d, kp);
    if (kind == "geometric" || kind == "constant-mass") {
        const Matrix amp = r.matrix_field(*d, {"disturbance", "amplitude"}, n, m);
        const double start = r.get<double>(*d, {"disturbance", "start"});
        const double period = r.positive(*d, {"disturbance", "period"});
        const double width = r.positive(*d, {"disturbance", "width"});
        const int count = r.get<int>(*d, {"disturbance", "count"});
        const double ratio = kind == "geometric" ? r.positive(*d, {"disturbance", "ratio"}) : 1.0;
        const StepSignal s =
            r.wrap(kp, [&] { return geometric_pulses(amp, start, period, width, ratio, count); });
        sc.disturbance = DisturbanceSpec{s, kind};
    } else if (kind == "steps") {
        sc.disturbance = DisturbanceSpec{r.signal(*d, {"disturbance"}, n, m, 0.0), kind};
    } else {
        r.fail(kp, "unknown disturbance kind \"" + kind + "\" (expected geometric, constant-mass or steps)");
    }
}

void parse_expect(const Reader& r, Scenario& sc) {
    const json* e = r.find(r.root(), "expect");
    if (!e) return;
    auto& x = sc.expect;
    const auto opt_bool = [&](const char* key, std::optional<bool>& out) {
        if (r.find(*e, key)) out = r.get<bool>(*e, {"expect", key});
    };
    const auto opt_num = [&](const char* key, std::optional<double>& out) {
        if (r.find(*e, key)) out = r.get<double>(*e, {"expect", key});
    };
    opt_bool("consensus", x.consensus);
    x.consensus_tolerance = r.get_or<double>(*e, {"expect", "consensus_tolerance"}, x.consensus_tolerance);
    opt_num("final_diameter_max", x.final_diameter_max);
    opt_num("final_diameter_ratio_max", x.final_diameter_ratio_max);
    opt_num("diameter_limit", x.diameter_limit);
    x.diameter_limit_tolerance =
        r.get_or<double>(*e, {"expect", "diameter_limit_tolerance"}, x.diameter_limit_tolerance);
    opt_bool("contraction", x.contraction);
    opt_num("hull_final_max", x.hull_final_max);
    opt_num("cauchy_max", x.cauchy_max);
    opt_num("reduction_max", x.reduction_max);
    opt_bool("masses_vanishing", x.masses_vanishing);
    opt_bool("tail_vanishing", x.tail_vanishing);
    opt_num("component_gap_min", x.component_gap_min);
    static const std::set<std::string> known{
        "consensus",       "consensus_tolerance", "final_diameter_max", "final_diameter_ratio_max",
        "diameter_limit",  "diameter_limit_tolerance", "contraction", "hull_final_max",
        "cauchy_max",      "reduction_max",       "masses_vanishing",   "tail_vanishing",
        "component_gap_min"};
    for (const auto& [key, value] : e->items())
        if (!known.count(key)) r.fail({"expect", key}, "unknown expectation \"" + key + "\"");
}

}  // namespace

bool Scenario::wants(const std::string& analysis) const {
    return std::find(analyses.begin(), analyses.end(), analysis) != analyses.end();
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& source) {
    const Reader r(text, source);
    Scenario sc;
    sc.source = source;
    sc.spec_version = r.get<std::string>(r.root(), {"spec_version"});
    if (sc.spec_version != kSpecVersion)
        r.fail({"spec_version"}, "unsupported spec_version \"" + sc.spec_version + "\" (this build reads " +
                                     kSpecVersion + ")");
    sc.name = r.get<std::string>(r.root(), {"name"});
    if (sc.name.empty() || sc.name.find_first_of("/\\ ") != std::string::npos)
        r.fail({"name"}, "\"name\" must be a nonempty token without slashes or spaces");
    sc.description = r.get_or<std::string>(r.root(), {"description"}, "");
    sc.covers = r.get<std::string>(r.root(), {"covers"});

    bool delays_given = false;
    parse_model(r, sc, delays_given);
    parse_delays(r, sc, delays_given);
    parse_initial(r, sc);
    parse_disturbance(r, sc);

    const auto coupling = r.get_or<std::string>(r.root(), {"coupling"}, "linear");
    if (coupling == "linear") sc.coupling = Coupling::linear;
    else if (coupling == "inverse-square") sc.coupling = Coupling::inverse_square;
    else r.fail({"coupling"}, "unknown coupling \"" + coupling + "\" (expected linear or inverse-square)");

    sc.t_end = sc.weights.horizon();
    if (const json* run = r.find(r.root(), "run")) {
        if (r.find(*run, "t_end")) sc.t_end = r.positive(*run, {"run", "t_end"});
        if (r.find(*run, "step")) sc.step = r.positive(*run, {"run", "step"});
        if (sc.t_end > sc.weights.horizon() + 1e-12) r.fail({"run", "t_end"}, "\"t_end\" exceeds the schedule horizon");
        if (sc.discrete() && sc.t_end != std::round(sc.t_end))
            r.fail({"run", "t_end"}, "discrete runs need an integer \"t_end\"");
    }
    sc.plots = r.get_or<bool>(r.root(), {"plots"}, true);

    static const std::set<std::string> analyses{"aqsc",         "nits",      "mu",       "evolution",
                                                "contraction",  "cauchy-check", "reduction-check", "hull",
                                                "disturbance",  "components"};
    sc.analyses = r.get_or<std::vector<std::string>>(r.root(), {"analyses"}, {});
    for (const auto& a : sc.analyses)
        if (!analyses.count(a)) r.fail({"analyses"}, "unknown analysis \"" + a + "\"");
    if (sc.wants("reduction-check") && !sc.discrete())
        r.fail({"analyses"}, "\"reduction-check\" needs a discrete schedule");
    if (sc.wants("hull") && !sc.leaders && !sc.target) r.fail({"analyses"}, "\"hull\" needs leaders or a target");

    if (const json* cert = r.find(r.root(), "certificate")) {
        if (r.find(*cert, "epsilon")) sc.epsilon = r.positive(*cert, {"certificate", "epsilon"});
        if (const json* nits = r.find(*cert, "nits")) {
            NitsSpec spec;
            spec.sequence = r.get_or<std::vector<double>>(*nits, {"certificate", "nits", "sequence"}, {});
            if (spec.sequence.empty()) spec.period = r.positive(*nits, {"certificate", "nits", "period"});
            spec.ratio_bound = r.positive(*nits, {"certificate", "nits", "K"});
            sc.nits = spec;
        }
    }
    if (sc.wants("nits") && !sc.nits) r.fail({"analyses"}, "\"nits\" needs certificate.nits settings");

    if (const json* comps = r.find(r.root(), "components")) {
        sc.components = r.as<std::vector<std::vector<int>>>(*comps, {"components"});
        std::set<int> seen;
        for (const auto& c : sc.components)
            for (int i : c)
                if (i < 0 || i >= sc.weights.agents() || !seen.insert(i).second)
                    r.fail({"components"}, "components must be disjoint agent indices");
    }
    if (sc.wants("components") && sc.components.size() < 2)
        r.fail({"analyses"}, "\"components\" needs at least two agent groups");

    parse_expect(r, sc);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError(path.string() + ": no such file", 0);
    return parse_scenario(read_text_file(path.string()), path);
}

}  // namespace delaylab::tools

#include "delaylab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace delaylab {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of "key" in the text, or 0.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("line " + std::to_string(line) + ": malformed JSON: " + e.what(), line);
    }
}

const json& require(const json& doc, const std::string& text, const char* key) {
    if (!doc.is_object() || !doc.contains(key))
        throw ParseError("line 1: missing field \"" + std::string(key) + "\"", 1);
    (void)text;
    return doc.at(key);
}

template <class F>
auto field(const json& doc, const std::string& text, const char* key, F&& convert) {
    const json& v = require(doc, text, key);
    try {
        return convert(v);
    } catch (const json::exception& e) {
        const int line = std::max(1, line_of_key(text, key));
        throw ParseError("line " + std::to_string(line) + ": field \"" + key + "\": " + e.what(), line);
    }
}

Matrix matrix_from(const json& rows, int n) {
    Matrix m(n, n);
    if (!rows.is_array()) throw ArgumentError("matrix must be an array");
    if (rows.size() == static_cast<std::size_t>(n) * n && (rows.empty() || rows.front().is_number())) {
        for (int k = 0; k < n * n; ++k) m(k / n, k % n) = rows.at(static_cast<std::size_t>(k)).get<double>();
        return m;
    }
    if (rows.size() != static_cast<std::size_t>(n)) throw ArgumentError("matrix must have n rows");
    for (int i = 0; i < n; ++i) {
        const json& row = rows.at(static_cast<std::size_t>(i));
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            throw ArgumentError("matrix rows must have n entries");
        for (int j = 0; j < n; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return m;
}

json matrix_to(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Matrix> segments_from(const json& doc, const std::string& text, int n) {
    const json& segs = require(doc, text, "segments");
    std::vector<Matrix> out;
    try {
        for (const auto& s : segs) out.push_back(matrix_from(s, n));
    } catch (const std::exception& e) {
        const int line = std::max(1, line_of_key(text, "segments"));
        throw ParseError("line " + std::to_string(line) + ": field \"segments\": " + e.what(), line);
    }
    return out;
}

// Schedule constructors validate the data; anchor their complaints to the document.
template <class F>
auto construct(const std::string& text, const char* anchor, F&& make) {
    try {
        return make();
    } catch (const ParseError&) {
        throw;
    } catch (const InvariantError& e) {
        // Value invariants (negative weights, non-stochastic rows) live in the segments.
        const int line = std::max(1, line_of_key(text, "segments"));
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
    } catch (const std::exception& e) {
        const int line = std::max(1, line_of_key(text, anchor));
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
    }
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

std::string weights_to_json(const WeightSchedule& s) {
    json doc;
    doc["n"] = s.agents();
    doc["kind"] = s.is_discrete() ? "discrete" : "continuous";
    doc["breakpoints"] = std::vector<double>(s.breakpoints().begin(), s.breakpoints().end());
    json segs = json::array();
    for (const auto& m : s.segments()) segs.push_back(matrix_to(m));
    doc["segments"] = std::move(segs);
    doc["horizon"] = s.horizon();
    return doc.dump(2);
}

WeightSchedule weights_from_json(const std::string& text) {
    const json doc = parse_document(text);
    const int n = field(doc, text, "n", [](const json& v) { return v.get<int>(); });
    if (n < 1) throw ParseError("line " + std::to_string(std::max(1, line_of_key(text, "n"))) + ": n must be positive",
                                std::max(1, line_of_key(text, "n")));
    const auto kind = field(doc, text, "kind", [](const json& v) { return v.get<std::string>(); });
    auto segs = segments_from(doc, text, n);
    if (kind == "discrete") return construct(text, "segments", [&] { return WeightSchedule::discrete(segs); });
    if (kind != "continuous") {
        const int line = std::max(1, line_of_key(text, "kind"));
        throw ParseError("line " + std::to_string(line) + ": unknown schedule kind \"" + kind + "\"", line);
    }
    auto bps = field(doc, text, "breakpoints", [](const json& v) { return v.get<std::vector<double>>(); });
    const double horizon = field(doc, text, "horizon", [](const json& v) { return v.get<double>(); });
    return construct(text, "breakpoints",
                     [&] { return WeightSchedule::continuous(std::move(bps), std::move(segs), horizon); });
}

std::string delays_to_json(const DelaySchedule& d) {
    json doc;
    doc["n"] = d.agents();
    switch (d.kind()) {
        case DelayKind::constant: doc["kind"] = "constant"; break;
        case DelayKind::piecewise_constant: doc["kind"] = "piecewise_constant"; break;
        case DelayKind::sawtooth: doc["kind"] = "sawtooth"; break;
    }
    doc["bound"] = d.bound();
    doc["breakpoints"] = std::vector<double>(d.breakpoints().begin(), d.breakpoints().end());
    json segs = json::array();
    for (const auto& m : d.segments()) segs.push_back(matrix_to(m));
    doc["segments"] = std::move(segs);
    return doc.dump(2);
}

DelaySchedule delays_from_json(const std::string& text) {
    const json doc = parse_document(text);
    const int n = field(doc, text, "n", [](const json& v) { return v.get<int>(); });
    if (n < 1) throw ParseError("line 1: n must be positive", 1);
    const auto kind = field(doc, text, "kind", [](const json& v) { return v.get<std::string>(); });
    const double bound = field(doc, text, "bound", [](const json& v) { return v.get<double>(); });
    auto segs = segments_from(doc, text, n);
    if (kind == "constant") {
        if (segs.size() != 1) throw ParseError("line 1: constant delays take exactly one segment", 1);
        return construct(text, "segments", [&] { return DelaySchedule::constant(segs.front(), bound); });
    }
    if (kind == "sawtooth")
        return construct(text, "segments", [&] { return DelaySchedule::sawtooth(std::move(segs), bound); });
    if (kind != "piecewise_constant") {
        const int line = std::max(1, line_of_key(text, "kind"));
        throw ParseError("line " + std::to_string(line) + ": unknown delay kind \"" + kind + "\"", line);
    }
    auto bps = field(doc, text, "breakpoints", [](const json& v) { return v.get<std::vector<double>>(); });
    return construct(text, "breakpoints",
                     [&] { return DelaySchedule::piecewise_constant(std::move(bps), std::move(segs), bound); });
}

std::string certificate_to_json(const ConnectivityCertificate& c) {
    json doc;
    doc["kind"] = to_string(c.kind);
    doc["sequence"] = c.sequence;
    doc["epsilon"] = c.epsilon;
    doc["K"] = c.ratio_bound;
    doc["ell"] = c.ell;
    doc["verified_horizon"] = c.verified_horizon;
    return doc.dump(2);
}

ConnectivityCertificate certificate_from_json(const std::string& text) {
    const json doc = parse_document(text);
    ConnectivityCertificate c;
    auto kind = field(doc, text, "kind", [](const json& v) { return v.get<std::string>(); });
    std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (kind == "aqsc") c.kind = CertificateKind::aqsc;
    else if (kind == "nits") c.kind = CertificateKind::nits;
    else if (kind == "uqsc") c.kind = CertificateKind::uqsc;
    else throw ParseError("line " + std::to_string(std::max(1, line_of_key(text, "kind"))) +
                              ": unknown certificate kind \"" + kind + "\"",
                          std::max(1, line_of_key(text, "kind")));
    c.sequence = field(doc, text, "sequence", [](const json& v) { return v.get<std::vector<double>>(); });
    c.epsilon = field(doc, text, "epsilon", [](const json& v) { return v.get<double>(); });
    c.ratio_bound = field(doc, text, "K", [](const json& v) { return v.get<double>(); });
    c.ell = field(doc, text, "ell", [](const json& v) { return v.get<double>(); });
    c.verified_horizon = field(doc, text, "verified_horizon", [](const json& v) { return v.get<double>(); });
    return c;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,agent,coord,value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const std::string t = format_number(traj.times[k]);
        const Matrix& x = traj.states[k];
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index c = 0; c < x.cols(); ++c)
                out << t << ',' << i << ',' << c << ',' << format_number(x(i, c)) << '\n';
    }
}

void write_diameter_csv(std::ostream& out, const DiameterSeries& series) {
    out << "t,D\n";
    for (std::size_t k = 0; k < series.times.size(); ++k)
        out << format_number(series.times[k]) << ',' << format_number(series.values[k]) << '\n';
}

void write_matrix_csv(std::ostream& out, const EvolutionaryMatrix& u) {
    out << "# t_star=" << format_number(u.from) << ",t=" << format_number(u.to) << '\n';
    for (Eigen::Index i = 0; i < u.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.matrix.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_number(u.matrix(i, j));
        }
        out << '\n';
    }
}

}  // namespace delaylab

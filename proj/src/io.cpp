#include "loewner/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "loewner/errors.hpp"
#include "loewner/rng.hpp"

namespace loewner {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string driver_to_csv(const Driver& d) {
    std::string out = "t,w\n";
    for (std::size_t k = 0; k < d.times.size(); ++k) {
        out += format_double(d.times[k]);
        out += ',';
        out += format_double(d.values[k]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           const std::string& header,
                                           std::size_t cols) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw FormatError("expected CSV header '" + header + "'");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != cols)
            throw FormatError("malformed CSV row: " + line);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("CSV has no data rows");
    return rows;
}

} // namespace

Driver driver_from_csv(const std::string& text, Mode mode) {
    const auto rows = parse_csv(text, "t,w", 2);
    std::vector<double> times, values;
    for (const auto& r : rows) {
        times.push_back(r[0]);
        values.push_back(r[1]);
    }
    return make_driver(std::move(times), std::move(values), mode);
}

std::string trace_to_csv(const Trace& g) {
    std::string out = "t,re,im\n";
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        out += format_double(g.cap_times[k]);
        out += ',';
        out += format_double(g.points[k].real());
        out += ',';
        out += format_double(g.points[k].imag());
        out += '\n';
    }
    return out;
}

Trace trace_from_csv(const std::string& text, Mode mode) {
    const auto rows = parse_csv(text, "t,re,im", 3);
    Trace g;
    g.mode = mode;
    for (const auto& r : rows) {
        g.cap_times.push_back(r[0]);
        g.points.emplace_back(r[1], r[2]);
    }
    validate_trace(g);
    return g;
}

std::string theta_to_csv(const ThetaPath& p) {
    std::string out = "t,theta\n";
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        out += format_double(p.times[k]);
        out += ',';
        out += format_double(p.values[k]);
        out += '\n';
    }
    return out;
}

PatternSpec pattern_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("pattern JSON: ") + e.what());
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& pr : j.at("pairs"))
        pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    PatternSpec spec;
    spec.pattern = validate_link_pattern(std::move(pairs));
    if (j.contains("n") && j.at("n").get<int>() != spec.pattern.n)
        throw FormatError("pattern JSON: n does not match the pair count");
    spec.points = j.at("points").get<std::vector<double>>();
    if (static_cast<int>(spec.points.size()) != 2 * spec.pattern.n)
        throw FormatError("pattern JSON: need exactly 2n points");
    return spec;
}

std::string pattern_to_json(const LinkPattern& pattern,
                            const std::vector<double>& points) {
    nlohmann::json j;
    j["n"] = pattern.n;
    j["pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : pattern.pairs) j["pairs"].push_back({a, b});
    j["points"] = points;
    return j.dump() + "\n";
}

std::string rate_cells_to_csv(const std::vector<RateCell>& cells) {
    std::string out = "kappa,samples,hits,p_hat,ci_lo,ci_hi,klogp,flag\n";
    for (const auto& c : cells) {
        out += format_double(c.kappa);
        out += ',' + std::to_string(c.samples);
        out += ',' + std::to_string(c.hits);
        out += ',' + format_double(c.p_hat);
        out += ',' + format_double(c.ci_lo);
        out += ',' + format_double(c.ci_hi);
        out += ',' + (c.flag == "ok" ? format_double(c.klogp) : std::string("nan"));
        out += ',' + c.flag;
        out += '\n';
    }
    return out;
}

std::string return_rows_to_csv(const std::vector<ReturnProbRow>& rows) {
    std::string out = "kappa,n,N,samples,hits,not_yet,p_hat,ci_lo,ci_hi\n";
    for (const auto& r : rows) {
        out += format_double(r.kappa);
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.N);
        out += ',' + std::to_string(r.samples);
        out += ',' + std::to_string(r.hits);
        out += ',' + std::to_string(r.not_yet);
        out += ',' + format_double(r.p_hat);
        out += ',' + format_double(r.ci_lo);
        out += ',' + format_double(r.ci_hi);
        out += '\n';
    }
    return out;
}

std::string rn_rows_to_csv(const std::vector<RnCheckRow>& rows) {
    std::string out = "sample,t,tau_delta,weight\n";
    for (const auto& r : rows) {
        out += std::to_string(r.sample);
        out += ',' + format_double(r.t);
        out += ',' + format_double(r.tau_delta);
        out += ',' + format_double(r.weight);
        out += '\n';
    }
    return out;
}

std::string tightness_rows_to_csv(const std::vector<TightnessRow>& rows) {
    std::string out =
        "kappa,n,samples,h_violations,l_violations,freq_h,freq_l,"
        "asymptotic_bound_c1\n";
    for (const auto& r : rows) {
        out += format_double(r.kappa);
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.samples);
        out += ',' + std::to_string(r.h_violations);
        out += ',' + std::to_string(r.l_violations);
        out += ',' + format_double(r.freq_h);
        out += ',' + format_double(r.freq_l);
        out += ',' + format_double(r.asymptotic_bound_c1);
        out += '\n';
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << content;
}

std::string string_digest(const std::string& content) {
    const std::uint64_t h = fnv1a64(content.data(), content.size());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::string& path) {
    return string_digest(read_file(path));
}

} // namespace loewner

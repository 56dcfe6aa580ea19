#ifndef LOEWNER_IO_HPP
#define LOEWNER_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "loewner/bessel.hpp"
#include "loewner/driver.hpp"
#include "loewner/harness.hpp"
#include "loewner/multichordal.hpp"
#include "loewner/radial.hpp"
#include "loewner/trace.hpp"

namespace loewner {

// Shortest round-trip decimal formatting, locale-independent; every CSV
// number goes through here so outputs are byte-stable.
std::string format_double(double x);

// Driver CSV: header `t,w`, first row `0,0`.
std::string driver_to_csv(const Driver& d);
Driver driver_from_csv(const std::string& text, Mode mode);

// Trace CSV: header `t,re,im`.
std::string trace_to_csv(const Trace& g);
Trace trace_from_csv(const std::string& text, Mode mode);

// ThetaPath CSV: header `t,theta`.
std::string theta_to_csv(const ThetaPath& p);

// Link-pattern JSON: {"n":2,"pairs":[[1,2],[3,4]],"points":[-2,-1,1,2]}.
struct PatternSpec {
    LinkPattern pattern;
    std::vector<double> points;
};
PatternSpec pattern_from_json(const std::string& text);
std::string pattern_to_json(const LinkPattern& pattern,
                            const std::vector<double>& points);

// Experiment tables (schemas documented in the README).
std::string rate_cells_to_csv(const std::vector<RateCell>& cells);
std::string return_rows_to_csv(const std::vector<ReturnProbRow>& rows);
std::string rn_rows_to_csv(const std::vector<RnCheckRow>& rows);
std::string tightness_rows_to_csv(const std::vector<TightnessRow>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a digest of a file's bytes, as a fixed-width hex string.
std::string file_digest(const std::string& path);
std::string string_digest(const std::string& content);

} // namespace loewner

#endif

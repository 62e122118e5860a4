#ifndef ZIC_CLI_HPP
#define ZIC_CLI_HPP

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace zic::cli {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kValidation = 2, kOracleMismatch = 3 };

// raw option values keyed by long flag name; anything missing takes the subcommand default
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::string output = "-";
    std::string format = "json";
};

struct Report {
    Json config = Json::object();
    Json results = Json::object();
    Json checks = Json::array();
    std::vector<std::string> columns;  // the table, also copied into results.table
    std::vector<std::vector<Json>> rows;

    bool all_pass() const;
};

struct OptionSpec {
    std::string name;
    std::string fallback;  // empty: computed default, echoed after resolution
    std::string help;
    bool flag = false;
};

struct SubcommandSpec {
    std::string name;
    std::string help;
    std::vector<OptionSpec> options;
};

const std::vector<SubcommandSpec>& subcommands();

// lo:hi:step, comma lists, or a single number
std::vector<double> parse_values(const std::string& text);

// throws zic::Error on validation or numerical failure
Report execute(const RunConfig& config);

std::string render_json(const Report& r);
// header then rows, RFC 4180 quoting
std::string render_csv(const Report& r);

// executes, writes the report (plus <output>.meta.json for csv files) and returns the exit code
int run(const RunConfig& config);

// argv front end
int main(int argc, const char* const* argv);

}  // namespace zic::cli

#endif

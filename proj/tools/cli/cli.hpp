#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace radfed::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    /// A grid cell failed, or an unexpected error.
    kFailure = 1,
    /// Bad flags, manifest or input files.
    kConfigError = 2,
    /// The requested partition cannot exist.
    kInfeasible = 3,
};

struct GenOptions {
    int classes = 2;
    int features = 2;
    double separation = 3.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::vector<int> categorical;
    std::string out;
    /// Defaults to the output path with ".schema.json" in place of the extension.
    std::optional<std::string> schema_out;
};

/// Flags left unset fall back to the manifest given by `config`, then to built-in defaults.
struct PartitionOptions {
    std::optional<std::string> config;
    std::optional<std::string> input;
    std::optional<std::string> schema;
    std::optional<std::string> label_col;
    std::optional<std::vector<std::string>> categorical;
    std::optional<int> clients;
    std::optional<double> mu;
    std::optional<double> lambda;
    std::optional<double> theta;
    std::optional<std::vector<std::string>> features;
    std::optional<std::int64_t> burn_in;
    std::optional<std::int64_t> steps;
    std::optional<double> xi;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct RunOptions {
    std::string config;
    std::string partition;
    std::vector<std::string> algorithms;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

struct MetricsOptions {
    std::string run_dir;
    std::optional<std::string> out;
};

int cmd_gen(const GenOptions& options, std::ostream& out);
int cmd_partition(const PartitionOptions& options, std::ostream& out);
int cmd_run(const RunOptions& options, std::ostream& out);
int cmd_metrics(const MetricsOptions& options, std::ostream& out);

/// Parses `args` (without the program name), runs the subcommand and maps errors to exit
/// codes. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radfed::cli

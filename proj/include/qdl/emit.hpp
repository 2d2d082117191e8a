#pragma once

#include <string>
#include <vector>

#include "qdl/config.hpp"
#include "qdl/sweep.hpp"

namespace qdl {

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

/// 12 significant digits, "%.12g" in the C locale.
std::string format_number(double x);

/// Column order: axis (or "point"), the requested outputs (all of
/// output_labels() when none are requested), then the diagnostics
/// residual, trace_error, min_eigenvalue, n_max1, n_max2, converged,
/// convergence_change, status, message, warnings.
std::vector<std::string> result_columns(const RunConfig& cfg);

/// CSV marks undefined values (and every observable of a failed row) as NA;
/// JSON uses null and embeds the config without workers and output_path.
std::string format_results(const std::vector<ResultRow>& rows, const RunConfig& cfg, OutputFormat format);

/// Reads rows back from format_results(..., json). Columns absent from the
/// document keep their defaults.
std::vector<ResultRow> parse_results_json(const std::string& text);

std::string format_kernel_table(const std::vector<KernelTableRow>& table, const PhononKernels& kernels,
                                OutputFormat format);

/// Writes to `path`, or to stdout for "" and "-". Throws Error when the
/// file cannot be written.
void write_output(const std::string& text, const std::string& path);

void emit_results(const std::vector<ResultRow>& rows, const RunConfig& cfg, OutputFormat format,
                  const std::string& path);

}  // namespace qdl

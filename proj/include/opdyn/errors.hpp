#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

/// Failure categories surfaced by the library. The CLI maps parse/io
/// failures to exit code 2 and everything else to exit code 1.
enum class errc {
    singular_matrix,
    non_convergence,
    not_substochastic,
    too_few_nodes,
    endpoint_out_of_range,
    dimension_mismatch,
    assumption_violated,
    mapping_degenerate,
    edge_not_in_graph,
    validation_error,
    parse_error,
    io_error,
    internal_error,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace opdyn

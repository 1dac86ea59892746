#pragma once

#include <stdexcept>
#include <string>

namespace debfab {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Bad digit, bad textual form, or mixing labels of different (d, m).
struct label_error : error {
    using error::error;
};

// Parameter combinations a builder or encoder cannot honor.
struct config_error : error {
    using error::error;
};

// Random topology construction ran out of retries.
struct generation_error : error {
    using error::error;
};

// No route exists between the requested endpoints.
struct no_path_error : error {
    using error::error;
};

// Controller has no record of the requested VM.
struct unknown_destination_error : error {
    using error::error;
};

// Identifier flow requested for a VM not attached to that switch.
struct misplacement_error : error {
    using error::error;
};

// Packet walk failed: forwarding loop, misdelivery, or a broken table.
struct trace_error : error {
    using error::error;
};

}  // namespace debfab

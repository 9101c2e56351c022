// errors.hpp — error taxonomy shared by the library and the CLI exit-code mapping.
#pragma once

#include <stdexcept>
#include <string>

namespace bridgewalk {

enum class errc {
    usage,                 // bad flags / unknown subcommand
    config,                // malformed or invalid experiment config
    invalid_spec,          // model parameters out of range
    symmetry,              // step law is not symmetric
    budget,                // memory or op budget exceeded
    period,                // n is not a multiple of the walk period (u_n = 0)
    unsupported,           // operation not available for this model
    unsupported_distance,  // word metric not implemented for this model
    unreachable_state,     // conditioning kernel vanished mid-bridge
    instability,           // numerical instability beyond tolerance
    divergence,            // series evaluated outside its radius of convergence
    starvation,            // rejection sampler exceeded max attempts
    io,
    internal,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::usage: return "usage";
        case errc::config: return "config";
        case errc::invalid_spec: return "invalid-spec";
        case errc::symmetry: return "symmetry";
        case errc::budget: return "budget";
        case errc::period: return "period";
        case errc::unsupported: return "unsupported";
        case errc::unsupported_distance: return "unsupported-distance";
        case errc::unreachable_state: return "unreachable-state";
        case errc::instability: return "instability";
        case errc::divergence: return "divergence";
        case errc::starvation: return "starvation";
        case errc::io: return "io";
        case errc::internal: return "internal";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

    errc code() const { return code_; }

    // CLI contract: usage/config -> 2, budget/period -> 3, everything else -> 1.
    int exit_code() const {
        switch (code_) {
            case errc::usage:
            case errc::config: return 2;
            case errc::budget:
            case errc::period: return 3;
            default: return 1;
        }
    }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace bridgewalk

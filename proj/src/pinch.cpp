#include "blowup/pinch.hpp"

namespace blowup {

std::string to_string(PinchMode m) {
    switch (m) {
        case PinchMode::one_sided: return "one-sided";
        case PinchMode::oscillating: return "oscillating";
        case PinchMode::general: return "general";
    }
    return "unknown";
}

PinchMode parse_pinch_mode(const std::string& s) {
    if (s == "one-sided" || s == "one_sided") return PinchMode::one_sided;
    if (s == "oscillating") return PinchMode::oscillating;
    if (s == "general") return PinchMode::general;
    throw DomainError("unknown pinch mode '" + s + "'");
}

}  // namespace blowup

#include "merton/errors.hpp"

namespace merton {

const char* to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Usage: return "usage";
        case ErrorCategory::Data: return "data";
        case ErrorCategory::Numerical: return "numerical";
        case ErrorCategory::Io: return "io";
    }
    return "unknown";
}

}  // namespace merton

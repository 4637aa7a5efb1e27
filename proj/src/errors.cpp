#include "srspos/errors.hpp"

namespace srspos {

const char* error_category_name(error_category cat) noexcept {
    switch (cat) {
        case error_category::config: return "config";
        case error_category::format: return "format";
        case error_category::validation: return "validation";
        case error_category::provenance: return "provenance";
        case error_category::io: return "io";
        case error_category::internal: return "internal";
    }
    return "unknown";
}

}  // namespace srspos

#pragma once

#include <stdexcept>
#include <string>

namespace srspos {

// Error categories double as CLI exit codes.
enum class error_category : int {
    config = 2,      // bad run configuration or scenario file
    format = 3,      // malformed log / dataset / checkpoint content
    validation = 4,  // value outside its contract
    provenance = 5,  // split-isolation violation
    io = 6,          // filesystem failure
    internal = 10,   // divergence and other runtime faults
};

const char* error_category_name(error_category cat) noexcept;

class error : public std::runtime_error {
  public:
    error(error_category cat, const std::string& msg) : std::runtime_error(msg), cat_(cat) {}
    error_category category() const noexcept { return cat_; }

  private:
    error_category cat_;
};

struct config_error : error {
    explicit config_error(const std::string& m) : error(error_category::config, m) {}
};

struct format_error : error {
    explicit format_error(const std::string& m) : error(error_category::format, m) {}
};

struct validation_error : error {
    explicit validation_error(const std::string& m) : error(error_category::validation, m) {}
};

struct provenance_error : error {
    explicit provenance_error(const std::string& m) : error(error_category::provenance, m) {}
};

struct io_error : error {
    explicit io_error(const std::string& m) : error(error_category::io, m) {}
};

struct internal_error : error {
    explicit internal_error(const std::string& m) : error(error_category::internal, m) {}
};

}  // namespace srspos
